#include "biaslens/text.hpp"

namespace biaslens::text {

StemmerRegistry StemmerRegistry::with_defaults() {
  StemmerRegistry r;
  r.add("en", [](std::string_view w) { return porter_stem(w); });
  return r;
}

std::string StemmerRegistry::stem(const std::string& edition, std::string_view word) const {
  auto it = stemmers_.find(edition);
  if (it == stemmers_.end()) return std::string(word);
  return it->second(word);
}

const StemmerRegistry& default_stemmers() {
  static const StemmerRegistry registry = StemmerRegistry::with_defaults();
  return registry;
}

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c0 = static_cast<unsigned char>(s[i]);
    char32_t cp;
    std::size_t len;
    if (c0 < 0x80) {
      cp = c0;
      len = 1;
    } else if ((c0 & 0xE0) == 0xC0) {
      cp = c0 & 0x1F;
      len = 2;
    } else if ((c0 & 0xF0) == 0xE0) {
      cp = c0 & 0x0F;
      len = 3;
    } else if ((c0 & 0xF8) == 0xF0) {
      cp = c0 & 0x07;
      len = 4;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

// Letter ranges for the alphabetic scripts of the major encyclopedia
// editions; punctuation, digits and symbols inside these blocks are excluded.
bool is_letter(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp < 0xAA) return false;
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  if (cp >= 0x250 && cp <= 0x2AF) return true;                 // IPA
  if (cp >= 0x370 && cp <= 0x3FF)                              // Greek
    return cp != 0x374 && cp != 0x375 && cp != 0x37E && cp != 0x384 && cp != 0x385 &&
           cp != 0x387 && cp != 0x3F6;
  if (cp >= 0x400 && cp <= 0x52F) return cp < 0x482 || cp > 0x489;  // Cyrillic
  if (cp >= 0x531 && cp <= 0x556) return true;                  // Armenian
  if (cp >= 0x561 && cp <= 0x587) return true;
  if (cp >= 0x5D0 && cp <= 0x5EA) return true;                  // Hebrew
  if (cp >= 0x620 && cp <= 0x64A) return true;                  // Arabic
  if (cp >= 0x904 && cp <= 0x939) return true;                  // Devanagari
  if (cp >= 0x10A0 && cp <= 0x10FF) return true;                // Georgian
  if (cp >= 0x1E00 && cp <= 0x1EFF) return true;                // Latin Extended Additional
  if (cp >= 0x1F00 && cp <= 0x1FFF)                             // Greek Extended
    return cp != 0x1FBD && !(cp >= 0x1FBF && cp <= 0x1FC1) && !(cp >= 0x1FCD && cp <= 0x1FCF) &&
           !(cp >= 0x1FDD && cp <= 0x1FDF) && !(cp >= 0x1FED && cp <= 0x1FEF) && cp < 0x1FFD;
  if (cp >= 0x3041 && cp <= 0x30FF) return cp != 0x30A0 && cp != 0x30FB;  // kana
  if (cp >= 0x4E00 && cp <= 0x9FFF) return true;                // CJK
  if (cp >= 0xAC00 && cp <= 0xD7A3) return true;                // Hangul
  return false;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0xC0) return cp;
  if (cp <= 0xDE) return cp == 0xD7 ? cp : cp + 32;
  if (cp >= 0x100 && cp <= 0x17F) {
    if (cp == 0x130) return 'i';
    if (cp == 0x178) return 0xFF;
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E))
      return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3AB) return cp == 0x3A2 ? cp : cp + 32;
  if (cp == 0x386) return 0x3AC;
  if (cp >= 0x388 && cp <= 0x38A) return cp + 37;
  if (cp == 0x38C) return 0x3CC;
  if (cp == 0x38E || cp == 0x38F) return cp + 63;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if ((cp >= 0x460 && cp <= 0x481) || (cp >= 0x48A && cp <= 0x4BF) ||
      (cp >= 0x4D0 && cp <= 0x52F))
    return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x4C1 && cp <= 0x4CE) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x531 && cp <= 0x556) return cp + 48;
  if (cp == 0x1E9E) return 0xDF;
  if ((cp >= 0x1E00 && cp <= 0x1E95) || (cp >= 0x1EA0 && cp <= 0x1EFF))
    return (cp % 2 == 0) ? cp + 1 : cp;
  return cp;
}

std::vector<std::string> tokenize(std::string_view text, const std::string& edition,
                                  const StemmerRegistry& stemmers,
                                  std::vector<std::string>* warnings) {
  const bool has_stemmer = stemmers.has(edition);
  if (!has_stemmer && warnings)
    warnings->push_back("no stemmer registered for edition '" + edition +
                        "'; using identity stemmer");
  std::vector<std::string> tokens;
  const std::u32string cps = decode_utf8(text);
  std::u32string word;
  auto flush = [&] {
    if (word.size() >= 2) {
      const std::string w = encode_utf8(word);
      tokens.push_back(has_stemmer ? stemmers.stem(edition, w) : w);
    }
    word.clear();
  };
  for (char32_t cp : cps) {
    if (is_letter(cp))
      word.push_back(to_lower(cp));
    else
      flush();
  }
  flush();
  return tokens;
}

}  // namespace biaslens::text
