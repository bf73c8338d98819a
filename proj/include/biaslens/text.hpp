#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace biaslens::text {

/// Porter suffix-stripping stemmer for lowercase English words. Words holding
/// any non-ASCII byte are returned unchanged.
std::string porter_stem(std::string_view word);

using Stemmer = std::function<std::string(std::string_view)>;

/// Stemmers keyed by edition code. The default registry ships "en" only.
class StemmerRegistry {
 public:
  static StemmerRegistry with_defaults();

  void add(std::string edition, Stemmer stemmer) { stemmers_[std::move(edition)] = std::move(stemmer); }
  bool has(const std::string& edition) const { return stemmers_.count(edition) > 0; }
  /// Identity stemmer for unregistered editions.
  std::string stem(const std::string& edition, std::string_view word) const;

 private:
  std::map<std::string, Stemmer> stemmers_;
};

const StemmerRegistry& default_stemmers();

// UTF-8 helpers. Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
bool is_letter(char32_t cp);
char32_t to_lower(char32_t cp);

/// Lowercases, splits on non-letter boundaries, drops tokens shorter than two
/// letters and stems each token with the edition's stemmer. An unregistered
/// edition falls back to the identity stemmer and appends a warning.
std::vector<std::string> tokenize(std::string_view text, const std::string& edition,
                                  const StemmerRegistry& stemmers = default_stemmers(),
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace biaslens::text
