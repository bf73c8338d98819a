#include "biaslens/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "biaslens/util.hpp"

namespace biaslens::ingest {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_lines(const std::string& content) {
  std::string_view view(content);
  if (view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < view.size()) {
    std::size_t end = view.find('\n', start);
    if (end == std::string_view::npos) end = view.size();
    std::string_view line = view.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<bool> parse_bool(const std::string& s) {
  const std::string v = lower(s);
  if (v.empty() || v == "0" || v == "false" || v == "no" || v == "n") return false;
  if (v == "1" || v == "true" || v == "yes" || v == "y") return true;
  return std::nullopt;
}

template <typename Int>
std::optional<Int> parse_int(const std::string& s) {
  Int v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(const std::string& s) {
  double v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

bool is_unknown_label(const std::string& s) {
  const std::string v = lower(s);
  return v.empty() || v == "unknown" || v == "na" || v == "n/a" || v == "none" || v == "?";
}

std::string join(const auto& items, char sep) {
  std::string out;
  bool first = true;
  for (const auto& item : items) {
    if (!first) out.push_back(sep);
    out += item;
    first = false;
  }
  return out;
}

template <typename T>
Parsed<T> load_with(const fs::path& path, Parsed<T> (*parse)(const std::string&, const std::string&)) {
  return parse(read_file(path), path.string());
}

// Two-column TSV; returns (line number, first, second) for well-formed rows.
struct Pair {
  std::size_t line;
  std::string first;
  std::string second;
};

std::vector<Pair> parse_pairs(const std::string& content, const std::string& name,
                              std::vector<Issue>& issues) {
  std::vector<Pair> out;
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split(lines[i], '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      issues.push_back({name, i + 1, "expected two non-empty tab-separated columns"});
      continue;
    }
    out.push_back({i + 1, fields[0], fields[1]});
  }
  return out;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IngestError("write failed for '" + path.string() + "'");
}

// ---- entities -------------------------------------------------------------

Parsed<EntityTable> parse_entities(const std::string& content, const std::string& name) {
  Parsed<EntityTable> result;
  auto& issues = result.issues;
  const auto lines = split_lines(content);
  if (lines.empty()) throw IngestError(name + ": empty file (missing header)");
  const auto header = split(lines[0], '\t');

  std::map<std::string, std::size_t> col;
  std::vector<std::string> editions;
  std::map<std::string, std::size_t> covered_col, length_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    col.emplace(h, i);
    auto add_edition = [&](const std::string& ed) {
      if (std::find(editions.begin(), editions.end(), ed) == editions.end()) editions.push_back(ed);
    };
    if (h.rfind("covered_", 0) == 0) {
      covered_col[h.substr(8)] = i;
      add_edition(h.substr(8));
    } else if (h.rfind("length_", 0) == 0) {
      length_col[h.substr(7)] = i;
      add_edition(h.substr(7));
    }
  }
  for (const char* required : {"id", "gender", "datasets"})
    if (!col.count(required))
      throw IngestError(name + ": missing required column '" + required + "'");
  const std::optional<std::size_t> featured_col =
      col.count("featured_years") ? std::optional(col.at("featured_years")) : std::nullopt;

  struct Row {
    Entity entity;
    std::string group_name;
  };
  std::vector<Row> rows;
  std::set<std::string> ids;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    if (lines[li].empty()) continue;
    const auto fields = split(lines[li], '\t');
    if (fields.size() != header.size()) {
      issues.push_back({name, line_no,
                        "expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size())});
      continue;
    }
    Row row;
    row.entity.id = fields[col.at("id")];
    if (row.entity.id.empty()) {
      issues.push_back({name, line_no, "empty id"});
      continue;
    }
    row.group_name = fields[col.at("gender")];
    if (is_unknown_label(row.group_name)) {
      issues.push_back({name, line_no, "entity '" + row.entity.id + "' has unknown group label; excluded"});
      continue;
    }
    if (ids.count(row.entity.id)) {
      issues.push_back({name, line_no, "duplicate id '" + row.entity.id + "'; row skipped"});
      continue;
    }
    for (const auto& d : split(fields[col.at("datasets")], ','))
      if (!d.empty()) row.entity.datasets.insert(d);

    bool ok = true;
    for (const auto& ed : editions) {
      bool covered = false;
      if (auto it = covered_col.find(ed); it != covered_col.end()) {
        auto v = parse_bool(fields[it->second]);
        if (!v) {
          issues.push_back({name, line_no, "bad boolean in covered_" + ed});
          ok = false;
          break;
        }
        covered = *v;
      }
      row.entity.covered[ed] = covered;
      if (auto it = length_col.find(ed); it != length_col.end() && !fields[it->second].empty()) {
        auto v = parse_int<std::uint64_t>(fields[it->second]);
        if (!v) {
          issues.push_back({name, line_no, "bad integer in length_" + ed});
          ok = false;
          break;
        }
        if (!covered) {
          issues.push_back({name, line_no, "length_" + ed + " set but not covered"});
          ok = false;
          break;
        }
        row.entity.article_length[ed] = *v;
      }
    }
    if (ok && featured_col) {
      for (const auto& y : split(fields[*featured_col], ',')) {
        if (y.empty()) continue;
        auto v = parse_int<int>(y);
        if (!v) {
          issues.push_back({name, line_no, "bad year in featured_years"});
          ok = false;
          break;
        }
        row.entity.featured_years.insert(*v);
      }
    }
    if (!ok) continue;
    ids.insert(row.entity.id);
    rows.push_back(std::move(row));
  }

  std::set<std::string> names;
  for (const auto& r : rows) names.insert(r.group_name);
  std::vector<GroupLabel> groups;
  std::map<std::string, GroupId> by_name;
  for (const auto& n : names) {
    GroupId id{groups.size()};
    groups.push_back({id, n});
    by_name[n] = id;
  }
  std::vector<Entity> entities;
  entities.reserve(rows.size());
  for (auto& r : rows) {
    r.entity.group = by_name.at(r.group_name);
    entities.push_back(std::move(r.entity));
  }
  result.value = EntityTable(std::move(groups), std::move(entities), std::move(editions));
  return result;
}

Parsed<EntityTable> load_entities(const fs::path& path) { return load_with(path, &parse_entities); }

std::string format_entities(const EntityTable& table) {
  std::string out = "id\tgender\tdatasets";
  for (const auto& ed : table.editions()) out += "\tcovered_" + ed;
  for (const auto& ed : table.editions()) out += "\tlength_" + ed;
  out += "\tfeatured_years\n";
  for (const auto& e : table.entities()) {
    out += e.id + "\t" + table.group_name(e.group) + "\t" + join(e.datasets, ',');
    for (const auto& ed : table.editions()) out += e.is_covered(ed) ? "\t1" : "\t0";
    for (const auto& ed : table.editions()) {
      out += "\t";
      if (auto it = e.article_length.find(ed); it != e.article_length.end())
        out += std::to_string(it->second);
    }
    std::vector<std::string> years;
    for (int y : e.featured_years) years.push_back(std::to_string(y));
    out += "\t" + join(years, ',') + "\n";
  }
  return out;
}

// ---- edges / featured / lexicons / ranking ---------------------------------

Parsed<std::vector<Edge>> parse_edges(const std::string& content, const std::string& name) {
  Parsed<std::vector<Edge>> result;
  for (auto& p : parse_pairs(content, name, result.issues))
    result.value.emplace_back(std::move(p.first), std::move(p.second));
  return result;
}

Parsed<std::vector<Edge>> load_edges(const fs::path& path) { return load_with(path, &parse_edges); }

std::string format_edges(const std::vector<Edge>& edges) {
  std::string out;
  for (const auto& [a, b] : edges) out += a + "\t" + b + "\n";
  return out;
}

Parsed<std::vector<FeaturedEntry>> parse_featured(const std::string& content,
                                                  const std::string& name) {
  Parsed<std::vector<FeaturedEntry>> result;
  for (auto& p : parse_pairs(content, name, result.issues)) {
    auto year = parse_int<int>(p.second);
    if (!year) {
      result.issues.push_back({name, p.line, "bad year '" + p.second + "'"});
      continue;
    }
    result.value.push_back({std::move(p.first), *year});
  }
  return result;
}

Parsed<std::vector<FeaturedEntry>> load_featured(const fs::path& path) {
  return load_with(path, &parse_featured);
}

std::string format_featured(const std::vector<FeaturedEntry>& log) {
  std::string out;
  for (const auto& f : log) out += f.entity_id + "\t" + std::to_string(f.year) + "\n";
  return out;
}

Parsed<Lexicons> parse_lexicons(const std::string& content, const std::string& name) {
  Parsed<Lexicons> result;
  for (auto& p : parse_pairs(content, name, result.issues)) {
    auto cat = category_from_string(p.second);
    if (!cat || *cat == Category::Others) {
      result.issues.push_back({name, p.line, "unknown category '" + p.second + "'"});
      continue;
    }
    auto [it, inserted] = result.value.emplace(p.first, *cat);
    if (!inserted && it->second != *cat)
      throw IngestError(name + ":" + std::to_string(p.line) + ": stem '" + p.first +
                        "' listed under both " + to_string(it->second) + " and " +
                        to_string(*cat));
  }
  return result;
}

Parsed<Lexicons> load_lexicons(const fs::path& path) { return load_with(path, &parse_lexicons); }

std::string format_lexicons(const Lexicons& lexicons) {
  std::string out;
  for (const auto& [stem, cat] : lexicons) out += stem + "\t" + to_string(cat) + "\n";
  return out;
}

Parsed<std::map<std::string, double>> parse_ranking(const std::string& content,
                                                    const std::string& name) {
  Parsed<std::map<std::string, double>> result;
  for (auto& p : parse_pairs(content, name, result.issues)) {
    auto v = parse_double(p.second);
    if (!v) {
      result.issues.push_back({name, p.line, "bad number '" + p.second + "'"});
      continue;
    }
    result.value[p.first] = *v;
  }
  return result;
}

Parsed<std::map<std::string, double>> load_ranking(const fs::path& path) {
  return load_with(path, &parse_ranking);
}

std::string format_ranking(const std::map<std::string, double>& ranking) {
  std::string out;
  for (const auto& [ed, v] : ranking) out += ed + "\t" + format_number(v) + "\n";
  return out;
}

// ---- corpus ----------------------------------------------------------------

Parsed<std::vector<Document>> parse_corpus(const std::string& content, const std::string& name) {
  Parsed<std::vector<Document>> result;
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      const auto j = nlohmann::json::parse(lines[i]);
      Document d{j.at("id").get<std::string>(), j.at("edition").get<std::string>(),
                 j.at("text").get<std::string>()};
      if (d.text.empty()) {
        result.issues.push_back({name, i + 1, "empty text for '" + d.entity_id + "'"});
        continue;
      }
      result.value.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      result.issues.push_back({name, i + 1, std::string("bad JSON line: ") + e.what()});
    }
  }
  return result;
}

Parsed<std::vector<Document>> load_corpus(const fs::path& path) {
  return load_with(path, &parse_corpus);
}

std::string format_corpus(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    const nlohmann::json j = {{"id", d.entity_id}, {"edition", d.edition}, {"text", d.text}};
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
  }
  return out;
}

// ---- bundles ---------------------------------------------------------------

BundlePaths BundlePaths::in_directory(const fs::path& dir, const std::vector<std::string>& editions) {
  BundlePaths p;
  p.entities = dir / "entities.tsv";
  for (const auto& ed : editions) {
    if (fs::exists(dir / ("edges_" + ed + ".tsv"))) p.edges[ed] = dir / ("edges_" + ed + ".tsv");
    if (fs::exists(dir / ("corpus_" + ed + ".jsonl")))
      p.corpus[ed] = dir / ("corpus_" + ed + ".jsonl");
  }
  if (fs::exists(dir / "featured.tsv")) p.featured = dir / "featured.tsv";
  if (fs::exists(dir / "lexicons.tsv")) p.lexicons = dir / "lexicons.tsv";
  if (fs::exists(dir / "ranking.tsv")) p.external_ranking = dir / "ranking.tsv";
  return p;
}

Parsed<DatasetBundle> load_bundle(const BundlePaths& paths, bool dedupe_edges) {
  Parsed<DatasetBundle> result;
  auto& b = result.value;
  auto take = [&](auto parsed) {
    result.issues.insert(result.issues.end(), parsed.issues.begin(), parsed.issues.end());
    return std::move(parsed.value);
  };
  b.table = take(load_entities(paths.entities));
  for (const auto& [ed, path] : paths.edges)
    b.graphs[ed] = induced_graph(b.table, ed, take(load_edges(path)), dedupe_edges);
  for (const auto& [ed, path] : paths.corpus) {
    auto docs = take(load_corpus(path));
    auto& target = b.corpus[ed];
    for (auto& d : docs) {
      if (d.edition != ed) {
        result.issues.push_back({path.string(), 0,
                                 "document '" + d.entity_id + "' has edition '" + d.edition +
                                     "', expected '" + ed + "'; skipped"});
        continue;
      }
      target.push_back(std::move(d));
    }
  }
  if (paths.featured) b.featured_log = take(load_featured(*paths.featured));
  if (paths.lexicons) b.lexicons = take(load_lexicons(*paths.lexicons));
  if (paths.external_ranking) b.external_ranking = take(load_ranking(*paths.external_ranking));
  return result;
}

BundlePaths write_bundle(const DatasetBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  BundlePaths p;
  p.entities = dir / "entities.tsv";
  write_file(p.entities, format_entities(bundle.table));
  for (const auto& [ed, graph] : bundle.graphs) {
    p.edges[ed] = dir / ("edges_" + ed + ".tsv");
    write_file(p.edges[ed], format_edges(graph.edges));
  }
  for (const auto& [ed, docs] : bundle.corpus) {
    p.corpus[ed] = dir / ("corpus_" + ed + ".jsonl");
    write_file(p.corpus[ed], format_corpus(docs));
  }
  p.featured = dir / "featured.tsv";
  write_file(*p.featured, format_featured(bundle.featured_log));
  p.lexicons = dir / "lexicons.tsv";
  write_file(*p.lexicons, format_lexicons(bundle.lexicons));
  if (bundle.external_ranking) {
    p.external_ranking = dir / "ranking.tsv";
    write_file(*p.external_ranking, format_ranking(*bundle.external_ranking));
  }
  return p;
}

std::vector<Finding> validate_bundle(const DatasetBundle& bundle) {
  std::vector<Finding> findings = validate_table(bundle.table);
  const auto& t = bundle.table;
  for (const auto& [ed, g] : bundle.graphs) {
    for (const auto& n : g.nodes)
      if (!t.find(n)) findings.push_back({n, "graph node not in table (" + ed + ")"});
    for (const auto& [a, bb] : g.edges) {
      if (!t.find(a)) findings.push_back({a, "edge endpoint not in table (" + ed + ")"});
      if (!t.find(bb)) findings.push_back({bb, "edge endpoint not in table (" + ed + ")"});
    }
  }
  for (const auto& [ed, docs] : bundle.corpus)
    for (const auto& d : docs)
      if (!t.find(d.entity_id)) findings.push_back({d.entity_id, "document entity not in table (" + ed + ")"});
  for (const auto& f : bundle.featured_log)
    if (!t.find(f.entity_id)) findings.push_back({f.entity_id, "featured entity not in table"});
  return findings;
}

}  // namespace biaslens::ingest
