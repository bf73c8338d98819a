#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "biaslens/model.hpp"

namespace biaslens::ingest {

/// Structural problem that makes a file unusable (missing column, lexicon
/// overlap, unreadable file).
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A skipped row or excluded record.
struct Issue {
  std::string file;
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct Parsed {
  T value;
  std::vector<Issue> issues;
};

struct DatasetBundle {
  EntityTable table;
  std::map<std::string, LinkGraph> graphs;              // edition -> graph
  std::map<std::string, std::vector<Document>> corpus;  // edition -> documents
  std::vector<FeaturedEntry> featured_log;
  Lexicons lexicons;
  std::optional<std::map<std::string, double>> external_ranking;

  bool operator==(const DatasetBundle&) const = default;
};

// Entities: tab-separated, header row. Required columns: id, gender, datasets.
// Optional: covered_<edition>, length_<edition>, featured_years.
Parsed<EntityTable> parse_entities(const std::string& content, const std::string& name = "<entities>");
Parsed<EntityTable> load_entities(const std::filesystem::path& path);
std::string format_entities(const EntityTable& table);

// Edges: two tab-separated columns (from, to), no header.
Parsed<std::vector<Edge>> parse_edges(const std::string& content, const std::string& name = "<edges>");
Parsed<std::vector<Edge>> load_edges(const std::filesystem::path& path);
std::string format_edges(const std::vector<Edge>& edges);

// Corpus: JSON lines {"id": ..., "edition": ..., "text": ...}.
Parsed<std::vector<Document>> parse_corpus(const std::string& content, const std::string& name = "<corpus>");
Parsed<std::vector<Document>> load_corpus(const std::filesystem::path& path);
std::string format_corpus(const std::vector<Document>& docs);

// Featured log: two tab-separated columns (id, year).
Parsed<std::vector<FeaturedEntry>> parse_featured(const std::string& content, const std::string& name = "<featured>");
Parsed<std::vector<FeaturedEntry>> load_featured(const std::filesystem::path& path);
std::string format_featured(const std::vector<FeaturedEntry>& log);

// Lexicons: two tab-separated columns (stem, category); a stem listed under two
// categories raises IngestError.
Parsed<Lexicons> parse_lexicons(const std::string& content, const std::string& name = "<lexicons>");
Parsed<Lexicons> load_lexicons(const std::filesystem::path& path);
std::string format_lexicons(const Lexicons& lexicons);

// External ranking: two tab-separated columns (edition, value).
Parsed<std::map<std::string, double>> parse_ranking(const std::string& content, const std::string& name = "<ranking>");
Parsed<std::map<std::string, double>> load_ranking(const std::filesystem::path& path);
std::string format_ranking(const std::map<std::string, double>& ranking);

/// Input locations for one bundle. Empty optionals mean "not supplied".
struct BundlePaths {
  std::filesystem::path entities;
  std::map<std::string, std::filesystem::path> edges;   // edition -> file
  std::map<std::string, std::filesystem::path> corpus;  // edition -> file
  std::optional<std::filesystem::path> featured;
  std::optional<std::filesystem::path> lexicons;
  std::optional<std::filesystem::path> external_ranking;

  /// Canonical file names inside `dir` for the given editions; files that do
  /// not exist are left unset.
  static BundlePaths in_directory(const std::filesystem::path& dir,
                                  const std::vector<std::string>& editions);
};

/// Loads every supplied file; edge lists are restricted with induced_graph.
Parsed<DatasetBundle> load_bundle(const BundlePaths& paths, bool dedupe_edges = false);

/// Writes the bundle with canonical file names; returns the paths written.
BundlePaths write_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);

/// Cross-file reference checks (graph nodes, documents and featured entries
/// must name table entities).
std::vector<Finding> validate_bundle(const DatasetBundle& bundle);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace biaslens::ingest
