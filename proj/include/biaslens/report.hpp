#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "biaslens/coverage.hpp"
#include "biaslens/ingest.hpp"
#include "biaslens/lexical.hpp"
#include "biaslens/structural.hpp"
#include "biaslens/visibility.hpp"

namespace biaslens::report {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Scalar used to rank editions for the cross-lingual comparison.
enum class CoverageScalar { gap_ratio, proportion_difference };
enum class StructuralScalar { asymmetry, assortativity };
enum class LexicalScalar { minority_category_share, category_share_difference };

struct AnalysisConfig {
  std::vector<std::string> editions;
  std::vector<std::string> datasets;
  std::string minority = "female";
  std::string majority = "male";
  std::size_t n_null_runs = 10000;
  std::uint64_t master_seed = 0;
  std::uint64_t min_df = 5;
  std::size_t top_n = 150;
  bool dedupe_edges = false;
  bool token_frequency = false;
  bool yates = false;
  unsigned workers = 0;  // 0: BIASLENS_WORKERS or 1
  CoverageScalar coverage_scalar = CoverageScalar::gap_ratio;
  StructuralScalar structural_scalar = StructuralScalar::asymmetry;
  LexicalScalar lexical_scalar = LexicalScalar::minority_category_share;

  nlohmann::json to_json() const;
};

/// Throws AnalysisError for unknown roles, n_null_runs < 100 or no editions.
structural::GroupRoles validate_config(const AnalysisConfig& config, const EntityTable& table);

enum class SectionState { populated, skipped, failed };
std::string to_string(SectionState s);

struct SectionStatus {
  SectionState state = SectionState::populated;
  std::string reason;
};

struct EditionStructural {
  SectionStatus status;
  std::optional<structural::StructuralResult> result;
  std::optional<structural::CentralityProfile> centrality;
  std::string centrality_error;
};

struct EditionLexical {
  SectionStatus status;
  std::size_t n_documents = 0;
  std::vector<std::uint64_t> doc_counts;
  std::size_t vocabulary_size = 0;
  std::size_t n_features = 0;
  std::vector<lexical::WordLikelihood> likelihoods;  // df >= min_df
  std::vector<lexical::RankedStem> ranking;          // full classifier ranking
  std::optional<lexical::CategoryReport> categories;
  std::map<std::string, Category> stem_categories;  // lexicon entries among likelihood stems
  std::vector<std::string> warnings;
};

struct Provenance {
  std::string config_hash;
  std::map<std::string, std::string> input_hashes;  // label -> sha256
  std::string tool_version = kToolVersion;
};

struct BiasReport {
  std::vector<std::string> group_names;
  structural::GroupRoles roles;
  AnalysisConfig config;
  Provenance provenance;

  SectionStatus coverage_status;
  std::optional<coverage::CoverageReport> coverage;

  std::map<std::string, EditionStructural> structural;
  std::map<std::string, EditionLexical> lexical;

  SectionStatus visibility_status;
  std::optional<visibility::VisibilityReport> visibility;

  SectionStatus cross_lingual_status;
  std::map<std::string, stats::TestResult> cross_lingual;
  std::map<std::string, std::map<std::string, double>> cross_lingual_scalars;  // dim -> ed -> v

  /// True if any section (or per-edition subsection) failed.
  bool has_failures() const;
};

/// Runs coverage, structural, lexical, visibility and cross-lingual sections.
/// A failing section is marked failed and the remaining sections still run.
/// Config errors throw before any analysis.
BiasReport run_pipeline(const AnalysisConfig& config, const ingest::DatasetBundle& bundle,
                        std::map<std::string, std::string> input_hashes = {});

/// Per-edition scalar of each dimension, as configured.
std::map<std::string, std::map<std::string, double>> dimension_scalars(const BiasReport& report);

/// Spearman of each dimension's edition scalars against the external ranking.
/// Requires at least 3 editions present in both.
std::map<std::string, stats::TestResult> cross_lingual_correlation(
    const BiasReport& report, const std::map<std::string, double>& external_ranking);

/// Values published for the full-scale six-edition Wikipedia study. They are
/// listed for comparison only and are not recomputed from the inputs.
nlohmann::json reference_values();

nlohmann::json to_json(const BiasReport& report);

enum class Format { json, csv_dir };
Format format_from_string(const std::string& s);

/// json: one document at `path`; csv-dir: one CSV per populated section
/// inside directory `path`. Returns the files written.
std::vector<std::filesystem::path> emit(const BiasReport& report, Format format,
                                        const std::filesystem::path& path);

/// Canonical JSON text (sorted keys, two-space indent, trailing newline).
std::string json_text(const BiasReport& report);

/// CSV tables keyed by file name.
std::map<std::string, std::string> csv_tables(const BiasReport& report);

}  // namespace biaslens::report
