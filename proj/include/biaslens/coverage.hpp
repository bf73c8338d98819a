#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biaslens/model.hpp"
#include "biaslens/stats.hpp"
#include "biaslens/structural.hpp"

namespace biaslens::coverage {

using structural::GroupRoles;

struct GroupCoverage {
  GroupId group;
  std::uint64_t n_reference = 0;
  std::uint64_t n_covered = 0;
  double proportion = 0.0;
};

/// Per group: members of `dataset`, how many are covered in `edition`, and the
/// ratio. Groups with no reference members are omitted.
std::vector<GroupCoverage> coverage_proportions(const EntityTable& table,
                                                const std::string& dataset,
                                                const std::string& edition);

/// n_covered(majority) / n_covered(minority).
double coverage_gap(const EntityTable& table, const std::string& dataset,
                    const std::string& edition, GroupRoles roles);

/// Article-length quartiles over covered entities. Order statistics use the
/// lower convention: element floor((n - 1) * q) of the sorted sample.
struct LengthSummary {
  GroupId group;
  std::size_t n = 0;
  std::uint64_t q1 = 0;
  std::uint64_t median = 0;
  std::uint64_t q3 = 0;
};

std::uint64_t lower_quantile(std::vector<std::uint64_t> values, double q);

std::vector<LengthSummary> length_summary(const EntityTable& table, const std::string& dataset,
                                          const std::string& edition);

/// Jaccard coefficient of the covered members of two datasets.
double dataset_jaccard(const EntityTable& table, const std::string& d1, const std::string& d2,
                       const std::string& edition);

/// Chi-square on covered/uncovered x (minority, majority).
stats::TestResult coverage_significance(const EntityTable& table, const std::string& dataset,
                                        const std::string& edition, GroupRoles roles,
                                        bool yates = false);

struct EditionCoverage {
  std::string dataset;
  std::string edition;
  std::vector<GroupCoverage> proportions;
  std::optional<double> gap_ratio;
  std::vector<LengthSummary> lengths;
  std::optional<stats::TestResult> proportion_test;
  std::vector<std::string> errors;
};

struct JaccardEntry {
  std::string dataset_a;
  std::string dataset_b;
  std::string edition;
  double value = 0.0;
};

struct CoverageReport {
  std::vector<EditionCoverage> entries;
  std::vector<JaccardEntry> jaccard;
};

/// Every (dataset, edition) pair plus Jaccard for each dataset pair. Per-entry
/// failures are recorded in `errors` rather than thrown.
CoverageReport coverage_report(const EntityTable& table, const std::vector<std::string>& datasets,
                               const std::vector<std::string>& editions, GroupRoles roles,
                               bool yates = false);

}  // namespace biaslens::coverage
