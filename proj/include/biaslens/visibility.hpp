#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biaslens/model.hpp"
#include "biaslens/stats.hpp"
#include "biaslens/structural.hpp"

namespace biaslens::visibility {

using structural::GroupRoles;

struct GroupVisibility {
  GroupId group;
  std::uint64_t n_covered = 0;
  std::uint64_t n_featured = 0;
  double proportion = 0.0;
};

/// One year (or the pooled period). A degenerate 2x2 table leaves `test` empty
/// and sets `error`.
struct YearVisibility {
  std::optional<int> year;  // nullopt for pooled
  std::vector<GroupVisibility> groups;
  std::optional<stats::TestResult> test;
  std::string error;
};

struct VisibilityReport {
  std::vector<YearVisibility> years;
  YearVisibility pooled;
};

/// Featured proportions use the covered population of `edition` as the
/// denominator. An entity counts once per year and once in the pooled table.
/// An empty `dataset` selects every entity.
VisibilityReport visibility_analysis(const EntityTable& table,
                                     const std::vector<FeaturedEntry>& featured_log,
                                     const std::string& dataset, const std::string& edition,
                                     GroupRoles roles, bool yates = false);

}  // namespace biaslens::visibility
