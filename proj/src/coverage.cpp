#include "biaslens/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace biaslens::coverage {

namespace {

void require_dataset(const EntityTable& table, const std::string& dataset) {
  for (const auto& e : table.entities())
    if (e.in_dataset(dataset)) return;
  throw AnalysisError("unknown dataset '" + dataset + "'");
}

std::uint64_t covered_count(const EntityTable& table, const std::string& dataset,
                            const std::string& edition, GroupId g) {
  std::uint64_t n = 0;
  for (const auto& e : table.entities())
    if (e.group == g && e.in_dataset(dataset) && e.is_covered(edition)) ++n;
  return n;
}

}  // namespace

std::vector<GroupCoverage> coverage_proportions(const EntityTable& table,
                                                const std::string& dataset,
                                                const std::string& edition) {
  require_dataset(table, dataset);
  const std::size_t G = table.groups().size();
  std::vector<GroupCoverage> per(G);
  for (std::size_t g = 0; g < G; ++g) per[g].group = GroupId{g};
  for (const auto& e : table.entities()) {
    if (!e.in_dataset(dataset) || e.group.value >= G) continue;
    auto& gc = per[e.group.value];
    ++gc.n_reference;
    if (e.is_covered(edition)) ++gc.n_covered;
  }
  std::vector<GroupCoverage> out;
  for (auto& gc : per) {
    if (gc.n_reference == 0) continue;
    gc.proportion = static_cast<double>(gc.n_covered) / static_cast<double>(gc.n_reference);
    out.push_back(gc);
  }
  return out;
}

double coverage_gap(const EntityTable& table, const std::string& dataset,
                    const std::string& edition, GroupRoles roles) {
  require_dataset(table, dataset);
  const auto minor = covered_count(table, dataset, edition, roles.minority);
  const auto major = covered_count(table, dataset, edition, roles.majority);
  if (minor == 0)
    throw AnalysisError("coverage gap: no covered '" + table.group_name(roles.minority) +
                        "' entities in " + dataset + "/" + edition);
  return static_cast<double>(major) / static_cast<double>(minor);
}

std::uint64_t lower_quantile(std::vector<std::uint64_t> values, double q) {
  if (values.empty()) throw AnalysisError("quantile of empty sample");
  const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
  return values[idx];
}

std::vector<LengthSummary> length_summary(const EntityTable& table, const std::string& dataset,
                                          const std::string& edition) {
  require_dataset(table, dataset);
  const std::size_t G = table.groups().size();
  std::vector<std::vector<std::uint64_t>> lengths(G);
  for (const auto& e : table.entities()) {
    if (!e.in_dataset(dataset) || !e.is_covered(edition) || e.group.value >= G) continue;
    auto it = e.article_length.find(edition);
    if (it != e.article_length.end()) lengths[e.group.value].push_back(it->second);
  }
  std::vector<LengthSummary> out;
  for (std::size_t g = 0; g < G; ++g) {
    if (lengths[g].empty()) continue;
    out.push_back({GroupId{g}, lengths[g].size(), lower_quantile(lengths[g], 0.25),
                   lower_quantile(lengths[g], 0.5), lower_quantile(lengths[g], 0.75)});
  }
  return out;
}

double dataset_jaccard(const EntityTable& table, const std::string& d1, const std::string& d2,
                       const std::string& edition) {
  require_dataset(table, d1);
  require_dataset(table, d2);
  std::set<std::string> a, b;
  for (const auto& e : table.entities()) {
    if (!e.is_covered(edition)) continue;
    if (e.in_dataset(d1)) a.insert(e.id);
    if (e.in_dataset(d2)) b.insert(e.id);
  }
  std::size_t inter = 0;
  for (const auto& id : a) inter += b.count(id);
  const std::size_t uni = a.size() + b.size() - inter;
  if (uni == 0) throw AnalysisError("jaccard: empty union for " + d1 + ", " + d2);
  return static_cast<double>(inter) / static_cast<double>(uni);
}

stats::TestResult coverage_significance(const EntityTable& table, const std::string& dataset,
                                        const std::string& edition, GroupRoles roles,
                                        bool yates) {
  const auto props = coverage_proportions(table, dataset, edition);
  double cells[2][2] = {{0, 0}, {0, 0}};
  for (const auto& gc : props) {
    int row = gc.group == roles.minority ? 0 : (gc.group == roles.majority ? 1 : -1);
    if (row < 0) continue;
    cells[row][0] = static_cast<double>(gc.n_covered);
    cells[row][1] = static_cast<double>(gc.n_reference - gc.n_covered);
  }
  return stats::chi_square_2x2(cells[0][0], cells[0][1], cells[1][0], cells[1][1], yates);
}

CoverageReport coverage_report(const EntityTable& table, const std::vector<std::string>& datasets,
                               const std::vector<std::string>& editions, GroupRoles roles,
                               bool yates) {
  CoverageReport report;
  for (const auto& d : datasets) {
    for (const auto& ed : editions) {
      EditionCoverage ec;
      ec.dataset = d;
      ec.edition = ed;
      auto guard = [&](auto&& fn) {
        try {
          fn();
        } catch (const AnalysisError& err) {
          ec.errors.push_back(err.what());
        }
      };
      guard([&] { ec.proportions = coverage_proportions(table, d, ed); });
      guard([&] { ec.gap_ratio = coverage_gap(table, d, ed, roles); });
      guard([&] { ec.lengths = length_summary(table, d, ed); });
      guard([&] { ec.proportion_test = coverage_significance(table, d, ed, roles, yates); });
      report.entries.push_back(std::move(ec));
    }
  }
  for (std::size_t i = 0; i < datasets.size(); ++i)
    for (std::size_t j = i + 1; j < datasets.size(); ++j)
      for (const auto& ed : editions) {
        try {
          report.jaccard.push_back(
              {datasets[i], datasets[j], ed, dataset_jaccard(table, datasets[i], datasets[j], ed)});
        } catch (const AnalysisError&) {
        }
      }
  return report;
}

}  // namespace biaslens::coverage
