#include "biaslens/visibility.hpp"

#include <map>
#include <set>

namespace biaslens::visibility {

namespace {

YearVisibility summarize(std::optional<int> year, const std::vector<std::uint64_t>& covered,
                         const std::set<const Entity*>& featured, GroupRoles roles, bool yates) {
  YearVisibility yv;
  yv.year = year;
  std::vector<std::uint64_t> counts(covered.size(), 0);
  for (const Entity* e : featured) ++counts[e->group.value];
  for (std::size_t g = 0; g < covered.size(); ++g) {
    GroupVisibility gv{GroupId{g}, covered[g], counts[g], 0.0};
    if (covered[g] > 0) gv.proportion = static_cast<double>(counts[g]) / static_cast<double>(covered[g]);
    yv.groups.push_back(gv);
  }
  const auto a = static_cast<double>(counts[roles.minority.value]);
  const auto b = static_cast<double>(covered[roles.minority.value]) - a;
  const auto c = static_cast<double>(counts[roles.majority.value]);
  const auto d = static_cast<double>(covered[roles.majority.value]) - c;
  try {
    yv.test = stats::chi_square_2x2(a, b, c, d, yates);
  } catch (const AnalysisError& err) {
    yv.error = err.what();
  }
  return yv;
}

}  // namespace

VisibilityReport visibility_analysis(const EntityTable& table,
                                     const std::vector<FeaturedEntry>& featured_log,
                                     const std::string& dataset, const std::string& edition,
                                     GroupRoles roles, bool yates) {
  if (featured_log.empty()) throw AnalysisError("visibility: featured log is empty");
  const std::size_t G = table.groups().size();
  auto selected = [&](const Entity& e) {
    return (dataset.empty() || e.in_dataset(dataset)) && e.is_covered(edition) &&
           e.group.value < G;
  };
  std::vector<std::uint64_t> covered(G, 0);
  for (const auto& e : table.entities())
    if (selected(e)) ++covered[e.group.value];
  for (auto g : {roles.minority, roles.majority})
    if (g.value >= G || covered[g.value] == 0)
      throw AnalysisError("visibility: no covered entities for group " + std::to_string(g.value));

  std::map<int, std::set<const Entity*>> by_year;
  std::set<const Entity*> pooled;
  for (const auto& entry : featured_log) {
    by_year[entry.year];  // keep the year axis complete
    const Entity* e = table.find(entry.entity_id);
    if (!e || !selected(*e)) continue;
    by_year[entry.year].insert(e);
    pooled.insert(e);
  }

  VisibilityReport report;
  for (const auto& [year, entities] : by_year)
    report.years.push_back(summarize(year, covered, entities, roles, yates));
  report.pooled = summarize(std::nullopt, covered, pooled, roles, yates);
  return report;
}

}  // namespace biaslens::visibility
