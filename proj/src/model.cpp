#include "biaslens/model.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace biaslens {

EntityTable::EntityTable(std::vector<GroupLabel> groups, std::vector<Entity> entities,
                         std::vector<std::string> editions)
    : groups_(std::move(groups)), entities_(std::move(entities)), editions_(std::move(editions)) {
  for (std::size_t i = 0; i < entities_.size(); ++i) index_.emplace(entities_[i].id, i);
}

const Entity* EntityTable::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entities_[it->second];
}

std::optional<GroupId> EntityTable::try_group(const std::string& name) const {
  for (const auto& g : groups_)
    if (g.name == name) return g.id;
  return std::nullopt;
}

GroupId EntityTable::group_by_name(const std::string& name) const {
  if (auto g = try_group(name)) return *g;
  throw AnalysisError("unknown group label '" + name + "'");
}

std::vector<std::string> EntityTable::dataset_names() const {
  std::set<std::string> names;
  for (const auto& e : entities_) names.insert(e.datasets.begin(), e.datasets.end());
  return {names.begin(), names.end()};
}

std::vector<std::string> EntityTable::group_names() const {
  std::vector<std::string> out;
  for (const auto& g : groups_) out.push_back(g.name);
  return out;
}

std::string to_string(Category c) {
  switch (c) {
    case Category::Gender: return "Gender";
    case Category::Relationship: return "Relationship";
    case Category::Family: return "Family";
    case Category::Others: return "Others";
  }
  return "Others";
}

std::optional<Category> category_from_string(const std::string& name) {
  std::string lower;
  for (char ch : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (lower == "gender") return Category::Gender;
  if (lower == "relationship") return Category::Relationship;
  if (lower == "family") return Category::Family;
  if (lower == "others" || lower == "other") return Category::Others;
  return std::nullopt;
}

std::vector<Finding> validate_table(const EntityTable& table) {
  std::vector<Finding> findings;
  const auto& groups = table.groups();
  if (groups.size() < 2) findings.push_back({"", "fewer than 2 group labels"});
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i].id.value != i) findings.push_back({"", "group ids not dense: " + groups[i].name});

  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> reported;
  const std::set<std::string> editions(table.editions().begin(), table.editions().end());
  for (const auto& e : table.entities()) {
    if (!seen.insert(e.id).second && reported.insert(e.id).second)
      findings.push_back({e.id, "duplicate id"});
    if (e.group.value >= groups.size()) findings.push_back({e.id, "unknown group"});
    for (const auto& [edition, len] : e.article_length) {
      (void)len;
      if (!e.is_covered(edition))
        findings.push_back({e.id, "article_length set for uncovered edition " + edition});
    }
    for (const auto& [edition, flag] : e.covered) {
      (void)flag;
      if (!editions.count(edition)) findings.push_back({e.id, "unknown edition " + edition});
    }
  }
  return findings;
}

namespace {

LinkGraph filter_edges(const EntityTable& table, const std::string& edition,
                       const std::vector<Edge>& raw_edges, bool dedupe) {
  LinkGraph g;
  std::unordered_set<std::string> covered;
  for (const auto& e : table.entities()) {
    if (e.is_covered(edition) && covered.insert(e.id).second) g.nodes.push_back(e.id);
  }
  std::set<Edge> seen;
  for (const auto& edge : raw_edges) {
    if (edge.first == edge.second) continue;
    if (!covered.count(edge.first) || !covered.count(edge.second)) continue;
    if (dedupe && !seen.insert(edge).second) continue;
    g.edges.push_back(edge);
  }
  return g;
}

}  // namespace

LinkGraph induced_graph(const EntityTable& table, const std::string& edition,
                        const std::vector<Edge>& raw_edges, bool dedupe) {
  return filter_edges(table, edition, raw_edges, dedupe);
}

LinkGraph induced_graph(const EntityTable& table, const std::string& edition,
                        const LinkGraph& graph, bool dedupe) {
  return filter_edges(table, edition, graph.edges, dedupe);
}

}  // namespace biaslens
