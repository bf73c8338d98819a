#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace biaslens {

/// Raised for any precondition violation inside an analysis. The message names
/// the offending input so reports can carry it verbatim.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense group index into EntityTable::groups.
struct GroupId {
  std::size_t value = 0;
  auto operator<=>(const GroupId&) const = default;
};

struct GroupLabel {
  GroupId id;
  std::string name;
};

struct Entity {
  std::string id;
  GroupId group;
  std::set<std::string> datasets;
  std::map<std::string, bool> covered;                   // edition -> flag
  std::map<std::string, std::uint64_t> article_length;   // edition -> words
  std::set<int> featured_years;

  bool is_covered(const std::string& edition) const {
    auto it = covered.find(edition);
    return it != covered.end() && it->second;
  }
  bool in_dataset(const std::string& dataset) const { return datasets.count(dataset) > 0; }

  bool operator==(const Entity&) const = default;
};

/// People with a group label. Entities are kept in file order; lookups go
/// through an id index rebuilt by reindex().
class EntityTable {
 public:
  EntityTable() = default;
  EntityTable(std::vector<GroupLabel> groups, std::vector<Entity> entities,
              std::vector<std::string> editions);

  const std::vector<GroupLabel>& groups() const { return groups_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<std::string>& editions() const { return editions_; }

  std::size_t size() const { return entities_.size(); }
  const Entity* find(const std::string& id) const;

  /// Throws AnalysisError for an unknown name.
  GroupId group_by_name(const std::string& name) const;
  std::optional<GroupId> try_group(const std::string& name) const;
  const std::string& group_name(GroupId g) const { return groups_.at(g.value).name; }

  /// All dataset names referenced by any entity, sorted.
  std::vector<std::string> dataset_names() const;

  bool operator==(const EntityTable& o) const {
    return editions_ == o.editions_ && entities_ == o.entities_ && group_names() == o.group_names();
  }

 private:
  std::vector<std::string> group_names() const;

  std::vector<GroupLabel> groups_;
  std::vector<Entity> entities_;
  std::vector<std::string> editions_;
  std::unordered_map<std::string, std::size_t> index_;  // first occurrence
};

using Edge = std::pair<std::string, std::string>;

struct LinkGraph {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;

  bool operator==(const LinkGraph&) const = default;
};

struct Document {
  std::string entity_id;
  std::string edition;
  std::string text;

  bool operator==(const Document&) const = default;
};

/// Word categories used to code discriminative stems; anything absent from a
/// lexicon is Others.
enum class Category { Gender, Relationship, Family, Others };

std::string to_string(Category c);
std::optional<Category> category_from_string(const std::string& name);

/// stem -> category; each stem belongs to exactly one category.
using Lexicons = std::map<std::string, Category>;

struct FeaturedEntry {
  std::string entity_id;
  int year = 0;

  bool operator==(const FeaturedEntry&) const = default;
};

struct Finding {
  std::string entity_id;
  std::string rule;

  bool operator==(const Finding&) const = default;
};

std::vector<Finding> validate_table(const EntityTable& table);

/// Restricts raw links to edges whose endpoints are both covered in `edition`.
/// Self-loops are dropped; parallel edges are kept unless `dedupe` is set.
LinkGraph induced_graph(const EntityTable& table, const std::string& edition,
                        const std::vector<Edge>& raw_edges, bool dedupe = false);

/// Same filtering applied to an existing graph (used to check idempotence).
LinkGraph induced_graph(const EntityTable& table, const std::string& edition,
                        const LinkGraph& graph, bool dedupe = false);

}  // namespace biaslens
