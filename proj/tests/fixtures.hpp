#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "biaslens/model.hpp"

namespace fixtures {

struct Person {
  std::string id;
  std::string group;
  bool covered = true;
};

// Two groups (female = 0, male = 1), one edition "en", dataset "ref".
inline biaslens::EntityTable table_of(std::initializer_list<Person> people,
                                      std::vector<std::string> groups = {"female", "male"}) {
  std::vector<biaslens::GroupLabel> labels;
  for (std::size_t i = 0; i < groups.size(); ++i) labels.push_back({{i}, groups[i]});
  std::vector<biaslens::Entity> entities;
  for (const auto& p : people) {
    biaslens::Entity e;
    e.id = p.id;
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (groups[i] == p.group) e.group = {i};
    e.datasets = {"ref"};
    e.covered["en"] = p.covered;
    entities.push_back(e);
  }
  return {labels, entities, {"en"}};
}

inline biaslens::LinkGraph graph_of(std::vector<std::string> nodes,
                                    std::vector<biaslens::Edge> edges) {
  return {std::move(nodes), std::move(edges)};
}

}  // namespace fixtures
