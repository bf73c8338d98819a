#include <gtest/gtest.h>

#include "biaslens/visibility.hpp"

using namespace biaslens;
using namespace biaslens::visibility;

namespace {

const GroupRoles kRoles{{0}, {1}};

struct World {
  EntityTable table;
  std::vector<FeaturedEntry> log;
};

// n_f women and n_m men, all covered in "en"; featured[year] lists (group, count).
World world(std::size_t n_f, std::size_t n_m, std::map<int, std::pair<std::size_t, std::size_t>> featured,
            std::size_t uncovered = 0) {
  std::vector<Entity> ents;
  auto add = [&](const std::string& id, std::size_t g, bool cov) {
    Entity e;
    e.id = id;
    e.group = {g};
    e.datasets = {"ref"};
    e.covered["en"] = cov;
    ents.push_back(e);
  };
  for (std::size_t i = 0; i < n_f; ++i) add("f" + std::to_string(i), 0, true);
  for (std::size_t i = 0; i < n_m; ++i) add("m" + std::to_string(i), 1, true);
  for (std::size_t i = 0; i < uncovered; ++i) add("u" + std::to_string(i), 0, false);
  World w{EntityTable({{{0}, "female"}, {{1}, "male"}}, ents, {"en"}), {}};
  std::size_t next_f = 0, next_m = 0;
  for (const auto& [year, counts] : featured) {
    for (std::size_t i = 0; i < counts.first; ++i) w.log.push_back({"f" + std::to_string(next_f++ % n_f), year});
    for (std::size_t i = 0; i < counts.second; ++i) w.log.push_back({"m" + std::to_string(next_m++ % n_m), year});
  }
  return w;
}

}  // namespace

TEST(Visibility, EqualRatesGiveZeroStatistic) {
  auto w = world(100, 200, {{2010, {2, 4}}});
  auto r = visibility_analysis(w.table, w.log, "ref", "en", kRoles);
  ASSERT_EQ(r.years.size(), 1u);
  ASSERT_TRUE(r.years[0].test);
  EXPECT_NEAR(r.years[0].test->statistic, 0.0, 1e-12);
  EXPECT_NEAR(r.years[0].test->p_value, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.years[0].groups[0].proportion, 0.02);
  EXPECT_DOUBLE_EQ(r.years[0].groups[1].proportion, 0.02);
}

TEST(Visibility, NoCoveredFeaturedIsDegenerate) {
  auto w = world(10, 10, {}, 2);
  w.log = {{"u0", 2011}, {"u1", 2011}};
  auto r = visibility_analysis(w.table, w.log, "ref", "en", kRoles);
  ASSERT_EQ(r.years.size(), 1u);
  EXPECT_FALSE(r.years[0].test);
  EXPECT_FALSE(r.years[0].error.empty());
  for (const auto& g : r.years[0].groups) {
    EXPECT_EQ(g.n_featured, 0u);
    EXPECT_EQ(g.proportion, 0.0);
    EXPECT_EQ(g.n_covered, 10u);
  }
}

TEST(Visibility, PooledIsSumOfYears) {
  auto w = world(300, 900, {{2010, {3, 12}}, {2011, {5, 9}}, {2012, {1, 20}}});
  auto r = visibility_analysis(w.table, w.log, "ref", "en", kRoles);
  ASSERT_EQ(r.years.size(), 3u);
  std::uint64_t f = 0, m = 0;
  for (const auto& y : r.years) {
    f += y.groups[0].n_featured;
    m += y.groups[1].n_featured;
    for (const auto& g : y.groups) EXPECT_LE(g.n_featured, g.n_covered);
  }
  EXPECT_EQ(r.pooled.groups[0].n_featured, f);
  EXPECT_EQ(r.pooled.groups[1].n_featured, m);
  EXPECT_FALSE(r.pooled.year.has_value());
  EXPECT_EQ(r.years[0].year, 2010);
}

TEST(Visibility, RepeatFeaturingCountedOncePerYearAndPooled) {
  auto w = world(50, 50, {});
  w.log = {{"f0", 2010}, {"f0", 2010}, {"f0", 2011}, {"m0", 2010}};
  auto r = visibility_analysis(w.table, w.log, "ref", "en", kRoles);
  EXPECT_EQ(r.years[0].groups[0].n_featured, 1u);
  EXPECT_EQ(r.years[1].groups[0].n_featured, 1u);
  EXPECT_EQ(r.pooled.groups[0].n_featured, 1u);
}

TEST(Visibility, SwappingRolesFlipsDirection) {
  auto w = world(200, 400, {{2013, {2, 30}}});
  auto a = visibility_analysis(w.table, w.log, "ref", "en", kRoles);
  auto b = visibility_analysis(w.table, w.log, "ref", "en", {{1}, {0}});
  ASSERT_TRUE(a.pooled.test && b.pooled.test);
  EXPECT_EQ(a.pooled.test->direction, -b.pooled.test->direction);
  EXPECT_NE(a.pooled.test->direction, 0);
  EXPECT_NEAR(a.pooled.test->p_value, b.pooled.test->p_value, 1e-15);
}

TEST(Visibility, Preconditions) {
  auto w = world(10, 10, {});
  EXPECT_THROW(visibility_analysis(w.table, {}, "ref", "en", kRoles), AnalysisError);
  auto only_m = world(1, 10, {{2010, {0, 1}}});
  auto ents = only_m.table.entities();
  ents[0].covered["en"] = false;
  EntityTable t({{{0}, "female"}, {{1}, "male"}}, ents, {"en"});
  EXPECT_THROW(visibility_analysis(t, only_m.log, "ref", "en", kRoles), AnalysisError);
}
