#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "biaslens/coverage.hpp"

using namespace biaslens;
using namespace biaslens::coverage;

namespace {

const structural::GroupRoles kRoles{{0}, {1}};

class Builder {
 public:
  Builder& add(const std::string& group, bool covered, std::set<std::string> datasets = {"ref"},
               std::optional<std::uint64_t> length = std::nullopt) {
    Entity e;
    e.id = "e" + std::to_string(entities_.size());
    e.group = {group == "female" ? 0u : 1u};
    e.datasets = std::move(datasets);
    e.covered["en"] = covered;
    if (covered && length) e.article_length["en"] = *length;
    entities_.push_back(std::move(e));
    return *this;
  }
  Builder& add_n(std::size_t n, const std::string& group, bool covered) {
    for (std::size_t i = 0; i < n; ++i) add(group, covered);
    return *this;
  }
  EntityTable build() const { return {{{{0}, "female"}, {{1}, "male"}}, entities_, {"en"}}; }
  std::vector<Entity>& entities() { return entities_; }

 private:
  std::vector<Entity> entities_;
};

}  // namespace

TEST(Proportions, Definition) {
  auto t = Builder().add_n(3, "female", true).add_n(1, "female", false).add_n(6, "male", true).add_n(4, "male", false).build();
  auto p = coverage_proportions(t, "ref", "en");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].n_reference, 4u);
  EXPECT_EQ(p[0].n_covered, 3u);
  EXPECT_DOUBLE_EQ(p[0].proportion, 0.75);
  EXPECT_DOUBLE_EQ(p[1].proportion, 0.6);
}

TEST(Proportions, AllCoveredAndOmittedGroups) {
  auto t = Builder().add_n(5, "male", true).build();
  auto p = coverage_proportions(t, "ref", "en");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].group.value, 1u);
  EXPECT_DOUBLE_EQ(p[0].proportion, 1.0);
  EXPECT_THROW(coverage_proportions(t, "nope", "en"), AnalysisError);
}

TEST(Proportions, PermutationInvariant) {
  Builder b;
  std::mt19937 gen(4);
  for (int i = 0; i < 200; ++i) b.add(gen() % 3 ? "male" : "female", gen() % 2);
  auto t1 = b.build();
  std::shuffle(b.entities().begin(), b.entities().end(), gen);
  auto t2 = b.build();
  auto p1 = coverage_proportions(t1, "ref", "en"), p2 = coverage_proportions(t2, "ref", "en");
  for (std::size_t g = 0; g < 2; ++g) {
    EXPECT_EQ(p1[g].n_covered, p2[g].n_covered);
    EXPECT_DOUBLE_EQ(p1[g].proportion, p2[g].proportion);
  }
}

TEST(Gap, Ratios) {
  auto t = Builder().add_n(12685, "female", true).add_n(96796, "male", true).build();
  const double gap = coverage_gap(t, "ref", "en", kRoles);
  EXPECT_NEAR(gap, 96796.0 / 12685, 1e-12);
  EXPECT_NEAR(gap, 7.631, 5e-4);
  EXPECT_DOUBLE_EQ(gap * 12685, 96796.0);

  auto ha = Builder().add_n(88, "female", true).add_n(3914, "male", true).build();
  EXPECT_NEAR(coverage_gap(ha, "ref", "en", kRoles), 44.477, 1e-3);

  auto eq = Builder().add_n(5, "female", true).add_n(5, "male", true).build();
  EXPECT_DOUBLE_EQ(coverage_gap(eq, "ref", "en", kRoles), 1.0);

  auto none = Builder().add_n(5, "female", false).add_n(5, "male", true).build();
  EXPECT_THROW(coverage_gap(none, "ref", "en", kRoles), AnalysisError);
}

TEST(Lengths, LowerMedian) {
  EXPECT_EQ(lower_quantile({4, 1, 3, 2}, 0.5), 2u);
  EXPECT_EQ(lower_quantile({100}, 0.5), 100u);
  EXPECT_EQ(lower_quantile({5, 1, 4, 2, 3}, 0.5), 3u);
  EXPECT_EQ(lower_quantile({1, 2, 3, 4, 5, 6, 7, 8}, 0.25), 2u);

  auto t = Builder()
               .add("female", true, {"ref"}, 100)
               .add("male", true, {"ref"}, 1)
               .add("male", true, {"ref"}, 2)
               .add("male", true, {"ref"}, 3)
               .add("male", true, {"ref"}, 4)
               .add("male", false)
               .build();
  auto s = length_summary(t, "ref", "en");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].median, 100u);
  EXPECT_EQ(s[1].median, 2u);
  EXPECT_EQ(s[1].n, 4u);

  auto only_men = Builder().add("male", true, {"ref"}, 7).build();
  EXPECT_EQ(length_summary(only_men, "ref", "en").size(), 1u);
}

TEST(Lengths, BruteForceAgainstSort) {
  std::mt19937 gen(8);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::uint64_t> v(1 + gen() % 40);
    for (auto& x : v) x = gen() % 1000;
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(lower_quantile(v, 0.5), sorted[(sorted.size() - 1) / 2]);
  }
}

TEST(Jaccard, Examples) {
  Builder b;
  b.add("female", true, {"x", "y"});  // a
  b.add("male", true, {"x", "y"});    // b
  b.add("male", true, {"x"});         // c
  b.add("female", true, {"y"});       // d
  b.add("male", false, {"x", "y"});   // uncovered, ignored
  auto t = b.build();
  EXPECT_DOUBLE_EQ(dataset_jaccard(t, "x", "y", "en"), 0.5);
  EXPECT_DOUBLE_EQ(dataset_jaccard(t, "y", "x", "en"), 0.5);
  EXPECT_DOUBLE_EQ(dataset_jaccard(t, "x", "x", "en"), 1.0);

  Builder d;
  d.add("female", true, {"x"}).add("male", true, {"y"});
  EXPECT_DOUBLE_EQ(dataset_jaccard(d.build(), "x", "y", "en"), 0.0);

  Builder e;
  e.add("female", false, {"x"}).add("male", false, {"y"});
  EXPECT_THROW(dataset_jaccard(e.build(), "x", "y", "en"), AnalysisError);
}

TEST(Significance, Examples) {
  auto same = Builder().add_n(5, "female", true).add_n(5, "female", false).add_n(10, "male", true).add_n(10, "male", false).build();
  EXPECT_NEAR(coverage_significance(same, "ref", "en", kRoles).p_value, 1.0, 1e-12);

  auto far = Builder().add_n(90, "female", true).add_n(10, "female", false).add_n(10, "male", true).add_n(90, "male", false).build();
  auto r = coverage_significance(far, "ref", "en", kRoles);
  EXPECT_NEAR(r.statistic, 128.0, 1e-9);
  EXPECT_LT(r.p_value, 0.001);
  EXPECT_EQ(r.direction, 1);

  auto mid = Builder().add_n(20, "female", true).add_n(10, "female", false).add_n(10, "male", true).add_n(20, "male", false).build();
  EXPECT_NEAR(coverage_significance(mid, "ref", "en", kRoles).statistic, 20.0 / 3, 1e-12);

  auto all = Builder().add_n(3, "female", true).add_n(3, "male", true).build();
  EXPECT_THROW(coverage_significance(all, "ref", "en", kRoles), AnalysisError);
}

TEST(Report, FreebaseCountsFixture) {
  Builder b;
  for (int i = 0; i < 12685; ++i) b.add("female", true, {"freebase"}, i < 6342 ? 300 : (i == 6342 ? 458 : 900));
  for (int i = 0; i < 96796; ++i) b.add("male", true, {"freebase"}, i < 48397 ? 200 : (i == 48397 ? 412 : 800));
  auto rep = coverage_report(b.build(), {"freebase"}, {"en"}, kRoles);
  ASSERT_EQ(rep.entries.size(), 1u);
  const auto& e = rep.entries[0];
  EXPECT_EQ(e.proportions[0].n_covered + e.proportions[1].n_covered, 109481u);
  EXPECT_NEAR(*e.gap_ratio, 7.631, 5e-4);
  EXPECT_EQ(e.lengths[0].median, 458u);
  EXPECT_EQ(e.lengths[1].median, 412u);
  EXPECT_FALSE(e.proportion_test.has_value());
  EXPECT_FALSE(e.errors.empty());
}

TEST(Report, JaccardPairs) {
  Builder b;
  b.add("female", true, {"a", "b"}).add("male", true, {"b", "c"}).add("male", false, {"a"});
  auto rep = coverage_report(b.build(), {"a", "b", "c"}, {"en"}, kRoles);
  EXPECT_EQ(rep.entries.size(), 3u);
  EXPECT_EQ(rep.jaccard.size(), 3u);
}
