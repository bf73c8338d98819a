#include <gtest/gtest.h>

#include <filesystem>

#include "biaslens/ingest.hpp"
#include "biaslens/synth.hpp"
#include "biaslens/util.hpp"

using namespace biaslens;
using namespace biaslens::ingest;
namespace fs = std::filesystem;

namespace {

const char* kEntities =
    "id\tgender\tdatasets\tcovered_en\tlength_en\n"
    "a\tfemale\tfb,pt\t1\t458\n"
    "b\tmale\tfb\t1\t412\n"
    "c\tmale\tpt\t0\t\n";

std::string crlf(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') out += "\r\n";
    else out.push_back(c);
  }
  return out;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("biaslens_ingest_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Entities, WellFormed) {
  auto r = parse_entities(kEntities);
  EXPECT_TRUE(r.issues.empty());
  ASSERT_EQ(r.value.size(), 3u);
  EXPECT_EQ(r.value.editions(), std::vector<std::string>{"en"});
  const Entity* a = r.value.find("a");
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(r.value.group_name(a->group), "female");
  EXPECT_EQ(a->datasets, (std::set<std::string>{"fb", "pt"}));
  EXPECT_TRUE(a->is_covered("en"));
  EXPECT_EQ(a->article_length.at("en"), 458u);
  EXPECT_FALSE(r.value.find("c")->is_covered("en"));
  EXPECT_TRUE(r.value.find("c")->article_length.empty());
}

TEST(Entities, UnknownGenderExcludedWithReport) {
  auto r = parse_entities(std::string(kEntities) + "d\tunknown\tfb\t1\t10\n");
  EXPECT_EQ(r.value.size(), 3u);
  ASSERT_EQ(r.issues.size(), 1u);
  EXPECT_EQ(r.issues[0].line, 5u);
  EXPECT_EQ(r.value.find("d"), nullptr);
}

TEST(Entities, CrlfMatchesLf) {
  auto lf = parse_entities(kEntities);
  auto cr = parse_entities(crlf(kEntities));
  EXPECT_EQ(lf.value, cr.value);
  EXPECT_TRUE(cr.issues.empty());
}

TEST(Entities, MissingColumnIsFatal) {
  EXPECT_THROW(parse_entities("id\tdatasets\na\tfb\n"), IngestError);
  EXPECT_THROW(parse_entities(""), IngestError);
}

TEST(Entities, BadRowsSkipped) {
  auto r = parse_entities(std::string(kEntities) + "e\tfemale\tfb\tmaybe\t\n" + "a\tmale\tfb\t1\t1\n");
  EXPECT_EQ(r.value.size(), 3u);
  EXPECT_EQ(r.issues.size(), 2u);
}

TEST(Entities, FormatRoundTrip) {
  auto r = parse_entities(kEntities);
  EXPECT_EQ(parse_entities(format_entities(r.value)).value, r.value);
}

TEST(Edges, Basic) {
  EXPECT_EQ(parse_edges("a\tb\n").value, (std::vector<Edge>{{"a", "b"}}));
  EXPECT_TRUE(parse_edges("").value.empty());
  auto bad = parse_edges("a\tb\nonly\nc\td\n");
  EXPECT_EQ(bad.value.size(), 2u);
  ASSERT_EQ(bad.issues.size(), 1u);
  EXPECT_EQ(bad.issues[0].line, 2u);
}

TEST(Edges, TenThousandLinesInOrder) {
  std::string text;
  for (int i = 0; i < 10000; ++i) text += "n" + std::to_string(i) + "\tn" + std::to_string(i + 1) + "\n";
  auto r = parse_edges(text);
  ASSERT_EQ(r.value.size(), 10000u);
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(r.value[i].first, "n" + std::to_string(i));
}

TEST(Lexicons, OverlapIsFatal) {
  EXPECT_THROW(parse_lexicons("husband\tRelationship\nhusband\tFamily\n"), IngestError);
  EXPECT_TRUE(parse_lexicons("").value.empty());
  auto r = parse_lexicons("husband\tRelationship\nwife\tRelationship\nmother\tFamily\n");
  EXPECT_EQ(r.value.size(), 3u);
  EXPECT_EQ(r.value.at("mother"), Category::Family);
}

TEST(Corpus, TwoDocsHashRoundTrip) {
  std::string text =
      "{\"id\":\"a\",\"edition\":\"en\",\"text\":\"She married.\\nLine two \\u00e9\"}\n"
      "{\"id\":\"b\",\"edition\":\"en\",\"text\":\"He played football.\"}\n";
  auto r = parse_corpus(text);
  ASSERT_EQ(r.value.size(), 2u);
  EXPECT_EQ(r.value[0].text, "She married.\nLine two \xc3\xa9");
  auto again = parse_corpus(format_corpus(r.value)).value;
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_EQ(sha256_hex(again[i].text), sha256_hex(r.value[i].text));
}

TEST(Corpus, BadLinesReported) {
  auto r = parse_corpus("{\"id\":\"a\",\"edition\":\"en\",\"text\":\"x y\"}\nnot json\n");
  EXPECT_EQ(r.value.size(), 1u);
  EXPECT_EQ(r.issues.size(), 1u);
}

TEST(Featured, Parse) {
  auto r = parse_featured("a\t2010\nb\tyear\n");
  EXPECT_EQ(r.value, (std::vector<FeaturedEntry>{{"a", 2010}}));
  EXPECT_EQ(r.issues.size(), 1u);
}

TEST(Bundle, WriteLoadRoundTrip) {
  synth::SynthSpec spec;
  spec.n_minority = 60;
  spec.n_majority = 140;
  spec.editions = {"en", "de"};
  spec.coverage_minority = 0.8;
  spec.seed = 11;
  auto bundle = synth::generate(spec);
  auto dir = scratch("roundtrip");
  auto paths = write_bundle(bundle, dir);
  auto loaded = load_bundle(paths);
  EXPECT_TRUE(loaded.issues.empty());
  EXPECT_EQ(loaded.value, bundle);
  EXPECT_TRUE(validate_bundle(loaded.value).empty());

  auto probed = BundlePaths::in_directory(dir, {"en", "de", "fr"});
  EXPECT_EQ(probed.edges.size(), 2u);
  EXPECT_TRUE(probed.lexicons.has_value());
  fs::remove_all(dir);
}

TEST(Bundle, ValidateFlagsDanglingReferences) {
  auto t = parse_entities(kEntities).value;
  DatasetBundle b;
  b.table = t;
  b.featured_log = {{"ghost", 2010}};
  b.corpus["en"] = {{"nobody", "en", "text"}};
  EXPECT_EQ(validate_bundle(b).size(), 2u);
}

TEST(Files, MissingFileIsFatal) {
  EXPECT_THROW(load_edges("/nonexistent/edges.tsv"), IngestError);
}
