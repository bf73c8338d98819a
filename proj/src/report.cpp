#include "biaslens/report.hpp"

#include <cmath>
#include <sstream>

#include "biaslens/util.hpp"

namespace biaslens::report {

using nlohmann::json;

namespace {

json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json cell(const std::optional<double>& v) { return v ? num(*v) : json("undefined"); }

json llr_value(const std::optional<double>& v) { return v ? num(*v) : json("-inf"); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : width_(header.size()) { row(header); }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < width_; ++i) {
      if (i) text_.push_back(',');
      if (i < fields.size()) text_ += csv_escape(fields[i]);
    }
    text_.push_back('\n');
  }
  const std::string& text() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

std::string fmt(double v) { return format_number(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(const std::optional<double>& v, const char* missing) {
  return v ? format_number(*v) : std::string(missing);
}

json test_json(const stats::TestResult& t) {
  return {{"method", stats::to_string(t.method)},
          {"statistic", num(t.statistic)},
          {"p_value", num(t.p_value)},
          {"direction", t.direction},
          {"reliable", t.reliable}};
}

json envelope_json(const std::optional<stats::MonteCarloEnvelope>& e) {
  if (!e) return nullptr;
  return {{"mean", num(e->mean)},
          {"ci_low", num(e->ci_low)},
          {"ci_high", num(e->ci_high)},
          {"n_runs", e->n_runs},
          {"seed", std::to_string(e->seed)}};
}

json status_json(const SectionStatus& s) {
  return {{"state", to_string(s.state)}, {"reason", s.reason}};
}

json ccdf_json(const std::vector<structural::CcdfPoint>& points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back({num(p.threshold), num(p.probability)});
  return arr;
}

template <typename Fn>
SectionStatus guarded(Fn&& fn) {
  try {
    fn();
    return {};
  } catch (const AnalysisError& e) {
    return {SectionState::failed, e.what()};
  } catch (const std::exception& e) {
    return {SectionState::failed, e.what()};
  }
}

}  // namespace

std::string to_string(SectionState s) {
  switch (s) {
    case SectionState::populated: return "populated";
    case SectionState::skipped: return "skipped";
    case SectionState::failed: return "failed";
  }
  return "failed";
}

json AnalysisConfig::to_json() const {
  return {{"editions", editions},
          {"datasets", datasets},
          {"minority", minority},
          {"majority", majority},
          {"n_null_runs", n_null_runs},
          {"master_seed", std::to_string(master_seed)},
          {"min_df", min_df},
          {"top_n", top_n},
          {"dedupe_edges", dedupe_edges},
          {"token_frequency", token_frequency},
          {"yates", yates},
          {"coverage_scalar", coverage_scalar == CoverageScalar::gap_ratio ? "gap_ratio"
                                                                            : "proportion_difference"},
          {"structural_scalar",
           structural_scalar == StructuralScalar::asymmetry ? "asymmetry" : "assortativity"},
          {"lexical_scalar", lexical_scalar == LexicalScalar::minority_category_share
                                 ? "minority_category_share"
                                 : "category_share_difference"}};
}

structural::GroupRoles validate_config(const AnalysisConfig& config, const EntityTable& table) {
  if (config.editions.empty()) throw AnalysisError("config: no editions");
  if (config.n_null_runs < stats::kMinEnvelopeRuns)
    throw AnalysisError("config: n_null_runs must be >= " + std::to_string(stats::kMinEnvelopeRuns));
  if (config.top_n == 0) throw AnalysisError("config: top_n must be positive");
  if (config.minority == config.majority)
    throw AnalysisError("config: minority and majority roles must differ");
  return {table.group_by_name(config.minority), table.group_by_name(config.majority)};
}

bool BiasReport::has_failures() const {
  if (coverage_status.state == SectionState::failed) return true;
  if (visibility_status.state == SectionState::failed) return true;
  if (cross_lingual_status.state == SectionState::failed) return true;
  for (const auto& [ed, s] : structural)
    if (s.status.state == SectionState::failed) return true;
  for (const auto& [ed, l] : lexical)
    if (l.status.state == SectionState::failed) return true;
  return false;
}

BiasReport run_pipeline(const AnalysisConfig& config, const ingest::DatasetBundle& bundle,
                        std::map<std::string, std::string> input_hashes) {
  const auto& table = bundle.table;
  BiasReport r;
  r.roles = validate_config(config, table);
  r.config = config;
  for (const auto& g : table.groups()) r.group_names.push_back(g.name);
  r.provenance.config_hash = sha256_hex(config.to_json().dump());
  r.provenance.input_hashes = std::move(input_hashes);

  std::vector<std::string> datasets = config.datasets;
  if (datasets.empty()) datasets = table.dataset_names();

  // Coverage.
  if (datasets.empty()) {
    r.coverage_status = {SectionState::skipped, "no reference datasets"};
  } else {
    r.coverage_status = guarded([&] {
      r.coverage = coverage::coverage_report(table, datasets, config.editions, r.roles, config.yates);
    });
  }

  // Structural.
  for (const auto& ed : config.editions) {
    EditionStructural es;
    auto it = bundle.graphs.find(ed);
    if (it == bundle.graphs.end()) {
      es.status = {SectionState::skipped, "no edge list for edition " + ed};
    } else {
      LinkGraph graph = config.dedupe_edges ? induced_graph(table, ed, it->second, true) : it->second;
      const auto g = structural::compact(graph, table);
      es.status = guarded([&] {
        es.result = structural::structural_analysis(g, r.roles, config.n_null_runs,
                                                    config.master_seed, config.workers);
      });
      try {
        es.centrality = structural::centrality_profile(g, r.roles);
      } catch (const AnalysisError& e) {
        es.centrality_error = e.what();
      }
    }
    r.structural.emplace(ed, std::move(es));
  }

  // Lexical.
  const lexical::LexicalOptions lex_opts{config.min_df, config.token_frequency};
  for (const auto& ed : config.editions) {
    EditionLexical el;
    auto it = bundle.corpus.find(ed);
    if (it == bundle.corpus.end() || it->second.empty()) {
      el.status = {SectionState::skipped, "no corpus for edition " + ed};
    } else {
      el.status = guarded([&] {
        const auto docs = lexical::prepare_corpus(it->second, table, ed, text::default_stemmers(),
                                                  &el.warnings);
        el.n_documents = docs.size();
        const auto model =
            lexical::train_discriminative_ranking(docs, r.group_names, r.roles, ed, lex_opts);
        el.doc_counts = model.doc_counts;
        el.vocabulary_size = model.vocabulary.size();
        el.n_features = model.features.size();
        for (auto& row : lexical::word_likelihood_ratios(model))
          if (row.df >= config.min_df) el.likelihoods.push_back(std::move(row));
        for (const auto& w : el.likelihoods)
          if (auto c = bundle.lexicons.find(w.stem); c != bundle.lexicons.end())
            el.stem_categories.emplace(w.stem, c->second);
        el.ranking = model.nb_ranking;
        el.categories = lexical::category_report(model.nb_ranking, bundle.lexicons,
                                                 r.group_names.size(), config.top_n);
        el.warnings.insert(el.warnings.end(), el.categories->warnings.begin(),
                           el.categories->warnings.end());
      });
    }
    r.lexical.emplace(ed, std::move(el));
  }

  // Visibility.
  if (bundle.featured_log.empty()) {
    r.visibility_status = {SectionState::skipped, "no featured log"};
  } else {
    r.visibility_status = guarded([&] {
      r.visibility = visibility::visibility_analysis(
          table, bundle.featured_log, datasets.empty() ? std::string() : datasets.front(),
          config.editions.front(), r.roles, config.yates);
    });
  }

  // Cross-lingual.
  if (!bundle.external_ranking) {
    r.cross_lingual_status = {SectionState::skipped, "no external ranking"};
  } else if (config.editions.size() < 3) {
    r.cross_lingual_status = {SectionState::skipped, "fewer than 3 editions"};
  } else {
    r.cross_lingual_status = guarded([&] {
      r.cross_lingual_scalars = dimension_scalars(r);
      r.cross_lingual = cross_lingual_correlation(r, *bundle.external_ranking);
    });
  }
  return r;
}

std::map<std::string, std::map<std::string, double>> dimension_scalars(const BiasReport& report) {
  std::map<std::string, std::map<std::string, double>> out;
  const auto& cfg = report.config;
  if (report.coverage) {
    const std::string dataset =
        cfg.datasets.empty() ? (report.coverage->entries.empty() ? "" : report.coverage->entries.front().dataset)
                             : cfg.datasets.front();
    for (const auto& e : report.coverage->entries) {
      if (e.dataset != dataset) continue;
      if (cfg.coverage_scalar == CoverageScalar::gap_ratio) {
        if (e.gap_ratio) out["coverage"][e.edition] = *e.gap_ratio;
      } else {
        std::optional<double> pmin, pmaj;
        for (const auto& gc : e.proportions) {
          if (gc.group == report.roles.minority) pmin = gc.proportion;
          if (gc.group == report.roles.majority) pmaj = gc.proportion;
        }
        if (pmin && pmaj) out["coverage"][e.edition] = *pmin - *pmaj;
      }
    }
  }
  for (const auto& [ed, s] : report.structural) {
    if (!s.result) continue;
    if (cfg.structural_scalar == StructuralScalar::asymmetry) {
      if (s.result->asymmetry) out["structural"][ed] = *s.result->asymmetry;
    } else {
      out["structural"][ed] = s.result->assortativity;
    }
  }
  for (const auto& [ed, l] : report.lexical) {
    if (!l.categories) continue;
    try {
      const double minor = l.categories->in_category_share(report.roles.minority);
      if (cfg.lexical_scalar == LexicalScalar::minority_category_share)
        out["lexical"][ed] = minor;
      else
        out["lexical"][ed] = minor - l.categories->in_category_share(report.roles.majority);
    } catch (const AnalysisError&) {
    }
  }
  return out;
}

std::map<std::string, stats::TestResult> cross_lingual_correlation(
    const BiasReport& report, const std::map<std::string, double>& external_ranking) {
  if (report.config.editions.size() < 3)
    throw AnalysisError("cross-lingual: fewer than 3 editions analyzed");
  std::map<std::string, stats::TestResult> out;
  std::vector<std::string> errors;
  for (const auto& [dim, values] : dimension_scalars(report)) {
    std::vector<double> x, y;
    for (const auto& [ed, v] : values) {
      auto it = external_ranking.find(ed);
      if (it == external_ranking.end()) continue;
      x.push_back(v);
      y.push_back(it->second);
    }
    if (x.size() < 3) {
      errors.push_back(dim + ": fewer than 3 editions with both values");
      continue;
    }
    try {
      out[dim] = stats::spearman(x, y);
    } catch (const AnalysisError& e) {
      errors.push_back(dim + ": " + e.what());
    }
  }
  if (out.empty()) {
    std::string msg = "cross-lingual: no dimension could be ranked";
    for (const auto& e : errors) msg += "; " + e;
    throw AnalysisError(msg);
  }
  return out;
}

json reference_values() {
  return {
      {"note",
       "Published values for the full six-edition Wikipedia corpora; not recomputed from the "
       "inputs and not expected to match synthetic data."},
      {"lexical_husband_ratio_en", 9.2},
      {"lexical_minority_top150_category_share_range", {0.23, 0.32}},
      {"lexical_majority_top150_category_share_range", {0.0, 0.04}},
      {"cross_lingual_spearman", {{"coverage", 0.89}, {"structural", 0.37}, {"lexical", 0.09}}},
      {"coverage_freebase_en",
       {{"female_articles", 12685},
        {"male_articles", 96796},
        {"median_words_female", 458},
        {"median_words_male", 412}}}};
}

json to_json(const BiasReport& r) {
  const auto& names = r.group_names;
  auto gname = [&](GroupId g) { return g.value < names.size() ? names[g.value] : std::string("?"); };

  json j;
  j["schema_version"] = kSchemaVersion;
  j["provenance"] = {{"config_hash", r.provenance.config_hash},
                     {"input_hashes", r.provenance.input_hashes},
                     {"tool_version", r.provenance.tool_version}};
  j["config"] = r.config.to_json();
  j["groups"] = names;
  j["roles"] = {{"minority", gname(r.roles.minority)}, {"majority", gname(r.roles.majority)}};

  // Coverage.
  {
    json c = status_json(r.coverage_status);
    if (r.coverage) {
      json entries = json::array();
      for (const auto& e : r.coverage->entries) {
        json groups = json::object();
        for (const auto& gc : e.proportions)
          groups[gname(gc.group)] = {{"n_reference", gc.n_reference},
                                     {"n_covered", gc.n_covered},
                                     {"proportion", num(gc.proportion)}};
        for (const auto& ls : e.lengths)
          groups[gname(ls.group)]["length"] = {
              {"n", ls.n}, {"q1", ls.q1}, {"median", ls.median}, {"q3", ls.q3}};
        entries.push_back({{"dataset", e.dataset},
                           {"edition", e.edition},
                           {"groups", groups},
                           {"gap_ratio", e.gap_ratio ? num(*e.gap_ratio) : json(nullptr)},
                           {"proportion_test",
                            e.proportion_test ? test_json(*e.proportion_test) : json(nullptr)},
                           {"errors", e.errors}});
      }
      json jac = json::array();
      for (const auto& e : r.coverage->jaccard)
        jac.push_back({{"dataset_a", e.dataset_a},
                       {"dataset_b", e.dataset_b},
                       {"edition", e.edition},
                       {"value", num(e.value)}});
      c["entries"] = entries;
      c["jaccard"] = jac;
    }
    j["coverage"] = c;
  }

  // Structural.
  {
    json s = json::object();
    for (const auto& [ed, es] : r.structural) {
      json e = status_json(es.status);
      if (es.result) {
        const auto& m = es.result->matrix;
        json L = json::object(), counts = json::object();
        for (std::size_t a = 0; a < m.n_groups; ++a)
          for (std::size_t b = 0; b < m.n_groups; ++b) {
            L[names[a]][names[b]] = cell(m.L[a][b]);
            counts[names[a]][names[b]] = m.edge_counts[a][b];
          }
        json base = json::object();
        for (std::size_t g = 0; g < m.n_groups; ++g) base[names[g]] = num(m.base_rates[g]);
        json nulls = json::object();
        for (const auto& [model, env] : es.result->null_envelopes)
          nulls[structural::to_string(model)] = {
              {"assortativity", envelope_json(env.assortativity)},
              {"asymmetry", envelope_json(env.asymmetry)},
              {"undefined_assortativity", env.undefined_assortativity},
              {"undefined_asymmetry", env.undefined_asymmetry}};
        e["n_edges"] = m.n_edges;
        e["L"] = L;
        e["edge_counts"] = counts;
        e["base_rates"] = base;
        e["assortativity"] = num(es.result->assortativity);
        e["asymmetry"] = es.result->asymmetry ? num(*es.result->asymmetry) : json("undefined");
        e["null_models"] = nulls;
        e["n_runs"] = es.result->n_runs;
        e["assortativity_significant"] = es.result->assortativity_significant();
        e["asymmetry_significant"] = es.result->asymmetry_significant();
      }
      if (es.centrality) {
        const auto& c = *es.centrality;
        json groups = json::object();
        for (std::size_t g = 0; g < c.in_degrees.size(); ++g) {
          if (c.in_degrees[g].empty()) continue;
          groups[names[g]] = {{"n_nodes", c.in_degrees[g].size()},
                              {"in_degree_ccdf", ccdf_json(c.degree_ccdf[g])},
                              {"in_kcore_ccdf", ccdf_json(c.kcore_ccdf[g])}};
        }
        e["centrality"] = {{"groups", groups},
                           {"in_degree_wilcoxon", test_json(c.degree_wilcoxon)},
                           {"in_degree_ks", test_json(c.degree_ks)},
                           {"in_kcore_wilcoxon", test_json(c.kcore_wilcoxon)},
                           {"in_kcore_ks", test_json(c.kcore_ks)}};
      } else if (!es.centrality_error.empty()) {
        e["centrality_error"] = es.centrality_error;
      }
      s[ed] = e;
    }
    j["structural"] = s;
  }

  // Lexical.
  {
    json l = json::object();
    for (const auto& [ed, el] : r.lexical) {
      json e = status_json(el.status);
      e["warnings"] = el.warnings;
      if (el.status.state == SectionState::populated) {
        json dc = json::object();
        for (std::size_t g = 0; g < el.doc_counts.size(); ++g) dc[names[g]] = el.doc_counts[g];
        e["n_documents"] = el.n_documents;
        e["doc_counts"] = dc;
        e["vocabulary_size"] = el.vocabulary_size;
        e["n_features"] = el.n_features;
        json words = json::array();
        for (const auto& w : el.likelihoods) {
          json per = json::object();
          for (std::size_t g = 0; g < names.size(); ++g)
            per[names[g]] = {{"p_word_given_group", num(w.p_word_given_group[g])},
                             {"llr", llr_value(w.llr[g])},
                             {"posterior_odds", num(w.posterior_odds[g])}};
          words.push_back({{"stem", w.stem}, {"df", w.df}, {"p_word", num(w.p_word)}, {"groups", per}});
        }
        e["likelihoods"] = words;
        json ranking = json::array();
        for (const auto& rs : el.ranking)
          ranking.push_back({{"stem", rs.stem}, {"score", num(rs.score)}, {"favored", gname(rs.favored)}});
        e["ranking"] = ranking;
      }
      if (el.categories) {
        json groups = json::object();
        for (const auto& gc : el.categories->groups) {
          json props = json::object(), counts = json::object();
          for (const auto& [cat, p] : gc.proportions) props[to_string(cat)] = num(p);
          for (const auto& [cat, n] : gc.counts) counts[to_string(cat)] = n;
          json curve = json::array();
          for (double v : gc.curve) curve.push_back(num(v));
          groups[gname(gc.group)] = {
              {"n", gc.n}, {"counts", counts}, {"proportions", props}, {"curve", curve}, {"stems", gc.stems}};
        }
        e["categories"] = {{"top_n", el.categories->top_n}, {"groups", groups}};
      }
      l[ed] = e;
    }
    j["lexical"] = l;
  }

  // Visibility.
  {
    json v = status_json(r.visibility_status);
    if (r.visibility) {
      auto year_json = [&](const visibility::YearVisibility& y) {
        json groups = json::object();
        for (const auto& gv : y.groups)
          groups[gname(gv.group)] = {{"n_covered", gv.n_covered},
                                     {"n_featured", gv.n_featured},
                                     {"proportion", num(gv.proportion)}};
        return json{{"year", y.year ? json(*y.year) : json("pooled")},
                    {"groups", groups},
                    {"test", y.test ? test_json(*y.test) : json(nullptr)},
                    {"error", y.error}};
      };
      json years = json::array();
      for (const auto& y : r.visibility->years) years.push_back(year_json(y));
      v["years"] = years;
      v["pooled"] = year_json(r.visibility->pooled);
    }
    j["visibility"] = v;
  }

  // Cross-lingual.
  {
    json c = status_json(r.cross_lingual_status);
    json tests = json::object();
    for (const auto& [dim, t] : r.cross_lingual) tests[dim] = test_json(t);
    json scalars = json::object();
    for (const auto& [dim, per] : r.cross_lingual_scalars)
      for (const auto& [ed, v] : per) scalars[dim][ed] = num(v);
    c["tests"] = tests;
    c["scalars"] = scalars;
    j["cross_lingual"] = c;
  }

  j["reference_values"] = reference_values();
  return j;
}

std::string json_text(const BiasReport& report) {
  return to_json(report).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::map<std::string, std::string> csv_tables(const BiasReport& r) {
  const auto& names = r.group_names;
  auto gname = [&](GroupId g) { return g.value < names.size() ? names[g.value] : std::string("?"); };
  std::map<std::string, std::string> files;

  if (r.coverage) {
    CsvTable t({"dataset", "edition", "group", "metric", "value"});
    for (const auto& e : r.coverage->entries) {
      for (const auto& gc : e.proportions) {
        t.row({e.dataset, e.edition, gname(gc.group), "n_reference", fmt(gc.n_reference)});
        t.row({e.dataset, e.edition, gname(gc.group), "n_covered", fmt(gc.n_covered)});
        t.row({e.dataset, e.edition, gname(gc.group), "proportion", fmt(gc.proportion)});
      }
      for (const auto& ls : e.lengths) {
        t.row({e.dataset, e.edition, gname(ls.group), "length_n", fmt(std::uint64_t{ls.n})});
        t.row({e.dataset, e.edition, gname(ls.group), "length_q1", fmt(ls.q1)});
        t.row({e.dataset, e.edition, gname(ls.group), "length_median", fmt(ls.median)});
        t.row({e.dataset, e.edition, gname(ls.group), "length_q3", fmt(ls.q3)});
      }
      if (e.gap_ratio) t.row({e.dataset, e.edition, "", "gap_ratio", fmt(*e.gap_ratio)});
      if (e.proportion_test) {
        t.row({e.dataset, e.edition, "", "chi_square_statistic", fmt(e.proportion_test->statistic)});
        t.row({e.dataset, e.edition, "", "chi_square_p_value", fmt(e.proportion_test->p_value)});
        t.row({e.dataset, e.edition, "", "chi_square_direction",
               std::to_string(e.proportion_test->direction)});
      }
    }
    for (const auto& jc : r.coverage->jaccard)
      t.row({jc.dataset_a + "|" + jc.dataset_b, jc.edition, "", "jaccard", fmt(jc.value)});
    files["coverage.csv"] = t.text();
  }

  bool any_structural = false;
  CsvTable st({"edition", "record", "model", "group_a", "group_b", "metric", "threshold", "value"});
  for (const auto& [ed, es] : r.structural) {
    if (es.result) {
      any_structural = true;
      const auto& m = es.result->matrix;
      for (std::size_t a = 0; a < m.n_groups; ++a)
        for (std::size_t b = 0; b < m.n_groups; ++b) {
          st.row({ed, "matrix", "", names[a], names[b], "edge_count", "", fmt(m.edge_counts[a][b])});
          st.row({ed, "matrix", "", names[a], names[b], "L", "", fmt(m.L[a][b], "undefined")});
        }
      st.row({ed, "summary", "", "", "", "assortativity", "", fmt(es.result->assortativity)});
      st.row({ed, "summary", "", "", "", "asymmetry", "", fmt(es.result->asymmetry, "undefined")});
      for (const auto& [model, env] : es.result->null_envelopes) {
        const auto mname = structural::to_string(model);
        for (const auto& [stat, e] : {std::pair{"assortativity", env.assortativity},
                                      std::pair{"asymmetry", env.asymmetry}}) {
          if (!e) {
            st.row({ed, "null_envelope", mname, "", "", std::string(stat) + "_mean", "", "undefined"});
            continue;
          }
          st.row({ed, "null_envelope", mname, "", "", std::string(stat) + "_mean", "", fmt(e->mean)});
          st.row({ed, "null_envelope", mname, "", "", std::string(stat) + "_ci_low", "", fmt(e->ci_low)});
          st.row({ed, "null_envelope", mname, "", "", std::string(stat) + "_ci_high", "", fmt(e->ci_high)});
        }
      }
    }
    if (es.centrality) {
      any_structural = true;
      const auto& c = *es.centrality;
      const std::pair<const char*, const stats::TestResult*> tests[] = {
          {"in_degree_wilcoxon", &c.degree_wilcoxon},
          {"in_degree_ks", &c.degree_ks},
          {"in_kcore_wilcoxon", &c.kcore_wilcoxon},
          {"in_kcore_ks", &c.kcore_ks}};
      for (const auto& [name, t] : tests) {
        const std::string ga = gname(r.roles.minority), gb = gname(r.roles.majority);
        st.row({ed, "centrality_test", "", ga, gb, std::string(name) + "_statistic", "", fmt(t->statistic)});
        st.row({ed, "centrality_test", "", ga, gb, std::string(name) + "_p_value", "", fmt(t->p_value)});
        st.row({ed, "centrality_test", "", ga, gb, std::string(name) + "_direction", "",
                std::to_string(t->direction)});
      }
      for (std::size_t g = 0; g < c.degree_ccdf.size(); ++g) {
        for (const auto& p : c.degree_ccdf[g])
          st.row({ed, "ccdf", "", names[g], "", "in_degree", fmt(p.threshold), fmt(p.probability)});
        for (const auto& p : c.kcore_ccdf[g])
          st.row({ed, "ccdf", "", names[g], "", "in_kcore", fmt(p.threshold), fmt(p.probability)});
      }
    }
  }
  if (any_structural) files["structural.csv"] = st.text();

  bool any_lexical = false;
  CsvTable lt({"edition", "record", "stem", "group", "llr", "posterior_odds", "category", "rank", "n", "value"});
  for (const auto& [ed, el] : r.lexical) {
    if (el.status.state != SectionState::populated) continue;
    any_lexical = true;
    std::map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < el.ranking.size(); ++i) rank[el.ranking[i].stem] = i + 1;
    for (const auto& w : el.likelihoods) {
      auto rit = rank.find(w.stem);
      auto cit = el.stem_categories.find(w.stem);
      const std::string category =
          cit == el.stem_categories.end() ? to_string(Category::Others) : to_string(cit->second);
      for (auto g : {r.roles.minority, r.roles.majority})
        lt.row({ed, "word", w.stem, gname(g),
                w.llr[g.value] ? fmt(*w.llr[g.value]) : std::string("-inf"),
                fmt(w.posterior_odds[g.value]), category, rit == rank.end() ? "" : std::to_string(rit->second),
                "", ""});
    }
    if (el.categories) {
      for (const auto& gc : el.categories->groups) {
        for (const auto& [cat, p] : gc.proportions)
          lt.row({ed, "category_proportion", "", gname(gc.group), "", "", to_string(cat), "",
                  std::to_string(gc.n), fmt(p)});
        for (std::size_t n = 0; n < gc.curve.size(); ++n)
          lt.row({ed, "category_curve", "", gname(gc.group), "", "", "", "", std::to_string(n + 1),
                  fmt(gc.curve[n])});
      }
    }
  }
  if (any_lexical) files["lexical.csv"] = lt.text();

  if (r.visibility) {
    CsvTable vt({"year", "group", "n_covered", "n_featured", "proportion", "statistic", "p_value",
                 "direction", "error"});
    auto rows = [&](const visibility::YearVisibility& y) {
      const std::string year = y.year ? std::to_string(*y.year) : "pooled";
      for (const auto& gv : y.groups)
        vt.row({year, gname(gv.group), fmt(gv.n_covered), fmt(gv.n_featured), fmt(gv.proportion),
                y.test ? fmt(y.test->statistic) : "", y.test ? fmt(y.test->p_value) : "",
                y.test ? std::to_string(y.test->direction) : "", y.error});
    };
    for (const auto& y : r.visibility->years) rows(y);
    rows(r.visibility->pooled);
    files["visibility.csv"] = vt.text();
  }

  if (!r.cross_lingual.empty()) {
    CsvTable ct({"dimension", "edition", "metric", "value"});
    for (const auto& [dim, per] : r.cross_lingual_scalars)
      for (const auto& [ed, v] : per) ct.row({dim, ed, "scalar", fmt(v)});
    for (const auto& [dim, t] : r.cross_lingual) {
      ct.row({dim, "", "spearman", fmt(t.statistic)});
      ct.row({dim, "", "p_value", fmt(t.p_value)});
      ct.row({dim, "", "reliable", t.reliable ? "true" : "false"});
    }
    files["cross_lingual.csv"] = ct.text();
  }
  return files;
}

Format format_from_string(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv-dir" || s == "csv") return Format::csv_dir;
  throw AnalysisError("unknown output format '" + s + "' (expected json or csv-dir)");
}

std::vector<std::filesystem::path> emit(const BiasReport& report, Format format,
                                        const std::filesystem::path& path) {
  std::vector<std::filesystem::path> written;
  try {
    if (format == Format::json) {
      ingest::write_file(path, json_text(report));
      written.push_back(path);
    } else {
      std::filesystem::create_directories(path);
      for (const auto& [name, text] : csv_tables(report)) {
        ingest::write_file(path / name, text);
        written.push_back(path / name);
      }
    }
  } catch (const std::filesystem::filesystem_error& e) {
    throw ingest::IngestError("cannot write report to '" + path.string() + "': " + e.what());
  }
  return written;
}

}  // namespace biaslens::report
