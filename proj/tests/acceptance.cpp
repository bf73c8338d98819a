#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "biaslens/coverage.hpp"
#include "biaslens/ingest.hpp"
#include "biaslens/lexical.hpp"
#include "biaslens/report.hpp"
#include "biaslens/rng.hpp"
#include "biaslens/stats.hpp"
#include "biaslens/structural.hpp"
#include "biaslens/synth.hpp"

using namespace biaslens;
using structural::CompactGraph;
using structural::GroupRoles;
using structural::NullModel;
namespace fs = std::filesystem;

namespace {

const GroupRoles kRoles{{0}, {1}};
const NullModel kModels[] = {NullModel::randomized_gender, NullModel::randomized_link_end,
                             NullModel::randomized_link_origin};

int unexpected = 0;
int known_red = 0;

void line(const std::string& name, bool ok, const std::string& detail, bool known = false) {
  const char* tag = ok ? "PASS" : (known ? "FAIL (known)" : "FAIL");
  std::printf("%-13s %s: %s\n", tag, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++(known ? known_red : unexpected);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void timed(const std::string& name, const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body();
  } catch (const std::exception& e) {
    line(name, false, std::string("threw: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("              (%s took %.1f s)\n", name.c_str(), s);
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

using EdgeList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

CompactGraph make(std::vector<std::size_t> groups, EdgeList edges) {
  CompactGraph g;
  for (std::size_t i = 0; i < groups.size(); ++i) g.node_ids.push_back("n" + std::to_string(i));
  g.node_group = std::move(groups);
  g.edges = std::move(edges);
  g.n_groups = 2;
  return g;
}

// ---- structural oracle ----------------------------------------------------

void structural_oracle() {
  std::size_t graphs = 0;
  double worst = 0.0;
  std::size_t mismatched = 0;
  for (std::uint32_t n = 1; n <= 5; ++n) {
    EdgeList all;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        if (a != b) all.emplace_back(a, b);
    for (std::uint32_t labels = 0; labels < (1u << n); ++labels) {
      std::vector<std::size_t> groups(n);
      for (std::uint32_t i = 0; i < n; ++i) groups[i] = labels >> i & 1;
      auto g = make(groups, {});
      for (std::uint32_t mask = 0; mask < (1u << all.size()); ++mask) {
        if (std::popcount(mask) > 8) continue;
        g.edges.clear();
        double e[2][2] = {{0, 0}, {0, 0}};
        for (std::size_t i = 0; i < all.size(); ++i)
          if (mask >> i & 1) {
            g.edges.push_back(all[i]);
            e[groups[all[i].first]][groups[all[i].second]] += 1;
          }
        ++graphs;
        const double m = g.edges.size();

        std::optional<structural::AssortativityMatrix> mat;
        try {
          mat = structural::assortativity_matrix(g);
        } catch (const AnalysisError&) {
        }
        const bool one_group = e[0][0] + e[0][1] + e[1][0] == 0 || e[1][1] + e[0][1] + e[1][0] == 0;
        if (m == 0 || one_group) {
          if (mat) ++mismatched;
          continue;
        }
        if (!mat) {
          ++mismatched;
          continue;
        }
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            const double row = e[i][0] + e[i][1], col = e[0][j] + e[1][j];
            const auto& got = mat->L[i][j];
            if (e[i][j] == 0) {
              if (got) ++mismatched;
              continue;
            }
            if (!got) {
              ++mismatched;
              continue;
            }
            worst = std::max(worst, std::abs(*got - std::log((e[i][j] / row) / (col / m))));
          }

        double tr = 0, ab = 0;
        for (int i = 0; i < 2; ++i) {
          tr += e[i][i] / m;
          ab += (e[i][0] + e[i][1]) / m * (e[0][i] + e[1][i]) / m;
        }
        std::optional<double> got;
        try {
          got = structural::newman_assortativity(*mat);
        } catch (const AnalysisError&) {
        }
        if (std::abs(1 - ab) < 1e-15) {
          if (got) ++mismatched;
        } else if (!got) {
          ++mismatched;
        } else {
          worst = std::max(worst, std::abs(*got - (tr - ab) / (1 - ab)));
        }
      }
    }
  }
  line("structural oracle", mismatched == 0 && worst <= 1e-10,
       fmt("%zu graphs (<=5 nodes, <=8 edges), max |diff| %.2e, definedness mismatches %zu", graphs,
           worst, mismatched));
}

// ---- null calibration -----------------------------------------------------

void null_calibration() {
  Rng rng(2024);
  const std::uint32_t n = 2000;
  std::vector<std::size_t> groups(n);
  for (auto& g : groups) g = rng.bernoulli(0.3) ? 0 : 1;
  EdgeList edges;
  for (std::uint32_t a = 0; a < n; ++a) {
    std::set<std::uint32_t> targets;
    while (targets.size() < 5) {
      const auto b = static_cast<std::uint32_t>(rng.uniform_index(n));
      if (b != a) targets.insert(b);
    }
    for (auto b : targets) edges.emplace_back(a, b);
  }
  const auto g = make(groups, edges);
  const auto res = structural::structural_analysis(g, kRoles, 10000, 77, workers());
  for (auto model : kModels) {
    const auto& env = res.null_envelopes.at(model);
    const bool ok = env.assortativity && env.asymmetry && res.asymmetry &&
                    env.assortativity->contains(0.0) && env.asymmetry->contains(0.0) &&
                    env.assortativity->contains(res.assortativity) &&
                    env.asymmetry->contains(*res.asymmetry);
    line("null calibration " + structural::to_string(model), ok,
         fmt("r=%.4f in [%.4f, %.4f], A=%.4f in [%.4f, %.4f], %zu runs", res.assortativity,
             env.assortativity ? env.assortativity->ci_low : NAN,
             env.assortativity ? env.assortativity->ci_high : NAN, res.asymmetry.value_or(NAN),
             env.asymmetry ? env.asymmetry->ci_low : NAN, env.asymmetry ? env.asymmetry->ci_high : NAN,
             res.n_runs));
  }
}

// ---- planted recovery -----------------------------------------------------

void planted_recovery() {
  double sum_r = 0, sum_a = 0;
  std::size_t outside = 0, total = 0;
  const int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    synth::SynthSpec spec;
    spec.n_minority = 1000;
    spec.n_majority = 4000;
    spec.target_assortativity = 0.3;
    spec.target_asymmetry = 0.5;
    spec.shared_vocab = 50;
    spec.exclusive_vocab = 5;
    spec.doc_length = 5;
    spec.seed = static_cast<std::uint64_t>(s);
    const auto bundle = synth::generate(spec);
    const auto g = structural::compact(bundle.graphs.at("en"), bundle.table);
    const auto res = structural::structural_analysis(g, kRoles, 100, 1000 + s, workers());
    sum_r += res.assortativity;
    sum_a += res.asymmetry.value_or(NAN);
    for (auto model : kModels) {
      const auto& env = res.null_envelopes.at(model);
      total += 2;
      outside += env.assortativity && !env.assortativity->contains(res.assortativity);
      outside += env.asymmetry && res.asymmetry && !env.asymmetry->contains(*res.asymmetry);
    }
  }
  const double mr = sum_r / seeds, ma = sum_a / seeds;
  line("planted recovery estimates", std::abs(mr - 0.3) <= 0.1 && std::abs(ma - 0.5) <= 0.1,
       fmt("mean r=%.4f (target 0.3), mean A=%.4f (target 0.5) over %d seeds, n=5000", mr, ma, seeds));
  line("planted recovery significance", outside == total,
       fmt("%zu of %zu (seed, model, statistic) estimates outside the null envelope", outside, total));
}

// ---- k-core ---------------------------------------------------------------

std::vector<std::uint64_t> naive_kcore(std::size_t n, const EdgeList& edges) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> uniq(edges.begin(), edges.end());
  std::vector<std::uint64_t> core(n, 0);
  for (std::uint64_t k = 1;; ++k) {
    std::vector<bool> alive(n, true);
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::uint64_t> indeg(n, 0);
      for (auto [a, b] : uniq)
        if (alive[a] && alive[b]) ++indeg[b];
      for (std::size_t v = 0; v < n; ++v)
        if (alive[v] && indeg[v] < k) {
          alive[v] = false;
          changed = true;
        }
    }
    bool any = false;
    for (std::size_t v = 0; v < n; ++v)
      if (alive[v]) core[v] = k, any = true;
    if (!any) return core;
  }
}

void kcore_oracle() {
  Rng rng(5);
  int matches = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto n = static_cast<std::uint32_t>(1 + rng.uniform_index(50));
    const auto m = rng.uniform_index(n * 6 + 1);
    std::vector<std::size_t> groups(n);
    for (auto& g : groups) g = rng.uniform_index(2);
    EdgeList edges;
    for (std::uint64_t i = 0; i < m && n > 1; ++i) {
      const auto a = static_cast<std::uint32_t>(rng.uniform_index(n));
      const auto b = static_cast<std::uint32_t>(rng.uniform_index(n));
      if (a != b) edges.emplace_back(a, b);
    }
    matches += structural::in_kcore(make(groups, edges)) == naive_kcore(n, edges);
  }
  line("k-core oracle", matches == 200, fmt("%d of 200 random digraphs match naive deletion", matches));
}

// ---- statistics kernel ----------------------------------------------------

double exact_wilcoxon(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pool = x;
  pool.insert(pool.end(), y.begin(), y.end());
  const auto ranks = stats::midranks(pool);
  const std::size_t m = x.size(), n = pool.size();
  const double expected = m * (n + 1) / 2.0;
  const double w = std::accumulate(ranks.begin(), ranks.begin() + m, 0.0);
  std::size_t hit = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s += ranks[i];
    ++total;
    hit += std::abs(s - expected) >= std::abs(w - expected) - 1e-9;
  }
  return static_cast<double>(hit) / total;
}

// Worst |approx - exact| over splits of `values` with min(|x|,|y|) in [lo, hi].
double wilcoxon_worst(const std::vector<double>& values, std::size_t lo, std::size_t hi) {
  double worst = 0;
  const std::size_t n = values.size();
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) (mask >> i & 1 ? x : y).push_back(values[i]);
    const auto small = std::min(x.size(), y.size());
    if (small < lo || small > hi) continue;
    worst = std::max(worst, std::abs(stats::wilcoxon_rank_sum(x, y).p_value - exact_wilcoxon(x, y)));
  }
  return worst;
}

double brute_ks(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0;
  auto cdf = [](const std::vector<double>& s, double t) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= t; })) / s.size();
  };
  for (const auto& s : {x, y})
    for (double t : s) d = std::max(d, std::abs(cdf(x, t) - cdf(y, t)));
  return d;
}

void statistics_kernel() {
  const auto chi = stats::chi_square_2x2(20, 10, 10, 20);
  const double x = 20.0 / 3.0;
  Rng rng(99);
  std::size_t exceed = 0;
  const std::size_t draws = 1000000;
  for (std::size_t i = 0; i < draws; ++i) {
    const double z = rng.normal();
    exceed += z * z >= x;
  }
  const double mc = static_cast<double>(exceed) / draws;
  const double series = stats::gamma_q(0.5, x / 2);
  line("chi-square 2x2",
       std::abs(chi.statistic - x) <= 1e-9 && std::abs(chi.p_value - 0.0098) <= 1e-3 &&
           std::abs(series - chi.p_value) <= 1e-12 && std::abs(mc - chi.p_value) <= 1e-3,
       fmt("statistic %.12f, p %.6f, gamma series %.6f, Monte Carlo %.6f (10^6 draws)", chi.statistic,
           chi.p_value, series, mc));

  const std::vector<double> distinct{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<double> tied{1, 2, 2, 3, 3, 4, 4, 5};
  const double d_main = wilcoxon_worst(distinct, 2, 4);
  const double d_single = wilcoxon_worst(distinct, 1, 1);
  const double t_all = wilcoxon_worst(tied, 1, 4);
  line("wilcoxon vs exact, distinct values, both samples >= 2", d_main <= 0.05,
       fmt("max |approx - exact| %.4f over splits of 1..8", d_main));
  line("wilcoxon vs exact, distinct values, singleton sample", d_single <= 0.05,
       fmt("max |approx - exact| %.4f", d_single), true);
  line("wilcoxon vs exact, tied values", t_all <= 0.05,
       fmt("max |approx - exact| %.4f over splits of {1,2,2,3,3,4,4,5}", t_all), true);

  int ks_ok = 0;
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<double> a(1 + rng.uniform_index(30)), b(1 + rng.uniform_index(30));
    for (auto& v : a) v = static_cast<double>(rng.uniform_index(12));
    for (auto& v : b) v = static_cast<double>(rng.uniform_index(12)) + (rep % 3);
    ks_ok += stats::ks_two_sample(a, b).statistic == brute_ks(a, b);
  }
  line("ks vs pooled-point brute force", ks_ok == 500, fmt("%d of 500 random tied samples exact", ks_ok));

  const std::vector<double> sx{1, 2, 3, 4, 5, 6}, sy{2, 1, 3, 4, 6, 5};
  const double rho = stats::spearman(sx, sy).statistic;
  line("spearman worked example", std::abs(rho - 0.8857) <= 1e-4, fmt("rho %.6f", rho));
}

// ---- lexical --------------------------------------------------------------

void lexical_suite() {
  synth::SynthSpec spec;
  spec.n_minority = 2500;
  spec.n_majority = 7500;
  spec.target_assortativity = 0.1;
  spec.target_asymmetry = 0.1;
  spec.mean_out_degree = 1;
  spec.seed = 11;
  const auto train = synth::generate(spec);
  const auto& corpus = train.corpus.at("en");
  const auto rows = lexical::word_likelihood_ratios(corpus, train.table, "en", kRoles);
  double worst = 0;
  for (const auto& r : rows) {
    double s = 0;
    for (std::size_t g = 0; g < r.group_prior.size(); ++g) s += r.p_word_given_group[g] * r.group_prior[g];
    worst = std::max(worst, std::abs(s - r.p_word));
  }
  line("lexical total probability", worst <= 1e-12,
       fmt("%zu documents, %zu stems, max |sum - P(word)| %.2e", corpus.size(), rows.size(), worst));

  const auto model = lexical::train_discriminative_ranking(corpus, train.table, "en", kRoles);
  spec.seed = 12;
  spec.n_minority = 500;
  spec.n_majority = 500;
  const auto held = synth::generate(spec);
  std::size_t correct = 0;
  for (const auto& d : held.corpus.at("en"))
    correct += lexical::classify(model, d.text).group == held.table.find(d.entity_id)->group;
  const double acc = static_cast<double>(correct) / held.corpus.at("en").size();
  line("lexical held-out accuracy", acc > 0.9, fmt("accuracy %.4f on %zu documents", acc, held.corpus.at("en").size()));

  std::set<std::string> planted;
  for (int g = 0; g < 2; ++g)
    for (std::size_t i = 0; i < spec.exclusive_vocab; ++i) planted.insert(synth::exclusive_stem(g, i));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(150, model.nb_ranking.size()); ++i)
    hits += planted.count(model.nb_ranking[i].stem);
  line("lexical planted stems in top 150", hits >= 40, fmt("%zu planted stems in the top 150", hits));
}

// ---- schema conformance ---------------------------------------------------

void schema_conformance() {
  const auto path = fs::temp_directory_path() / "biaslens_acceptance_freebase.tsv";
  {
    std::ofstream out(path);
    out << "id\tgender\tdatasets\tcovered_en\tlength_en\n";
    for (int i = 0; i < 12685; ++i)
      out << "f" << i << "\tfemale\tfreebase\t1\t" << (i < 6342 ? 300 : i == 6342 ? 458 : 900) << "\n";
    for (int i = 0; i < 96796; ++i)
      out << "m" << i << "\tmale\tfreebase\t1\t" << (i < 48397 ? 200 : i == 48397 ? 412 : 800) << "\n";
  }
  const auto table = ingest::load_entities(path).value;
  fs::remove(path);
  const auto female = table.group_by_name("female"), male = table.group_by_name("male");
  const auto rep = coverage::coverage_report(table, {"freebase"}, {"en"}, {female, male});
  const auto& e = rep.entries.at(0);
  std::uint64_t med_f = 0, med_m = 0;
  for (const auto& l : e.lengths) (l.group == female ? med_f : med_m) = l.median;
  const double gap = e.gap_ratio.value_or(NAN);
  line("freebase fixture medians and gap", med_f == 458 && med_m == 412 && std::abs(gap - 7.631) <= 1e-3,
       fmt("medians %llu / %llu, gap ratio %.4f", static_cast<unsigned long long>(med_f),
           static_cast<unsigned long long>(med_m), gap));

  std::vector<lexical::RankedStem> ranking{
      {"husband", 5, {0}}, {"femal", 4, {0}}, {"footbal", 3.5, {1}}, {"divorc", 3, {0}}, {"actor", 2, {0}}};
  Lexicons lex{{"husband", Category::Relationship}, {"femal", Category::Gender}, {"divorc", Category::Relationship}};
  const auto cats = lexical::category_report(ranking, lex, 2, 4);
  const auto* f = cats.find({0});
  const bool ok = f && f->proportions.at(Category::Relationship) == 0.5 &&
                  f->proportions.at(Category::Gender) == 0.25 &&
                  f->proportions.at(Category::Others) == 0.25 && f->proportions.at(Category::Family) == 0.0;
  line("category hand-count example", ok,
       f ? fmt("Relationship %.2f, Gender %.2f, Others %.2f", f->proportions.at(Category::Relationship),
               f->proportions.at(Category::Gender), f->proportions.at(Category::Others))
         : "no female row");
}

void disclosure() {
  const auto ref = report::reference_values();
  const bool ok = ref.value("lexical_husband_ratio_en", 0.0) == 9.2 &&
                  ref["cross_lingual_spearman"].value("coverage", 0.0) == 0.89 &&
                  ref["cross_lingual_spearman"].value("structural", 0.0) == 0.37 &&
                  ref["cross_lingual_spearman"].value("lexical", 0.0) == 0.09 && ref.contains("note");
  line("full-scale values rendered as comparison points", ok,
       "published corpus-level numbers are listed in every report and are not recomputed");
}

// ---- end to end -----------------------------------------------------------

int sh(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void end_to_end() {
  const auto dir = fs::temp_directory_path() / "biaslens_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = BIASLENS_CLI;
  const auto bundle = (dir / "bundle").string();
  int rc = sh(cli + " synth --out " + bundle +
              " --n-minority 300 --n-majority 900 --editions en,de,fr --assortativity 0.2 --asymmetry 0.3 --seed 4");
  const std::string analyze = " analyze --bundle " + bundle + " --null-runs 200 --seed 8";
  rc |= sh("BIASLENS_WORKERS=1 " + cli + analyze + " --out " + (dir / "a.json").string());
  rc |= sh("BIASLENS_WORKERS=4 " + cli + analyze + " --out " + (dir / "b.json").string());
  rc |= sh(cli + analyze + " --format csv-dir --out " + (dir / "csv_a").string());
  rc |= sh(cli + analyze + " --format csv-dir --out " + (dir / "csv_b").string());
  const auto a = slurp(dir / "a.json");
  bool same = !a.empty() && a == slurp(dir / "b.json");
  std::size_t csv_files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "csv_a")) {
    ++csv_files;
    same = same && slurp(entry.path()) == slurp(dir / "csv_b" / entry.path().filename());
  }
  line("end-to-end determinism", rc == 0 && same && csv_files == 5,
       fmt("exit codes %s, json %zu bytes identical across worker counts, %zu csv files identical",
           rc == 0 ? "0" : "nonzero", a.size(), csv_files));
  fs::remove_all(dir);
}

}  // namespace

int main() {
  timed("structural oracle", structural_oracle);
  timed("null calibration", null_calibration);
  timed("planted recovery", planted_recovery);
  timed("k-core oracle", kcore_oracle);
  timed("statistics kernel", statistics_kernel);
  timed("lexical", lexical_suite);
  timed("schema conformance", schema_conformance);
  timed("disclosure", disclosure);
  timed("end-to-end", end_to_end);
  std::printf("%d unexpected failure(s), %d known\n", unexpected, known_red);
  return unexpected == 0 ? 0 : 1;
}
