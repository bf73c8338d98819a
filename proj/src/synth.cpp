#include "biaslens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biaslens/rng.hpp"

namespace biaslens::synth {

namespace {

constexpr char kConsonants[] = "bcdfghjklmnpqrstvwxz";  // no vowels, no 'y'
constexpr std::size_t kBase = 20;

std::string encode_stem(char prefix, std::size_t i) {
  std::string s(1, prefix);
  std::string digits;
  for (int k = 0; k < 4; ++k) {
    digits.push_back(kConsonants[i % kBase]);
    i /= kBase;
  }
  std::reverse(digits.begin(), digits.end());
  return s + digits + "k";
}

// Stream ids for derive_seed.
enum Stream : std::uint64_t { kCoverage = 1, kGraph, kCorpus, kFeatured, kFitness };

class Sampler {
 public:
  Sampler(const std::vector<std::size_t>& nodes, bool heavy_tail, Rng& rng) : nodes_(nodes) {
    if (!heavy_tail) return;
    cumulative_.reserve(nodes.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double u;
      do {
        u = rng.uniform01();
      } while (u <= 0.0);
      acc += std::pow(u, -1.0 / 2.5);  // Pareto, alpha = 2.5
      cumulative_.push_back(acc);
    }
  }

  std::size_t draw(Rng& rng) const {
    if (cumulative_.empty()) return nodes_[rng.uniform_index(nodes_.size())];
    const double x = rng.uniform01() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    const auto idx = std::min<std::size_t>(it - cumulative_.begin(), nodes_.size() - 1);
    return nodes_[idx];
  }

 private:
  const std::vector<std::size_t>& nodes_;
  std::vector<double> cumulative_;
};

}  // namespace

std::string shared_stem(std::size_t i) { return encode_stem('s', i); }
std::string exclusive_stem(int group, std::size_t i) { return encode_stem(group == 0 ? 'f' : 'm', i); }

double MixingMatrix::assortativity() const {
  double trace = 0.0, chance = 0.0;
  for (int g = 0; g < 2; ++g) {
    trace += e[g][g];
    chance += origin_rate(g) * target_rate(g);
  }
  return (trace - chance) / (1.0 - chance);
}

double MixingMatrix::asymmetry() const {
  return std::log(e[0][1] / (origin_rate(0) * target_rate(1))) -
         std::log(e[1][0] / (origin_rate(1) * target_rate(0)));
}

MixingMatrix solve_mixing(double minority_share, double target_assortativity,
                          double target_asymmetry) {
  const double a0 = minority_share;
  const double a1 = 1.0 - a0;
  const double r = target_assortativity;
  if (!(a0 > 0.0 && a0 < 1.0)) throw AnalysisError("synth: minority share must lie in (0, 1)");
  if (!(r > -1.0 && r < 1.0)) throw AnalysisError("synth: target_assortativity must lie in (-1, 1)");

  // With r = 0 every feasible matrix is an outer product of its marginals and
  // all L cells vanish, so only A = 0 is reachable.
  if (r == 0.0) {
    if (target_asymmetry != 0.0)
      throw AnalysisError("synth: infeasible targets: assortativity 0 forces asymmetry 0");
    MixingMatrix m;
    m.e = {{{a0 * a0, a0 * a1}, {a1 * a0, a1 * a1}}};
    return m;
  }

  // For a target in-share b of the minority, the assortativity target fixes
  // e00; the remaining cells follow from the marginals. Asymmetry is then a
  // function of b alone, solved by bracketing.
  auto cells = [&](double b) -> std::optional<MixingMatrix> {
    const double chance = a0 * b + a1 * (1.0 - b);
    const double e00 = (r * (1.0 - chance) + chance - a1 + b) / 2.0;
    MixingMatrix m;
    m.e = {{{e00, a0 - e00}, {b - e00, a1 - (b - e00)}}};
    for (const auto& row : m.e)
      for (double v : row)
        if (!(v > 0.0)) return std::nullopt;
    return m;
  };
  auto residual = [&](double b) {
    auto m = cells(b);
    return m ? std::optional(m->asymmetry() - target_asymmetry) : std::nullopt;
  };

  constexpr int kGrid = 20000;
  std::optional<MixingMatrix> best;
  double best_distance = 0.0;
  std::optional<double> prev_b, prev_v;
  for (int i = 1; i < kGrid; ++i) {
    const double b = static_cast<double>(i) / kGrid;
    const auto v = residual(b);
    if (v && prev_v && ((*v > 0) != (*prev_v > 0) || *v == 0.0)) {
      double lo = *prev_b, hi = b;
      double flo = *prev_v;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto fm = residual(mid);
        if (!fm) break;
        if ((*fm > 0) == (flo > 0)) {
          lo = mid;
          flo = *fm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      if (auto m = cells(root)) {
        const double dist = std::fabs(root - a0);
        if (!best || dist < best_distance) {
          best = m;
          best_distance = dist;
        }
      }
    }
    prev_b = b;
    prev_v = v;
  }
  if (!best) {
    std::ostringstream msg;
    msg << "synth: infeasible targets (assortativity = " << target_assortativity
        << ", asymmetry = " << target_asymmetry << ", minority share = " << minority_share
        << "): no edge-fraction matrix with all four cells positive";
    throw AnalysisError(msg.str());
  }
  return *best;
}

void validate_spec(const SynthSpec& spec) {
  auto rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw AnalysisError(std::string("synth: ") + name + " must lie in [0, 1]");
  };
  rate(spec.coverage_minority, "coverage_minority");
  rate(spec.coverage_majority, "coverage_majority");
  rate(spec.featured_minority, "featured_minority");
  rate(spec.featured_majority, "featured_majority");
  if (!(spec.mean_out_degree > 0.0)) throw AnalysisError("synth: mean_out_degree must be positive");
  if (spec.n_minority < 2 || spec.n_majority < 2)
    throw AnalysisError("synth: each group needs at least 2 nodes");
  if (spec.minority_name == spec.majority_name || spec.minority_name.empty() ||
      spec.majority_name.empty())
    throw AnalysisError("synth: group names must be distinct and non-empty");
  if (spec.editions.empty()) throw AnalysisError("synth: no editions");
  if (spec.shared_vocab == 0 || spec.doc_length == 0)
    throw AnalysisError("synth: vocabulary and document length must be positive");
  if (spec.shared_vocab > kBase * kBase * kBase * kBase ||
      spec.exclusive_vocab > kBase * kBase * kBase * kBase)
    throw AnalysisError("synth: vocabulary too large");
  if (!(spec.exclusive_rate > 0.0)) throw AnalysisError("synth: exclusive_rate must be positive");
}

ingest::DatasetBundle generate(const SynthSpec& spec) {
  validate_spec(spec);
  ingest::DatasetBundle bundle;

  // Group ids follow the sorted-name convention used when loading files.
  const bool minority_first = spec.minority_name < spec.majority_name;
  const GroupId gid[2] = {GroupId{minority_first ? 0u : 1u}, GroupId{minority_first ? 1u : 0u}};
  std::vector<GroupLabel> labels(2);
  labels[gid[0].value] = {gid[0], spec.minority_name};
  labels[gid[1].value] = {gid[1], spec.majority_name};

  const std::size_t n = spec.n_minority + spec.n_majority;
  std::vector<int> role(n);
  std::vector<Entity> entities(n);
  const int width = static_cast<int>(std::to_string(n).size());
  for (std::size_t i = 0; i < n; ++i) {
    role[i] = i < spec.n_minority ? 0 : 1;
    std::string num = std::to_string(i);
    num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
    entities[i].id = "p" + num;
    entities[i].group = gid[role[i]];
    entities[i].datasets.insert(spec.dataset);
    if (i % 3 == 0) entities[i].datasets.insert(spec.dataset + "_b");
  }

  const double total_w = static_cast<double>(spec.shared_vocab) +
                         spec.exclusive_rate * static_cast<double>(spec.exclusive_vocab);
  const double p_exclusive = spec.exclusive_vocab == 0
                                 ? 0.0
                                 : spec.exclusive_rate * static_cast<double>(spec.exclusive_vocab) / total_w;

  for (std::size_t ei = 0; ei < spec.editions.size(); ++ei) {
    const std::string& ed = spec.editions[ei];
    const double cov[2] = {spec.coverage_minority, spec.coverage_majority};

    Rng cov_rng(derive_seed(spec.seed, ei, kCoverage));
    std::vector<std::size_t> covered[2];
    for (std::size_t i = 0; i < n; ++i) {
      const bool c = cov_rng.bernoulli(cov[role[i]]);
      entities[i].covered[ed] = c;
      if (c) covered[role[i]].push_back(i);
    }

    // Corpus.
    Rng doc_rng(derive_seed(spec.seed, ei, kCorpus));
    auto& docs = bundle.corpus[ed];
    for (std::size_t i = 0; i < n; ++i) {
      if (!entities[i].covered[ed]) continue;
      std::uint64_t words = 0;
      for (std::size_t d = 0; d < spec.docs_per_entity; ++d) {
        std::string text;
        for (std::size_t t = 0; t < spec.doc_length; ++t) {
          if (!text.empty()) text.push_back(' ');
          if (doc_rng.bernoulli(p_exclusive))
            text += exclusive_stem(role[i], doc_rng.uniform_index(spec.exclusive_vocab));
          else
            text += shared_stem(doc_rng.uniform_index(spec.shared_vocab));
        }
        words += spec.doc_length;
        docs.push_back({entities[i].id, ed, std::move(text)});
      }
      entities[i].article_length[ed] = words;
    }
    if (spec.docs_per_entity == 0) bundle.corpus.erase(ed);

    // Graph over covered entities.
    const std::size_t n_cov = covered[0].size() + covered[1].size();
    if (covered[0].size() < 2 || covered[1].size() < 2)
      throw AnalysisError("synth: edition " + ed + " has fewer than 2 covered nodes in a group");
    const double share = static_cast<double>(covered[0].size()) / static_cast<double>(n_cov);
    const MixingMatrix mix = solve_mixing(share, spec.target_assortativity, spec.target_asymmetry);

    Rng fit_rng(derive_seed(spec.seed, ei, kFitness));
    const Sampler origin_sampler[2] = {Sampler(covered[0], spec.heavy_tail, fit_rng),
                                       Sampler(covered[1], spec.heavy_tail, fit_rng)};
    const Sampler target_sampler[2] = {Sampler(covered[0], spec.heavy_tail, fit_rng),
                                       Sampler(covered[1], spec.heavy_tail, fit_rng)};
    const double c00 = mix.e[0][0];
    const double c01 = c00 + mix.e[0][1];
    const double c10 = c01 + mix.e[1][0];

    Rng graph_rng(derive_seed(spec.seed, ei, kGraph));
    LinkGraph graph;
    for (std::size_t i = 0; i < n; ++i)
      if (entities[i].covered[ed]) graph.nodes.push_back(entities[i].id);
    const auto n_edges =
        static_cast<std::size_t>(std::llround(spec.mean_out_degree * static_cast<double>(n_cov)));
    graph.edges.reserve(n_edges);
    for (std::size_t k = 0; k < n_edges; ++k) {
      const double u = graph_rng.uniform01();
      const int from_g = u < c01 ? 0 : 1;
      const int to_g = u < c00 ? 0 : (u < c01 ? 1 : (u < c10 ? 0 : 1));
      const std::size_t from = origin_sampler[from_g].draw(graph_rng);
      std::size_t to;
      do {
        to = target_sampler[to_g].draw(graph_rng);
      } while (to == from);
      graph.edges.emplace_back(entities[from].id, entities[to].id);
    }
    bundle.graphs[ed] = std::move(graph);
  }

  // Featured log, drawn against coverage in the first edition.
  const std::string& first = spec.editions.front();
  Rng feat_rng(derive_seed(spec.seed, 0, kFeatured));
  const double feat[2] = {spec.featured_minority, spec.featured_majority};
  for (int year : spec.featured_years)
    for (std::size_t i = 0; i < n; ++i)
      if (entities[i].covered[first] && feat_rng.bernoulli(feat[role[i]]))
        bundle.featured_log.push_back({entities[i].id, year});

  for (std::size_t i = 0; i < spec.exclusive_vocab; ++i) {
    switch (i % 10) {
      case 0:
        bundle.lexicons[exclusive_stem(0, i)] = Category::Gender;
        bundle.lexicons[exclusive_stem(1, i)] = Category::Gender;
        break;
      case 1: bundle.lexicons[exclusive_stem(0, i)] = Category::Relationship; break;
      case 2: bundle.lexicons[exclusive_stem(0, i)] = Category::Family; break;
      default: break;
    }
  }

  std::map<std::string, double> ranking;
  for (std::size_t ei = 0; ei < spec.editions.size(); ++ei)
    ranking[spec.editions[ei]] = static_cast<double>(ei + 1);
  bundle.external_ranking = ranking;

  bundle.table = EntityTable(std::move(labels), std::move(entities), spec.editions);
  return bundle;
}

}  // namespace biaslens::synth
