#include "biaslens/structural.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>
#include <unordered_map>

#include "biaslens/rng.hpp"

namespace biaslens::structural {

std::string to_string(NullModel m) {
  switch (m) {
    case NullModel::randomized_gender: return "randomized_gender";
    case NullModel::randomized_link_end: return "randomized_link_end";
    case NullModel::randomized_link_origin: return "randomized_link_origin";
  }
  return "unknown";
}

NullModel null_model_from_string(const std::string& name) {
  for (auto m : kAllNullModels)
    if (to_string(m) == name) return m;
  throw AnalysisError("unknown null model '" + name + "'");
}

CompactGraph compact(const LinkGraph& graph, const EntityTable& table) {
  CompactGraph g;
  g.n_groups = table.groups().size();
  std::unordered_map<std::string, std::uint32_t> index;
  for (const auto& id : graph.nodes) {
    const Entity* e = table.find(id);
    if (!e || index.count(id)) continue;
    index.emplace(id, static_cast<std::uint32_t>(g.node_ids.size()));
    g.node_ids.push_back(id);
    g.node_group.push_back(e->group.value);
  }
  g.edges.reserve(graph.edges.size());
  for (const auto& [from, to] : graph.edges) {
    auto a = index.find(from);
    auto b = index.find(to);
    if (a == index.end() || b == index.end()) continue;
    g.edges.emplace_back(a->second, b->second);
  }
  return g;
}

double AssortativityMatrix::conditional(std::size_t g1, std::size_t g2) const {
  std::uint64_t row = 0;
  for (auto c : edge_counts[g1]) row += c;
  return row == 0 ? 0.0 : static_cast<double>(edge_counts[g1][g2]) / static_cast<double>(row);
}

AssortativityMatrix matrix_from_counts(std::vector<std::vector<std::uint64_t>> counts) {
  AssortativityMatrix m;
  m.n_groups = counts.size();
  m.edge_counts = std::move(counts);
  const std::size_t G = m.n_groups;
  std::vector<std::uint64_t> row(G, 0), col(G, 0);
  for (std::size_t i = 0; i < G; ++i)
    for (std::size_t j = 0; j < G; ++j) {
      row[i] += m.edge_counts[i][j];
      col[j] += m.edge_counts[i][j];
      m.n_edges += m.edge_counts[i][j];
    }
  if (m.n_edges == 0) throw AnalysisError("assortativity: graph has no edges");
  std::size_t active = 0;
  for (std::size_t g = 0; g < G; ++g)
    if (row[g] + col[g] > 0) ++active;
  if (active < 2) throw AnalysisError("assortativity: single group among linked nodes");

  const double E = static_cast<double>(m.n_edges);
  m.base_rates.resize(G);
  m.origin_rates.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    m.base_rates[g] = static_cast<double>(col[g]) / E;
    m.origin_rates[g] = static_cast<double>(row[g]) / E;
  }
  m.L.assign(G, std::vector<std::optional<double>>(G));
  for (std::size_t i = 0; i < G; ++i)
    for (std::size_t j = 0; j < G; ++j) {
      if (m.edge_counts[i][j] == 0) continue;
      // ln((c_ij / row_i) / (col_j / E)), arranged to avoid cancellation.
      const double c = static_cast<double>(m.edge_counts[i][j]);
      m.L[i][j] = std::log(c * E / (static_cast<double>(row[i]) * static_cast<double>(col[j])));
    }
  return m;
}

namespace {

std::vector<std::vector<std::uint64_t>> count_edges(const std::vector<std::size_t>& group,
                                                    const CompactGraph& g) {
  std::vector<std::vector<std::uint64_t>> counts(g.n_groups,
                                                 std::vector<std::uint64_t>(g.n_groups, 0));
  for (const auto& [a, b] : g.edges) ++counts[group[a]][group[b]];
  return counts;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BIASLENS_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace

AssortativityMatrix assortativity_matrix(const CompactGraph& graph) {
  return matrix_from_counts(count_edges(graph.node_group, graph));
}

AssortativityMatrix assortativity_matrix(const LinkGraph& graph, const EntityTable& table) {
  return assortativity_matrix(compact(graph, table));
}

double newman_assortativity(const AssortativityMatrix& m) {
  const double E = static_cast<double>(m.n_edges);
  double trace = 0.0, chance = 0.0;
  for (std::size_t g = 0; g < m.n_groups; ++g) {
    trace += static_cast<double>(m.edge_counts[g][g]) / E;
    chance += m.origin_rates[g] * m.base_rates[g];
  }
  const double denom = 1.0 - chance;
  if (denom <= 1e-15) throw AnalysisError("degenerate: single-group edges");
  return (trace - chance) / denom;
}

double newman_assortativity(const LinkGraph& graph, const EntityTable& table) {
  return newman_assortativity(assortativity_matrix(graph, table));
}

double asymmetry(const AssortativityMatrix& m, GroupId minor, GroupId major) {
  if (minor.value >= m.n_groups || major.value >= m.n_groups)
    throw AnalysisError("asymmetry: group out of range");
  const auto& fm = m.L[minor.value][major.value];
  const auto& mf = m.L[major.value][minor.value];
  if (!fm)
    throw AnalysisError("asymmetry: undefined cell L(" + std::to_string(minor.value) + "," +
                        std::to_string(major.value) + ")");
  if (!mf)
    throw AnalysisError("asymmetry: undefined cell L(" + std::to_string(major.value) + "," +
                        std::to_string(minor.value) + ")");
  return *fm - *mf;
}

CompactGraph randomize(const CompactGraph& graph, NullModel model, std::uint64_t seed) {
  Rng rng(seed);
  CompactGraph out = graph;
  const std::uint64_t n = graph.node_ids.size();
  switch (model) {
    case NullModel::randomized_gender:
      rng.shuffle(std::span<std::size_t>(out.node_group));
      break;
    case NullModel::randomized_link_end:
      // Endpoints come from all nodes except the fixed endpoint (no self-loops).
      for (auto& [from, to] : out.edges) {
        auto t = static_cast<std::uint32_t>(rng.uniform_index(n - 1));
        to = t >= from ? t + 1 : t;
      }
      break;
    case NullModel::randomized_link_origin:
      for (auto& [from, to] : out.edges) {
        auto f = static_cast<std::uint32_t>(rng.uniform_index(n - 1));
        from = f >= to ? f + 1 : f;
      }
      break;
  }
  return out;
}

NullRun null_model_run(const CompactGraph& graph, NullModel model, std::uint64_t seed,
                       GroupRoles roles) {
  if (graph.node_ids.size() < 2) throw AnalysisError("null model: need at least 2 nodes");
  const CompactGraph r = randomize(graph, model, seed);
  NullRun run;
  AssortativityMatrix m;
  try {
    m = matrix_from_counts(count_edges(r.node_group, r));
  } catch (const AnalysisError&) {
    return run;
  }
  try {
    run.assortativity = newman_assortativity(m);
  } catch (const AnalysisError&) {
  }
  const auto& fm = m.L[roles.minority.value][roles.majority.value];
  const auto& mf = m.L[roles.majority.value][roles.minority.value];
  if (fm && mf) run.asymmetry = *fm - *mf;
  return run;
}

NullRun null_model_run(const LinkGraph& graph, const EntityTable& table, NullModel model,
                       std::uint64_t seed, GroupRoles roles) {
  return null_model_run(compact(graph, table), model, seed, roles);
}

std::uint64_t run_seed(std::uint64_t master_seed, NullModel model, std::size_t run_index) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(model) + 1, run_index);
}

bool StructuralResult::assortativity_significant() const {
  if (null_envelopes.empty()) return false;
  for (const auto& [model, env] : null_envelopes)
    if (!env.assortativity || env.assortativity->contains(assortativity)) return false;
  return true;
}

bool StructuralResult::asymmetry_significant() const {
  if (null_envelopes.empty() || !asymmetry) return false;
  for (const auto& [model, env] : null_envelopes)
    if (!env.asymmetry || env.asymmetry->contains(*asymmetry)) return false;
  return true;
}

StructuralResult structural_analysis(const CompactGraph& graph, GroupRoles roles,
                                     std::size_t n_runs, std::uint64_t master_seed,
                                     unsigned workers) {
  if (n_runs < stats::kMinEnvelopeRuns)
    throw AnalysisError("envelope: n_runs = " + std::to_string(n_runs) + " < " +
                        std::to_string(stats::kMinEnvelopeRuns) + " (CI unreliable)");
  StructuralResult result;
  result.matrix = assortativity_matrix(graph);
  result.assortativity = newman_assortativity(result.matrix);
  const auto& fm = result.matrix.L[roles.minority.value][roles.majority.value];
  const auto& mf = result.matrix.L[roles.majority.value][roles.minority.value];
  if (fm && mf) result.asymmetry = *fm - *mf;
  result.n_runs = n_runs;
  result.master_seed = master_seed;

  const unsigned n_workers = std::max(1u, std::min<unsigned>(resolve_workers(workers),
                                                             static_cast<unsigned>(n_runs)));
  for (auto model : kAllNullModels) {
    std::vector<NullRun> runs(n_runs);
    auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i)
        runs[i] = null_model_run(graph, model, run_seed(master_seed, model, i), roles);
    };
    if (n_workers == 1) {
      work(0, n_runs);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (n_runs + n_workers - 1) / n_workers;
      for (std::size_t b = 0; b < n_runs; b += chunk)
        pool.emplace_back(work, b, std::min(n_runs, b + chunk));
    }

    std::vector<double> assort, asym;
    assort.reserve(n_runs);
    asym.reserve(n_runs);
    for (const auto& r : runs) {
      if (r.assortativity) assort.push_back(*r.assortativity);
      if (r.asymmetry) asym.push_back(*r.asymmetry);
    }
    NullEnvelope env;
    env.undefined_assortativity = n_runs - assort.size();
    env.undefined_asymmetry = n_runs - asym.size();
    const auto seed = run_seed(master_seed, model, 0);
    if (assort.size() >= stats::kMinEnvelopeRuns)
      env.assortativity = stats::envelope(assort, seed, assort.size());
    if (asym.size() >= stats::kMinEnvelopeRuns)
      env.asymmetry = stats::envelope(asym, seed, asym.size());
    result.null_envelopes.emplace(model, env);
  }
  return result;
}

StructuralResult structural_analysis(const LinkGraph& graph, const EntityTable& table,
                                     GroupRoles roles, std::size_t n_runs,
                                     std::uint64_t master_seed, unsigned workers) {
  return structural_analysis(compact(graph, table), roles, n_runs, master_seed, workers);
}

// ---- centrality -----------------------------------------------------------

namespace {

std::vector<std::pair<std::uint32_t, std::uint32_t>> distinct_edges(const CompactGraph& g) {
  auto edges = g.edges;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

std::vector<std::uint64_t> in_degrees(const CompactGraph& graph) {
  std::vector<std::uint64_t> deg(graph.node_ids.size(), 0);
  for (const auto& [from, to] : distinct_edges(graph)) {
    (void)from;
    ++deg[to];
  }
  return deg;
}

std::vector<std::uint64_t> in_kcore(const CompactGraph& graph) {
  const std::size_t n = graph.node_ids.size();
  const auto edges = distinct_edges(graph);
  std::vector<std::uint64_t> deg(n, 0);
  std::vector<std::vector<std::uint32_t>> out(n);
  for (const auto& [from, to] : edges) {
    ++deg[to];
    out[from].push_back(to);
  }
  if (n == 0) return {};

  // Bucket peeling over in-degree.
  const std::uint64_t max_deg = *std::max_element(deg.begin(), deg.end());
  std::vector<std::size_t> bin(max_deg + 1, 0);
  for (auto d : deg) ++bin[d];
  std::size_t start = 0;
  for (auto& b : bin) {
    const std::size_t count = b;
    b = start;
    start += count;
  }
  std::vector<std::size_t> pos(n), vert(n);
  for (std::size_t v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]];
    vert[pos[v]] = v;
    ++bin[deg[v]];
  }
  for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  bin[0] = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = vert[i];
    for (auto u : out[v]) {
      if (deg[u] > deg[v]) {
        const std::uint64_t du = deg[u];
        const std::size_t pu = pos[u];
        const std::size_t pw = bin[du];
        const std::size_t w = vert[pw];
        if (u != w) {
          pos[u] = pw;
          vert[pu] = w;
          pos[w] = pu;
          vert[pw] = u;
        }
        ++bin[du];
        --deg[u];
      }
    }
  }
  return deg;
}

std::map<std::string, std::uint64_t> in_kcore(const LinkGraph& graph) {
  CompactGraph g;
  std::unordered_map<std::string, std::uint32_t> index;
  auto add = [&](const std::string& id) {
    auto [it, inserted] = index.emplace(id, static_cast<std::uint32_t>(g.node_ids.size()));
    if (inserted) g.node_ids.push_back(id);
    return it->second;
  };
  for (const auto& id : graph.nodes) add(id);
  for (const auto& [from, to] : graph.edges) {
    if (from == to) continue;
    g.edges.emplace_back(add(from), add(to));
  }
  g.node_group.assign(g.node_ids.size(), 0);
  const auto core = in_kcore(g);
  std::map<std::string, std::uint64_t> out;
  for (std::size_t i = 0; i < core.size(); ++i) out[g.node_ids[i]] = core[i];
  return out;
}

std::vector<CcdfPoint> ccdf(const std::vector<std::uint64_t>& values) {
  if (values.empty()) return {};
  std::vector<std::uint64_t> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<CcdfPoint> out;
  out.reserve(sorted.back() + 1);
  for (std::uint64_t t = 0; t <= sorted.back(); ++t) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
    out.push_back({static_cast<double>(t), static_cast<double>(above) / n});
  }
  return out;
}

CentralityProfile centrality_profile(const CompactGraph& graph, GroupRoles roles) {
  const auto deg = in_degrees(graph);
  const auto core = in_kcore(graph);
  CentralityProfile p;
  p.in_degrees.resize(graph.n_groups);
  p.in_kcores.resize(graph.n_groups);
  for (std::size_t v = 0; v < graph.node_ids.size(); ++v) {
    p.in_degrees[graph.node_group[v]].push_back(deg[v]);
    p.in_kcores[graph.node_group[v]].push_back(core[v]);
  }
  for (std::size_t g = 0; g < graph.n_groups; ++g) {
    p.degree_ccdf.push_back(ccdf(p.in_degrees[g]));
    p.kcore_ccdf.push_back(ccdf(p.in_kcores[g]));
  }
  const auto minor = roles.minority.value;
  const auto major = roles.majority.value;
  if (minor >= graph.n_groups || major >= graph.n_groups || p.in_degrees[minor].empty() ||
      p.in_degrees[major].empty())
    throw AnalysisError("centrality: empty group in graph");

  auto as_real = [](const std::vector<std::uint64_t>& v) {
    return std::vector<double>(v.begin(), v.end());
  };
  const auto dx = as_real(p.in_degrees[minor]), dy = as_real(p.in_degrees[major]);
  const auto kx = as_real(p.in_kcores[minor]), ky = as_real(p.in_kcores[major]);
  p.degree_wilcoxon = stats::wilcoxon_rank_sum(dx, dy);
  p.degree_ks = stats::ks_two_sample(dx, dy);
  p.kcore_wilcoxon = stats::wilcoxon_rank_sum(kx, ky);
  p.kcore_ks = stats::ks_two_sample(kx, ky);
  return p;
}

CentralityProfile centrality_profile(const LinkGraph& graph, const EntityTable& table,
                                     GroupRoles roles) {
  return centrality_profile(compact(graph, table), roles);
}

}  // namespace biaslens::structural
