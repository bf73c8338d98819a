#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biaslens/model.hpp"
#include "biaslens/stats.hpp"

namespace biaslens::structural {

enum class NullModel { randomized_gender, randomized_link_end, randomized_link_origin };

inline constexpr NullModel kAllNullModels[] = {NullModel::randomized_gender,
                                               NullModel::randomized_link_end,
                                               NullModel::randomized_link_origin};

std::string to_string(NullModel m);
NullModel null_model_from_string(const std::string& name);

/// Which group plays the minority ("F") and majority ("M") role in the
/// asymmetry and centrality sign conventions.
struct GroupRoles {
  GroupId minority;
  GroupId majority;
};

/// Index-based view of a LinkGraph with one group label per node.
struct CompactGraph {
  std::vector<std::string> node_ids;
  std::vector<std::size_t> node_group;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::size_t n_groups = 0;
};

/// Nodes missing from the table are dropped together with their edges.
CompactGraph compact(const LinkGraph& graph, const EntityTable& table);

/// Log-likelihood mixing matrix: L[g1][g2] = ln(P(to=g2 | from=g1) / P(to=g2)),
/// estimated from (multiset) edge counts. Cells with a zero count are nullopt.
struct AssortativityMatrix {
  std::size_t n_groups = 0;
  std::uint64_t n_edges = 0;
  std::vector<std::vector<std::uint64_t>> edge_counts;  // [from][to]
  std::vector<std::vector<std::optional<double>>> L;
  std::vector<double> base_rates;    // P(to = g)
  std::vector<double> origin_rates;  // P(from = g)

  /// P(to = g2 | from = g1); 0 when g1 has no outgoing edges.
  double conditional(std::size_t g1, std::size_t g2) const;
};

/// Throws when there are no edges or fewer than two groups take part in edges.
AssortativityMatrix matrix_from_counts(std::vector<std::vector<std::uint64_t>> counts);
AssortativityMatrix assortativity_matrix(const CompactGraph& graph);
AssortativityMatrix assortativity_matrix(const LinkGraph& graph, const EntityTable& table);

/// Newman's coefficient over group labels. Throws
/// "degenerate: single-group edges" when 1 - sum_g a_g b_g == 0.
double newman_assortativity(const AssortativityMatrix& m);
double newman_assortativity(const LinkGraph& graph, const EntityTable& table);

/// A = L[minor][major] - L[major][minor].
double asymmetry(const AssortativityMatrix& m, GroupId minor, GroupId major);

/// Graph after one randomization. Deterministic given seed.
CompactGraph randomize(const CompactGraph& graph, NullModel model, std::uint64_t seed);

struct NullRun {
  std::optional<double> assortativity;
  std::optional<double> asymmetry;
};

/// Statistics of one randomized replica; a statistic that is undefined on the
/// replica (e.g. an empty cross cell) comes back as nullopt.
NullRun null_model_run(const CompactGraph& graph, NullModel model, std::uint64_t seed,
                       GroupRoles roles);
NullRun null_model_run(const LinkGraph& graph, const EntityTable& table, NullModel model,
                       std::uint64_t seed, GroupRoles roles);

struct NullEnvelope {
  std::optional<stats::MonteCarloEnvelope> assortativity;
  std::optional<stats::MonteCarloEnvelope> asymmetry;
  std::size_t undefined_assortativity = 0;
  std::size_t undefined_asymmetry = 0;
};

struct StructuralResult {
  AssortativityMatrix matrix;
  double assortativity = 0.0;
  std::optional<double> asymmetry;
  std::map<NullModel, NullEnvelope> null_envelopes;
  std::size_t n_runs = 0;
  std::uint64_t master_seed = 0;

  /// True when the empirical assortativity lies outside every null envelope.
  bool assortativity_significant() const;
  bool asymmetry_significant() const;
};

/// Seed of run `run_index` of `model`.
std::uint64_t run_seed(std::uint64_t master_seed, NullModel model, std::size_t run_index);

/// Empirical statistics plus one Monte Carlo envelope per (model, statistic).
/// Runs are spread over `workers` threads (0 = read BIASLENS_WORKERS, else 1);
/// the result does not depend on the worker count.
StructuralResult structural_analysis(const CompactGraph& graph, GroupRoles roles,
                                     std::size_t n_runs, std::uint64_t master_seed,
                                     unsigned workers = 0);
StructuralResult structural_analysis(const LinkGraph& graph, const EntityTable& table,
                                     GroupRoles roles, std::size_t n_runs,
                                     std::uint64_t master_seed, unsigned workers = 0);

// ---- centrality -----------------------------------------------------------

/// In-degree per node, counting each distinct (from, to) pair once.
std::vector<std::uint64_t> in_degrees(const CompactGraph& graph);

/// In-coreness per node: the largest k such that the node survives iterative
/// removal of all nodes whose in-degree (within the remaining subgraph) is < k.
/// Parallel edges count once.
std::vector<std::uint64_t> in_kcore(const CompactGraph& graph);
/// Coreness keyed by node id, for all nodes of `graph`.
std::map<std::string, std::uint64_t> in_kcore(const LinkGraph& graph);

struct CcdfPoint {
  double threshold = 0.0;
  double probability = 0.0;  // P(X > threshold)
};

/// P(X > t) for every integer t in [0, max(X)]; the last point is 0.
std::vector<CcdfPoint> ccdf(const std::vector<std::uint64_t>& values);

struct CentralityProfile {
  std::vector<std::vector<std::uint64_t>> in_degrees;  // per group
  std::vector<std::vector<std::uint64_t>> in_kcores;   // per group
  std::vector<std::vector<CcdfPoint>> degree_ccdf;     // per group
  std::vector<std::vector<CcdfPoint>> kcore_ccdf;      // per group
  stats::TestResult degree_wilcoxon;
  stats::TestResult degree_ks;
  stats::TestResult kcore_wilcoxon;
  stats::TestResult kcore_ks;
};

/// Tests compare the minority sample against the majority sample, so a +
/// direction means the minority group is more central.
CentralityProfile centrality_profile(const CompactGraph& graph, GroupRoles roles);
CentralityProfile centrality_profile(const LinkGraph& graph, const EntityTable& table,
                                     GroupRoles roles);

}  // namespace biaslens::structural
