#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "biaslens/ingest.hpp"

namespace biaslens::synth {

/// Parameters of a two-group synthetic bundle with planted biases.
struct SynthSpec {
  std::string minority_name = "female";
  std::string majority_name = "male";
  std::size_t n_minority = 1000;
  std::size_t n_majority = 4000;

  double target_assortativity = 0.0;
  double target_asymmetry = 0.0;
  double mean_out_degree = 5.0;
  /// Pareto(2.5) node fitness for endpoint selection instead of uniform.
  bool heavy_tail = false;

  std::size_t shared_vocab = 2000;
  std::size_t exclusive_vocab = 50;    // per group
  double exclusive_rate = 10.0;        // multiple of the shared per-word rate
  std::size_t docs_per_entity = 1;
  std::size_t doc_length = 120;

  double coverage_minority = 1.0;
  double coverage_majority = 1.0;
  double featured_minority = 0.01;
  double featured_majority = 0.01;
  std::vector<int> featured_years = {2010, 2011, 2012, 2013, 2014};

  std::vector<std::string> editions = {"en"};
  std::string dataset = "synth";
  std::uint64_t seed = 1;
};

/// Edge fractions e[from][to] over (minority = 0, majority = 1).
struct MixingMatrix {
  std::array<std::array<double, 2>, 2> e{};

  double origin_rate(int g) const { return e[g][0] + e[g][1]; }
  double target_rate(int g) const { return e[0][g] + e[1][g]; }
  double assortativity() const;
  /// ln(P(to=maj|from=min)/P(to=maj)) - ln(P(to=min|from=maj)/P(to=min)).
  double asymmetry() const;
};

/// Edge fractions with origin marginals (minority_share, 1 - minority_share)
/// whose assortativity and asymmetry equal the targets. Among feasible
/// solutions the one with target marginals closest to the origin marginals is
/// returned. Throws AnalysisError naming the violated constraint.
MixingMatrix solve_mixing(double minority_share, double target_assortativity,
                          double target_asymmetry);

void validate_spec(const SynthSpec& spec);

/// Deterministic in `spec`. Graphs only connect entities covered in the
/// edition; the corpus uses letter-only synthetic stems that the English
/// stemmer leaves intact.
ingest::DatasetBundle generate(const SynthSpec& spec);

/// Synthetic stems: shared(i), exclusive(group, i).
std::string shared_stem(std::size_t i);
std::string exclusive_stem(int group, std::size_t i);

}  // namespace biaslens::synth
