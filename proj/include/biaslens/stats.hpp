#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace biaslens::stats {

enum class TestMethod { chi_square, wilcoxon, ks, spearman };

std::string to_string(TestMethod m);

/// Outcome of a two-sample or association test.
///
/// `direction` is +1 when the first sample (or first row) is larger / more
/// frequent, -1 when the second is, 0 when neither. `reliable` is false when the
/// p-value comes from an approximation outside its usual validity range.
struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int direction = 0;
  TestMethod method = TestMethod::chi_square;
  bool reliable = true;
};

struct MonteCarloEnvelope {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_runs = 0;
  std::uint64_t seed = 0;

  bool contains(double v) const { return ci_low <= v && v <= ci_high; }
};

// Special functions. Accuracy target is 1e-8 relative or better on the ranges
// the tests use.
double log_gamma(double x);
/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double chi_square_sf(double x, double dof);
/// Two-sided tail of Student's t.
double student_t_two_sided(double t, double dof);
/// Asymptotic Kolmogorov survival function Q_KS(lambda).
double kolmogorov_sf(double lambda);

/// Average ranks (1-based), ties receive the mean of the ranks they span.
std::vector<double> midranks(std::span<const double> values);

/// Pearson chi-square on [[a, b], [c, d]] with one degree of freedom.
/// Direction is the sign of ad - bc. Throws AnalysisError("degenerate table")
/// if any row or column sum is zero.
TestResult chi_square_2x2(double a, double b, double c, double d, bool yates = false);

/// Two-tailed rank-sum test, normal approximation with tie-corrected variance
/// and continuity correction. The statistic is the rank sum of `x`.
TestResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y);

/// Two-sample Kolmogorov-Smirnov. Direction is +1 when `x` is stochastically
/// larger (its empirical CDF lies below that of `y`).
TestResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation with a t-approximation p-value; `reliable` is
/// false for n < 10.
TestResult spearman(std::span<const double> x, std::span<const double> y);

inline constexpr std::size_t kMinEnvelopeRuns = 100;

/// Mean plus 2.5% / 97.5% percentiles (linear interpolation between order
/// statistics). Requires samples.size() == n_runs >= 100.
MonteCarloEnvelope envelope(std::span<const double> samples, std::uint64_t seed,
                            std::size_t n_runs);

/// Linear-interpolation quantile of a sorted sample, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace biaslens::stats
