#include "biaslens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "biaslens/model.hpp"

namespace biaslens::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

int sign(double v) { return (v > 0) - (v < 0); }

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Series for P(a, x), valid for x < a + 1.
double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

void require_nonempty(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.empty() || y.empty())
    throw AnalysisError(std::string(what) + ": both samples must be non-empty");
}

}  // namespace

std::string to_string(TestMethod m) {
  switch (m) {
    case TestMethod::chi_square: return "chi_square";
    case TestMethod::wilcoxon: return "wilcoxon";
    case TestMethod::ks: return "ks";
    case TestMethod::spearman: return "spearman";
  }
  return "unknown";
}

// Lanczos approximation, g = 7, n = 9.
double log_gamma(double x) {
  static constexpr double kCoef[] = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Reflection.
    return std::log(std::numbers::pi / std::fabs(std::sin(std::numbers::pi * x))) -
           log_gamma(1.0 - x);
  }
  x -= 1.0;
  double acc = kCoef[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) acc += kCoef[i] / (x + i);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(acc);
}

double gamma_p(double a, double x) {
  if (a <= 0.0) throw AnalysisError("gamma_p: shape must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return clamp01(gamma_series(a, x));
  return clamp01(1.0 - gamma_continued_fraction(a, x));
}

double gamma_q(double a, double x) {
  if (a <= 0.0) throw AnalysisError("gamma_q: shape must be positive");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return clamp01(1.0 - gamma_series(a, x));
  return clamp01(gamma_continued_fraction(a, x));
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return clamp01(front * beta_continued_fraction(a, b, x) / a);
  return clamp01(1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b);
}

double chi_square_sf(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * x); }

double student_t_two_sided(double t, double dof) {
  if (dof <= 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form converges fast for small lambda.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int k = 1; k < 200; k += 2) {
      const double term = std::pow(y, static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-18) break;
    }
    return clamp01(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum);
  }
  double sum = 0.0;
  double sgn = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sgn * term;
    if (term < 1e-18) break;
    sgn = -sgn;
  }
  return clamp01(2.0 * sum);
}

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

TestResult chi_square_2x2(double a, double b, double c, double d, bool yates) {
  if (a < 0 || b < 0 || c < 0 || d < 0) throw AnalysisError("chi_square_2x2: negative count");
  const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  if (r1 <= 0 || r2 <= 0 || c1 <= 0 || c2 <= 0) throw AnalysisError("degenerate table");
  const double n = r1 + r2;
  const double cross = a * d - b * c;
  double numer = std::fabs(cross);
  if (yates) numer = std::max(0.0, numer - 0.5 * n);
  // Divide stepwise to keep large tables within range.
  const double stat = n * (numer / r1) * (numer / r2) / c1 / c2;
  TestResult r;
  r.method = TestMethod::chi_square;
  r.statistic = stat;
  r.p_value = chi_square_sf(stat, 1.0);
  r.direction = sign(cross);
  r.reliable = std::min({r1 * c1, r1 * c2, r2 * c1, r2 * c2}) / n >= 5.0;
  return r;
}

TestResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y) {
  require_nonempty(x, y, "wilcoxon_rank_sum");
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto ranks = midranks(pooled);

  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  const double n = n1 + n2;
  double w = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) w += ranks[i];

  // Tie term sum(t^3 - t) over tie groups.
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }

  TestResult r;
  r.method = TestMethod::wilcoxon;
  r.statistic = w;
  const double expected = n1 * (n + 1.0) / 2.0;
  const double variance = n > 1 ? n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0))) : 0.0;
  const double diff = w - expected;
  if (variance <= 0.0) {
    r.p_value = 1.0;
    r.direction = 0;
    return r;
  }
  const double z = std::max(0.0, std::fabs(diff) - 0.5) / std::sqrt(variance);
  r.p_value = clamp01(std::erfc(z / std::numbers::sqrt2));
  r.direction = sign(diff);
  r.reliable = std::min(n1, n2) >= 8;
  return r;
}

TestResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  require_nonempty(x, y, "ks_two_sample");
  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());

  // Walk the pooled support; evaluate both CDFs after consuming each value.
  std::size_t i = 0, j = 0;
  double d_plus = 0.0;   // max(F_y - F_x): x lies to the right
  double d_minus = 0.0;  // max(F_x - F_y)
  while (i < xs.size() || j < ys.size()) {
    double t;
    if (j >= ys.size() || (i < xs.size() && xs[i] <= ys[j]))
      t = xs[i];
    else
      t = ys[j];
    while (i < xs.size() && xs[i] == t) ++i;
    while (j < ys.size() && ys[j] == t) ++j;
    const double diff = static_cast<double>(j) / m - static_cast<double>(i) / n;
    d_plus = std::max(d_plus, diff);
    d_minus = std::max(d_minus, -diff);
  }

  TestResult r;
  r.method = TestMethod::ks;
  r.statistic = std::max(d_plus, d_minus);
  r.direction = d_plus > d_minus ? 1 : (d_minus > d_plus ? -1 : 0);
  const double ne = n * m / (n + m);
  r.p_value = r.statistic == 0.0 ? 1.0 : kolmogorov_sf(std::sqrt(ne) * r.statistic);
  r.reliable = ne >= 4.0;
  return r;
}

TestResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw AnalysisError("spearman: inputs differ in length");
  if (x.size() < 2) throw AnalysisError("spearman: need at least 2 observations");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw AnalysisError("no rank variation");
  const double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

  TestResult r;
  r.method = TestMethod::spearman;
  r.statistic = rho;
  r.direction = sign(rho);
  r.reliable = x.size() >= 10;
  const double dof = n - 2.0;
  if (dof <= 0.0) {
    r.p_value = 1.0;
  } else if (std::fabs(rho) >= 1.0) {
    r.p_value = 0.0;
  } else {
    const double t = rho * std::sqrt(dof / (1.0 - rho * rho));
    r.p_value = student_t_two_sided(t, dof);
  }
  return r;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw AnalysisError("quantile of empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

MonteCarloEnvelope envelope(std::span<const double> samples, std::uint64_t seed,
                            std::size_t n_runs) {
  if (n_runs < kMinEnvelopeRuns)
    throw AnalysisError("envelope: n_runs = " + std::to_string(n_runs) + " < " +
                        std::to_string(kMinEnvelopeRuns) + " (CI unreliable)");
  if (samples.size() != n_runs)
    throw AnalysisError("envelope: got " + std::to_string(samples.size()) +
                        " samples for n_runs = " + std::to_string(n_runs));
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  // Summing in sorted order makes the mean independent of arrival order.
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
  return {mean, quantile_sorted(sorted, 0.025), quantile_sorted(sorted, 0.975), n_runs, seed};
}

}  // namespace biaslens::stats
