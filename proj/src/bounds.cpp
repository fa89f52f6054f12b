#include "chaos_swr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chaos {
namespace {

void require_positive_x(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("x must be a positive finite number");
}

void require_delta(std::size_t n, std::size_t delta) {
  if (delta > n) throw std::out_of_range("delta must lie in [0, n]");
}

double clip01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

void BoundConstants::validate() const {
  if (!(kappa > 0.0) || !(c > 0.0) || !(C > 0.0))
    throw std::invalid_argument("constants kappa, c, C must be strictly positive");
}

double hoeffding_T_bound_raw(std::size_t n, std::size_t delta) {
  require_delta(n, delta);
  if (delta == n) return 0.0;
  const double d = static_cast<double>(delta);
  return 2.0 * std::exp(-d * d / (2.0 * static_cast<double>(n - delta)));
}

double hoeffding_T_bound(std::size_t n, std::size_t delta) {
  return clip01(hoeffding_T_bound_raw(n, delta));
}

TailBound rademacher_tail(double sigma, double x, double kappa) {
  require_positive_x(x);
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (sigma < 0.0) throw std::invalid_argument("sigma must be nonnegative");
  const double raw = 2.0 * std::exp(-x);
  return {kappa * sigma * x, clip01(raw), raw};
}

double prop1_probability_raw(std::size_t n, std::size_t delta, double x) {
  require_positive_x(x);
  return hoeffding_T_bound_raw(n, delta) + 6.0 * std::exp(-x);
}

double prop1_probability(std::size_t n, std::size_t delta, double x) {
  return clip01(prop1_probability_raw(n, delta, x));
}

BoundReport prop1_threshold(const CoefficientMatrix& a, double x, std::size_t delta, double kappa) {
  require_positive_x(x);
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  const std::size_t n = a.size();
  const TruncatedNorms t = truncated_norms(a, delta);

  BoundReport r;
  r.n = n;
  r.x = x;
  r.delta = delta;
  r.kappa = kappa;

  auto& b = r.breakdown;
  b.rademacher_term = kappa * x * t.prefix_sigma;
  if (delta > 0) {
    // delta >= 1 so log(delta) >= 0 and y > 0.
    const double y = x + std::log(static_cast<double>(delta));
    const double factor = std::sqrt(2.0 * y);
    b.y = y;
    b.cross_col_term = factor * std::accumulate(t.col_cross.begin(), t.col_cross.end(), 0.0);
    b.cross_row_term = factor * std::accumulate(t.row_cross.begin(), t.row_cross.end(), 0.0);
  }
  b.tail_term = t.tail_abs;
  b.hoeffding_prob = hoeffding_T_bound_raw(n, delta);
  b.chaos_prob = 2.0 * std::exp(-x);
  b.cross_prob = 4.0 * std::exp(-x);

  const double cross = b.cross_col_term + b.cross_row_term;
  const double top = std::max({b.rademacher_term, cross, b.tail_term});
  if (top <= 0.0)
    b.dominant = "none";
  else if (top == b.rademacher_term)
    b.dominant = "rademacher";
  else if (top == cross)
    b.dominant = "cross";
  else
    b.dominant = "tail";

  r.threshold = b.rademacher_term + b.cross_col_term + b.cross_row_term + b.tail_term;
  r.raw_probability = b.hoeffding_prob + b.chaos_prob + b.cross_prob;
  r.probability = clip01(r.raw_probability);

  const double m = max_abs(a);
  const double nn = static_cast<double>(n);
  const double d = static_cast<double>(delta);
  r.simplified.statement = nn * m * (x + std::log(nn));
  const double inner = x + std::log(nn * x);
  if (inner >= 0.0)
    r.simplified.proof_assembly = nn * m * x + d * m * std::sqrt(nn) * std::sqrt(inner) + d * d * m;
  return r;
}

BoundReport term_breakdown(const CoefficientMatrix& a, double x, std::size_t delta, double kappa) {
  return prop1_threshold(a, x, delta, kappa);
}

std::size_t default_delta(std::size_t n, double x) {
  require_positive_x(x);
  const double d = std::ceil(std::sqrt(2.0 * static_cast<double>(n) * x));
  if (!(d < static_cast<double>(n))) return n;
  return static_cast<std::size_t>(d);
}

TailBound theorem1_bound(std::size_t n, double max_abs_coeff, double x,
                         const BoundConstants& constants) {
  require_positive_x(x);
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (!(constants.c >= 0.0) || !(constants.C > 0.0))
    throw std::invalid_argument("theorem constants must be positive");
  const double nn = static_cast<double>(n);
  const double raw = constants.C * std::exp(-x);
  return {constants.c * nn * max_abs_coeff * (x + std::log(nn)), clip01(raw), raw};
}

DeltaSearch optimize_delta(const CoefficientMatrix& a, double x, double kappa, double target_prob) {
  require_positive_x(x);
  if (!(target_prob > 0.0 && target_prob <= 1.0))
    throw std::invalid_argument("target probability must lie in (0, 1]");
  const std::size_t n = a.size();
  std::optional<DeltaSearch> best_feasible;
  std::optional<DeltaSearch> best_prob;
  for (std::size_t d = 0; d <= n; ++d) {
    BoundReport r = prop1_threshold(a, x, d, kappa);
    if (r.probability <= target_prob) {
      if (!best_feasible || r.threshold < best_feasible->report.threshold)
        best_feasible = DeltaSearch{d, r, true};
    }
    if (!best_prob || r.probability < best_prob->report.probability)
      best_prob = DeltaSearch{d, std::move(r), false};
  }
  return best_feasible ? *best_feasible : *best_prob;
}

}  // namespace chaos
