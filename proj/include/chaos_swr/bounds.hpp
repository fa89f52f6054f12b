#pragma once

// Closed-form tail bounds for the chaos under sampling without replacement,
// and the Rademacher-chaos bound they build on.
//
// None of the universal constants (kappa, c, C) has a known admissible
// value. The defaults below are NON-NORMATIVE placeholders; use the
// calibration routines in montecarlo.hpp to obtain ensemble-relative values.

#include "chaos_swr/coeff.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace chaos {

struct BoundConstants {
  double kappa = 4.0;
  double c = 1.0;
  double C = 8.0;

  /// Throws std::invalid_argument unless all three are strictly positive.
  void validate() const;
};

struct TailBound {
  double threshold = 0.0;
  double probability = 0.0;      // clipped to [0, 1]
  double raw_probability = 0.0;  // before clipping
};

/// Terms of the four-part threshold: u (Rademacher chaos on the prefix),
/// v (columns past the cutoff), w (rows past the cutoff), z (tail block).
struct BoundBreakdown {
  double rademacher_term = 0.0;  // u
  double cross_col_term = 0.0;   // v
  double cross_row_term = 0.0;   // w
  double tail_term = 0.0;        // z
  std::optional<double> y;       // x + log(delta); absent when delta = 0
  double hoeffding_prob = 0.0;   // raw 2 exp(-delta^2 / (2 (n - delta)))
  double chaos_prob = 0.0;       // raw 2 exp(-x)
  double cross_prob = 0.0;       // raw 4 exp(-x), two union bounds of 2 delta e^-y
  std::string dominant;          // "rademacher", "cross", "tail" or "none"
};

/// Thresholds of the simplified statement and of the intermediate assembly
/// used to derive it, both with unit constant c.
struct SimplifiedForms {
  double statement = 0.0;               // n M (x + log n)
  std::optional<double> proof_assembly; // n M x + delta M sqrt(n) sqrt(x + log(n x)) + delta^2 M
};

struct BoundReport {
  std::size_t n = 0;
  double x = 0.0;
  std::size_t delta = 0;
  double kappa = 0.0;
  double threshold = 0.0;
  double probability = 0.0;
  double raw_probability = 0.0;
  BoundBreakdown breakdown;
  SimplifiedForms simplified;
};

/// Bound on P(T <= n - delta): min(1, 2 exp(-delta^2 / (2 (n - delta)))),
/// and exactly 0 at delta = n since T >= n/2.
double hoeffding_T_bound(std::size_t n, std::size_t delta);
double hoeffding_T_bound_raw(std::size_t n, std::size_t delta);

/// P(|Z'| >= kappa sigma x) <= 2 exp(-x).
TailBound rademacher_tail(double sigma, double x, double kappa);

/// Four-part threshold with its breakdown; probability fields are filled too.
BoundReport prop1_threshold(const CoefficientMatrix& a, double x, std::size_t delta, double kappa);
/// min(1, hoeffding_T_bound(n, delta) + 6 exp(-x)).
double prop1_probability(std::size_t n, std::size_t delta, double x);
double prop1_probability_raw(std::size_t n, std::size_t delta, double x);

/// ceil(sqrt(2 n x)) clamped to [0, n].
std::size_t default_delta(std::size_t n, double x);

/// Threshold c n M (x + log n), probability min(1, C exp(-x)).
TailBound theorem1_bound(std::size_t n, double max_abs_coeff, double x,
                         const BoundConstants& constants);

struct DeltaSearch {
  std::size_t delta = 0;
  BoundReport report;
  bool target_met = true;
};

/// Exhaustive scan of delta in [0, n]. Among deltas whose probability is at
/// most target_prob, picks the smallest threshold; ties go to the smaller
/// delta. If no delta qualifies, picks the smallest probability instead and
/// clears target_met.
DeltaSearch optimize_delta(const CoefficientMatrix& a, double x, double kappa,
                           double target_prob);

/// Same as prop1_threshold; kept as a separate entry point for reporting.
BoundReport term_breakdown(const CoefficientMatrix& a, double x, std::size_t delta, double kappa);

}  // namespace chaos
