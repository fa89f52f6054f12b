#pragma once

// Monte Carlo estimation, bound-vs-law comparison, and empirical
// calibration of the universal constants.

#include "chaos_swr/bounds.hpp"
#include "chaos_swr/coeff.hpp"
#include "chaos_swr/oracle.hpp"
#include "chaos_swr/samplers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chaos {

struct MonteCarloEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  double conf = 0.99;
};

/// Chaos values for replicates 0..reps-1; entry r depends only on
/// (rng, r), never on `workers`.
std::vector<double> mc_sample(const CoefficientMatrix& a, Scheme scheme, std::uint64_t reps,
                              const RngSpec& rng, std::size_t workers = 0);

MonteCarloEstimate mc_tail(const CoefficientMatrix& a, double t, TailMode mode, Scheme scheme,
                           std::uint64_t reps, const RngSpec& rng, double conf = 0.99,
                           std::size_t workers = 0);

/// Lower empirical quantile: smallest sampled value whose empirical CDF is
/// at least q.
double empirical_quantile(std::vector<double> values, double q);
double mc_quantile(const CoefficientMatrix& a, double q, Scheme scheme, std::uint64_t reps,
                   const RngSpec& rng, std::size_t workers = 0);

enum class DeltaPolicyKind { default_policy, optimized, fixed };

struct DeltaPolicy {
  DeltaPolicyKind kind = DeltaPolicyKind::default_policy;
  std::size_t fixed_delta = 0;
  /// For the optimized policy. When absent, the probability achieved by the
  /// default delta at the same x is used as the target.
  std::optional<double> target_prob;
};

DeltaPolicy parse_delta_policy(std::string_view name);
const char* to_string(DeltaPolicyKind k) noexcept;
std::size_t choose_delta(const CoefficientMatrix& a, double x, double kappa, const DeltaPolicy& policy);

struct Engine {
  enum class Kind { enumeration, monte_carlo };
  Kind kind = Kind::enumeration;
  std::uint64_t reps = 100'000;
  RngSpec rng{};
  double conf = 0.99;
  std::size_t workers = 0;
  EnumerationCaps caps{};
};

struct ComparisonRow {
  std::string bound;  // "prop1" or "theorem1"
  TailMode mode = TailMode::absolute;
  double x = 0.0;
  std::optional<std::size_t> delta;  // prop1 rows only
  double bound_threshold = 0.0;
  double bound_prob = 0.0;
  double empirical_prob = 0.0;
  std::optional<MonteCarloEstimate> estimate;  // monte-carlo engine only
  std::string source;                          // "enumeration" or "monte-carlo"
  /// bound_prob < 1 and below the exact probability (enumeration) or below
  /// the lower confidence limit (monte-carlo).
  bool violation = false;
  /// Threshold <= 0: the event includes Z = 0, usually making it certain.
  bool degenerate_threshold = false;
};

/// One row per (x, bound, mode). Both bounds are evaluated in every
/// requested tail mode.
std::vector<ComparisonRow> compare_bounds(const CoefficientMatrix& a, const std::vector<double>& xs,
                                          const DeltaPolicy& policy, const BoundConstants& constants,
                                          Scheme scheme, const Engine& engine,
                                          const std::vector<TailMode>& modes = {TailMode::one_sided,
                                                                                TailMode::absolute});

struct CalibrationEntry {
  std::size_t instance = 0;
  std::size_t n = 0;
  double x = 0.0;
  /// Smallest constant this (instance, x) pair alone demands; for c the
  /// calibrated value must exceed it strictly.
  double required = 0.0;
  bool vacuous = false;
};

struct CalibrationReport {
  std::string constant_name;  // "kappa" or "c"
  double value = 0.0;
  std::string instances;
  std::string criterion;
  std::vector<CalibrationEntry> entries;
  std::vector<std::string> warnings;
};

/// Smallest kappa (bisection to `tolerance`, reported on the feasible side)
/// with E[exp(|Z'| / (kappa sigma))] <= 2 exactly for every instance, Z'
/// being the iid-sign chaos.
CalibrationReport calibrate_kappa(const std::vector<CoefficientMatrix>& instances,
                                  double tolerance = 1e-9, const EnumerationCaps& caps = {});

/// Smallest c with P(stat >= c n M (x + log n)) <= C_fixed exp(-x) for every
/// instance and grid point, stat = Z (one-sided) or |Z| (absolute), under
/// the exact without-replacement law. Instances with M = 0 that cannot be
/// satisfied are skipped with a warning.
CalibrationReport calibrate_c(const std::vector<CoefficientMatrix>& instances, double C_fixed,
                              const std::vector<double>& xs, TailMode mode = TailMode::one_sided,
                              const EnumerationCaps& caps = {});

}  // namespace chaos
