#include "chaos_swr/montecarlo.hpp"

#include "chaos_swr/chaos.hpp"
#include "chaos_swr/format.hpp"
#include "chaos_swr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chaos {

std::vector<double> mc_sample(const CoefficientMatrix& a, Scheme scheme, std::uint64_t reps,
                              const RngSpec& rng, std::size_t workers) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  const std::size_t n = a.size();
  if (scheme != Scheme::iid) require_even(n);
  std::vector<double> values(reps);
  parallel_chunks(reps, resolve_workers(workers), [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t r = begin; r < end; ++r) {
      switch (scheme) {
        case Scheme::without_replacement:
          values[r] = eval_chaos(a, draw_without_replacement(n, rng, r));
          break;
        case Scheme::iid:
          values[r] = eval_chaos(a, draw_iid(n, rng, r).signs);
          break;
        case Scheme::coupled:
          values[r] = eval_chaos(a, draw_coupled(n, rng, r).coupled);
          break;
      }
    }
  });
  return values;
}

namespace {

std::uint64_t count_hits(const std::vector<double>& values, double t, TailMode mode) {
  std::uint64_t hits = 0;
  for (double v : values) {
    const double stat = mode == TailMode::absolute ? std::abs(v) : v;
    if (stat >= t) ++hits;
  }
  return hits;
}

MonteCarloEstimate make_estimate(std::uint64_t hits, std::uint64_t reps, std::uint64_t seed,
                                 double conf) {
  const Interval ci = clopper_pearson(hits, reps, conf);
  MonteCarloEstimate e;
  e.hits = hits;
  e.reps = reps;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(reps);
  e.ci_low = std::min(ci.low, e.p_hat);
  e.ci_high = std::max(ci.high, e.p_hat);
  e.seed = seed;
  e.conf = conf;
  return e;
}

}  // namespace

MonteCarloEstimate mc_tail(const CoefficientMatrix& a, double t, TailMode mode, Scheme scheme,
                           std::uint64_t reps, const RngSpec& rng, double conf,
                           std::size_t workers) {
  if (!(conf > 0.0 && conf < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  const auto values = mc_sample(a, scheme, reps, rng, workers);
  return make_estimate(count_hits(values, t, mode), reps, rng.seed, conf);
}

double empirical_quantile(std::vector<double> values, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  if (values.empty()) throw std::invalid_argument("no values");
  std::sort(values.begin(), values.end());
  const auto count = static_cast<double>(values.size());
  auto k = static_cast<std::size_t>(std::ceil(q * count));
  k = std::clamp<std::size_t>(k, 1, values.size());
  return values[k - 1];
}

double mc_quantile(const CoefficientMatrix& a, double q, Scheme scheme, std::uint64_t reps,
                   const RngSpec& rng, std::size_t workers) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  return empirical_quantile(mc_sample(a, scheme, reps, rng, workers), q);
}

DeltaPolicy parse_delta_policy(std::string_view name) {
  DeltaPolicy p;
  if (name == "default")
    p.kind = DeltaPolicyKind::default_policy;
  else if (name == "optimized")
    p.kind = DeltaPolicyKind::optimized;
  else if (name == "fixed")
    p.kind = DeltaPolicyKind::fixed;
  else
    throw std::invalid_argument("unknown delta policy '" + std::string(name) + "'");
  return p;
}

const char* to_string(DeltaPolicyKind k) noexcept {
  switch (k) {
    case DeltaPolicyKind::default_policy: return "default";
    case DeltaPolicyKind::optimized: return "optimized";
    case DeltaPolicyKind::fixed: return "fixed";
  }
  return "?";
}

std::size_t choose_delta(const CoefficientMatrix& a, double x, double kappa, const DeltaPolicy& policy) {
  const std::size_t n = a.size();
  switch (policy.kind) {
    case DeltaPolicyKind::default_policy:
      return default_delta(n, x);
    case DeltaPolicyKind::fixed:
      if (policy.fixed_delta > n) throw std::out_of_range("fixed delta exceeds n");
      return policy.fixed_delta;
    case DeltaPolicyKind::optimized: {
      const double target = policy.target_prob.value_or(prop1_probability(n, default_delta(n, x), x));
      return optimize_delta(a, x, kappa, target).delta;
    }
  }
  throw std::logic_error("unhandled delta policy");
}

std::vector<ComparisonRow> compare_bounds(const CoefficientMatrix& a, const std::vector<double>& xs,
                                          const DeltaPolicy& policy, const BoundConstants& constants,
                                          Scheme scheme, const Engine& engine,
                                          const std::vector<TailMode>& modes) {
  if (xs.empty()) throw std::invalid_argument("x grid is empty");
  for (double x : xs)
    if (!(x > 0.0)) throw std::invalid_argument("every x must be positive");
  constants.validate();

  const bool exact = engine.kind == Engine::Kind::enumeration;
  ValueLaw law;
  std::vector<double> sample;
  if (exact)
    law = exact_chaos_law(a, scheme, engine.caps);
  else
    sample = mc_sample(a, scheme, engine.reps, engine.rng, engine.workers);

  const std::size_t n = a.size();
  const double m = max_abs(a);
  std::vector<ComparisonRow> rows;
  for (double x : xs) {
    const std::size_t delta = choose_delta(a, x, constants.kappa, policy);
    const BoundReport prop = prop1_threshold(a, x, delta, constants.kappa);
    const TailBound thm = theorem1_bound(n, m, x, constants);

    struct Candidate {
      const char* name;
      double threshold;
      double prob;
      std::optional<std::size_t> delta;
    };
    const Candidate candidates[] = {{"prop1", prop.threshold, prop.probability, delta},
                                    {"theorem1", thm.threshold, thm.probability, std::nullopt}};
    for (const auto& cand : candidates) {
      for (TailMode mode : modes) {
        ComparisonRow row;
        row.bound = cand.name;
        row.mode = mode;
        row.x = x;
        row.delta = cand.delta;
        row.bound_threshold = cand.threshold;
        row.bound_prob = cand.prob;
        row.degenerate_threshold = cand.threshold <= 0.0;
        if (exact) {
          row.source = "enumeration";
          row.empirical_prob = exact_tail(law, cand.threshold, mode);
          row.violation = row.bound_prob < 1.0 && row.bound_prob < row.empirical_prob;
        } else {
          row.source = "monte-carlo";
          row.estimate = make_estimate(count_hits(sample, cand.threshold, mode), engine.reps,
                                       engine.rng.seed, engine.conf);
          row.empirical_prob = row.estimate->p_hat;
          row.violation = row.bound_prob < 1.0 && row.bound_prob < row.estimate->ci_low;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

namespace {

std::string describe_instances(const std::vector<CoefficientMatrix>& instances) {
  std::ostringstream os;
  os << instances.size() << " instance(s), n = {";
  for (std::size_t k = 0; k < instances.size(); ++k) os << (k ? "," : "") << instances[k].size();
  os << "}";
  return os.str();
}

}  // namespace

CalibrationReport calibrate_kappa(const std::vector<CoefficientMatrix>& instances, double tolerance,
                                  const EnumerationCaps& caps) {
  if (instances.empty()) throw std::invalid_argument("calibration needs at least one instance");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");

  struct Prepared {
    ValueLaw law;
    double sigma;
  };
  std::vector<Prepared> prepared;
  for (const auto& a : instances) {
    const double s = sigma(a);
    if (!(s > 0.0)) throw std::invalid_argument("kappa calibration needs sigma > 0 on every instance");
    prepared.push_back({exact_chaos_law(a, Scheme::iid, caps), s});
  }

  // E[exp(|Z'| / (kappa sigma))] per instance; decreasing in kappa.
  auto mgf = [](const Prepared& p, double kappa) {
    double s = 0.0;
    for (const auto& [v, w] : p.law.support) s += w * std::exp(std::abs(v) / (kappa * p.sigma));
    return s;
  };
  auto feasible = [&](double kappa) {
    for (const auto& p : prepared)
      if (!(mgf(p, kappa) <= 2.0)) return false;
    return true;
  };

  double hi = 1.0;
  while (!feasible(hi)) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      hi = mid;
    else
      lo = mid;
  }

  CalibrationReport r;
  r.constant_name = "kappa";
  r.value = hi;
  r.instances = describe_instances(instances);
  r.criterion = "smallest kappa (bisection, tolerance " + format_double(tolerance) +
                ", feasible side) with exact E[exp(|Z'|/(kappa*sigma))] <= 2 on every instance, "
                "Z' the iid-sign chaos";
  for (std::size_t k = 0; k < prepared.size(); ++k) {
    // Per-instance requirement, same bisection.
    double h = 1.0;
    while (!(mgf(prepared[k], h) <= 2.0)) h *= 2.0;
    double l = 0.0;
    while (h - l > tolerance) {
      const double mid = 0.5 * (l + h);
      (mgf(prepared[k], mid) <= 2.0 ? h : l) = mid;
    }
    r.entries.push_back({k, instances[k].size(), 0.0, h, false});
  }
  return r;
}

CalibrationReport calibrate_c(const std::vector<CoefficientMatrix>& instances, double C_fixed,
                              const std::vector<double>& xs, TailMode mode,
                              const EnumerationCaps& caps) {
  if (instances.empty()) throw std::invalid_argument("calibration needs at least one instance");
  if (xs.empty()) throw std::invalid_argument("x grid is empty");
  if (!(C_fixed > 0.0)) throw std::invalid_argument("C must be positive");
  for (double x : xs)
    if (!(x > 0.0)) throw std::invalid_argument("every x must be positive");

  CalibrationReport r;
  r.constant_name = "c";
  r.instances = describe_instances(instances);
  r.criterion = std::string("smallest c with exact P(") +
                (mode == TailMode::absolute ? "|Z|" : "Z") +
                " >= c*n*M*(x+log n)) <= C*exp(-x) under without-replacement sampling, C = " +
                format_double(C_fixed);

  struct Active {
    std::size_t index;
    std::size_t n;
    double m;
    ValueLaw law;
  };
  std::vector<Active> active;
  double required_max = -std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto& a = instances[k];
    const std::size_t n = a.size();
    const double m = max_abs(a);
    ValueLaw law = exact_chaos_law(a, Scheme::without_replacement, caps);
    if (mode == TailMode::absolute) law = abs_law(law);
    std::vector<CalibrationEntry> entries;
    bool skip = false;
    for (double x : xs) {
      const double target = C_fixed * std::exp(-x);
      CalibrationEntry e{k, n, x, 0.0, target >= 1.0};
      if (!e.vacuous) {
        // Largest outcome whose upper tail still exceeds the target; the
        // threshold must lie strictly above it.
        double critical = -std::numeric_limits<double>::infinity();
        for (const auto& [v, p] : law.support)
          if (exact_tail(law, v, TailMode::one_sided) > target) critical = v;
        const double scale = static_cast<double>(n) * m * (x + std::log(static_cast<double>(n)));
        if (scale <= 0.0) {
          if (critical >= 0.0) {
            r.warnings.push_back("instance " + std::to_string(k) + " (n = " + std::to_string(n) +
                                 ") has threshold 0 at x = " + format_double(x) +
                                 " but its tail exceeds C*exp(-x); skipped");
            skip = true;
            break;
          }
          e.required = 0.0;
        } else {
          e.required = critical / scale;
        }
      }
      entries.push_back(e);
    }
    if (skip) continue;
    for (const auto& e : entries) {
      if (!e.vacuous) required_max = std::max(required_max, e.required);
      r.entries.push_back(e);
    }
    active.push_back({k, n, m, std::move(law)});
  }

  auto feasible = [&](double c) {
    BoundConstants k{1.0, c, C_fixed};
    for (const auto& inst : active)
      for (double x : xs) {
        const TailBound b = theorem1_bound(inst.n, inst.m, x, k);
        if (b.raw_probability >= 1.0) continue;
        if (exact_tail(inst.law, b.threshold, TailMode::one_sided) > b.raw_probability) return false;
      }
    return true;
  };

  // Monotone search upward from just above the largest per-pair
  // requirement: the tail is nonincreasing in c, so the first feasible
  // double is the answer. Starting strictly above keeps quantile/scale < c
  // when the threshold product happens to round up onto the critical atom.
  double c = required_max >= 0.0 ? std::nextafter(required_max, std::numeric_limits<double>::infinity())
                                 : 0.0;
  while (!feasible(c)) c = std::nextafter(c, std::numeric_limits<double>::infinity());
  r.value = c;
  return r;
}

}  // namespace chaos
