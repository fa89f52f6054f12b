#include "chaos_swr/ensembles.hpp"
#include "chaos_swr/montecarlo.hpp"
#include "chaos_swr/stats.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace chaos;
using chaos::testing::all_ones;
using chaos::testing::random_matrix;

namespace {

// Exact P(stat >= t) straight from the enumerated law, for checking
// calibration results independently of the search code.
double tail_of(const ValueLaw& law, double t, TailMode mode) {
  double s = 0.0;
  for (const auto& [v, p] : law.support)
    if ((mode == TailMode::absolute ? std::abs(v) : v) >= t) s += p;
  return s;
}

bool c_feasible(const std::vector<CoefficientMatrix>& instances, double c, double C,
                const std::vector<double>& xs, TailMode mode) {
  for (const auto& a : instances) {
    const auto law = exact_chaos_law(a, Scheme::without_replacement);
    const double n = static_cast<double>(a.size());
    const double m = max_abs(a);
    for (double x : xs) {
      const double target = C * std::exp(-x);
      if (target >= 1.0) continue;
      if (tail_of(law, c * n * m * (x + std::log(n)), mode) > target) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("mc_tail examples") {
  const RngSpec rng{11, "mc-tail"};
  for (TailMode mode : {TailMode::one_sided, TailMode::absolute}) {
    const auto e = mc_tail(CoefficientMatrix::zeros(6), 0.5, mode, Scheme::without_replacement, 500, rng);
    CHECK(e.p_hat == 0.0);
    CHECK(e.ci_low == 0.0);
    CHECK(e.hits == 0);
  }
  const auto point = mc_tail(all_ones(4), -4.0, TailMode::one_sided, Scheme::without_replacement, 500, rng);
  CHECK(point.p_hat == 1.0);
  CHECK(point.ci_high == 1.0);

  CHECK_THROWS_AS(mc_tail(all_ones(4), 0.0, TailMode::absolute, Scheme::iid, 10, rng, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_tail(all_ones(4), 0.0, TailMode::absolute, Scheme::iid, 0, rng), std::invalid_argument);
}

TEST_CASE("mc_tail agrees with the exact tail at n = 8") {
  const auto a = random_matrix(8, 31);
  const auto law = exact_chaos_law(a, Scheme::without_replacement);
  for (TailMode mode : {TailMode::one_sided, TailMode::absolute}) {
    for (double q : {0.5, 0.9}) {
      const double t = law_quantile(mode == TailMode::absolute ? abs_law(law) : law, q);
      const double exact = exact_tail(law, t, mode);
      const auto e = mc_tail(a, t, mode, Scheme::without_replacement, 100000, RngSpec{8, "n8"}, 0.999);
      CHECK(e.ci_low <= exact);
      CHECK(exact <= e.ci_high);
      CHECK(e.ci_low <= e.p_hat);
      CHECK(e.p_hat <= e.ci_high);
    }
  }
}

TEST_CASE("mc_tail for the coupled and iid schemes") {
  const auto a = random_matrix(6, 3, true);
  for (Scheme s : {Scheme::coupled, Scheme::iid}) {
    const auto law = exact_chaos_law(a, s);
    const double t = law_quantile(law, 0.7);
    const auto e = mc_tail(a, t, TailMode::one_sided, s, 60000, RngSpec{4, "schemes"}, 0.999);
    const double exact = exact_tail(law, t, TailMode::one_sided);
    CHECK(e.ci_low <= exact);
    CHECK(exact <= e.ci_high);
  }
}

TEST_CASE("estimates are reproducible and worker-independent") {
  const auto a = random_matrix(10, 5);
  const auto base = mc_tail(a, 0.3, TailMode::absolute, Scheme::without_replacement, 20001, RngSpec{99, "w"}, 0.99, 1);
  for (std::size_t w : {2u, 5u, 8u}) {
    const auto e = mc_tail(a, 0.3, TailMode::absolute, Scheme::without_replacement, 20001, RngSpec{99, "w"}, 0.99, w);
    CHECK(e.hits == base.hits);
    CHECK(e.p_hat == base.p_hat);
    CHECK(e.ci_low == base.ci_low);
    CHECK(e.ci_high == base.ci_high);
  }
  const auto other = mc_tail(a, 0.3, TailMode::absolute, Scheme::without_replacement, 20001, RngSpec{100, "w"});
  CHECK(other.seed == 100);
}

TEST_CASE("empirical_quantile convention") {
  CHECK(empirical_quantile({3.0, 1.0, 2.0, 4.0}, 0.5) == 2.0);
  CHECK(empirical_quantile({3.0, 1.0, 2.0, 4.0}, 0.51) == 3.0);
  CHECK(empirical_quantile({3.0, 1.0, 2.0, 4.0}, 0.01) == 1.0);
  CHECK(empirical_quantile({3.0, 1.0, 2.0, 4.0}, 0.99) == 4.0);
  CHECK_THROWS_AS(empirical_quantile({1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(empirical_quantile({1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("mc_quantile examples") {
  const RngSpec rng{2, "q"};
  for (double q : {0.05, 0.5, 0.95})
    CHECK(mc_quantile(CoefficientMatrix::zeros(4), q, Scheme::without_replacement, 100, rng) == 0.0);
  for (double q : {0.05, 0.5, 0.95})
    CHECK(mc_quantile(all_ones(4), q, Scheme::without_replacement, 100, rng) == -4.0);
  CHECK_THROWS_AS(mc_quantile(all_ones(4), 1.5, Scheme::without_replacement, 100, rng), std::invalid_argument);
}

TEST_CASE("mc_quantile tracks the exact quantile at n = 12") {
  // The sampled 0.95-quantile must fall between the exact quantiles at
  // neighbouring levels; the gap is > 10 standard errors at 1e5 replicates.
  const auto a = random_matrix(12, 77, true);
  const auto law = exact_chaos_law(a, Scheme::without_replacement);
  const double lo = law_quantile(law, 0.94);
  const double hi = law_quantile(law, 0.96);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const double q = mc_quantile(a, 0.95, Scheme::without_replacement, 100000, RngSpec{seed, "q12"});
    CHECK(lo <= q);
    CHECK(q <= hi);
  }
}

TEST_CASE("delta policies") {
  const auto a = all_ones(16);
  CHECK(choose_delta(a, 2.0, 1.0, parse_delta_policy("default")) == default_delta(16, 2.0));
  DeltaPolicy fixed = parse_delta_policy("fixed");
  fixed.fixed_delta = 5;
  CHECK(choose_delta(a, 2.0, 1.0, fixed) == 5);
  fixed.fixed_delta = 17;
  CHECK_THROWS_AS(choose_delta(a, 2.0, 1.0, fixed), std::out_of_range);
  DeltaPolicy opt = parse_delta_policy("optimized");
  opt.target_prob = 0.9;
  CHECK(choose_delta(a, 3.0, 1.0, opt) == optimize_delta(a, 3.0, 1.0, 0.9).delta);
  // Without an explicit target, the optimized delta never does worse than
  // the default one at the default's probability.
  opt.target_prob.reset();
  for (double x : {1.0, 2.0, 4.0}) {
    const auto d = choose_delta(a, x, 1.0, opt);
    CHECK(prop1_threshold(a, x, d, 1.0).threshold <= prop1_threshold(a, x, default_delta(16, x), 1.0).threshold);
  }
  CHECK_THROWS_AS(parse_delta_policy("best"), std::invalid_argument);
}

TEST_CASE("compare_bounds") {
  const BoundConstants k{};
  const DeltaPolicy def{};
  SUBCASE("zero matrix surfaces the degenerate threshold") {
    const auto rows = compare_bounds(CoefficientMatrix::zeros(6), {1.0, 3.0}, def, k,
                                     Scheme::without_replacement, Engine{});
    REQUIRE(rows.size() == 8);
    for (const auto& r : rows) {
      CHECK(r.bound_threshold == 0.0);
      CHECK(r.degenerate_threshold);
      CHECK(r.empirical_prob == 1.0);
      CHECK(r.violation == (r.bound_prob < 1.0));
      CHECK(r.source == "enumeration");
    }
  }
  SUBCASE("n = 12 pm matrix, enumeration engine, exact and rerun-identical") {
    const auto a = generate_matrix("pm", 12, 5);
    const auto law = exact_chaos_law(a, Scheme::without_replacement);
    const auto rows = compare_bounds(a, {1.0, 2.0, 4.0}, def, k, Scheme::without_replacement, Engine{});
    REQUIRE(rows.size() == 12);
    for (const auto& r : rows) {
      CHECK(r.empirical_prob == exact_tail(law, r.bound_threshold, r.mode));
      CHECK(r.violation == (r.bound_prob < 1.0 && r.bound_prob < r.empirical_prob));
      CHECK(r.delta.has_value() == (r.bound == "prop1"));
      CHECK_FALSE(r.estimate.has_value());
    }
    const auto again = compare_bounds(a, {1.0, 2.0, 4.0}, def, k, Scheme::without_replacement, Engine{});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].empirical_prob == again[i].empirical_prob);
      CHECK(rows[i].bound_threshold == again[i].bound_threshold);
      CHECK(rows[i].bound_prob == again[i].bound_prob);
    }
  }
  SUBCASE("vacuous bounds are never violations") {
    const auto rows = compare_bounds(random_matrix(8, 2), {0.1}, def, k, Scheme::without_replacement, Engine{});
    for (const auto& r : rows) {
      CHECK(r.bound_prob == 1.0);
      CHECK_FALSE(r.violation);
    }
  }
  SUBCASE("monte-carlo engine") {
    Engine mc;
    mc.kind = Engine::Kind::monte_carlo;
    mc.reps = 5000;
    mc.rng = RngSpec{3, "cmp"};
    const auto a = random_matrix(8, 9);
    const auto rows = compare_bounds(a, {2.0}, def, k, Scheme::without_replacement, mc, {TailMode::absolute});
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
      REQUIRE(r.estimate.has_value());
      CHECK(r.source == "monte-carlo");
      CHECK(r.empirical_prob == r.estimate->p_hat);
      CHECK(r.violation == (r.bound_prob < 1.0 && r.bound_prob < r.estimate->ci_low));
    }
    mc.workers = 3;
    const auto par = compare_bounds(a, {2.0}, def, k, Scheme::without_replacement, mc, {TailMode::absolute});
    CHECK(par[0].estimate->hits == rows[0].estimate->hits);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(compare_bounds(all_ones(4), {}, def, k, Scheme::iid, Engine{}), std::invalid_argument);
    CHECK_THROWS_AS(compare_bounds(all_ones(4), {0.0}, def, k, Scheme::iid, Engine{}), std::invalid_argument);
    CHECK_THROWS_AS(compare_bounds(all_ones(30), {1.0}, def, k, Scheme::without_replacement, Engine{}),
                    CapExceeded);
  }
}

TEST_CASE("calibrate_kappa") {
  const auto pair = CoefficientMatrix::from_rows({{0, 1}, {1, 0}});
  const auto r = calibrate_kappa({pair}, 1e-9);
  CHECK(r.constant_name == "kappa");
  CHECK(r.value == doctest::Approx(std::sqrt(2.0) / std::log(2.0)).epsilon(1e-8));
  CHECK(r.value >= std::sqrt(2.0) / std::log(2.0) - 1e-12);
  CHECK(calibrate_kappa({pair}, 1e-6).value == calibrate_kappa({pair}, 1e-6).value);

  // Adding instances can only raise kappa.
  std::vector<CoefficientMatrix> set{pair};
  double prev = calibrate_kappa(set, 1e-9).value;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    set.push_back(random_matrix(4 + 2 * seed, seed));
    const double now = calibrate_kappa(set, 1e-9).value;
    CHECK(now >= prev);
    prev = now;
  }
  CHECK_THROWS_AS(calibrate_kappa({}, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_kappa({CoefficientMatrix::zeros(4)}, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_kappa({all_ones(22)}, 1e-6), CapExceeded);
}

TEST_CASE("calibrated kappa dominates the exact Rademacher tail") {
  std::vector<CoefficientMatrix> set;
  for (std::uint64_t seed = 0; seed < 6; ++seed) set.push_back(random_matrix(4 + 2 * (seed % 3), seed));
  const double kappa = calibrate_kappa(set, 1e-9).value;
  for (const auto& a : set) {
    const auto law = exact_chaos_law(a, Scheme::iid);
    for (double x : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      const auto b = rademacher_tail(sigma(a), x, kappa);
      CHECK(exact_tail(law, b.threshold, TailMode::absolute) <= b.probability);
    }
  }
}

TEST_CASE("calibrate_c") {
  SUBCASE("vacuous grid gives c = 0") {
    const auto r = calibrate_c({random_matrix(6, 1)}, 8.0, {0.5, 1.0, 2.0});
    CHECK(r.value == 0.0);
    for (const auto& e : r.entries) CHECK(e.vacuous);
  }
  SUBCASE("point mass below zero: every c works") {
    const auto r = calibrate_c({all_ones(4)}, 8.0, {3.0, 5.0});
    CHECK(r.value == 0.0);
    CHECK(c_feasible({all_ones(4)}, 1e-9, 8.0, {3.0, 5.0}, TailMode::one_sided));
  }
  SUBCASE("mixed ensemble n in {8, 12}: feasible and minimal") {
    std::vector<CoefficientMatrix> set{generate_matrix("pm", 8, 1), generate_matrix("uniform", 8, 2),
                                       generate_matrix("gaussian", 12, 3), generate_matrix("pm", 12, 4)};
    const std::vector<double> xs{1.0, 2.0, 4.0};
    for (TailMode mode : {TailMode::one_sided, TailMode::absolute}) {
      const auto r = calibrate_c(set, 8.0, xs, mode);
      CHECK(r.value > 0.0);
      CHECK(c_feasible(set, r.value, 8.0, xs, mode));
      // Minimal up to the strict inequality: the next double down either
      // fails or does not exceed every per-pair requirement.
      const double below = std::nextafter(r.value, 0.0);
      double required = 0.0;
      for (const auto& e : r.entries) required = std::max(required, e.required);
      CHECK((!c_feasible(set, below, 8.0, xs, mode) || below <= required));
      CHECK(r.value > required);
      CHECK(r.entries.size() == set.size() * xs.size());
      CHECK(calibrate_c(set, 8.0, xs, mode).value == r.value);
    }
  }
  SUBCASE("zero matrix with a binding grid point is skipped with a warning") {
    const auto r = calibrate_c({CoefficientMatrix::zeros(4), generate_matrix("pm", 8, 1)}, 2.0, {2.0});
    CHECK(r.warnings.size() == 1);
    for (const auto& e : r.entries) CHECK(e.instance == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(calibrate_c({}, 8.0, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_c({all_ones(4)}, 8.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_c({all_ones(4)}, 0.0, {1.0}), std::invalid_argument);
  }
}

TEST_CASE("Clopper-Pearson interval") {
  const auto zero = clopper_pearson(0, 100, 0.95);
  CHECK(zero.low == 0.0);
  CHECK(zero.high == doctest::Approx(1.0 - std::pow(0.025, 0.01)).epsilon(1e-10));
  const auto all = clopper_pearson(100, 100, 0.95);
  CHECK(all.high == 1.0);
  CHECK(all.low == doctest::Approx(std::pow(0.025, 0.01)).epsilon(1e-10));
  const auto mid = clopper_pearson(50, 100, 0.95);
  CHECK(mid.low < 0.5);
  CHECK(mid.high > 0.5);
  CHECK(mid.low == doctest::Approx(0.3983).epsilon(1e-3));
  CHECK_THROWS_AS(clopper_pearson(5, 4, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(clopper_pearson(1, 4, 0.0), std::invalid_argument);
}
