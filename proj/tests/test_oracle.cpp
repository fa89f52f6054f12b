#include "chaos_swr/bounds.hpp"
#include "chaos_swr/chaos.hpp"
#include "chaos_swr/oracle.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace chaos;
using chaos::testing::all_ones;
using chaos::testing::random_matrix;

namespace {
std::vector<Sign> to_signs(const std::vector<int>& v) { return {v.begin(), v.end()}; }

ValueLaw brute_swr_law(const CoefficientMatrix& a) {
  const auto vecs = chaos::testing::brute_balanced(a.size());
  std::map<double, double> m;
  for (const auto& s : vecs) m[chaos::testing::brute_chaos(a, s)] += 1.0 / static_cast<double>(vecs.size());
  ValueLaw law;
  law.support.assign(m.begin(), m.end());
  return law;
}
}  // namespace

TEST_CASE("enumerate_balanced") {
  const auto l2 = enumerate_balanced(2);
  REQUIRE(l2.support.size() == 2);
  CHECK(l2.probability_of({1, -1}) == 0.5);
  CHECK(l2.probability_of({-1, 1}) == 0.5);

  const auto l4 = enumerate_balanced(4);
  CHECK(l4.support.size() == 6);
  for (const auto& [s, p] : l4.support) CHECK(p == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

  const auto l6 = enumerate_balanced(6);
  CHECK(l6.support.size() == 20);
  for (const auto& [s, p] : l6.support) CHECK(p == 1.0 / 20.0);

  // Same set as filtering all 2^n vectors.
  for (std::size_t n : {8u, 10u}) {
    std::set<std::vector<Sign>> brute;
    for (const auto& v : chaos::testing::brute_balanced(n)) brute.insert(to_signs(v));
    std::set<std::vector<Sign>> got;
    for (const auto& [s, p] : enumerate_balanced(n).support) got.insert(s);
    CHECK(got == brute);
  }

  EnumerationCaps tiny;
  tiny.max_subsets = 10;
  CHECK_THROWS_AS(enumerate_balanced(6, tiny), CapExceeded);
  CHECK_THROWS_AS(enumerate_balanced(5), std::invalid_argument);
}

TEST_CASE("exact_chaos_law") {
  SUBCASE("all-ones n = 4 is a point mass at -4") {
    const auto law = exact_chaos_law(all_ones(4), Scheme::without_replacement);
    REQUIRE(law.support.size() == 1);
    CHECK(law.support[0].first == -4.0);
    CHECK(law.support[0].second == 1.0);
  }
  SUBCASE("unit pair under iid signs") {
    const auto pair = CoefficientMatrix::from_rows({{0, 1}, {1, 0}});
    const auto law = exact_chaos_law(pair, Scheme::iid);
    REQUIRE(law.support.size() == 2);
    CHECK(law.support[0] == std::pair<double, double>{-2.0, 0.5});
    CHECK(law.support[1] == std::pair<double, double>{2.0, 0.5});
  }
  SUBCASE("zero matrix under every scheme") {
    for (Scheme s : {Scheme::without_replacement, Scheme::iid, Scheme::coupled}) {
      const auto law = exact_chaos_law(CoefficientMatrix::zeros(6), s);
      REQUIRE(law.support.size() == 1);
      CHECK(law.support[0].first == 0.0);
      CHECK(law.support[0].second == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("agrees with the brute-force law on random matrices") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const std::size_t n = 4 + 2 * (seed % 4);
      const auto a = random_matrix(n, seed, seed % 2 == 0);
      const auto law = exact_chaos_law(a, Scheme::without_replacement);
      const auto ref = brute_swr_law(a);
      CHECK(law.total() == doctest::Approx(1.0).epsilon(1e-12));
      for (const auto& [v, p] : ref.support) {
        for (TailMode m : {TailMode::one_sided, TailMode::absolute}) {
          // Thresholds placed between support points avoid rounding ties.
          CHECK(exact_tail(law, v - 1e-9, m) == doctest::Approx(exact_tail(ref, v - 1e-9, m)).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("coupled scheme equals pushforward of coupled_law") {
    const auto a = random_matrix(8, 5, true);
    const auto direct = exact_chaos_law(a, Scheme::coupled);
    const auto via = chaos_law_of(a, coupled_law(8));
    REQUIRE(direct.support.size() == via.support.size());
    for (std::size_t k = 0; k < direct.support.size(); ++k) {
      CHECK(direct.support[k].first == via.support[k].first);
      CHECK(direct.support[k].second == doctest::Approx(via.support[k].second).epsilon(1e-14));
    }
  }
  SUBCASE("caps") {
    EnumerationCaps caps;
    caps.max_iid_n = 6;
    CHECK_THROWS_AS(exact_chaos_law(random_matrix(8, 1), Scheme::iid, caps), CapExceeded);
    caps.max_path_n = 6;
    CHECK_THROWS_AS(exact_chaos_law(random_matrix(8, 1), Scheme::coupled, caps), CapExceeded);
  }
}

TEST_CASE("exact_tail") {
  ValueLaw point;
  point.support = {{-4.0, 1.0}};
  CHECK(exact_tail(point, -4.0, TailMode::one_sided) == 1.0);
  CHECK(exact_tail(point, 0.0, TailMode::absolute) == 1.0);
  CHECK(exact_tail(point, 0.0, TailMode::one_sided) == 0.0);
  ValueLaw two;
  two.support = {{-2.0, 0.5}, {2.0, 0.5}};
  CHECK(exact_tail(two, 2.0, TailMode::one_sided) == 0.5);
  CHECK(exact_tail(two, 2.0, TailMode::absolute) == 1.0);
}

TEST_CASE("exact_mean") {
  CHECK(exact_mean(CoefficientMatrix::zeros(4)) == 0.0);
  CHECK(exact_mean(all_ones(4)) == -4.0);
  CHECK(exact_mean(CoefficientMatrix::from_rows({{0, 1}, {1, 0}})) == -2.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + 2 * (seed % 6);
    const auto a = random_matrix(n, seed);
    const double m = law_mean(exact_chaos_law(a, Scheme::without_replacement));
    CHECK(chaos::testing::rel_diff(m, exact_mean(a)) <= 1e-10);
  }
}

TEST_CASE("coupled_law") {
  const auto l2 = coupled_law(2);
  CHECK(l2.probability_of({1, -1}) == 0.5);
  CHECK(l2.probability_of({-1, 1}) == 0.5);

  const auto l4 = coupled_law(4);
  CHECK(l4.probability_of({1, 1, -1, -1}) == 0.25);
  CHECK(l4.probability_of({-1, -1, 1, 1}) == 0.25);
  CHECK(l4.probability_of({1, -1, 1, -1}) == 0.125);
  CHECK(l4.total() == 1.0);

  // Brute oracle: all 2^n full paths through the literal construction.
  for (std::size_t n = 2; n <= 10; n += 2) {
    std::map<std::vector<Sign>, double> ref;
    const double w = std::ldexp(1.0, -static_cast<int>(n));
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b)
      ref[to_signs(chaos::testing::brute_couple(chaos::testing::bits_to_signs(b, n)))] += w;
    const auto law = coupled_law(n);
    REQUIRE(law.support.size() == ref.size());
    for (const auto& [s, p] : law.support) {
      CHECK(p == ref.at(s));
      CHECK(std::accumulate(s.begin(), s.end(), 0) == 0);
    }
  }
  EnumerationCaps caps;
  caps.max_path_n = 8;
  CHECK_THROWS_AS(coupled_law(10, caps), CapExceeded);
}

TEST_CASE("tv_distance") {
  const auto u4 = enumerate_balanced(4);
  CHECK(tv_distance(u4, u4) == 0.0);
  CHECK(tv_distance(coupled_law(2), enumerate_balanced(2)) == 0.0);
  // Hand count: two outcomes at 1/4 and four at 1/8 against six at 1/6.
  CHECK(tv_distance(coupled_law(4), u4) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK_THROWS_AS(tv_distance(coupled_law(2), u4), std::invalid_argument);
}

TEST_CASE("exact_T_law") {
  const auto t2 = exact_T_law(2);
  REQUIRE(t2.support.size() == 1);
  CHECK(t2.support[0] == std::pair<long, double>{1, 1.0});
  const auto t4 = exact_T_law(4);
  CHECK(t4.probability_of(2) == 0.5);
  CHECK(t4.probability_of(3) == 0.5);

  for (std::size_t n = 2; n <= 12; n += 2) {
    std::map<long, double> ref;
    const double w = std::ldexp(1.0, -static_cast<int>(n));
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b)
      ref[static_cast<long>(chaos::testing::brute_T(chaos::testing::bits_to_signs(b, n)))] += w;
    const auto law = exact_T_law(n);
    CHECK(law.total() == 1.0);
    for (const auto& [t, p] : law.support) {
      CHECK(p == ref.at(t));
      CHECK(t >= static_cast<long>(n / 2));
      CHECK(t <= static_cast<long>(n - 1));
    }
  }
}

TEST_CASE("Hoeffding bound on T dominates the exact law, n <= 16") {
  for (std::size_t n = 2; n <= 16; n += 2) {
    const auto law = exact_T_law(n);
    for (std::size_t d = 0; d <= n; ++d) {
      double exact = 0.0;
      for (const auto& [t, p] : law.support)
        if (t <= static_cast<long>(n) - static_cast<long>(d)) exact += p;
      CHECK(exact <= hoeffding_T_bound(n, d));
    }
  }
}

TEST_CASE("on {T > n - delta} the coupled prefix has the iid law") {
  for (std::size_t n = 4; n <= 10; n += 2) {
    for (std::size_t d = 1; d < n; ++d) {
      const std::size_t m = n - d;
      std::map<std::vector<int>, double> coupled_prefix;
      std::map<std::vector<int>, double> path_prefix;
      const double w = std::ldexp(1.0, -static_cast<int>(n));
      for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
        const auto path = chaos::testing::bits_to_signs(b, n);
        RademacherPath p{to_signs(path)};
        const auto draw = couple(p);
        if (draw.stopping_time <= m) continue;
        path_prefix[std::vector<int>(path.begin(), path.begin() + static_cast<long>(m))] += w;
        const auto s = draw.coupled.signs();
        coupled_prefix[std::vector<int>(s.begin(), s.begin() + static_cast<long>(m))] += w;
      }
      CHECK(coupled_prefix == path_prefix);
    }
  }
}

TEST_CASE("law invariants") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t n = 4 + 2 * (seed % 4);
    const auto a = random_matrix(n, seed + 50);
    // iid mean is zero.
    CHECK(std::abs(law_mean(exact_chaos_law(a, Scheme::iid))) <= 1e-12);

    // Simultaneous row/column relabeling leaves the without-replacement law unchanged.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::rotate(perm.begin(), perm.begin() + 1 + static_cast<long>(seed % (n - 1)), perm.end());
    std::swap(perm[0], perm[n - 1]);
    const auto base = exact_chaos_law(a, Scheme::without_replacement);
    const auto relabeled = exact_chaos_law(a.permuted(perm), Scheme::without_replacement);
    REQUIRE(base.support.size() == relabeled.support.size());
    for (std::size_t k = 0; k < base.support.size(); ++k) {
      CHECK(base.support[k].first == doctest::Approx(relabeled.support[k].first).epsilon(1e-11));
      CHECK(base.support[k].second == doctest::Approx(relabeled.support[k].second).epsilon(1e-12));
    }
  }
}

TEST_CASE("law_quantile and abs_law") {
  ValueLaw law;
  law.support = {{-3.0, 0.2}, {-1.0, 0.3}, {2.0, 0.5}};
  CHECK(law_quantile(law, 0.1) == -3.0);
  CHECK(law_quantile(law, 0.2) == -3.0);
  CHECK(law_quantile(law, 0.21) == -1.0);
  CHECK(law_quantile(law, 0.99) == 2.0);
  CHECK_THROWS_AS(law_quantile(law, 1.0), std::invalid_argument);
  const auto a = abs_law(law);
  CHECK(a.support.size() == 3);
  CHECK(a.probability_of(1.0) == 0.3);
  CHECK(a.probability_of(3.0) == 0.2);
}

TEST_CASE("merge_key") {
  CHECK(merge_key(0.1 + 0.2) == merge_key(0.3));
  CHECK(merge_key(-0.0) == 0.0);
  CHECK(merge_key(-4.0) == -4.0);
  CHECK(binomial(16, 8) == 12870);
  CHECK(binomial(4, 5) == 0);
}
