#pragma once

// Exhaustive-enumeration ground truth for small n.

#include "chaos_swr/coeff.hpp"
#include "chaos_swr/samplers.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace chaos {

enum class Scheme { without_replacement, iid, coupled };
enum class TailMode { one_sided, absolute };

const char* to_string(Scheme s) noexcept;
const char* to_string(TailMode m) noexcept;
Scheme parse_scheme(std::string_view s);
TailMode parse_tail_mode(std::string_view s);

class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct EnumerationCaps {
  std::uint64_t max_subsets = 10'000'000;  // C(n, n/2)
  std::size_t max_path_n = 24;             // coupled scheme and T law: 2^(n-1) paths
  std::size_t max_iid_n = 20;              // iid scheme: 2^n sign vectors
};

/// Finite distribution with distinct outcomes sorted ascending.
template <class Outcome>
struct DiscreteLaw {
  std::vector<std::pair<Outcome, double>> support;

  double total() const {
    double s = 0.0;
    for (const auto& [o, p] : support) s += p;
    return s;
  }
  double probability_of(const Outcome& o) const {
    for (const auto& [v, p] : support)
      if (v == o) return p;
    return 0.0;
  }

  /// Builds from integer counts; probabilities are count / denominator,
  /// divided once at the end.
  static DiscreteLaw from_counts(const std::map<Outcome, std::uint64_t>& counts,
                                 std::uint64_t denominator) {
    DiscreteLaw law;
    law.support.reserve(counts.size());
    for (const auto& [o, c] : counts)
      law.support.emplace_back(o, static_cast<double>(c) / static_cast<double>(denominator));
    return law;
  }
};

using ValueLaw = DiscreteLaw<double>;
using SignLaw = DiscreteLaw<std::vector<Sign>>;
using IntLaw = DiscreteLaw<long>;

/// Rounds to 12 significant digits; equal chaos values that differ only by
/// floating summation noise coalesce to the same key. Value laws store the
/// smallest member of each group, not the rounded key.
double merge_key(double v);

std::uint64_t binomial(std::size_t n, std::size_t k);

/// Uniform law on the C(n, n/2) balanced sign vectors.
SignLaw enumerate_balanced(std::size_t n, const EnumerationCaps& caps = {});
/// Exact law of couple(path) for a uniform path of length n. Only the first
/// n-1 signs can matter because T <= n-1.
SignLaw coupled_law(std::size_t n, const EnumerationCaps& caps = {});
/// Exact law of the stopping time over [n/2, n-1].
IntLaw exact_T_law(std::size_t n, const EnumerationCaps& caps = {});

/// Pushforward of a sign-vector law through eval_chaos, equal values merged.
ValueLaw chaos_law_of(const CoefficientMatrix& a, const SignLaw& signs);
ValueLaw exact_chaos_law(const CoefficientMatrix& a, Scheme scheme,
                         const EnumerationCaps& caps = {});

double exact_tail(const ValueLaw& law, double t, TailMode mode);
/// Mean under without-replacement sampling: -(sum_{i != j} a_ij) / (n - 1).
double exact_mean(const CoefficientMatrix& a);
double law_mean(const ValueLaw& law);
/// Smallest outcome v with P(Z <= v) >= q (left-continuous inverse CDF).
double law_quantile(const ValueLaw& law, double q);
/// Law of |Z| given the law of Z.
ValueLaw abs_law(const ValueLaw& law);

template <class Outcome>
double tv_distance(const DiscreteLaw<Outcome>& p, const DiscreteLaw<Outcome>& q) {
  std::map<Outcome, std::pair<double, double>> joint;
  for (const auto& [o, w] : p.support) joint[o].first += w;
  for (const auto& [o, w] : q.support) joint[o].second += w;
  if constexpr (std::is_same_v<Outcome, std::vector<Sign>>) {
    if (!p.support.empty() && !q.support.empty() &&
        p.support.front().first.size() != q.support.front().first.size())
      throw std::invalid_argument("laws live on sign vectors of different lengths");
  }
  double s = 0.0;
  for (const auto& [o, w] : joint) s += std::abs(w.first - w.second);
  return 0.5 * s;
}

}  // namespace chaos
