#include "chaos_swr/oracle.hpp"

#include "chaos_swr/chaos.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace chaos {

const char* to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::without_replacement: return "swr";
    case Scheme::iid: return "iid";
    case Scheme::coupled: return "coupled";
  }
  return "?";
}

const char* to_string(TailMode m) noexcept {
  return m == TailMode::one_sided ? "one-sided" : "absolute";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "swr" || s == "without-replacement") return Scheme::without_replacement;
  if (s == "iid" || s == "iid-rademacher") return Scheme::iid;
  if (s == "coupled") return Scheme::coupled;
  throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

TailMode parse_tail_mode(std::string_view s) {
  if (s == "one-sided") return TailMode::one_sided;
  if (s == "absolute") return TailMode::absolute;
  throw std::invalid_argument("unknown tail mode '" + std::string(s) + "'");
}

double merge_key(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v == 0.0 ? 0.0 : v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __uint128_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

namespace {

std::vector<Sign> signs_from_mask(std::uint64_t mask, std::size_t n) {
  std::vector<Sign> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = ((mask >> i) & 1U) ? Sign{1} : Sign{-1};
  return s;
}

void check_path_cap(std::size_t n, const EnumerationCaps& caps) {
  require_even(n);
  if (n > caps.max_path_n || n > 63)
    throw CapExceeded("path enumeration cap exceeded: n = " + std::to_string(n) +
                      " > " + std::to_string(caps.max_path_n));
}

// Calls fn(path) for each of the 2^(n-1) paths of length n whose last sign
// is +1; the last sign never influences T or the coupled vector.
template <class Fn>
void for_each_path_prefix(std::size_t n, Fn&& fn) {
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  std::vector<Sign> path(n, Sign{1});
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (std::size_t i = 0; i + 1 < n; ++i) path[i] = ((mask >> i) & 1U) ? Sign{1} : Sign{-1};
    fn(path);
  }
}

// Groups chaos values that agree to 12 significant digits. Each group is
// represented by its smallest member, so a threshold read off the law is
// never above a value the samplers can produce for that atom.
template <class Weight>
class ValueMerger {
 public:
  void add(double v, Weight w) {
    auto [it, fresh] = groups_.try_emplace(merge_key(v), v, w);
    if (!fresh) {
      it->second.first = std::min(it->second.first, v);
      it->second.second += w;
    }
  }
  std::map<double, Weight> merged() const {
    std::map<double, Weight> out;
    for (const auto& [key, g] : groups_) out.emplace(g.first == 0.0 ? 0.0 : g.first, g.second);
    return out;
  }

 private:
  std::map<double, std::pair<double, Weight>> groups_;
};

}  // namespace

SignLaw enumerate_balanced(std::size_t n, const EnumerationCaps& caps) {
  require_even(n);
  const std::uint64_t total = binomial(n, n / 2);
  if (n > 62 || total > caps.max_subsets)
    throw CapExceeded("subset enumeration cap exceeded: C(" + std::to_string(n) + ", " +
                      std::to_string(n / 2) + ") > " + std::to_string(caps.max_subsets));
  std::map<std::vector<Sign>, std::uint64_t> counts;
  // Gosper's hack over masks with exactly n/2 bits set.
  std::uint64_t mask = (std::uint64_t{1} << (n / 2)) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n;
  while (mask < limit) {
    counts.emplace(signs_from_mask(mask, n), 1);
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return SignLaw::from_counts(counts, total);
}

SignLaw coupled_law(std::size_t n, const EnumerationCaps& caps) {
  check_path_cap(n, caps);
  std::map<std::vector<Sign>, std::uint64_t> counts;
  for_each_path_prefix(n, [&](const std::vector<Sign>& path) {
    const CoupledDraw d = couple(RademacherPath{path});
    const auto s = d.coupled.signs();
    counts[std::vector<Sign>(s.begin(), s.end())] += 1;
  });
  return SignLaw::from_counts(counts, std::uint64_t{1} << (n - 1));
}

IntLaw exact_T_law(std::size_t n, const EnumerationCaps& caps) {
  check_path_cap(n, caps);
  std::map<long, std::uint64_t> counts;
  for_each_path_prefix(n, [&](const std::vector<Sign>& path) {
    counts[static_cast<long>(stopping_time(path))] += 1;
  });
  return IntLaw::from_counts(counts, std::uint64_t{1} << (n - 1));
}

ValueLaw chaos_law_of(const CoefficientMatrix& a, const SignLaw& signs) {
  ValueMerger<double> merger;
  for (const auto& [s, p] : signs.support) merger.add(eval_chaos(a, s), p);
  const auto merged = merger.merged();
  ValueLaw law;
  law.support.assign(merged.begin(), merged.end());
  return law;
}

ValueLaw exact_chaos_law(const CoefficientMatrix& a, Scheme scheme, const EnumerationCaps& caps) {
  const std::size_t n = a.size();
  switch (scheme) {
    case Scheme::without_replacement: {
      // Counts stay integral: each balanced vector has weight one.
      require_even(n);
      const std::uint64_t total = binomial(n, n / 2);
      if (n > 62 || total > caps.max_subsets)
        throw CapExceeded("subset enumeration cap exceeded for n = " + std::to_string(n));
      ValueMerger<std::uint64_t> counts;
      std::uint64_t mask = (std::uint64_t{1} << (n / 2)) - 1;
      const std::uint64_t limit = std::uint64_t{1} << n;
      while (mask < limit) {
        counts.add(eval_chaos(a, signs_from_mask(mask, n)), 1);
        const std::uint64_t c = mask & (~mask + 1);
        const std::uint64_t r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
      }
      return ValueLaw::from_counts(counts.merged(), total);
    }
    case Scheme::iid: {
      if (n > caps.max_iid_n || n > 63)
        throw CapExceeded("iid enumeration cap exceeded: n = " + std::to_string(n) + " > " +
                          std::to_string(caps.max_iid_n));
      ValueMerger<std::uint64_t> counts;
      const std::uint64_t total = std::uint64_t{1} << n;
      for (std::uint64_t mask = 0; mask < total; ++mask)
        counts.add(eval_chaos(a, signs_from_mask(mask, n)), 1);
      return ValueLaw::from_counts(counts.merged(), total);
    }
    case Scheme::coupled: {
      check_path_cap(n, caps);
      std::map<std::vector<Sign>, std::uint64_t> vectors;
      for_each_path_prefix(n, [&](const std::vector<Sign>& path) {
        const CoupledDraw d = couple(RademacherPath{path});
        const auto s = d.coupled.signs();
        vectors[std::vector<Sign>(s.begin(), s.end())] += 1;
      });
      ValueMerger<std::uint64_t> counts;
      for (const auto& [s, c] : vectors) counts.add(eval_chaos(a, s), c);
      return ValueLaw::from_counts(counts.merged(), std::uint64_t{1} << (n - 1));
    }
  }
  throw std::logic_error("unhandled scheme");
}

double exact_tail(const ValueLaw& law, double t, TailMode mode) {
  double s = 0.0;
  for (const auto& [v, p] : law.support) {
    const double stat = mode == TailMode::absolute ? std::abs(v) : v;
    if (stat >= t) s += p;
  }
  return s;
}

double exact_mean(const CoefficientMatrix& a) {
  return -off_diagonal_sum(a) / static_cast<double>(a.size() - 1);
}

double law_mean(const ValueLaw& law) {
  double s = 0.0;
  for (const auto& [v, p] : law.support) s += v * p;
  return s;
}

double law_quantile(const ValueLaw& law, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  if (law.support.empty()) throw std::invalid_argument("empty law");
  double cdf = 0.0;
  for (const auto& [v, p] : law.support) {
    cdf += p;
    // Relative slack absorbs the rounding of probabilities that are exact
    // rationals (e.g. 19/20 summed from twentieths).
    if (cdf >= q * (1.0 - 1e-12)) return v;
  }
  return law.support.back().first;
}

ValueLaw abs_law(const ValueLaw& law) {
  ValueMerger<double> merger;
  for (const auto& [v, p] : law.support) merger.add(std::abs(v), p);
  const auto merged = merger.merged();
  ValueLaw out;
  out.support.assign(merged.begin(), merged.end());
  return out;
}

}  // namespace chaos
