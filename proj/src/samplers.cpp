#include "chaos_swr/samplers.hpp"

#include <numeric>
#include <stdexcept>

namespace chaos {
namespace {
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

CounterRng::CounterRng(const RngSpec& spec, std::uint64_t replicate)
    : key_(mix64(mix64(spec.seed ^ hash_label(spec.stream)) + (replicate + 1) * kGoldenGamma)) {}

std::uint64_t CounterRng::next() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGoldenGamma);
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  std::uint64_t x = next();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SignVector::SignVector(std::vector<Sign> signs) : signs_(std::move(signs)) {
  long sum = 0;
  for (Sign s : signs_) {
    if (s != 1 && s != -1) throw std::invalid_argument("sign vector entries must be +1 or -1");
    sum += s;
  }
  if (signs_.empty() || sum != 0) throw std::invalid_argument("sign vector is not balanced");
}

void require_even(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("n must be even and >= 2");
}

std::size_t stopping_time(std::span<const Sign> path) {
  const std::size_t n = path.size();
  require_even(n);
  const std::size_t half = n / 2;
  std::size_t plus = 0;
  std::size_t minus = 0;
  for (std::size_t t = 0; t < n; ++t) {
    (path[t] > 0 ? plus : minus) += 1;
    if (plus == half || minus == half) return t + 1;
  }
  // Unreachable: after n-1 steps one count is at least n/2.
  throw std::logic_error("stopping time not reached");
}

CoupledDraw couple(RademacherPath path) {
  const std::size_t t = stopping_time(path.signs);
  std::vector<Sign> coupled(path.signs.begin(), path.signs.begin() + static_cast<long>(t));
  coupled.resize(path.size(), static_cast<Sign>(-path.signs[t - 1]));
  return CoupledDraw{std::move(path), t, SignVector(std::move(coupled))};
}

SignVector draw_without_replacement(std::size_t n, const RngSpec& rng, std::uint64_t replicate) {
  require_even(n);
  CounterRng gen(rng, replicate);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const std::size_t pick = k + gen.below(n - k);
    std::swap(idx[k], idx[pick]);
  }
  std::vector<Sign> signs(n, Sign{-1});
  for (std::size_t k = 0; k < half; ++k) signs[idx[k]] = 1;
  return SignVector(std::move(signs));
}

RademacherPath draw_iid(std::size_t n, const RngSpec& rng, std::uint64_t replicate) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  CounterRng gen(rng, replicate);
  RademacherPath p;
  p.signs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) p.signs.push_back(gen.sign());
  return p;
}

CoupledDraw draw_coupled(std::size_t n, const RngSpec& rng, std::uint64_t replicate) {
  require_even(n);
  // Signs past T do not affect the coupled vector; the full path is kept for
  // inspection and is the same sequence draw_iid would produce.
  return couple(draw_iid(n, rng, replicate));
}

}  // namespace chaos
