#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace chaos {

using Sign = std::int8_t;

/// Identifies a family of reproducible random streams. A draw is a pure
/// function of (seed, stream, replicate); no generator state is shared.
struct RngSpec {
  std::uint64_t seed = 0;
  std::string stream = "default";
};

/// Counter-based generator: the k-th output is a bijective mix of
/// (key + k * golden_gamma), with the key derived from (seed, stream,
/// replicate). Cheap to construct, so one instance per replicate.
class CounterRng {
 public:
  CounterRng(const RngSpec& spec, std::uint64_t replicate);

  std::uint64_t next() noexcept;
  /// Uniform on [0, bound), bound > 0. Unbiased (Lemire's rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  Sign sign() noexcept { return (next() >> 63) ? Sign{1} : Sign{-1}; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;
/// FNV-1a, used to fold the stream label into the key.
std::uint64_t hash_label(std::string_view label) noexcept;

/// A +-1 vector with exactly n/2 entries equal to +1.
class SignVector {
 public:
  /// Throws std::invalid_argument unless every entry is +-1 and the sum is 0.
  explicit SignVector(std::vector<Sign> signs);

  std::size_t size() const noexcept { return signs_.size(); }
  std::span<const Sign> signs() const noexcept { return signs_; }
  Sign operator[](std::size_t i) const noexcept { return signs_[i]; }

  friend bool operator==(const SignVector&, const SignVector&) = default;
  friend auto operator<=>(const SignVector&, const SignVector&) = default;

 private:
  std::vector<Sign> signs_;
};

/// An unconstrained +-1 sequence (i.i.d. Rademacher draws).
struct RademacherPath {
  std::vector<Sign> signs;
  std::size_t size() const noexcept { return signs.size(); }
  friend bool operator==(const RademacherPath&, const RademacherPath&) = default;
};

/// A path, its stopping time (1-based step count), and the balanced vector
/// obtained by keeping the first T signs and giving every later index the
/// sign opposite to the T-th one.
struct CoupledDraw {
  RademacherPath path;
  std::size_t stopping_time = 0;
  SignVector coupled;
  friend bool operator==(const CoupledDraw&, const CoupledDraw&) = default;
};

/// First t (1-based) at which either running sign count reaches n/2, where
/// n = path length (even). Always within [n/2, n-1].
std::size_t stopping_time(std::span<const Sign> path);
CoupledDraw couple(RademacherPath path);

SignVector draw_without_replacement(std::size_t n, const RngSpec& rng, std::uint64_t replicate);
CoupledDraw draw_coupled(std::size_t n, const RngSpec& rng, std::uint64_t replicate);
RademacherPath draw_iid(std::size_t n, const RngSpec& rng, std::uint64_t replicate);

void require_even(std::size_t n);

}  // namespace chaos
