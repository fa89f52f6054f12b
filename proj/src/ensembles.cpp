#include "chaos_swr/ensembles.hpp"

#include "chaos_swr/samplers.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chaos {

const std::vector<std::string>& ensemble_names() {
  static const std::vector<std::string> names{"all-ones", "pm", "uniform", "gaussian", "rank-one"};
  return names;
}

CoefficientMatrix generate_matrix(std::string_view ensemble, std::size_t n, std::uint64_t seed,
                                  double scale) {
  require_even(n);
  CounterRng rng(RngSpec{seed, "ensemble:" + std::string(ensemble)}, 0);
  std::vector<double> e(n * n, 0.0);
  auto set = [&](std::size_t i, std::size_t j, double v) {
    e[i * n + j] = v;
    e[j * n + i] = v;
  };

  if (ensemble == "all-ones") {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) set(i, j, scale);
  } else if (ensemble == "pm") {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) set(i, j, rng.sign() * scale);
  } else if (ensemble == "uniform") {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) set(i, j, scale * (2.0 * rng.uniform() - 1.0));
  } else if (ensemble == "gaussian") {
    // Box-Muller; the standard library normal distribution is not portable
    // across implementations.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double u1 = 1.0 - rng.uniform();
        const double u2 = rng.uniform();
        set(i, j, scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2));
      }
  } else if (ensemble == "rank-one") {
    std::vector<double> u(n);
    for (double& v : u) v = 2.0 * rng.uniform() - 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) set(i, j, scale * u[i] * u[j]);
  } else {
    throw std::invalid_argument("unknown ensemble '" + std::string(ensemble) + "'");
  }
  return CoefficientMatrix::from_dense(e, n, true);
}

}  // namespace chaos
