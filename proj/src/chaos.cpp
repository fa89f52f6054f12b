#include "chaos_swr/chaos.hpp"

#include <stdexcept>

namespace chaos {

double eval_chaos(const CoefficientMatrix& a, std::span<const Sign> signs) {
  const std::size_t n = a.size();
  if (signs.size() != n) throw std::invalid_argument("sign vector length does not match matrix");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * signs[j];
    total += signs[i] * acc;
  }
  return total;
}

std::vector<double> eval_chaos_batch(const CoefficientMatrix& a,
                                     std::span<const std::vector<Sign>> draws) {
  for (const auto& d : draws)
    if (d.size() != a.size()) throw std::invalid_argument("sign vector length does not match matrix");
  std::vector<double> out;
  out.reserve(draws.size());
  for (const auto& d : draws) out.push_back(eval_chaos(a, d));
  return out;
}

}  // namespace chaos
