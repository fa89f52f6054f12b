#pragma once

#include "chaos_swr/coeff.hpp"
#include "chaos_swr/samplers.hpp"

#include <span>
#include <vector>

namespace chaos {

/// sum_{i != j} s_i s_j a_ij. Works for balanced and unbalanced sign vectors.
/// Accumulation is row-major in a fixed order, so results are bit-stable.
double eval_chaos(const CoefficientMatrix& a, std::span<const Sign> signs);
inline double eval_chaos(const CoefficientMatrix& a, const SignVector& eps) {
  return eval_chaos(a, eps.signs());
}

/// Elementwise eval_chaos. A length mismatch anywhere rejects the whole batch
/// before any value is computed.
std::vector<double> eval_chaos_batch(const CoefficientMatrix& a,
                                     std::span<const std::vector<Sign>> draws);

}  // namespace chaos
