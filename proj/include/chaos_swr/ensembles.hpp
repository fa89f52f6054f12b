#pragma once

#include "chaos_swr/coeff.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace chaos {

/// Named seeded matrix generators. All produce symmetric, zero-diagonal
/// matrices of even size:
///   all-ones  a_ij = M
///   pm        a_ij = +-M with probability 1/2 each
///   uniform   a_ij ~ U[-M, M]
///   gaussian  a_ij ~ N(0, M^2)
///   rank-one  a_ij = M u_i u_j with u_i ~ U[-1, 1]
CoefficientMatrix generate_matrix(std::string_view ensemble, std::size_t n, std::uint64_t seed,
                                  double scale = 1.0);

const std::vector<std::string>& ensemble_names();

}  // namespace chaos
