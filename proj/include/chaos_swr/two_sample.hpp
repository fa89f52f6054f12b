#pragma once

// Two-sample U-statistic and its permutation (without-replacement) null.
//
// Convention: sums run over ORDERED pairs i != j, so each unordered pair is
// counted twice. This makes U equal to the chaos evaluated at the original
// split (+1 for the first sample, -1 for the second). With a symmetric
// kernel, halve U to get the unordered-pair statistic.

#include "chaos_swr/bounds.hpp"
#include "chaos_swr/coeff.hpp"
#include "chaos_swr/samplers.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chaos {

using Observation = std::vector<double>;

struct TwoSampleDataset {
  std::vector<Observation> sample1;
  std::vector<Observation> sample2;

  /// Throws unless both samples are nonempty, of equal size, and every
  /// observation has the same dimension.
  void validate() const;
  std::size_t size() const noexcept { return sample1.size() + sample2.size(); }
  /// X_1..X_p from sample1, then X_{p+1}..X_n from sample2.
  std::vector<Observation> combined() const;
};

struct Kernel {
  enum class Kind { product, gaussian, tabulated };
  Kind kind = Kind::product;
  double bandwidth = 1.0;                  // gaussian only
  std::optional<CoefficientMatrix> table;  // tabulated only

  static Kernel product() { return {}; }
  static Kernel gaussian(double bandwidth);
  static Kernel tabulated(CoefficientMatrix table);

  /// product: <x, y>; gaussian: exp(-|x - y|^2 / (2 h^2)).
  double operator()(const Observation& x, const Observation& y) const;
};

CoefficientMatrix kernel_matrix(const TwoSampleDataset& data, const Kernel& g);
/// Same-sample ordered-pair sum of g minus cross-sample ordered-pair sum.
double u_statistic(const TwoSampleDataset& data, const Kernel& g);
/// (+1, ..., +1, -1, ..., -1) with p entries of each sign.
SignVector block_signs(std::size_t p);

struct PermTestResult {
  double u_obs = 0.0;
  double p_value = 1.0;
  std::uint64_t exceed_count = 0;
  /// Keyed by level alpha; value is the empirical (1 - alpha)-quantile.
  std::map<double, double> mc_quantiles;
  std::optional<double> bound_critical;
  std::optional<double> bound_x;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::string stream;
};

/// Permutation test with add-one p-value (1 + #{Z* >= u_obs}) / (reps + 1).
/// With constants, bound_critical is the simplified-bound threshold at
/// x = log(C / alpha) for the smallest alpha in `levels` (absent when that
/// x is not positive).
PermTestResult perm_test(const TwoSampleDataset& data, const Kernel& g, std::uint64_t reps,
                         const RngSpec& rng, const std::vector<double>& levels,
                         const std::optional<BoundConstants>& constants, std::size_t workers = 0);

enum class DatasetFormat { csv_long, csv_two_col };
DatasetFormat parse_dataset_format(std::string_view s);

/// csv-long: rows "sample_id,value[,value...]" with sample_id in {1, 2};
///           repeated value columns form a vector observation.
/// csv-two-col: rows "value1,value2", one scalar per sample per row.
/// A first line that does not parse as numbers is treated as a header.
TwoSampleDataset read_dataset(std::istream& in, DatasetFormat format);
TwoSampleDataset load_dataset(const std::string& path, DatasetFormat format);

}  // namespace chaos
