#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace chaos {

/// Coefficient family (a_ij) of an order-2 chaos, stored dense and row-major.
///
/// Indices are 0-based. The diagonal is structurally zero: every constructor
/// either rejects or clears it, so sums over i != j can run over all (i, j).
/// Symmetry is not assumed. Instances are immutable once built.
class CoefficientMatrix {
 public:
  /// Builds from a row-major n*n buffer. With `strict`, a nonzero diagonal
  /// entry is an error; otherwise the diagonal is cleared.
  static CoefficientMatrix from_dense(std::span<const double> values, std::size_t n,
                                      bool strict = false);
  static CoefficientMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                     bool strict = false);
  static CoefficientMatrix zeros(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {entries_.data() + i * n_, n_};
  }
  const std::vector<double>& data() const noexcept { return entries_; }

  CoefficientMatrix scaled(double factor) const;
  /// Relabels indices: result(i, j) = (*this)(perm[i], perm[j]).
  CoefficientMatrix permuted(std::span<const std::size_t> perm) const;

  friend CoefficientMatrix operator+(const CoefficientMatrix& a, const CoefficientMatrix& b);
  friend bool operator==(const CoefficientMatrix&, const CoefficientMatrix&) = default;

 private:
  CoefficientMatrix(std::size_t n, std::vector<double> entries)
      : n_(n), entries_(std::move(entries)) {}

  std::size_t n_ = 0;
  std::vector<double> entries_;
};

/// Truncated sums at cutoff m = n - delta, as used by the four-part threshold.
/// col_cross[k] belongs to column j = m + k, row_cross[k] to row i = m + k.
struct TruncatedNorms {
  std::size_t cutoff = 0;
  double prefix_sigma = 0.0;        // sqrt(sum_{i != j < m} a_ij^2)
  std::vector<double> col_cross;    // sqrt(sum_{i < m} a_ij^2), j >= m
  std::vector<double> row_cross;    // sqrt(sum_{j < m} a_ij^2), i >= m
  double tail_abs = 0.0;            // sum_{i != j >= m} |a_ij|
};

/// sqrt(sum_{i != j} a_ij^2).
double sigma(const CoefficientMatrix& a);
/// max_{i != j} |a_ij|; 0 for the zero matrix.
double max_abs(const CoefficientMatrix& a);
/// sum_{i != j} a_ij.
double off_diagonal_sum(const CoefficientMatrix& a);
/// Throws std::out_of_range unless 0 <= delta <= n.
TruncatedNorms truncated_norms(const CoefficientMatrix& a, std::size_t delta);
/// (a_ij + a_ji) / 2. The chaos only sees this part of the matrix.
CoefficientMatrix symmetric_part(const CoefficientMatrix& a);

/// Plain decimal CSV, n rows of n columns. Loading goes through from_dense
/// (non-strict), so a nonzero diagonal in the file is cleared.
CoefficientMatrix read_matrix_csv(std::istream& in, bool strict = false);
CoefficientMatrix load_matrix_csv(const std::string& path, bool strict = false);
void write_matrix_csv(std::ostream& out, const CoefficientMatrix& a);

}  // namespace chaos
