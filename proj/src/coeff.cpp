#include "chaos_swr/coeff.hpp"

#include "chaos_swr/format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chaos {

CoefficientMatrix CoefficientMatrix::from_dense(std::span<const double> values, std::size_t n,
                                                bool strict) {
  if (n < 2) throw std::invalid_argument("coefficient matrix needs n >= 2");
  if (values.size() != n * n) throw std::invalid_argument("coefficient matrix is not square");
  std::vector<double> entries(values.begin(), values.end());
  for (std::size_t i = 0; i < n; ++i) {
    double& d = entries[i * n + i];
    if (d != 0.0 && strict) {
      throw std::invalid_argument("nonzero diagonal entry at index " + std::to_string(i));
    }
    d = 0.0;
  }
  return CoefficientMatrix(n, std::move(entries));
}

CoefficientMatrix CoefficientMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                               bool strict) {
  const std::size_t n = rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw std::invalid_argument("coefficient matrix is not square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return from_dense(flat, n, strict);
}

CoefficientMatrix CoefficientMatrix::zeros(std::size_t n) {
  if (n < 2) throw std::invalid_argument("coefficient matrix needs n >= 2");
  return CoefficientMatrix(n, std::vector<double>(n * n, 0.0));
}

CoefficientMatrix CoefficientMatrix::scaled(double factor) const {
  std::vector<double> e = entries_;
  for (double& v : e) v *= factor;
  return CoefficientMatrix(n_, std::move(e));
}

CoefficientMatrix CoefficientMatrix::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != n_) throw std::invalid_argument("permutation length mismatch");
  std::vector<double> e(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) e[i * n_ + j] = (*this)(perm[i], perm[j]);
  return CoefficientMatrix(n_, std::move(e));
}

CoefficientMatrix operator+(const CoefficientMatrix& a, const CoefficientMatrix& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("matrix size mismatch");
  std::vector<double> e(a.entries_.size());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = a.entries_[k] + b.entries_[k];
  return CoefficientMatrix(a.n_, std::move(e));
}

double sigma(const CoefficientMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const CoefficientMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double off_diagonal_sum(const CoefficientMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return s;
}

TruncatedNorms truncated_norms(const CoefficientMatrix& a, std::size_t delta) {
  const std::size_t n = a.size();
  if (delta > n) throw std::out_of_range("delta must lie in [0, n]");
  const std::size_t m = n - delta;

  TruncatedNorms t;
  t.cutoff = m;
  double prefix = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) prefix += a(i, j) * a(i, j);
  t.prefix_sigma = std::sqrt(prefix);

  t.col_cross.reserve(delta);
  t.row_cross.reserve(delta);
  for (std::size_t k = m; k < n; ++k) {
    double col = 0.0;
    double row = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
      col += a(l, k) * a(l, k);
      row += a(k, l) * a(k, l);
    }
    t.col_cross.push_back(std::sqrt(col));
    t.row_cross.push_back(std::sqrt(row));
  }

  for (std::size_t i = m; i < n; ++i)
    for (std::size_t j = m; j < n; ++j) t.tail_abs += std::abs(a(i, j));
  return t;
}

CoefficientMatrix symmetric_part(const CoefficientMatrix& a) {
  const std::size_t n = a.size();
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) e[i * n + j] = 0.5 * (a(i, j) + a(j, i));
  return CoefficientMatrix::from_dense(e, n);
}

CoefficientMatrix read_matrix_csv(std::istream& in, bool strict) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    for (const auto& field : split_csv_line(line)) {
      double v = 0.0;
      if (!parse_double(field, v))
        throw std::invalid_argument("matrix csv line " + std::to_string(line_no) +
                                    ": cannot parse '" + field + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return CoefficientMatrix::from_rows(rows, strict);
}

CoefficientMatrix load_matrix_csv(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file " + path);
  return read_matrix_csv(in, strict);
}

void write_matrix_csv(std::ostream& out, const CoefficientMatrix& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

}  // namespace chaos
