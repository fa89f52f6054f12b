#include "chaos_swr/two_sample.hpp"

#include "chaos_swr/chaos.hpp"
#include "chaos_swr/format.hpp"
#include "chaos_swr/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace chaos {

void TwoSampleDataset::validate() const {
  if (sample1.empty() || sample2.empty()) throw std::invalid_argument("both samples must be nonempty");
  if (sample1.size() != sample2.size()) throw std::invalid_argument("unequal sample sizes");
  const std::size_t dim = sample1.front().size();
  if (dim == 0) throw std::invalid_argument("observations must have at least one coordinate");
  auto check = [dim](const std::vector<Observation>& s) {
    for (const auto& o : s)
      if (o.size() != dim) throw std::invalid_argument("observations have differing dimensions");
  };
  check(sample1);
  check(sample2);
}

std::vector<Observation> TwoSampleDataset::combined() const {
  std::vector<Observation> all = sample1;
  all.insert(all.end(), sample2.begin(), sample2.end());
  return all;
}

Kernel Kernel::gaussian(double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("gaussian bandwidth must be positive");
  Kernel k;
  k.kind = Kind::gaussian;
  k.bandwidth = bandwidth;
  return k;
}

Kernel Kernel::tabulated(CoefficientMatrix table) {
  Kernel k;
  k.kind = Kind::tabulated;
  k.table = std::move(table);
  return k;
}

double Kernel::operator()(const Observation& x, const Observation& y) const {
  if (x.size() != y.size()) throw std::invalid_argument("kernel arguments differ in dimension");
  switch (kind) {
    case Kind::product: {
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
      return s;
    }
    case Kind::gaussian: {
      double d2 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
      return std::exp(-d2 / (2.0 * bandwidth * bandwidth));
    }
    case Kind::tabulated:
      throw std::logic_error("tabulated kernel is indexed, not evaluated on values");
  }
  return 0.0;
}

CoefficientMatrix kernel_matrix(const TwoSampleDataset& data, const Kernel& g) {
  data.validate();
  const std::size_t n = data.size();
  if (g.kind == Kernel::Kind::tabulated) {
    if (!g.table || g.table->size() != n)
      throw std::invalid_argument("tabulated kernel size does not match the dataset");
    return *g.table;
  }
  if (g.kind == Kernel::Kind::gaussian && !(g.bandwidth > 0.0))
    throw std::invalid_argument("gaussian bandwidth must be positive");
  const auto xs = data.combined();
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) e[i * n + j] = g(xs[i], xs[j]);
  return CoefficientMatrix::from_dense(e, n, true);
}

SignVector block_signs(std::size_t p) {
  std::vector<Sign> s(2 * p, Sign{-1});
  std::fill_n(s.begin(), p, Sign{1});
  return SignVector(std::move(s));
}

double u_statistic(const TwoSampleDataset& data, const Kernel& g) {
  const CoefficientMatrix a = kernel_matrix(data, g);
  const std::size_t n = a.size();
  const std::size_t p = n / 2;
  // Same-sample pairs enter with +, cross-sample pairs with -. Rows are
  // accumulated in the same order as eval_chaos, so the identity
  // U = chaos at the block sign vector holds bit for bit.
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      acc += (i < p) == (j < p) ? a(i, j) : -a(i, j);
    }
    total += acc;
  }
  return total;
}

PermTestResult perm_test(const TwoSampleDataset& data, const Kernel& g, std::uint64_t reps,
                         const RngSpec& rng, const std::vector<double>& levels,
                         const std::optional<BoundConstants>& constants, std::size_t workers) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  for (double a : levels)
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("levels must lie in (0, 1)");

  const CoefficientMatrix a = kernel_matrix(data, g);
  PermTestResult r;
  r.u_obs = eval_chaos(a, block_signs(data.sample1.size()));
  r.reps = reps;
  r.seed = rng.seed;
  r.stream = rng.stream;

  const auto z = mc_sample(a, Scheme::without_replacement, reps, rng, workers);
  r.exceed_count = static_cast<std::uint64_t>(
      std::count_if(z.begin(), z.end(), [&](double v) { return v >= r.u_obs; }));
  r.p_value = static_cast<double>(1 + r.exceed_count) / static_cast<double>(reps + 1);
  for (double alpha : levels) r.mc_quantiles[alpha] = empirical_quantile(z, 1.0 - alpha);

  if (constants && !levels.empty()) {
    const double alpha = *std::min_element(levels.begin(), levels.end());
    const double x = std::log(constants->C / alpha);
    if (x > 0.0) {
      r.bound_x = x;
      r.bound_critical = theorem1_bound(a.size(), max_abs(a), x, *constants).threshold;
    }
  }
  return r;
}

DatasetFormat parse_dataset_format(std::string_view s) {
  if (s == "csv-long") return DatasetFormat::csv_long;
  if (s == "csv-two-col") return DatasetFormat::csv_two_col;
  throw std::invalid_argument("unknown dataset format '" + std::string(s) + "'");
}

TwoSampleDataset read_dataset(std::istream& in, DatasetFormat format) {
  TwoSampleDataset d;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    std::vector<double> nums(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const bool blank = format == DatasetFormat::csv_two_col && fields[k].empty();
      numeric = numeric && (blank || parse_double(fields[k], nums[k]));
    }
    const bool header = first && !numeric;
    first = false;
    if (header) continue;
    const std::string where = "dataset line " + std::to_string(line_no);

    if (format == DatasetFormat::csv_long) {
      if (fields.size() < 2) throw std::invalid_argument(where + ": expected sample_id,value[,...]");
      if (fields[0] != "1" && fields[0] != "2")
        throw std::invalid_argument(where + ": unknown sample label '" + fields[0] + "'");
      if (!numeric) throw std::invalid_argument(where + ": cannot parse values");
      Observation obs(nums.begin() + 1, nums.end());
      (fields[0] == "1" ? d.sample1 : d.sample2).push_back(std::move(obs));
    } else {
      if (fields.size() != 2) throw std::invalid_argument(where + ": expected two columns");
      if (!numeric) throw std::invalid_argument(where + ": cannot parse values");
      // A blank cell lets one column run longer; validate() then reports it.
      if (!fields[0].empty()) d.sample1.push_back({nums[0]});
      if (!fields[1].empty()) d.sample2.push_back({nums[1]});
    }
  }
  d.validate();
  return d;
}

TwoSampleDataset load_dataset(const std::string& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path);
  return read_dataset(in, format);
}

}  // namespace chaos
