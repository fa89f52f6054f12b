// chaos-swr: command-line front end for the chaos / sampling-without-
// replacement toolkit. Every subcommand computes its whole result before
// writing anything, and --out files are written atomically.

#include "chaos_swr/bounds.hpp"
#include "chaos_swr/chaos.hpp"
#include "chaos_swr/coeff.hpp"
#include "chaos_swr/ensembles.hpp"
#include "chaos_swr/format.hpp"
#include "chaos_swr/montecarlo.hpp"
#include "chaos_swr/oracle.hpp"
#include "chaos_swr/samplers.hpp"
#include "chaos_swr/serialize.hpp"
#include "chaos_swr/two_sample.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace {

using chaos::Json;

struct OutputOptions {
  std::string format = "json";
  std::string out;
};

struct MatrixSource {
  std::string matrix;
  std::string ensemble;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  double scale = 1.0;
};

struct ConstantOptions {
  double kappa = chaos::BoundConstants{}.kappa;
  double c = chaos::BoundConstants{}.c;
  double C = chaos::BoundConstants{}.C;
  chaos::BoundConstants get() const {
    chaos::BoundConstants k{kappa, c, C};
    k.validate();
    return k;
  }
};

void add_output(CLI::App* cmd, OutputOptions& o) {
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output file (default: stdout)");
}

void add_matrix_source(CLI::App* cmd, MatrixSource& m) {
  cmd->add_option("--matrix", m.matrix, "Coefficient matrix CSV (n rows of n values)");
  cmd->add_option("--ensemble", m.ensemble, "Named generator instead of --matrix")
      ->check(CLI::IsMember(chaos::ensemble_names()));
  cmd->add_option("--n", m.n, "Matrix size for --ensemble (even)");
  cmd->add_option("--seed", m.seed, "Seed")->capture_default_str();
  cmd->add_option("--M", m.scale, "Ensemble scale M")->capture_default_str();
}

void add_constants(CLI::App* cmd, ConstantOptions& k) {
  cmd->add_option("--kappa", k.kappa, "Rademacher chaos constant (non-normative default)")
      ->capture_default_str();
  cmd->add_option("--c", k.c, "Simplified-bound threshold constant (non-normative default)")
      ->capture_default_str();
  cmd->add_option("--C", k.C, "Simplified-bound probability constant (non-normative default)")
      ->capture_default_str();
}

chaos::CoefficientMatrix load_matrix(const MatrixSource& m) {
  if (!m.matrix.empty() && !m.ensemble.empty())
    throw std::invalid_argument("use either --matrix or --ensemble, not both");
  if (!m.matrix.empty()) return chaos::load_matrix_csv(m.matrix);
  if (!m.ensemble.empty()) {
    if (m.n == 0) throw std::invalid_argument("--ensemble needs --n");
    return chaos::generate_matrix(m.ensemble, m.n, m.seed, m.scale);
  }
  throw std::invalid_argument("a matrix source is required (--matrix or --ensemble)");
}

void write_atomic(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp);
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

/// `table` is what CSV projects; JSON always gets the whole document.
void emit(const OutputOptions& o, const Json& document, const Json& table) {
  std::ostringstream os;
  if (o.format == "csv")
    chaos::write_csv(os, table);
  else
    os << document.dump(2) << '\n';
  write_atomic(o.out, os.str());
}

Json matrix_summary(const chaos::CoefficientMatrix& a) {
  return Json{{"n", a.size()}, {"sigma", chaos::sigma(a)}, {"max_abs", chaos::max_abs(a)}};
}

chaos::DeltaPolicy make_policy(const std::string& name, std::optional<std::size_t> delta,
                               std::optional<double> target) {
  chaos::DeltaPolicy p = chaos::parse_delta_policy(name);
  if (p.kind == chaos::DeltaPolicyKind::fixed) {
    if (!delta) throw std::invalid_argument("--delta-policy fixed needs --delta");
    p.fixed_delta = *delta;
  } else if (delta) {
    throw std::invalid_argument("--delta is only meaningful with --delta-policy fixed");
  }
  p.target_prob = target;
  return p;
}

void require_xs(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("at least one --x is required");
  for (double x : xs)
    if (!(x > 0.0)) throw std::invalid_argument("every --x must be positive");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaos-swr: order-2 chaos under sampling without replacement"};
  app.require_subcommand(1);
  app.footer("Environment: CHAOS_SWR_THREADS caps the worker count (results do not depend on it).");

  // gen-matrix
  MatrixSource gen_src;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-matrix", "Write a seeded ensemble matrix as CSV");
  gen->add_option("--ensemble", gen_src.ensemble, "Ensemble name")
      ->required()
      ->check(CLI::IsMember(chaos::ensemble_names()));
  gen->add_option("--n", gen_src.n, "Matrix size (even)")->required();
  gen->add_option("--seed", gen_src.seed, "Seed")->capture_default_str();
  gen->add_option("--M", gen_src.scale, "Scale M")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file (default: stdout)");

  // bound
  MatrixSource bound_src;
  OutputOptions bound_out;
  ConstantOptions bound_k;
  std::vector<double> bound_xs;
  std::string bound_policy = "default";
  std::optional<std::size_t> bound_delta;
  std::optional<double> bound_target;
  auto* bound = app.add_subcommand("bound", "Evaluate the tail bounds and their term breakdown");
  add_matrix_source(bound, bound_src);
  bound->add_option("--x", bound_xs, "Deviation parameter x (repeatable)")->required();
  bound->add_option("--delta-policy", bound_policy, "Choice of delta")
      ->check(CLI::IsMember({"default", "optimized", "fixed"}))
      ->capture_default_str();
  bound->add_option("--delta", bound_delta, "Delta for --delta-policy fixed");
  bound->add_option("--target-prob", bound_target,
                    "Probability target for --delta-policy optimized (default: the default-delta probability)");
  add_constants(bound, bound_k);
  add_output(bound, bound_out);

  // compare
  MatrixSource cmp_src;
  OutputOptions cmp_out;
  ConstantOptions cmp_k;
  std::vector<double> cmp_xs;
  std::string cmp_policy = "default";
  std::optional<std::size_t> cmp_delta;
  std::optional<double> cmp_target;
  std::string cmp_scheme = "swr";
  std::string cmp_engine = "enumeration";
  std::uint64_t cmp_reps = 100000;
  std::uint64_t cmp_seed = 1;
  double cmp_conf = 0.99;
  std::vector<std::string> cmp_modes;
  auto* cmp = app.add_subcommand("compare", "Compare bounds with exact or Monte Carlo tails");
  cmp->add_option("--matrix", cmp_src.matrix, "Coefficient matrix CSV");
  cmp->add_option("--ensemble", cmp_src.ensemble, "Named generator instead of --matrix")
      ->check(CLI::IsMember(chaos::ensemble_names()));
  cmp->add_option("--n", cmp_src.n, "Matrix size for --ensemble");
  cmp->add_option("--M", cmp_src.scale, "Ensemble scale M")->capture_default_str();
  cmp->add_option("--matrix-seed", cmp_src.seed, "Seed for --ensemble")->capture_default_str();
  cmp->add_option("--x", cmp_xs, "Deviation parameter x (repeatable)")->required();
  cmp->add_option("--delta-policy", cmp_policy, "Choice of delta")
      ->check(CLI::IsMember({"default", "optimized", "fixed"}))
      ->capture_default_str();
  cmp->add_option("--delta", cmp_delta, "Delta for --delta-policy fixed");
  cmp->add_option("--target-prob", cmp_target, "Probability target for --delta-policy optimized");
  add_constants(cmp, cmp_k);
  cmp->add_option("--scheme", cmp_scheme, "Sign law")
      ->check(CLI::IsMember({"swr", "iid", "coupled"}))
      ->capture_default_str();
  cmp->add_option("--engine", cmp_engine, "Tail computation")
      ->check(CLI::IsMember({"enumeration", "monte-carlo"}))
      ->capture_default_str();
  cmp->add_option("--reps", cmp_reps, "Monte Carlo replicates")->capture_default_str();
  cmp->add_option("--seed", cmp_seed, "Monte Carlo seed")->capture_default_str();
  cmp->add_option("--conf", cmp_conf, "Clopper-Pearson confidence")->capture_default_str();
  cmp->add_option("--mode", cmp_modes, "Tail mode (repeatable; default both)")
      ->check(CLI::IsMember({"one-sided", "absolute"}));
  add_output(cmp, cmp_out);

  // diagnose-coupling
  std::size_t diag_n = 4;
  OutputOptions diag_out;
  auto* diag = app.add_subcommand("diagnose-coupling", "Exact diagnostics of the stopping-time coupling");
  diag->add_option("--n", diag_n, "Even n within the path-enumeration cap")->required();
  add_output(diag, diag_out);

  // two-sample
  std::string ts_data;
  std::string ts_data_format = "csv-long";
  std::string ts_kernel = "product";
  double ts_bandwidth = 1.0;
  std::string ts_kernel_matrix;
  std::uint64_t ts_reps = 9999;
  std::uint64_t ts_seed = 1;
  std::vector<double> ts_levels;
  std::string ts_constants_from;
  std::optional<double> ts_kappa;
  std::optional<double> ts_c;
  std::optional<double> ts_C;
  OutputOptions ts_out;
  auto* ts = app.add_subcommand("two-sample", "Permutation test of the two-sample U-statistic");
  ts->add_option("--data", ts_data, "Dataset CSV")->required();
  ts->add_option("--data-format", ts_data_format, "Dataset layout")
      ->check(CLI::IsMember({"csv-long", "csv-two-col"}))
      ->capture_default_str();
  ts->add_option("--kernel", ts_kernel, "Kernel g")
      ->check(CLI::IsMember({"product", "gaussian", "tabulated"}))
      ->capture_default_str();
  ts->add_option("--bandwidth", ts_bandwidth, "Gaussian kernel bandwidth")->capture_default_str();
  ts->add_option("--kernel-matrix", ts_kernel_matrix, "Matrix CSV for --kernel tabulated");
  ts->add_option("--reps", ts_reps, "Permutation replicates")->capture_default_str();
  ts->add_option("--seed", ts_seed, "Seed")->capture_default_str();
  ts->add_option("--levels", ts_levels, "Levels alpha, comma separated")->delimiter(',');
  ts->add_option("--constants-from", ts_constants_from, "JSON with kappa/c/C (e.g. calibrate output)");
  ts->add_option("--kappa", ts_kappa, "Override kappa");
  ts->add_option("--c", ts_c, "Override c");
  ts->add_option("--C", ts_C, "Override C");
  add_output(ts, ts_out);

  // calibrate
  std::string cal_target = "both";
  std::vector<std::string> cal_matrices;
  std::vector<std::string> cal_ensembles;
  std::vector<std::size_t> cal_ns;
  std::size_t cal_count = 1;
  std::uint64_t cal_seed = 1;
  double cal_scale = 1.0;
  std::vector<double> cal_xs;
  double cal_C = chaos::BoundConstants{}.C;
  std::string cal_mode = "one-sided";
  double cal_tol = 1e-9;
  OutputOptions cal_out;
  auto* cal = app.add_subcommand("calibrate", "Calibrate kappa and/or c by exact enumeration");
  cal->add_option("--target", cal_target, "Constant(s) to calibrate")
      ->check(CLI::IsMember({"kappa", "c", "both"}))
      ->capture_default_str();
  cal->add_option("--matrix", cal_matrices, "Instance matrix CSV (repeatable)");
  cal->add_option("--ensemble", cal_ensembles, "Instance ensemble (repeatable)")
      ->check(CLI::IsMember(chaos::ensemble_names()));
  cal->add_option("--n", cal_ns, "Sizes for ensemble instances (repeatable)");
  cal->add_option("--count", cal_count, "Instances per (ensemble, n)")->capture_default_str();
  cal->add_option("--seed", cal_seed, "Base seed for ensemble instances")->capture_default_str();
  cal->add_option("--M", cal_scale, "Ensemble scale M")->capture_default_str();
  cal->add_option("--x", cal_xs, "x grid for c (repeatable)");
  cal->add_option("--C", cal_C, "Fixed probability constant C for c")->capture_default_str();
  cal->add_option("--mode", cal_mode, "Tail used for c")
      ->check(CLI::IsMember({"one-sided", "absolute"}))
      ->capture_default_str();
  cal->add_option("--tolerance", cal_tol, "Bisection tolerance for kappa")->capture_default_str();
  add_output(cal, cal_out);

  // sample
  std::size_t smp_n = 4;
  std::string smp_scheme = "swr";
  std::uint64_t smp_reps = 10;
  std::uint64_t smp_seed = 1;
  std::string smp_matrix;
  OutputOptions smp_out;
  auto* smp = app.add_subcommand("sample", "Draw sign vectors");
  smp->add_option("--n", smp_n, "Vector length")->required();
  smp->add_option("--scheme", smp_scheme, "Sign law")
      ->check(CLI::IsMember({"swr", "iid", "coupled"}))
      ->capture_default_str();
  smp->add_option("--reps", smp_reps, "Number of draws")->capture_default_str();
  smp->add_option("--seed", smp_seed, "Seed")->capture_default_str();
  smp->add_option("--matrix", smp_matrix, "Also evaluate the chaos on this matrix");
  add_output(smp, smp_out);

  // enumerate
  std::size_t en_n = 0;
  std::string en_matrix;
  std::string en_scheme = "swr";
  OutputOptions en_out;
  auto* en = app.add_subcommand("enumerate", "Exact law of the signs, or of the chaos with --matrix");
  en->add_option("--n", en_n, "Vector length (without --matrix)");
  en->add_option("--matrix", en_matrix, "Coefficient matrix CSV");
  en->add_option("--scheme", en_scheme, "Sign law")
      ->check(CLI::IsMember({"swr", "iid", "coupled"}))
      ->capture_default_str();
  add_output(en, en_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto a = chaos::generate_matrix(gen_src.ensemble, gen_src.n, gen_src.seed, gen_src.scale);
      std::ostringstream os;
      chaos::write_matrix_csv(os, a);
      write_atomic(gen_out, os.str());
    } else if (bound->parsed()) {
      require_xs(bound_xs);
      const auto k = bound_k.get();
      const auto a = load_matrix(bound_src);
      const auto policy = make_policy(bound_policy, bound_delta, bound_target);
      Json reports = Json::array();
      for (double x : bound_xs) {
        const std::size_t d = chaos::choose_delta(a, x, k.kappa, policy);
        Json r = chaos::to_json(chaos::term_breakdown(a, x, d, k.kappa));
        const auto thm = chaos::theorem1_bound(a.size(), chaos::max_abs(a), x, k);
        r["theorem1"] = Json{{"threshold", thm.threshold},
                             {"probability", thm.probability},
                             {"raw_probability", thm.raw_probability}};
        reports.push_back(std::move(r));
      }
      Json doc{{"command", "bound"},
               {"matrix", matrix_summary(a)},
               {"delta_policy", bound_policy},
               {"constants", chaos::to_json(k)},
               {"reports", reports}};
      emit(bound_out, doc, reports);
    } else if (cmp->parsed()) {
      require_xs(cmp_xs);
      const auto k = cmp_k.get();
      const auto a = load_matrix(cmp_src);
      const auto policy = make_policy(cmp_policy, cmp_delta, cmp_target);
      chaos::Engine engine;
      engine.kind = cmp_engine == "enumeration" ? chaos::Engine::Kind::enumeration
                                                : chaos::Engine::Kind::monte_carlo;
      engine.reps = cmp_reps;
      engine.rng = chaos::RngSpec{cmp_seed, "compare"};
      engine.conf = cmp_conf;
      if (!(cmp_conf > 0.0 && cmp_conf < 1.0)) throw std::invalid_argument("--conf must lie in (0, 1)");
      if (cmp_reps < 1) throw std::invalid_argument("--reps must be >= 1");
      std::vector<chaos::TailMode> modes;
      for (const auto& m : cmp_modes) modes.push_back(chaos::parse_tail_mode(m));
      if (modes.empty()) modes = {chaos::TailMode::one_sided, chaos::TailMode::absolute};
      const auto rows = chaos::compare_bounds(a, cmp_xs, policy, k, chaos::parse_scheme(cmp_scheme),
                                              engine, modes);
      Json jrows = Json::array();
      for (const auto& r : rows) jrows.push_back(chaos::to_json(r));
      Json doc{{"command", "compare"},
               {"matrix", matrix_summary(a)},
               {"scheme", cmp_scheme},
               {"engine", cmp_engine},
               {"delta_policy", cmp_policy},
               {"constants", chaos::to_json(k)},
               {"rows", jrows}};
      emit(cmp_out, doc, jrows);
    } else if (diag->parsed()) {
      const auto coupled = chaos::coupled_law(diag_n);
      const auto balanced = chaos::enumerate_balanced(diag_n);
      const auto t_law = chaos::exact_T_law(diag_n);
      bool all_balanced = true;
      for (const auto& [s, p] : coupled.support) {
        long sum = 0;
        for (auto v : s) sum += v;
        all_balanced = all_balanced && sum == 0;
      }
      Json rows = Json::array();
      for (std::size_t d = 0; d <= diag_n; ++d) {
        double exact = 0.0;
        for (const auto& [t, p] : t_law.support)
          if (t <= static_cast<long>(diag_n - d)) exact += p;
        const double bound = chaos::hoeffding_T_bound(diag_n, d);
        rows.push_back(Json{{"delta", d},
                            {"cutoff", diag_n - d},
                            {"exact_prob_T_le_cutoff", exact},
                            {"hoeffding_bound", bound},
                            {"holds", exact <= bound}});
      }
      Json doc{{"command", "diagnose-coupling"},
               {"n", diag_n},
               {"tv_distance", chaos::tv_distance(coupled, balanced)},
               {"all_coupled_balanced", all_balanced},
               {"coupled_law", chaos::to_json(coupled)},
               {"balanced_law", chaos::to_json(balanced)},
               {"T_law", chaos::to_json(t_law)},
               {"hoeffding_rows", rows}};
      emit(diag_out, doc, rows);
    } else if (ts->parsed()) {
      const auto data = chaos::load_dataset(ts_data, chaos::parse_dataset_format(ts_data_format));
      chaos::Kernel g;
      if (ts_kernel == "gaussian") {
        g = chaos::Kernel::gaussian(ts_bandwidth);
      } else if (ts_kernel == "tabulated") {
        if (ts_kernel_matrix.empty()) throw std::invalid_argument("--kernel tabulated needs --kernel-matrix");
        g = chaos::Kernel::tabulated(chaos::load_matrix_csv(ts_kernel_matrix));
      }
      std::optional<chaos::BoundConstants> k;
      if (!ts_constants_from.empty()) {
        std::ifstream f(ts_constants_from);
        if (!f) throw std::runtime_error("cannot open " + ts_constants_from);
        k = chaos::constants_from_json(Json::parse(f));
      }
      if (ts_kappa || ts_c || ts_C) {
        if (!k) k = chaos::BoundConstants{};
        if (ts_kappa) k->kappa = *ts_kappa;
        if (ts_c) k->c = *ts_c;
        if (ts_C) k->C = *ts_C;
      }
      if (k) k->validate();
      const auto result = chaos::perm_test(data, g, ts_reps, chaos::RngSpec{ts_seed, "two-sample"},
                                           ts_levels, k);
      Json doc = chaos::to_json(result);
      doc["kernel"] = ts_kernel;
      doc["p"] = data.sample1.size();
      emit(ts_out, doc, doc);
    } else if (cal->parsed()) {
      std::vector<chaos::CoefficientMatrix> instances;
      for (const auto& path : cal_matrices) instances.push_back(chaos::load_matrix_csv(path));
      if (!cal_ensembles.empty() && cal_ns.empty()) throw std::invalid_argument("--ensemble needs --n");
      std::uint64_t s = cal_seed;
      for (const auto& e : cal_ensembles)
        for (std::size_t n : cal_ns)
          for (std::size_t i = 0; i < cal_count; ++i)
            instances.push_back(chaos::generate_matrix(e, n, s++, cal_scale));
      if (instances.empty()) throw std::invalid_argument("calibration needs at least one instance");
      const bool want_kappa = cal_target != "c";
      const bool want_c = cal_target != "kappa";
      if (want_c) require_xs(cal_xs);

      chaos::BoundConstants k;
      k.C = cal_C;
      Json reports = Json::array();
      if (want_kappa) {
        const auto r = chaos::calibrate_kappa(instances, cal_tol);
        k.kappa = r.value;
        reports.push_back(chaos::to_json(r));
      }
      if (want_c) {
        const auto r = chaos::calibrate_c(instances, cal_C, cal_xs, chaos::parse_tail_mode(cal_mode));
        k.c = r.value;
        reports.push_back(chaos::to_json(r));
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      }
      Json doc{{"command", "calibrate"}, {"constants", chaos::to_json(k)}, {"reports", reports}};
      emit(cal_out, doc, reports);
    } else if (smp->parsed()) {
      const auto scheme = chaos::parse_scheme(smp_scheme);
      std::optional<chaos::CoefficientMatrix> a;
      if (!smp_matrix.empty()) {
        a = chaos::load_matrix_csv(smp_matrix);
        if (a->size() != smp_n) throw std::invalid_argument("--matrix size does not match --n");
      }
      const chaos::RngSpec rng{smp_seed, "sample"};
      Json rows = Json::array();
      for (std::uint64_t r = 0; r < smp_reps; ++r) {
        Json row{{"replicate", r}};
        std::vector<chaos::Sign> signs;
        if (scheme == chaos::Scheme::without_replacement) {
          const auto v = chaos::draw_without_replacement(smp_n, rng, r);
          signs.assign(v.signs().begin(), v.signs().end());
        } else if (scheme == chaos::Scheme::iid) {
          signs = chaos::draw_iid(smp_n, rng, r).signs;
        } else {
          const auto d = chaos::draw_coupled(smp_n, rng, r);
          row["path"] = chaos::sign_string(d.path.signs);
          row["stopping_time"] = d.stopping_time;
          signs.assign(d.coupled.signs().begin(), d.coupled.signs().end());
        }
        row["signs"] = chaos::sign_string(signs);
        if (a) row["value"] = chaos::eval_chaos(*a, signs);
        rows.push_back(std::move(row));
      }
      Json doc{{"command", "sample"}, {"n", smp_n}, {"scheme", smp_scheme}, {"seed", smp_seed},
               {"draws", rows}};
      emit(smp_out, doc, rows);
    } else if (en->parsed()) {
      const auto scheme = chaos::parse_scheme(en_scheme);
      Json law;
      std::size_t n = en_n;
      if (!en_matrix.empty()) {
        const auto a = chaos::load_matrix_csv(en_matrix);
        n = a.size();
        law = chaos::to_json(chaos::exact_chaos_law(a, scheme));
      } else {
        if (n == 0) throw std::invalid_argument("enumerate needs --n or --matrix");
        if (scheme == chaos::Scheme::without_replacement)
          law = chaos::to_json(chaos::enumerate_balanced(n));
        else if (scheme == chaos::Scheme::coupled)
          law = chaos::to_json(chaos::coupled_law(n));
        else
          throw std::invalid_argument("sign-vector enumeration supports --scheme swr or coupled");
      }
      Json doc{{"command", "enumerate"}, {"n", n}, {"scheme", en_scheme}, {"law", law}};
      emit(en_out, doc, law);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
