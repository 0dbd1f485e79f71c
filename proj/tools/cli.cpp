// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <cstdlib>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otgof/calibration.hpp"
#include "otgof/csv.hpp"
#include "otgof/distributions.hpp"
#include "otgof/error.hpp"
#include "otgof/hypotests.hpp"
#include "otgof/kernels.hpp"
#include "otgof/lowdisc.hpp"
#include "otgof/parallel.hpp"
#include "reproduce.hpp"

namespace otgof::cli {
namespace {

std::string default_table_path() {
  const char* dir = std::getenv("OTGOF_TABLE_DIR");
  const std::string base = dir != nullptr && *dir != '\0' ? dir : ".";
  return base + "/critical_values.csv";
}

struct KernelOptions {
  std::string family = "stable";
  double scale = 2.0;
  double exponent = 2.0;

  void add(CLI::App& app) {
    app.add_option("--kernel", family, "Weight family: stable or laplace")->capture_default_str();
    app.add_option("--a", scale, "Kernel scale a")->capture_default_str();
    app.add_option("--gamma", exponent, "Kernel exponent gamma")->capture_default_str();
  }
  Kernel kernel() const {
    Kernel k{parse_kernel_family(family), scale, exponent};
    k.validate();
    return k;
  }
};

struct SimpleOptions {
  std::string data;
  bool header = false;
  std::string null = "normal";
  std::vector<double> mean;
  std::vector<double> cov;
  double df = 3.0;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t m = 200;
  std::string grid = "spherical";
  KernelOptions kernel;
  double alpha = 0.05;
  std::string table = default_table_path();
  bool on_the_fly = false;
  std::size_t reps = 2000;
  std::string report;
};

struct CompositeOptions {
  std::string data;
  bool header = false;
  std::string family = "normal";
  double df = 3.0;
  std::string reference = "random";
  std::size_t m = 200;
  std::string grid = "spherical";
  KernelOptions kernel;
  double alpha = 0.05;
  std::size_t bootstrap = 1000;
  std::string report;
};

struct CalibrateOptions {
  std::string grid = "spherical";
  int dimension = 2;
  std::size_t n = 0;
  std::size_t m = 0;
  KernelOptions kernel;
  std::vector<double> alphas = {0.05};
  std::size_t reps = 10000;
  std::string table = default_table_path();
  bool force = false;
};

struct AsymptoticOptions {
  std::string grid = "spherical";
  int dimension = 2;
  KernelOptions kernel;
  double alpha = 0.05;
  AsymptoticConfig config;
  std::string table = default_table_path();
  bool force = false;
};

struct GridDumpOptions {
  std::string grid = "spherical";
  int dimension = 2;
  std::size_t size = 0;
  std::string output;
};

struct ReproduceOptions {
  std::string table;
  std::string budget = "desk";
  std::string output;
};

// Builds a square matrix from a row-major list, or the identity when empty.
Matrix square_from_list(const std::vector<double>& values, int p, const char* what) {
  if (values.empty()) return Matrix::Identity(p, p);
  if (values.size() != static_cast<std::size_t>(p) * static_cast<std::size_t>(p)) {
    throw ConfigError(std::string(what) + " needs " + std::to_string(p * p) +
                      " values for dimension " + std::to_string(p));
  }
  Matrix out(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) out(i, j) = values[static_cast<std::size_t>(i * p + j)];
  }
  return out;
}

Vector vector_from_list(const std::vector<double>& values, int p) {
  if (values.empty()) return Vector::Zero(p);
  if (values.size() != static_cast<std::size_t>(p)) {
    throw ConfigError("--mean needs " + std::to_string(p) + " values");
  }
  return Eigen::Map<const Vector>(values.data(), p);
}

std::string list_text(const std::vector<double>& values) {
  std::string out;
  for (const double v : values) out += (out.empty() ? "" : ";") + format_double(v);
  return out;
}

// Null distribution from flags, with its description for the report.
std::pair<Sampler, std::string> null_from_options(const SimpleOptions& o, int p) {
  if (o.null == "normal") {
    MvNormalParams params{vector_from_list(o.mean, p), square_from_list(o.cov, p, "--cov")};
    params.validate();
    const std::string mean = o.mean.empty() ? "0" : list_text(o.mean);
    const std::string cov = o.cov.empty() ? "I" : list_text(o.cov);
    return {mvnormal_sampler(params), "normal(mean=" + mean + ";cov=" + cov + ")"};
  }
  if (o.null == "t") {
    MvTParams params{vector_from_list(o.mean, p), square_from_list(o.cov, p, "--cov"), o.df};
    params.validate();
    const std::string mean = o.mean.empty() ? "0" : list_text(o.mean);
    const std::string cov = o.cov.empty() ? "I" : list_text(o.cov);
    return {mvt_sampler(params),
            "t(location=" + mean + ";scatter=" + cov + ";df=" + format_double(o.df) + ")"};
  }
  if (o.null == "uniform") {
    if (!(o.lo < o.hi)) throw ConfigError("uniform null needs --lo < --hi");
    return {uniform_box_sampler(o.lo, o.hi, p),
            "uniform(" + format_double(o.lo) + ";" + format_double(o.hi) + ")"};
  }
  throw ConfigError("unknown null '" + o.null + "' (expected normal, t or uniform)");
}

int finish_report(TestReport& report, const std::string& report_path, std::ostream& out,
                  std::ostream& err) {
  const std::string record = report.to_record();
  out << record << '\n';
  err << report.to_text();
  if (!report_path.empty()) {
    std::ofstream file(report_path, std::ios::binary);
    if (!(file << record << '\n')) throw Error("cannot write report to " + report_path);
  }
  return report.reject ? kExitReject : kExitRetain;
}

int cmd_test_simple(const SimpleOptions& o, std::uint64_t seed, std::ostream& out,
                    std::ostream& err) {
  const Points data = read_points_csv_file(o.data, o.header);
  const int p = static_cast<int>(data.cols());
  auto [sampler, description] = null_from_options(o, p);
  SimpleTestSpec spec;
  spec.null_sampler = std::move(sampler);
  spec.null_description = description;
  spec.m = o.m;
  spec.grid_kind = parse_grid_kind(o.grid);
  spec.kernel = o.kernel.kernel();
  spec.alpha = o.alpha;
  if (o.on_the_fly) {
    spec.calibration = OnTheFlyCalibration{o.reps};
  } else {
    spec.calibration = TableLookup{CriticalTable::load(o.table)};
  }
  spec.validate();
  TestReport report;
  try {
    report = run_simple_test(data, spec, seed);
  } catch (const TableError& e) {
    throw TableError(std::string(e.what()) + " in " + o.table +
                     "; run 'otgof calibrate' or pass --calibrate-on-the-fly");
  }
  report.config.emplace_back("data", o.data);
  if (!o.on_the_fly) report.config.emplace_back("table", o.table);
  return finish_report(report, o.report, out, err);
}

int cmd_test_composite(const CompositeOptions& o, std::uint64_t seed, std::ostream& out,
                       std::ostream& err) {
  const Points data = read_points_csv_file(o.data, o.header);
  CompositeTestSpec spec;
  if (o.family == "normal") {
    spec.family = make_normal_family();
  } else if (o.family == "t") {
    spec.family = make_t_family(o.df);
  } else {
    throw ConfigError("unknown family '" + o.family + "' (expected normal or t)");
  }
  spec.m = o.m;
  spec.grid_kind = parse_grid_kind(o.grid);
  spec.kernel = o.kernel.kernel();
  spec.alpha = o.alpha;
  spec.bootstrap_reps = o.bootstrap;
  spec.reference_mode = parse_reference_mode(o.reference);
  spec.validate();
  TestReport report = run_composite_test(data, spec, seed);
  report.config.emplace_back("data", o.data);
  return finish_report(report, o.report, out, err);
}

void print_entry(std::ostream& out, const CriticalEntry& e, const std::string& table) {
  out << "method=" << to_string(e.key.method) << " dimension=" << e.key.dimension
      << " grid=" << to_string(e.key.grid_kind) << " grid_spec=" << e.key.grid_spec
      << " kernel=" << to_string(e.key.kernel.family)
      << " a=" << format_double(e.key.kernel.scale)
      << " gamma=" << format_double(e.key.kernel.exponent) << " n=" << e.key.n
      << " m=" << e.key.m << " alpha=" << format_double(e.key.alpha)
      << " value=" << format_double(e.value) << " replications=" << e.replications
      << " seed=" << e.seed << " table=" << table << '\n';
}

void store(const std::vector<CriticalEntry>& entries, const std::string& path, bool force,
           std::ostream& out) {
  CriticalTable table = CriticalTable::load(path);
  for (const auto& e : entries) table.insert(e, force);
  table.save(path);
  for (const auto& e : entries) print_entry(out, e, path);
}

int cmd_calibrate(const CalibrateOptions& o, std::uint64_t seed, std::ostream& out) {
  if (o.n == 0 || o.m == 0) throw ConfigError("calibrate needs --n and --m");
  const Kernel kernel = o.kernel.kernel();
  const Grid grid = make_grid(parse_grid_kind(o.grid), o.dimension, o.n + o.m);
  const auto entries = mc_critical_values(grid, o.n, o.m, kernel, o.alphas, o.reps, seed);
  store(entries, o.table, o.force, out);
  return kExitRetain;
}

int cmd_asymptotic(const AsymptoticOptions& o, std::uint64_t seed, std::ostream& out) {
  const Kernel kernel = o.kernel.kernel();
  const auto entry = asymptotic_critical_value(o.config, kernel, parse_grid_kind(o.grid),
                                               o.dimension, o.alpha, seed);
  store({entry}, o.table, o.force, out);
  return kExitRetain;
}

int cmd_grid_dump(const GridDumpOptions& o, std::ostream& out) {
  if (o.size == 0) throw ConfigError("grid-dump needs --size");
  const GridKind kind = parse_grid_kind(o.grid);
  const Grid grid = make_grid(kind, o.dimension, o.size);
  std::ostringstream text;
  text << "# otgof grid-dump grid=" << to_string(kind) << " dimension=" << o.dimension
       << " size=" << o.size << '\n';
  write_grid_csv(text, grid);
  if (o.output.empty()) {
    out << text.str();
  } else {
    std::ofstream file(o.output, std::ios::binary);
    if (!(file << text.str())) throw Error("cannot write grid to " + o.output);
  }
  return kExitRetain;
}

int cmd_reproduce(const ReproduceOptions& o, std::uint64_t seed, std::ostream& out,
                  std::ostream& err) {
  const Budget budget = parse_budget(o.budget);
  if (o.output.empty()) {
    reproduce_table(o.table, budget, seed, out, err);
    return kExitRetain;
  }
  std::ostringstream text;
  reproduce_table(o.table, budget, seed, text, err);
  std::ofstream file(o.output, std::ios::binary);
  if (!(file << text.str())) throw Error("cannot write table to " + o.output);
  return kExitRetain;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Goodness-of-fit tests based on optimal-transport ranks", "otgof"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "otgof 1.0.0");
  std::uint64_t seed = 1;
  int threads = 0;
  app.add_option("--seed", seed, "Master seed; equal seeds give identical results")
      ->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it")
      ->capture_default_str();

  SimpleOptions simple;
  auto* test_simple = app.add_subcommand("test-simple", "Test data against a fully specified distribution");
  test_simple->add_option("--data", simple.data, "CSV file, one observation per row")->required();
  test_simple->add_flag("--header", simple.header, "Skip the first line of the data file");
  test_simple->add_option("--null", simple.null, "Null distribution: normal, t or uniform")
      ->capture_default_str();
  test_simple->add_option("--mean", simple.mean, "Null mean/location (default 0)")->delimiter(',');
  test_simple->add_option("--cov", simple.cov, "Null covariance/scatter, row-major (default I)")
      ->delimiter(',');
  test_simple->add_option("--df", simple.df, "Degrees of freedom of the t null")->capture_default_str();
  test_simple->add_option("--lo", simple.lo, "Lower edge of the uniform null")->capture_default_str();
  test_simple->add_option("--hi", simple.hi, "Upper edge of the uniform null")->capture_default_str();
  test_simple->add_option("--m", simple.m, "Reference sample size")->capture_default_str();
  test_simple->add_option("--grid", simple.grid, "Rank grid: spherical or rectangular")
      ->capture_default_str();
  simple.kernel.add(*test_simple);
  test_simple->add_option("--alpha", simple.alpha, "Significance level")->capture_default_str();
  test_simple->add_option("--table", simple.table, "Critical-value table")->capture_default_str();
  test_simple->add_flag("--calibrate-on-the-fly", simple.on_the_fly,
                        "Simulate the critical value instead of reading the table");
  test_simple->add_option("--reps", simple.reps, "Replications for on-the-fly calibration")
      ->capture_default_str();
  test_simple->add_option("--report", simple.report, "Also write the report record here");

  CompositeOptions composite;
  auto* test_composite =
      app.add_subcommand("test-composite", "Test data against a parametric family");
  test_composite->add_option("--data", composite.data, "CSV file, one observation per row")
      ->required();
  test_composite->add_flag("--header", composite.header, "Skip the first line of the data file");
  test_composite->add_option("--family", composite.family, "Family: normal or t")
      ->capture_default_str();
  test_composite->add_option("--df", composite.df, "Degrees of freedom of the t family")
      ->capture_default_str();
  test_composite->add_option("--reference", composite.reference,
                             "Reference set: random or grid (normal family only)")
      ->capture_default_str();
  test_composite->add_option("--m", composite.m, "Reference set size")->capture_default_str();
  test_composite->add_option("--grid", composite.grid, "Rank grid: spherical or rectangular")
      ->capture_default_str();
  composite.kernel.add(*test_composite);
  test_composite->add_option("--alpha", composite.alpha, "Significance level")
      ->capture_default_str();
  test_composite->add_option("--B", composite.bootstrap, "Bootstrap replications")
      ->capture_default_str();
  test_composite->add_option("--report", composite.report, "Also write the report record here");

  CalibrateOptions calibrate;
  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "Monte-Carlo critical values into the table");
  calibrate_cmd->add_option("--grid", calibrate.grid, "Rank grid: spherical or rectangular")
      ->capture_default_str();
  calibrate_cmd->add_option("--p", calibrate.dimension, "Dimension")->capture_default_str();
  calibrate_cmd->add_option("--n", calibrate.n, "Data sample size")->required();
  calibrate_cmd->add_option("--m", calibrate.m, "Reference sample size")->required();
  calibrate.kernel.add(*calibrate_cmd);
  calibrate_cmd->add_option("--alpha", calibrate.alphas, "Levels (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  calibrate_cmd->add_option("--reps", calibrate.reps, "Monte-Carlo replications")
      ->capture_default_str();
  calibrate_cmd->add_option("--table", calibrate.table, "Critical-value table")
      ->capture_default_str();
  calibrate_cmd->add_flag("--force", calibrate.force, "Replace clashing entries");

  AsymptoticOptions asymptotic;
  auto* asymptotic_cmd =
      app.add_subcommand("asymptotic", "Asymptotic critical value into the table");
  asymptotic_cmd->add_option("--grid", asymptotic.grid, "Rank grid: spherical or rectangular")
      ->capture_default_str();
  asymptotic_cmd->add_option("--p", asymptotic.dimension, "Dimension")->capture_default_str();
  asymptotic.kernel.add(*asymptotic_cmd);
  asymptotic_cmd->add_option("--alpha", asymptotic.alpha, "Significance level")
      ->capture_default_str();
  asymptotic_cmd->add_option("--K", asymptotic.config.half_width, "Integration box half-width")
      ->capture_default_str();
  asymptotic_cmd->add_option("--M", asymptotic.config.reference_points,
                             "Grid points standing in for the reference measure")
      ->capture_default_str();
  asymptotic_cmd->add_option("--G", asymptotic.config.cells, "Integration cells")
      ->capture_default_str();
  asymptotic_cmd->add_option("--B", asymptotic.config.replications, "Simulated process paths")
      ->capture_default_str();
  asymptotic_cmd->add_option("--table", asymptotic.table, "Critical-value table")
      ->capture_default_str();
  asymptotic_cmd->add_flag("--force", asymptotic.force, "Replace clashing entries");

  GridDumpOptions dump;
  auto* dump_cmd = app.add_subcommand("grid-dump", "Write a rank grid as CSV");
  dump_cmd->add_option("--grid", dump.grid, "spherical or rectangular")->capture_default_str();
  dump_cmd->add_option("--p", dump.dimension, "Dimension")->capture_default_str();
  dump_cmd->add_option("--N,--size", dump.size, "Number of grid points")->required();
  dump_cmd->add_option("--output", dump.output, "Output file (default stdout)");

  ReproduceOptions reproduce;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Re-run a published simulation table");
  std::vector<std::string> tables;
  for (const auto t : reproducible_tables()) tables.emplace_back(t);
  reproduce_cmd->add_option("table", reproduce.table, "crit, level-power, composite or warp")
      ->required()
      ->check(CLI::IsMember(tables));
  reproduce_cmd->add_option("--budget", reproduce.budget, "desk or full")
      ->check(CLI::IsMember({"desk", "full"}))
      ->capture_default_str();
  reproduce_cmd->add_option("--output", reproduce.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitRetain : kExitError;
  }

  try {
    set_max_threads(threads);
    if (test_simple->parsed()) return cmd_test_simple(simple, seed, out, err);
    if (test_composite->parsed()) return cmd_test_composite(composite, seed, out, err);
    if (calibrate_cmd->parsed()) return cmd_calibrate(calibrate, seed, out);
    if (asymptotic_cmd->parsed()) return cmd_asymptotic(asymptotic, seed, out);
    if (dump_cmd->parsed()) return cmd_grid_dump(dump, out);
    if (reproduce_cmd->parsed()) return cmd_reproduce(reproduce, seed, out, err);
  } catch (const std::exception& e) {
    err << "otgof: error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace otgof::cli
