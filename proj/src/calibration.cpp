// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "otgof/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "otgof/csv.hpp"
#include "otgof/error.hpp"
#include "otgof/parallel.hpp"
#include "otgof/transport.hpp"

namespace otgof {
namespace {

constexpr const char* kTableMagic = "# otgof critical table v";
constexpr const char* kTableHeader =
    "method,dimension,grid_kind,grid_spec,kernel_family,kernel_scale,kernel_exponent,"
    "n,m,alpha,value,replications,seed";

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

void check_calibration(const Grid& grid, std::size_t n, std::size_t m, std::size_t reps) {
  if (n == 0 || m == 0) throw ConfigError("n and m must be positive");
  if (n + m != grid.size()) {
    throw ConfigError("grid size " + std::to_string(grid.size()) + " differs from n + m = " +
                      std::to_string(n + m));
  }
  if (reps < kMinCalibrationReps) {
    throw ConfigError("at least " + std::to_string(kMinCalibrationReps) +
                      " replications are required");
  }
}

// D from the three kernel sums.
double combine(double saa, double sbb, double sab, double n, double m) {
  return m / (n * (n + m)) * saa + n / (m * (n + m)) * sbb - 2.0 / (n + m) * sab;
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t out = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("invalid unsigned integer '" + std::string(text) + "'");
  }
  return out;
}

std::size_t integer_root(std::size_t value, int power) {
  std::size_t root = 1;
  auto fits = [&](std::size_t r) {
    std::size_t acc = 1;
    for (int k = 0; k < power; ++k) {
      if (acc > value / r) return false;
      acc *= r;
    }
    return true;
  };
  while (fits(root + 1)) ++root;
  return root;
}

}  // namespace

std::size_t quantile_rank(double level, std::size_t count) {
  if (count == 0) throw ConfigError("quantile of an empty sample");
  // The small offset keeps levels such as 0.95 * 2000 = 1900 from rounding up.
  const double raw = std::ceil(level * static_cast<double>(count) - 1e-9);
  if (raw < 1.0) return 1;
  if (raw > static_cast<double>(count)) return count;
  return static_cast<std::size_t>(raw);
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values)
    : sorted_(std::move(values)) {
  if (sorted_.empty()) throw ConfigError("empirical distribution needs at least one value");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::quantile(double level) const {
  return sorted_[quantile_rank(level, sorted_.size()) - 1];
}

double EmpiricalDistribution::critical_value(double alpha) const {
  return quantile(1.0 - alpha);
}

double EmpiricalDistribution::upper_tail(double x) const {
  const auto first = std::lower_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(sorted_.end() - first) / static_cast<double>(sorted_.size());
}

double split_mean_difference(std::span<const double> f, std::span<const std::size_t> perm,
                             std::size_t n) {
  const std::size_t total = perm.size();
  if (n == 0 || n >= total) throw ConfigError("split point must lie in [1, N)");
  double first = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < n; ++i) first += f[perm[i]];
  for (std::size_t i = n; i < total; ++i) second += f[perm[i]];
  return first / static_cast<double>(n) - second / static_cast<double>(total - n);
}

double split_mean_difference_from_total(std::span<const double> f,
                                        std::span<const std::size_t> perm, std::size_t n) {
  const std::size_t total = perm.size();
  if (n == 0 || n >= total) throw ConfigError("split point must lie in [1, N)");
  double first = 0.0;
  for (std::size_t i = 0; i < n; ++i) first += f[perm[i]];
  double all = 0.0;
  for (std::size_t i = 0; i < total; ++i) all += f[i];
  const double nn = static_cast<double>(n);
  const double big = static_cast<double>(total);
  return big / (nn * (big - nn)) * (first - nn / big * all);
}

SubsetStatistic::SubsetStatistic(const Grid& grid, const Kernel& kernel) : kernel_(kernel) {
  kernel.validate();
  const auto size = static_cast<Eigen::Index>(grid.size());
  if (size < 2) throw ConfigError("grid needs at least two points");
  gram_.resize(size, size);
  row_sums_.assign(grid.size(), 0.0);
  for (Eigen::Index i = 0; i < size; ++i) {
    gram_(i, i) = kernel.eval_squared_norm(0.0);
    for (Eigen::Index j = i + 1; j < size; ++j) {
      const double value =
          kernel.eval_squared_norm((grid.points.row(i) - grid.points.row(j)).squaredNorm());
      gram_(i, j) = value;
      gram_(j, i) = value;
    }
  }
  for (Eigen::Index i = 0; i < size; ++i) {
    row_sums_[static_cast<std::size_t>(i)] = gram_.col(i).sum();
  }
  for (const double r : row_sums_) total_ += r;
}

double SubsetStatistic::operator()(std::span<const std::size_t> subset) const {
  const std::size_t n = subset.size();
  const std::size_t size = row_sums_.size();
  if (n == 0 || n >= size) throw ConfigError("subset size must lie in [1, N)");
  double saa = 0.0;
  double rows = 0.0;
  for (const auto j : subset) {
    const double* column = gram_.data() + static_cast<std::ptrdiff_t>(j) * gram_.rows();
    for (const auto k : subset) saa += column[k];
    rows += row_sums_[j];
  }
  const double sab = rows - saa;
  const double sbb = total_ - 2.0 * rows + saa;
  return combine(saa, sbb, sab, static_cast<double>(n), static_cast<double>(size - n));
}

std::vector<std::size_t> random_subset(std::size_t population, std::size_t n, Engine& engine) {
  if (n > population) throw ConfigError("subset larger than population");
  std::vector<std::size_t> items(population);
  for (std::size_t i = 0; i < population; ++i) items[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t range = population - i;
    auto k = static_cast<std::size_t>(uniform01(engine) * static_cast<double>(range));
    k = std::min(k, range - 1);
    std::swap(items[i], items[i + k]);
  }
  items.resize(n);
  return items;
}

std::vector<double> mc_null_statistics(const Grid& grid, std::size_t n, const Kernel& kernel,
                                       std::size_t reps, std::uint64_t seed) {
  const SubsetStatistic statistic(grid, kernel);
  std::vector<double> out(reps);
  parallel_for(reps, [&](std::size_t r) {
    Engine engine = make_engine(seed, Stream::kNullSubset, r);
    const auto subset = random_subset(grid.size(), n, engine);
    out[r] = statistic(subset);
  });
  return out;
}

std::vector<double> pipeline_null_statistics(const Sampler& null_sampler, const Grid& grid,
                                             std::size_t n, std::size_t m,
                                             const Kernel& kernel, std::size_t reps,
                                             std::uint64_t seed) {
  if (n + m != grid.size()) throw ConfigError("grid size differs from n + m");
  std::vector<double> out(reps);
  parallel_for(reps, [&](std::size_t r) {
    Engine data_engine = make_engine(seed, Stream::kPipelineData, r);
    Engine reference_engine = make_engine(seed, Stream::kPipelineReference, r);
    const Points data = null_sampler(n, data_engine);
    const Points reference = null_sampler(m, reference_engine);
    const RankSplit split = ranks(PooledSample(data, reference), grid);
    out[r] = statistic_d(split.data_ranks, split.reference_ranks, kernel).value;
  });
  return out;
}

std::string_view to_string(CalibrationMethod method) {
  return method == CalibrationMethod::MonteCarlo ? "montecarlo" : "asymptotic";
}

CalibrationMethod parse_calibration_method(std::string_view text) {
  if (text == "montecarlo") return CalibrationMethod::MonteCarlo;
  if (text == "asymptotic") return CalibrationMethod::Asymptotic;
  throw ConfigError("unknown calibration method '" + std::string(text) + "'");
}

CriticalKey mc_key(const Grid& grid, std::size_t n, std::size_t m, const Kernel& kernel,
                   double alpha) {
  CriticalKey key;
  key.method = CalibrationMethod::MonteCarlo;
  key.dimension = grid.dimension();
  key.grid_kind = grid.kind;
  key.grid_spec = "N=" + std::to_string(grid.size());
  key.kernel = kernel;
  key.n = n;
  key.m = m;
  key.alpha = alpha;
  return key;
}

CriticalEntry mc_critical_value(const Grid& grid, std::size_t n, std::size_t m,
                                const Kernel& kernel, double alpha, std::size_t reps,
                                std::uint64_t seed) {
  const double alphas[] = {alpha};
  return mc_critical_values(grid, n, m, kernel, alphas, reps, seed).front();
}

std::vector<CriticalEntry> mc_critical_values(const Grid& grid, std::size_t n, std::size_t m,
                                              const Kernel& kernel,
                                              std::span<const double> alphas,
                                              std::size_t reps, std::uint64_t seed) {
  for (const double alpha : alphas) check_alpha(alpha);
  check_calibration(grid, n, m, reps);
  const EmpiricalDistribution law(mc_null_statistics(grid, n, kernel, reps, seed));
  std::vector<CriticalEntry> out;
  for (const double alpha : alphas) {
    out.push_back({mc_key(grid, n, m, kernel, alpha), law.critical_value(alpha), reps, seed});
  }
  return out;
}

CriticalEntry mc_critical_value_via_pipeline(const Sampler& null_sampler, const Grid& grid,
                                             std::size_t n, std::size_t m,
                                             const Kernel& kernel, double alpha,
                                             std::size_t reps, std::uint64_t seed) {
  check_alpha(alpha);
  check_calibration(grid, n, m, reps);
  const EmpiricalDistribution law(
      pipeline_null_statistics(null_sampler, grid, n, m, kernel, reps, seed));
  return {mc_key(grid, n, m, kernel, alpha), law.critical_value(alpha), reps, seed};
}

const CriticalEntry* CriticalTable::find(const CriticalKey& key) const {
  for (const auto& entry : entries_) {
    if (entry.key == key) return &entry;
  }
  return nullptr;
}

const CriticalEntry& CriticalTable::at(const CriticalKey& key) const {
  if (const auto* entry = find(key)) return *entry;
  std::ostringstream msg;
  msg << "no critical value for method=" << to_string(key.method) << " p=" << key.dimension
      << " grid=" << to_string(key.grid_kind) << " " << key.grid_spec
      << " kernel=" << to_string(key.kernel.family) << "(a=" << format_double(key.kernel.scale)
      << ", gamma=" << format_double(key.kernel.exponent) << ") n=" << key.n << " m=" << key.m
      << " alpha=" << format_double(key.alpha);
  throw TableError(msg.str());
}

void CriticalTable::insert(const CriticalEntry& entry, bool force) {
  if (!(entry.value > 0.0) || !std::isfinite(entry.value)) {
    throw TableError("critical values must be positive and finite");
  }
  for (auto& existing : entries_) {
    if (!(existing.key == entry.key)) continue;
    if (existing.value == entry.value) return;
    if (!force) {
      throw TableError("table already holds " + format_double(existing.value) +
                       " for this key (new value " + format_double(entry.value) +
                       "); pass --force to replace it");
    }
    existing = entry;
    return;
  }
  entries_.push_back(entry);
}

void CriticalTable::write(std::ostream& out) const {
  out << kTableMagic << kFormatVersion << '\n' << kTableHeader << '\n';
  for (const auto& e : entries_) {
    const auto& k = e.key;
    out << to_string(k.method) << ',' << k.dimension << ',' << to_string(k.grid_kind) << ','
        << k.grid_spec << ',' << to_string(k.kernel.family) << ','
        << format_double(k.kernel.scale) << ',' << format_double(k.kernel.exponent) << ','
        << k.n << ',' << k.m << ',' << format_double(k.alpha) << ','
        << format_double(e.value) << ',' << e.replications << ',' << e.seed << '\n';
  }
}

CriticalTable CriticalTable::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTableMagic + std::to_string(kFormatVersion)) {
    throw ParseError("line 1: expected '" + std::string(kTableMagic) +
                     std::to_string(kFormatVersion) + "'");
  }
  if (!std::getline(in, line) || line != kTableHeader) {
    throw ParseError("line 2: unexpected critical table header");
  }
  CriticalTable table;
  std::size_t line_number = 2;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto f = split_fields(line);
      if (f.size() != 13) throw ParseError("expected 13 fields, found " + std::to_string(f.size()));
      CriticalEntry e;
      e.key.method = parse_calibration_method(f[0]);
      e.key.dimension = static_cast<int>(parse_u64(f[1]));
      e.key.grid_kind = parse_grid_kind(f[2]);
      e.key.grid_spec = std::string(f[3]);
      e.key.kernel.family = parse_kernel_family(f[4]);
      e.key.kernel.scale = parse_double(f[5]);
      e.key.kernel.exponent = parse_double(f[6]);
      e.key.n = parse_u64(f[7]);
      e.key.m = parse_u64(f[8]);
      e.key.alpha = parse_double(f[9]);
      e.value = parse_double(f[10]);
      e.replications = parse_u64(f[11]);
      e.seed = parse_u64(f[12]);
      table.insert(e);
    } catch (const Error& err) {
      throw ParseError("line " + std::to_string(line_number) + ": " + err.what());
    }
  }
  return table;
}

CriticalTable CriticalTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    if (!std::filesystem::exists(path)) return {};
    throw Error("cannot open critical table '" + path + "'");
  }
  try {
    return read(in);
  } catch (const ParseError& err) {
    throw ParseError(path + ": " + err.what());
  }
}

void CriticalTable::save(const std::string& path) const {
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::trunc);
    if (!out) throw Error("cannot write '" + temp + "'");
    write(out);
    out.flush();
    if (!out) throw Error("failed writing '" + temp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::filesystem::remove(temp);
    throw Error("cannot move table into place at '" + path + "': " + ec.message());
  }
}

void AsymptoticConfig::validate() const {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("half-width K must be positive");
  }
  if (reference_points < 2) throw ConfigError("M must be at least 2");
  if (cells < 1) throw ConfigError("G must be positive");
  if (replications < 1) throw ConfigError("B must be positive");
}

std::string AsymptoticConfig::spec() const {
  return "K=" + format_double(half_width) + ";M=" + std::to_string(reference_points) +
         ";G=" + std::to_string(cells);
}

LimitingProcess::LimitingProcess(GridKind kind, int dimension, const AsymptoticConfig& config)
    : kind_(kind), dimension_(dimension), config_(config) {
  config.validate();
  if (dimension < 1) throw ConfigError("dimension must be positive");
  cells_per_axis_ = integer_root(config.cells, dimension);
  std::size_t count = 1;
  for (int k = 0; k < dimension; ++k) count *= cells_per_axis_;
  const double matrix_bytes = 3.0 * static_cast<double>(count) * static_cast<double>(count) * 8.0;
  if (matrix_bytes > static_cast<double>(config.memory_budget_bytes)) {
    throw ConfigError("G = " + std::to_string(count) +
                      " integration cells exceed the memory budget");
  }
  const double width = 2.0 * config.half_width / static_cast<double>(cells_per_axis_);
  cell_volume_ = std::pow(width, dimension);

  // Cell midpoints in lexicographic order, last coordinate fastest.
  nodes_.resize(static_cast<Eigen::Index>(count), dimension);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rest = i;
    for (int k = dimension - 1; k >= 0; --k) {
      const std::size_t digit = rest % cells_per_axis_;
      rest /= cells_per_axis_;
      nodes_(static_cast<Eigen::Index>(i), k) =
          -config.half_width + (static_cast<double>(digit) + 0.5) * width;
    }
  }
  reference_ = make_grid(kind, dimension, config.reference_points).points;

  const Matrix cov = covariance();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("covariance eigendecomposition failed");
  min_eigenvalue_ = eig.eigenvalues().minCoeff();
  max_eigenvalue_ = eig.eigenvalues().maxCoeff();
  if (min_eigenvalue_ < -1e-8 * std::max(max_eigenvalue_, 0.0)) {
    throw NumericalError("discretized covariance is not positive semidefinite (min eigenvalue " +
                         format_double(min_eigenvalue_) + "); increase M");
  }
  const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  root_ = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix LimitingProcess::covariance() const {
  // A(i, l) = cos(t_i . y_l) + sin(t_i . y_l), centered over l.
  const Matrix phase = nodes_ * reference_.transpose();
  Matrix a = phase.unaryExpr([](double x) { return std::cos(x) + std::sin(x); });
  a.colwise() -= a.rowwise().mean();
  Matrix cov = a * a.transpose() / static_cast<double>(reference_.rows());
  return 0.5 * (cov + cov.transpose());
}

std::vector<std::vector<double>> LimitingProcess::integrals(std::span<const Kernel> kernels,
                                                            std::size_t reps,
                                                            std::uint64_t seed) const {
  const auto g = static_cast<Eigen::Index>(cell_count());
  Matrix weights(g, static_cast<Eigen::Index>(kernels.size()));
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    for (Eigen::Index i = 0; i < g; ++i) {
      const double w = weight_density(kernels[k], nodes_.row(i).norm(), dimension_);
      if (!std::isfinite(w)) {
        throw NumericalError("weight density is unbounded at an integration node");
      }
      weights(i, static_cast<Eigen::Index>(k)) = w * cell_volume_;
    }
  }
  std::vector<std::vector<double>> out(kernels.size(), std::vector<double>(reps));
  // Fixed batch size keeps the floating-point evaluation order independent
  // of the thread count.
  constexpr std::size_t kBatch = 256;
  const std::size_t batches = (reps + kBatch - 1) / kBatch;
  parallel_for(batches, [&](std::size_t batch) {
    const std::size_t first = batch * kBatch;
    const std::size_t width = std::min(kBatch, reps - first);
    Matrix xi(g, static_cast<Eigen::Index>(width));
    for (std::size_t b = 0; b < width; ++b) {
      Engine engine = make_engine(seed, Stream::kProcess, first + b);
      for (Eigen::Index i = 0; i < g; ++i) {
        xi(i, static_cast<Eigen::Index>(b)) = standard_normal(engine);
      }
    }
    const Matrix z = root_ * xi;
    const Matrix integral = z.cwiseAbs2().transpose() * weights;
    for (std::size_t b = 0; b < width; ++b) {
      for (std::size_t k = 0; k < kernels.size(); ++k) {
        out[k][first + b] =
            integral(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k));
      }
    }
  });
  return out;
}

CriticalKey asymptotic_key(const AsymptoticConfig& config, const Kernel& kernel, GridKind kind,
                           int dimension, double alpha) {
  CriticalKey key;
  key.method = CalibrationMethod::Asymptotic;
  key.dimension = dimension;
  key.grid_kind = kind;
  key.grid_spec = config.spec();
  key.kernel = kernel;
  key.alpha = alpha;
  return key;
}

CriticalEntry asymptotic_critical_value(const AsymptoticConfig& config, const Kernel& kernel,
                                        GridKind kind, int dimension, double alpha,
                                        std::uint64_t seed) {
  check_alpha(alpha);
  kernel.validate();
  const LimitingProcess process(kind, dimension, config);
  const Kernel kernels[] = {kernel};
  const EmpiricalDistribution law(
      std::move(process.integrals(kernels, config.replications, seed).front()));
  return {asymptotic_key(config, kernel, kind, dimension, alpha), law.critical_value(alpha),
          config.replications, seed};
}

}  // namespace otgof
