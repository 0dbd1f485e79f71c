// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

// Critical values for the rank statistic.
//
// Under a simple null the data ranks are a uniformly random n-subset of the
// grid (every one of the N! rank permutations is equally likely), so the null
// law of D depends only on (grid, n, m, kernel). Monte-Carlo calibration
// samples random subsets directly; no transport problem is solved. The
// full-pipeline route (draw, pool, solve, evaluate) is kept to validate that
// shortcut.
//
// The asymptotic route simulates the limiting Gaussian process Z on a
// discretized box [-K, K]^p and integrates Z^2 w.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otgof/distributions.hpp"
#include "otgof/kernels.hpp"
#include "otgof/lowdisc.hpp"
#include "otgof/types.hpp"

namespace otgof {

/// Index of the order statistic used for the (level)-quantile of `count`
/// values: ceil(level * count), 1-based, clamped to [1, count].
std::size_t quantile_rank(double level, std::size_t count);

/// Empirical law of a simulated statistic.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> values);

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted_values() const { return sorted_; }

  /// Order statistic at quantile_rank(level, size()).
  double quantile(double level) const;
  /// Critical value for level alpha: quantile(1 - alpha).
  double critical_value(double alpha) const;
  /// Fraction of values >= x.
  double upper_tail(double x) const;

 private:
  std::vector<double> sorted_;
};

/// Difference of block means of f over a permutation split at n:
///   (1/n) sum_{i<n} f(perm_i) - 1/(N-n) sum_{i>=n} f(perm_i).
double split_mean_difference(std::span<const double> f,
                             std::span<const std::size_t> perm, std::size_t n);

/// The same quantity through the first block and the grand total only:
///   N/(n(N-n)) [ sum_{i<n} f(perm_i) - (n/N) sum_i f(i) ].
double split_mean_difference_from_total(std::span<const double> f,
                                        std::span<const std::size_t> perm,
                                        std::size_t n);

/// Evaluates D for "data ranks = grid[subset], reference ranks = rest of the
/// grid" in O(n^2) per subset. The grid-wide kernel sums are precomputed, and
/// the cross and reference sums follow from
///   sum_{A x B} = sum_{j in A} rowsum_j - sum_{A x A},
///   sum_{B x B} = total - 2 sum_{j in A} rowsum_j + sum_{A x A}.
class SubsetStatistic {
 public:
  SubsetStatistic(const Grid& grid, const Kernel& kernel);

  std::size_t grid_size() const { return row_sums_.size(); }
  double operator()(std::span<const std::size_t> subset) const;

 private:
  Kernel kernel_;
  Matrix gram_;
  std::vector<double> row_sums_;
  double total_ = 0.0;
};

/// Draws a uniformly random n-subset of {0, ..., N-1} (partial Fisher-Yates).
std::vector<std::size_t> random_subset(std::size_t population, std::size_t n,
                                       Engine& engine);

/// `reps` null draws of D by the subset shortcut; replication r uses the
/// engine keyed by (seed, kNullSubset, r).
std::vector<double> mc_null_statistics(const Grid& grid, std::size_t n,
                                       const Kernel& kernel, std::size_t reps,
                                       std::uint64_t seed);

/// `reps` null draws of D by the full pipeline: data and reference drawn from
/// `null_sampler`, pooled, ranked against `grid`, and evaluated.
std::vector<double> pipeline_null_statistics(const Sampler& null_sampler,
                                             const Grid& grid, std::size_t n,
                                             std::size_t m, const Kernel& kernel,
                                             std::size_t reps, std::uint64_t seed);

enum class CalibrationMethod { MonteCarlo, Asymptotic };

std::string_view to_string(CalibrationMethod method);
CalibrationMethod parse_calibration_method(std::string_view text);

/// Exact-match lookup key of a calibrated critical value.
struct CriticalKey {
  CalibrationMethod method = CalibrationMethod::MonteCarlo;
  int dimension = 0;
  GridKind grid_kind = GridKind::Spherical;
  /// "N=<grid size>" for Monte-Carlo entries, "K=..;M=..;G=.." for
  /// asymptotic ones.
  std::string grid_spec;
  Kernel kernel;
  std::size_t n = 0;  // 0 for asymptotic entries
  std::size_t m = 0;  // 0 for asymptotic entries
  double alpha = 0.05;

  friend bool operator==(const CriticalKey&, const CriticalKey&) = default;
};

struct CriticalEntry {
  CriticalKey key;
  double value = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
};

/// Minimum replication count accepted by Monte-Carlo calibration.
inline constexpr std::size_t kMinCalibrationReps = 100;

CriticalKey mc_key(const Grid& grid, std::size_t n, std::size_t m,
                   const Kernel& kernel, double alpha);

/// Monte-Carlo critical value c_{n,m,alpha} by the subset shortcut.
/// Throws ConfigError when n + m != grid size, alpha is outside (0, 1) or
/// reps < kMinCalibrationReps.
CriticalEntry mc_critical_value(const Grid& grid, std::size_t n, std::size_t m,
                                const Kernel& kernel, double alpha,
                                std::size_t reps, std::uint64_t seed);

/// Several levels from one simulated sample; values are monotone in alpha.
std::vector<CriticalEntry> mc_critical_values(const Grid& grid, std::size_t n,
                                              std::size_t m, const Kernel& kernel,
                                              std::span<const double> alphas,
                                              std::size_t reps, std::uint64_t seed);

/// Monte-Carlo critical value through the full sampling pipeline.
CriticalEntry mc_critical_value_via_pipeline(const Sampler& null_sampler,
                                             const Grid& grid, std::size_t n,
                                             std::size_t m, const Kernel& kernel,
                                             double alpha, std::size_t reps,
                                             std::uint64_t seed);

/// Persisted table of critical values. CSV with a version line and a header
/// naming every key field; lookups require an exact key match.
class CriticalTable {
 public:
  static constexpr int kFormatVersion = 1;

  const std::vector<CriticalEntry>& entries() const { return entries_; }
  const CriticalEntry* find(const CriticalKey& key) const;
  /// Throws TableError when the key is absent.
  const CriticalEntry& at(const CriticalKey& key) const;

  /// Adds an entry. Re-inserting an identical value is a no-op; a different
  /// value under an existing key throws TableError unless `force`, which
  /// replaces it.
  void insert(const CriticalEntry& entry, bool force = false);

  void write(std::ostream& out) const;
  static CriticalTable read(std::istream& in);

  /// Missing file yields an empty table.
  static CriticalTable load(const std::string& path);
  /// Writes to a temporary file next to `path` and renames it into place.
  void save(const std::string& path) const;

 private:
  std::vector<CriticalEntry> entries_;
};

struct AsymptoticConfig {
  /// Half-width K of the integration box [-K, K]^p.
  double half_width = 8.0;
  /// Size M of the grid discretizing the reference measure.
  std::size_t reference_points = 2000;
  /// Requested number G of integration cells; the box is split into
  /// floor(G^{1/p}) equal cells per axis.
  std::size_t cells = 1600;
  /// Number B of simulated process paths.
  std::size_t replications = 10000;
  /// Refuse configurations whose G x G matrices would exceed this.
  std::size_t memory_budget_bytes = std::size_t{2} << 30;

  void validate() const;
  std::string spec() const;
};

/// Discretized limiting Gaussian process for a reference measure. Its
/// covariance at nodes t_i, t_j is the covariance of
/// cos(t^T Y) + sin(t^T Y) under the empirical law of M grid points Y.
class LimitingProcess {
 public:
  /// Throws ConfigError for invalid configurations or when the G x G
  /// matrices exceed the memory budget, and NumericalError when the
  /// covariance has eigenvalues below -1e-8 times the largest one.
  LimitingProcess(GridKind kind, int dimension, const AsymptoticConfig& config);

  int dimension() const { return dimension_; }
  std::size_t cells_per_axis() const { return cells_per_axis_; }
  std::size_t cell_count() const { return static_cast<std::size_t>(nodes_.rows()); }
  double cell_volume() const { return cell_volume_; }
  const Points& nodes() const { return nodes_; }
  const AsymptoticConfig& config() const { return config_; }
  GridKind grid_kind() const { return kind_; }
  /// Smallest and largest covariance eigenvalue before clipping.
  double min_eigenvalue() const { return min_eigenvalue_; }
  double max_eigenvalue() const { return max_eigenvalue_; }

  /// Covariance matrix of the process at the nodes (recomputed on demand).
  Matrix covariance() const;

  /// B draws of sum_i Z(t_i)^2 w(t_i) vol for each kernel. All kernels
  /// share the same process paths; path b uses the engine keyed by
  /// (seed, kProcess, b).
  std::vector<std::vector<double>> integrals(std::span<const Kernel> kernels,
                                             std::size_t reps,
                                             std::uint64_t seed) const;

 private:
  GridKind kind_;
  int dimension_;
  AsymptoticConfig config_;
  std::size_t cells_per_axis_ = 0;
  double cell_volume_ = 0.0;
  Points nodes_;
  Points reference_;
  Matrix root_;
  double min_eigenvalue_ = 0.0;
  double max_eigenvalue_ = 0.0;
};

CriticalKey asymptotic_key(const AsymptoticConfig& config, const Kernel& kernel,
                           GridKind kind, int dimension, double alpha);

CriticalEntry asymptotic_critical_value(const AsymptoticConfig& config,
                                        const Kernel& kernel, GridKind kind,
                                        int dimension, double alpha,
                                        std::uint64_t seed);

}  // namespace otgof
