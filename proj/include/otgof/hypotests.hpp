// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

// Goodness-of-fit tests built on optimal-transport ranks.
//
// Simple null (F0 fully specified): draw an artificial sample of size m from
// F0, rank the pooled sample against a grid of n + m points, evaluate D and
// compare with a critical value that does not depend on F0.
//
// Composite null (parametric family): estimate the parameter, build the
// reference set from the fitted member (random sample, or for the normal
// family a transformed spherical grid) and calibrate with a parametric
// bootstrap that re-estimates inside every replication.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "otgof/calibration.hpp"
#include "otgof/distributions.hpp"
#include "otgof/kernels.hpp"
#include "otgof/lowdisc.hpp"
#include "otgof/types.hpp"

namespace otgof {

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct TestReport {
  std::string test;
  double statistic = 0.0;
  std::optional<double> critical_value;
  std::optional<double> p_value;
  bool reject = false;
  std::uint64_t seed = 0;
  ConfigEcho config;
  double elapsed_seconds = 0.0;

  /// Single-line "key=value key=value ..." record. Deterministic for a fixed
  /// seed and configuration: timing is excluded.
  std::string to_record() const;
  /// Multi-line human-readable summary, including timing.
  std::string to_text() const;
};

/// Critical value read from a calibrated table (exact key match).
struct TableLookup {
  CriticalTable table;
};

/// Monte-Carlo calibration at test time; also yields a p-value.
struct OnTheFlyCalibration {
  std::size_t reps = 2000;
};

using SimpleCalibration = std::variant<TableLookup, OnTheFlyCalibration>;

struct SimpleTestSpec {
  Sampler null_sampler;
  std::string null_description = "custom";
  /// Expected data size; 0 accepts whatever the data provide.
  std::size_t n = 0;
  std::size_t m = 200;
  GridKind grid_kind = GridKind::Spherical;
  Kernel kernel = stable_kernel(2.0);
  double alpha = 0.05;
  SimpleCalibration calibration = OnTheFlyCalibration{};

  void validate() const;
  ConfigEcho echo(std::size_t n_data, int dimension) const;
};

/// Draws the reference sample from F0, pools (data first), ranks, evaluates D
/// and decides D > critical value. On-the-fly calibration also reports the
/// Monte-Carlo tail proportion as p-value.
TestReport run_simple_test(const Points& data, const SimpleTestSpec& spec,
                           std::uint64_t seed);

/// D for one data set against a fresh reference sample from `null_sampler`
/// ranked on `grid` (grid.size() == data.rows() + m).
double simple_statistic(const Points& data, const Sampler& null_sampler,
                        std::size_t m, const Grid& grid, const Kernel& kernel,
                        Engine& engine);

/// Rejection rates of the simple test over `reps` data sets drawn from
/// `data_sampler`, one rate per kernel. Every replication solves one
/// transport problem and evaluates all kernels on the same ranks.
std::vector<double> simple_rejection_rates(const Sampler& data_sampler,
                                           const Sampler& null_sampler,
                                           std::size_t n, std::size_t m,
                                           GridKind kind, int dimension,
                                           std::span<const Kernel> kernels,
                                           std::span<const double> critical_values,
                                           std::size_t reps, std::uint64_t seed);

/// mu + Sigma^{1/2} sqrt(H_p^{-1}(||y_i||)) y_i / ||y_i|| over the points y_i of
/// the spherical grid with `count` points; H_p is the chi^2_p CDF.
/// Throws ConfigError for a covariance that is not symmetric positive
/// definite.
Points normality_grid_reference(const Vector& mean, const Matrix& covariance,
                                std::size_t count);

/// Same transform applied to explicit unit-ball points (rows of `ball`).
Points normality_grid_reference(const Vector& mean, const Matrix& covariance,
                                const Points& ball);

/// A parametric family under a composite null: an estimator, a sampler for a
/// fitted member, and optionally a deterministic grid-based reference set.
class ParametricFamily {
 public:
  struct Fit {
    Vector location;
    Matrix scatter;
  };

  virtual ~ParametricFamily() = default;

  virtual std::string name() const = 0;
  /// Throws EstimationError when the data do not determine a member.
  virtual Fit estimate(const Points& data) const = 0;
  virtual Points sample(const Fit& fit, std::size_t count, Engine& engine) const = 0;
  virtual bool has_grid_reference() const { return false; }
  /// Deterministic reference set; throws ConfigError unless
  /// has_grid_reference().
  virtual Points grid_reference(const Fit& fit, std::size_t count) const;
};

std::shared_ptr<const ParametricFamily> make_normal_family();

using FitEstimator = std::function<ParametricFamily::Fit(const Points& data)>;

/// Multivariate t with fixed degrees of freedom. Without a plug-in estimator
/// the moment estimator is used, which requires df > 2.
std::shared_ptr<const ParametricFamily> make_t_family(double df,
                                                      FitEstimator estimator = {});

enum class ReferenceMode { RandomSample, GridPoints };

std::string_view to_string(ReferenceMode mode);
ReferenceMode parse_reference_mode(std::string_view text);

/// Attempts per bootstrap slot before an estimator failure aborts the test.
inline constexpr int kMaxEstimationAttempts = 10;

struct CompositeTestSpec {
  std::shared_ptr<const ParametricFamily> family;
  /// Expected data size; 0 accepts whatever the data provide. Studies use it
  /// as the simulated sample size.
  std::size_t n = 0;
  std::size_t m = 200;
  GridKind grid_kind = GridKind::Spherical;
  Kernel kernel = stable_kernel(2.0);
  double alpha = 0.05;
  std::size_t bootstrap_reps = 1000;
  ReferenceMode reference_mode = ReferenceMode::RandomSample;
  /// Study mode: compare against this value instead of bootstrapping.
  std::optional<double> fixed_critical_value;

  void validate() const;
  ConfigEcho echo(std::size_t n_data, int dimension) const;
};

/// Reference set for a fitted member according to the reference mode.
Points composite_reference(const CompositeTestSpec& spec,
                           const ParametricFamily::Fit& fit, std::size_t m,
                           Engine& engine);

/// D~ for data against a reference built from the estimate on that data.
double composite_statistic(const Points& data, const CompositeTestSpec& spec,
                           const Grid& grid, Engine& engine);

/// One bootstrap replication: simulate n points from `fit`, re-estimate,
/// rebuild the reference, rank, evaluate. Estimator failures are retried with
/// fresh draws up to kMaxEstimationAttempts times, then EstimationError.
double bootstrap_statistic(const ParametricFamily::Fit& fit, std::size_t n,
                           const CompositeTestSpec& spec, const Grid& grid,
                           std::uint64_t seed, Stream stream, std::uint64_t index);

std::vector<double> bootstrap_statistics(const ParametricFamily::Fit& fit,
                                         std::size_t n,
                                         const CompositeTestSpec& spec,
                                         std::size_t reps, std::uint64_t seed);

TestReport run_composite_test(const Points& data, const CompositeTestSpec& spec,
                              std::uint64_t seed);

struct WarpSpeedResult {
  double rejection_rate = 0.0;
  double critical_value = 0.0;
  std::vector<double> observed;
  std::vector<double> bootstrap;
};

/// Warp-speed size/power estimate: each replication draws one data set from
/// `data_sampler`, computes its statistic and a single bootstrap statistic;
/// observed values are compared with the (1 - alpha) quantile of the pooled
/// bootstrap statistics. Requires reps >= 200; alpha = 0 never rejects.
WarpSpeedResult warp_speed_study(const Sampler& data_sampler,
                                 const CompositeTestSpec& spec, std::size_t reps,
                                 std::uint64_t seed);

/// Warp-speed study for several kernels at once. Each replication solves one
/// transport problem for the observed statistic and one for the bootstrap
/// statistic; all kernels are evaluated on those ranks (spec.kernel is
/// ignored). Element k matches warp_speed_study with kernel k.
std::vector<WarpSpeedResult> warp_speed_studies(const Sampler& data_sampler,
                                                const CompositeTestSpec& spec,
                                                std::span<const Kernel> kernels,
                                                std::size_t reps, std::uint64_t seed);

/// D~ for `reps` data sets of size spec.n from `data_sampler`, one sample per
/// kernel. Replication r draws data from (seed, kStudyData, r) and builds the
/// reference from (seed, kStudyReference, r).
std::vector<std::vector<double>> composite_statistic_samples(const Sampler& data_sampler,
                                                             const CompositeTestSpec& spec,
                                                             std::span<const Kernel> kernels,
                                                             std::size_t reps,
                                                             std::uint64_t seed);

/// Rejection rate of the composite test with spec.fixed_critical_value over
/// `reps` data sets from `data_sampler`.
double composite_fixed_rejection_rate(const Sampler& data_sampler,
                                      const CompositeTestSpec& spec,
                                      std::size_t reps, std::uint64_t seed);

}  // namespace otgof
