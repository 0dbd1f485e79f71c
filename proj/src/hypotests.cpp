// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "otgof/hypotests.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "otgof/csv.hpp"
#include "otgof/error.hpp"
#include "otgof/parallel.hpp"
#include "otgof/transport.hpp"

namespace otgof {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_data(const Points& data, std::size_t expected_n) {
  if (data.rows() == 0 || data.cols() == 0) throw DimensionError("data are empty");
  if (!data.allFinite()) throw NonFiniteError("data contain non-finite values");
  if (expected_n != 0 && static_cast<std::size_t>(data.rows()) != expected_n) {
    throw DimensionError("expected " + std::to_string(expected_n) + " observations, got " +
                         std::to_string(data.rows()));
  }
}

void echo_kernel(ConfigEcho& out, const Kernel& kernel) {
  out.emplace_back("kernel", std::string(to_string(kernel.family)));
  out.emplace_back("a", format_double(kernel.scale));
  out.emplace_back("gamma", format_double(kernel.exponent));
}

double ranked_statistic(const Points& data, const Points& reference, const Grid& grid,
                        const Kernel& kernel) {
  const RankSplit split = ranks(PooledSample(data, reference), grid);
  return statistic_d(split.data_ranks, split.reference_ranks, kernel).value;
}

class NormalFamily final : public ParametricFamily {
 public:
  std::string name() const override { return "normal"; }

  Fit estimate(const Points& data) const override {
    MvNormalParams params = estimate_normal(data);
    return {std::move(params.mean), std::move(params.covariance)};
  }

  Points sample(const Fit& fit, std::size_t count, Engine& engine) const override {
    return sample_mvnormal(MvNormalParams{fit.location, fit.scatter}, count, engine);
  }

  bool has_grid_reference() const override { return true; }

  Points grid_reference(const Fit& fit, std::size_t count) const override {
    return normality_grid_reference(fit.location, fit.scatter, count);
  }
};

class TFamily final : public ParametricFamily {
 public:
  TFamily(double df, FitEstimator estimator) : df_(df), estimator_(std::move(estimator)) {}

  std::string name() const override { return "t(df=" + format_double(df_) + ")"; }

  Fit estimate(const Points& data) const override {
    if (estimator_) return estimator_(data);
    MvTParams params = estimate_mvt_moments(data, df_);
    return {std::move(params.location), std::move(params.scatter)};
  }

  Points sample(const Fit& fit, std::size_t count, Engine& engine) const override {
    return sample_mvt(MvTParams{fit.location, fit.scatter, df_}, count, engine);
  }

 private:
  double df_;
  FitEstimator estimator_;
};

}  // namespace

std::string TestReport::to_record() const {
  std::ostringstream out;
  out << "test=" << test << " statistic=" << format_double(statistic);
  out << " critical_value=" << (critical_value ? format_double(*critical_value) : "NA");
  out << " p_value=" << (p_value ? format_double(*p_value) : "NA");
  out << " decision=" << (reject ? "reject" : "retain") << " seed=" << seed;
  for (const auto& [key, value] : config) out << ' ' << key << '=' << value;
  return out.str();
}

std::string TestReport::to_text() const {
  std::ostringstream out;
  out << "test:           " << test << '\n';
  out << "statistic:      " << format_double(statistic) << '\n';
  if (critical_value) out << "critical value: " << format_double(*critical_value) << '\n';
  if (p_value) out << "p-value:        " << format_double(*p_value) << '\n';
  out << "decision:       " << (reject ? "reject" : "retain") << '\n';
  out << "seed:           " << seed << '\n';
  out << "configuration:\n";
  for (const auto& [key, value] : config) out << "  " << key << " = " << value << '\n';
  out << "elapsed:        " << format_double(elapsed_seconds) << " s\n";
  return out.str();
}

void SimpleTestSpec::validate() const {
  if (!null_sampler) throw ConfigError("simple test needs a null sampler");
  if (m == 0) throw ConfigError("reference size m must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  kernel.validate();
  if (const auto* fly = std::get_if<OnTheFlyCalibration>(&calibration)) {
    if (fly->reps < kMinCalibrationReps) {
      throw ConfigError("on-the-fly calibration needs at least " +
                        std::to_string(kMinCalibrationReps) + " replications");
    }
  }
}

ConfigEcho SimpleTestSpec::echo(std::size_t n_data, int dimension) const {
  ConfigEcho out;
  out.emplace_back("null", null_description);
  out.emplace_back("n", std::to_string(n_data));
  out.emplace_back("m", std::to_string(m));
  out.emplace_back("p", std::to_string(dimension));
  out.emplace_back("grid", std::string(to_string(grid_kind)));
  echo_kernel(out, kernel);
  out.emplace_back("alpha", format_double(alpha));
  if (const auto* fly = std::get_if<OnTheFlyCalibration>(&calibration)) {
    out.emplace_back("calibration", "on-the-fly");
    out.emplace_back("reps", std::to_string(fly->reps));
  } else {
    out.emplace_back("calibration", "table");
  }
  return out;
}

double simple_statistic(const Points& data, const Sampler& null_sampler, std::size_t m,
                        const Grid& grid, const Kernel& kernel, Engine& engine) {
  const Points reference = null_sampler(m, engine);
  if (reference.cols() != data.cols()) {
    throw DimensionError("null sampler dimension differs from the data");
  }
  return ranked_statistic(data, reference, grid, kernel);
}

TestReport run_simple_test(const Points& data, const SimpleTestSpec& spec,
                           std::uint64_t seed) {
  const auto start = Clock::now();
  spec.validate();
  check_data(data, spec.n);
  const auto n = static_cast<std::size_t>(data.rows());
  const int p = static_cast<int>(data.cols());
  const Grid grid = make_grid(spec.grid_kind, p, n + spec.m);

  TestReport report;
  report.test = "simple";
  report.seed = seed;
  report.config = spec.echo(n, p);
  Engine engine = make_engine(seed, Stream::kReference);
  report.statistic = simple_statistic(data, spec.null_sampler, spec.m, grid, spec.kernel, engine);

  if (const auto* lookup = std::get_if<TableLookup>(&spec.calibration)) {
    report.critical_value = lookup->table.at(mc_key(grid, n, spec.m, spec.kernel, spec.alpha)).value;
  } else {
    const auto reps = std::get<OnTheFlyCalibration>(spec.calibration).reps;
    const EmpiricalDistribution law(mc_null_statistics(grid, n, spec.kernel, reps, seed));
    report.critical_value = law.critical_value(spec.alpha);
    report.p_value = law.upper_tail(report.statistic);
  }
  report.reject = report.statistic > *report.critical_value;
  report.elapsed_seconds = seconds_since(start);
  return report;
}

std::vector<double> simple_rejection_rates(const Sampler& data_sampler,
                                           const Sampler& null_sampler, std::size_t n,
                                           std::size_t m, GridKind kind, int dimension,
                                           std::span<const Kernel> kernels,
                                           std::span<const double> critical_values,
                                           std::size_t reps, std::uint64_t seed) {
  if (kernels.size() != critical_values.size()) {
    throw ConfigError("one critical value per kernel is required");
  }
  if (n == 0 || m == 0 || reps == 0) throw ConfigError("n, m and reps must be positive");
  const Grid grid = make_grid(kind, dimension, n + m);
  std::vector<std::vector<char>> rejected(kernels.size(), std::vector<char>(reps, 0));
  parallel_for(reps, [&](std::size_t r) {
    Engine data_engine = make_engine(seed, Stream::kStudyData, r);
    Engine reference_engine = make_engine(seed, Stream::kStudyReference, r);
    const Points data = data_sampler(n, data_engine);
    const Points reference = null_sampler(m, reference_engine);
    const RankSplit split = ranks(PooledSample(data, reference), grid);
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const double d = statistic_d(split.data_ranks, split.reference_ranks, kernels[k]).value;
      rejected[k][r] = d > critical_values[k] ? 1 : 0;
    }
  });
  std::vector<double> out;
  for (const auto& flags : rejected) {
    std::size_t count = 0;
    for (const char f : flags) count += static_cast<std::size_t>(f);
    out.push_back(static_cast<double>(count) / static_cast<double>(reps));
  }
  return out;
}

Points normality_grid_reference(const Vector& mean, const Matrix& covariance,
                                const Points& ball) {
  const auto p = mean.size();
  if (covariance.rows() != p || ball.cols() != p) {
    throw DimensionError("mean, covariance and grid points differ in dimension");
  }
  const Matrix root = sqrtm_spd(covariance);
  Points out(ball.rows(), p);
  for (Eigen::Index i = 0; i < ball.rows(); ++i) {
    const Vector y = ball.row(i).transpose();
    const double r = y.norm();
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("grid point outside the open unit ball");
    const double radius = std::sqrt(chisq_quantile(r, static_cast<double>(p)));
    out.row(i) = (mean + root * (y * (radius / r))).transpose();
  }
  return out;
}

Points normality_grid_reference(const Vector& mean, const Matrix& covariance,
                                std::size_t count) {
  return normality_grid_reference(
      mean, covariance, spherical_grid(static_cast<int>(mean.size()), count).points);
}

Points ParametricFamily::grid_reference(const Fit&, std::size_t) const {
  throw ConfigError("family '" + name() + "' has no grid reference");
}

std::shared_ptr<const ParametricFamily> make_normal_family() {
  return std::make_shared<NormalFamily>();
}

std::shared_ptr<const ParametricFamily> make_t_family(double df, FitEstimator estimator) {
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw ConfigError("degrees of freedom must be positive and finite");
  }
  if (!estimator && !(df > 2.0)) {
    throw ConfigError("the moment estimator needs df > 2; supply a plug-in estimator");
  }
  return std::make_shared<TFamily>(df, std::move(estimator));
}

std::string_view to_string(ReferenceMode mode) {
  return mode == ReferenceMode::RandomSample ? "random" : "grid";
}

ReferenceMode parse_reference_mode(std::string_view text) {
  if (text == "random") return ReferenceMode::RandomSample;
  if (text == "grid") return ReferenceMode::GridPoints;
  throw ConfigError("unknown reference mode '" + std::string(text) + "' (expected random or grid)");
}

void CompositeTestSpec::validate() const {
  if (!family) throw ConfigError("composite test needs a parametric family");
  if (m == 0) throw ConfigError("reference size m must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
  kernel.validate();
  if (!fixed_critical_value && bootstrap_reps < kMinCalibrationReps) {
    throw ConfigError("at least " + std::to_string(kMinCalibrationReps) +
                      " bootstrap replications are required");
  }
  if (reference_mode == ReferenceMode::GridPoints && !family->has_grid_reference()) {
    throw ConfigError("family '" + family->name() + "' does not support grid reference points");
  }
}

ConfigEcho CompositeTestSpec::echo(std::size_t n_data, int dimension) const {
  ConfigEcho out;
  out.emplace_back("family", family ? family->name() : "none");
  out.emplace_back("n", std::to_string(n_data));
  out.emplace_back("m", std::to_string(m));
  out.emplace_back("p", std::to_string(dimension));
  out.emplace_back("grid", std::string(to_string(grid_kind)));
  echo_kernel(out, kernel);
  out.emplace_back("alpha", format_double(alpha));
  out.emplace_back("reference", std::string(to_string(reference_mode)));
  if (fixed_critical_value) {
    out.emplace_back("fixed_critical_value", format_double(*fixed_critical_value));
  } else {
    out.emplace_back("bootstrap_reps", std::to_string(bootstrap_reps));
  }
  return out;
}

Points composite_reference(const CompositeTestSpec& spec, const ParametricFamily::Fit& fit,
                           std::size_t m, Engine& engine) {
  if (spec.reference_mode == ReferenceMode::GridPoints) {
    return spec.family->grid_reference(fit, m);
  }
  return spec.family->sample(fit, m, engine);
}

double composite_statistic(const Points& data, const CompositeTestSpec& spec, const Grid& grid,
                           Engine& engine) {
  const ParametricFamily::Fit fit = spec.family->estimate(data);
  const Points reference = composite_reference(spec, fit, spec.m, engine);
  return ranked_statistic(data, reference, grid, spec.kernel);
}

namespace {

// Statistic of `data` against `reference` for every kernel, from one solve.
std::vector<double> ranked_statistics(const Points& data, const Points& reference,
                                      const Grid& grid, std::span<const Kernel> kernels) {
  const RankSplit split = ranks(PooledSample(data, reference), grid);
  std::vector<double> out;
  out.reserve(kernels.size());
  for (const auto& kernel : kernels) {
    out.push_back(statistic_d(split.data_ranks, split.reference_ranks, kernel).value);
  }
  return out;
}

// Bootstrap replication evaluated for every kernel; same draws and retry
// policy as bootstrap_statistic.
std::vector<double> bootstrap_values(const ParametricFamily::Fit& fit, std::size_t n,
                                     const CompositeTestSpec& spec,
                                     std::span<const Kernel> kernels, const Grid& grid,
                                     std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::string last_error;
  for (int attempt = 0; attempt < kMaxEstimationAttempts; ++attempt) {
    Engine engine = make_engine(seed, stream, index, static_cast<std::uint64_t>(attempt));
    const Points data = spec.family->sample(fit, n, engine);
    ParametricFamily::Fit refit;
    try {
      refit = spec.family->estimate(data);
    } catch (const EstimationError& err) {
      last_error = err.what();
      continue;
    }
    const Points reference = composite_reference(spec, refit, spec.m, engine);
    return ranked_statistics(data, reference, grid, kernels);
  }
  throw EstimationError("bootstrap replication " + std::to_string(index) + " failed " +
                        std::to_string(kMaxEstimationAttempts) +
                        " estimation attempts; last error: " + last_error);
}

void check_study(const CompositeTestSpec& spec, std::span<const Kernel> kernels) {
  spec.validate();
  if (spec.n == 0) throw ConfigError("studies need the sample size n");
  if (kernels.empty()) throw ConfigError("at least one kernel is required");
  for (const auto& k : kernels) k.validate();
}

}  // namespace

double bootstrap_statistic(const ParametricFamily::Fit& fit, std::size_t n,
                           const CompositeTestSpec& spec, const Grid& grid,
                           std::uint64_t seed, Stream stream, std::uint64_t index) {
  const Kernel kernels[] = {spec.kernel};
  return bootstrap_values(fit, n, spec, kernels, grid, seed, stream, index).front();
}

std::vector<double> bootstrap_statistics(const ParametricFamily::Fit& fit, std::size_t n,
                                         const CompositeTestSpec& spec, std::size_t reps,
                                         std::uint64_t seed) {
  const Grid grid = make_grid(spec.grid_kind, static_cast<int>(fit.location.size()), n + spec.m);
  std::vector<double> out(reps);
  parallel_for(reps, [&](std::size_t b) {
    out[b] = bootstrap_statistic(fit, n, spec, grid, seed, Stream::kBootstrapData, b);
  });
  return out;
}

TestReport run_composite_test(const Points& data, const CompositeTestSpec& spec,
                              std::uint64_t seed) {
  const auto start = Clock::now();
  spec.validate();
  if (!(spec.alpha > 0.0)) throw ConfigError("alpha must lie in (0, 1)");
  check_data(data, spec.n);
  const auto n = static_cast<std::size_t>(data.rows());
  const int p = static_cast<int>(data.cols());
  const Grid grid = make_grid(spec.grid_kind, p, n + spec.m);

  TestReport report;
  report.test = "composite";
  report.seed = seed;
  report.config = spec.echo(n, p);
  const ParametricFamily::Fit fit = spec.family->estimate(data);
  Engine engine = make_engine(seed, Stream::kReference);
  const Points reference = composite_reference(spec, fit, spec.m, engine);
  report.statistic = ranked_statistic(data, reference, grid, spec.kernel);

  if (spec.fixed_critical_value) {
    report.critical_value = *spec.fixed_critical_value;
  } else {
    const EmpiricalDistribution law(bootstrap_statistics(fit, n, spec, spec.bootstrap_reps, seed));
    report.critical_value = law.critical_value(spec.alpha);
    report.p_value = law.upper_tail(report.statistic);
  }
  report.reject = report.statistic > *report.critical_value;
  report.elapsed_seconds = seconds_since(start);
  return report;
}

std::vector<WarpSpeedResult> warp_speed_studies(const Sampler& data_sampler,
                                                const CompositeTestSpec& spec,
                                                std::span<const Kernel> kernels,
                                                std::size_t reps, std::uint64_t seed) {
  check_study(spec, kernels);
  if (reps < 200) throw ConfigError("warp-speed study needs at least 200 replications");
  const std::size_t n = spec.n;
  std::vector<WarpSpeedResult> results(kernels.size());
  for (auto& r : results) {
    r.observed.resize(reps);
    r.bootstrap.resize(reps);
  }
  parallel_for(reps, [&](std::size_t r) {
    Engine data_engine = make_engine(seed, Stream::kStudyData, r);
    const Points data = data_sampler(n, data_engine);
    // Samplers carry no dimension; building the grid is cheap next to the solve.
    const Grid grid = make_grid(spec.grid_kind, static_cast<int>(data.cols()), n + spec.m);
    const ParametricFamily::Fit fit = spec.family->estimate(data);
    Engine reference_engine = make_engine(seed, Stream::kStudyReference, r);
    const Points reference = composite_reference(spec, fit, spec.m, reference_engine);
    const auto observed = ranked_statistics(data, reference, grid, kernels);
    const auto boot =
        bootstrap_values(fit, n, spec, kernels, grid, seed, Stream::kStudyBootstrap, r);
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      results[k].observed[r] = observed[k];
      results[k].bootstrap[r] = boot[k];
    }
  });
  for (auto& result : results) {
    result.critical_value =
        spec.alpha == 0.0 ? std::numeric_limits<double>::infinity()
                          : EmpiricalDistribution(result.bootstrap).critical_value(spec.alpha);
    std::size_t rejected = 0;
    for (const double d : result.observed) rejected += d > result.critical_value ? 1 : 0;
    result.rejection_rate = static_cast<double>(rejected) / static_cast<double>(reps);
  }
  return results;
}

WarpSpeedResult warp_speed_study(const Sampler& data_sampler, const CompositeTestSpec& spec,
                                 std::size_t reps, std::uint64_t seed) {
  const Kernel kernels[] = {spec.kernel};
  return std::move(warp_speed_studies(data_sampler, spec, kernels, reps, seed).front());
}

std::vector<std::vector<double>> composite_statistic_samples(const Sampler& data_sampler,
                                                             const CompositeTestSpec& spec,
                                                             std::span<const Kernel> kernels,
                                                             std::size_t reps,
                                                             std::uint64_t seed) {
  check_study(spec, kernels);
  std::vector<std::vector<double>> out(kernels.size(), std::vector<double>(reps));
  parallel_for(reps, [&](std::size_t r) {
    Engine data_engine = make_engine(seed, Stream::kStudyData, r);
    const Points data = data_sampler(spec.n, data_engine);
    const Grid grid = make_grid(spec.grid_kind, static_cast<int>(data.cols()), spec.n + spec.m);
    const ParametricFamily::Fit fit = spec.family->estimate(data);
    Engine reference_engine = make_engine(seed, Stream::kStudyReference, r);
    const Points reference = composite_reference(spec, fit, spec.m, reference_engine);
    const auto values = ranked_statistics(data, reference, grid, kernels);
    for (std::size_t k = 0; k < kernels.size(); ++k) out[k][r] = values[k];
  });
  return out;
}

double composite_fixed_rejection_rate(const Sampler& data_sampler, const CompositeTestSpec& spec,
                                      std::size_t reps, std::uint64_t seed) {
  if (!spec.fixed_critical_value) throw ConfigError("a fixed critical value is required");
  if (reps == 0) throw ConfigError("reps must be positive");
  const Kernel kernels[] = {spec.kernel};
  const auto values = composite_statistic_samples(data_sampler, spec, kernels, reps, seed);
  std::size_t count = 0;
  for (const double d : values.front()) count += d > *spec.fixed_critical_value ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(reps);
}

}  // namespace otgof
