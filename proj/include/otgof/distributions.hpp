// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "otgof/rng.hpp"
#include "otgof/types.hpp"

namespace otgof {

/// Draws `count` iid observations (one per row) using only `engine`.
using Sampler = std::function<Points(std::size_t count, Engine& engine)>;

struct MvNormalParams {
  Vector mean;
  Matrix covariance;

  int dimension() const { return static_cast<int>(mean.size()); }
  /// Throws ConfigError unless covariance is square, matches the mean, is
  /// symmetric and positive definite.
  void validate() const;
};

struct MvTParams {
  Vector location;
  Matrix scatter;
  double df = 1.0;

  int dimension() const { return static_cast<int>(location.size()); }
  void validate() const;
};

/// Unique symmetric positive definite square root via the symmetric
/// eigendecomposition. Throws ConfigError when `spd` is not symmetric
/// positive definite.
Matrix sqrtm_spd(const Matrix& spd);

Points sample_mvnormal(const MvNormalParams& params, std::size_t count, Engine& engine);
Points sample_mvnormal(const MvNormalParams& params, std::size_t count, std::uint64_t seed);

/// location + scatter^{1/2} Z / sqrt(W / df), Z ~ N(0, I), W ~ chi^2(df).
Points sample_mvt(const MvTParams& params, std::size_t count, Engine& engine);
Points sample_mvt(const MvTParams& params, std::size_t count, std::uint64_t seed);

/// iid uniform on (lo, hi)^p. Throws ConfigError unless lo < hi.
Points sample_uniform_box(double lo, double hi, int dimension, std::size_t count,
                          Engine& engine);
Points sample_uniform_box(double lo, double hi, int dimension, std::size_t count,
                          std::uint64_t seed);

Sampler mvnormal_sampler(MvNormalParams params);
Sampler mvt_sampler(MvTParams params);
Sampler uniform_box_sampler(double lo, double hi, int dimension);

/// Regularized lower incomplete gamma CDF of chi^2 with `dof` degrees.
double chisq_cdf(double x, double dof);

/// Inverse of the chi-square CDF for u in [0, 1). dof = 2 uses the closed form
/// -2 log(1 - u); other values invert the regularized incomplete gamma
/// (Boost.Math, safeguarded Halley iteration). Throws ConfigError outside
/// [0, 1).
double chisq_quantile(double u, double dof);

/// Sample mean and covariance with 1/(n-1) normalization. Throws ConfigError
/// when n < p + 1 and EstimationError when the covariance is numerically
/// rank deficient.
MvNormalParams estimate_normal(const Points& data);

/// Moment estimator for fixed df > 2: location = sample mean,
/// scatter = sample covariance * (df - 2) / df.
MvTParams estimate_mvt_moments(const Points& data, double df);

}  // namespace otgof
