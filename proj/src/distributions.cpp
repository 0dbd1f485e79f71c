// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "otgof/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/chi_squared_distribution.hpp>

#include "otgof/error.hpp"

namespace otgof {
namespace {

void check_spd(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw ConfigError(std::string(what) + " must be a nonempty square matrix");
  }
  if (!m.allFinite()) throw ConfigError(std::string(what) + " has non-finite entries");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ConfigError(std::string(what) + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw ConfigError(std::string(what) + " is not positive definite");
  }
}

}  // namespace

void MvNormalParams::validate() const {
  if (mean.size() == 0) throw ConfigError("mean must be nonempty");
  if (!mean.allFinite()) throw ConfigError("mean has non-finite entries");
  check_spd(covariance, "covariance");
  if (covariance.rows() != mean.size()) {
    throw ConfigError("covariance and mean differ in dimension");
  }
}

void MvTParams::validate() const {
  if (location.size() == 0) throw ConfigError("location must be nonempty");
  if (!location.allFinite()) throw ConfigError("location has non-finite entries");
  check_spd(scatter, "scatter");
  if (scatter.rows() != location.size()) {
    throw ConfigError("scatter and location differ in dimension");
  }
  if (!(df > 0.0) || !std::isfinite(df)) {
    throw ConfigError("degrees of freedom must be positive and finite");
  }
}

Matrix sqrtm_spd(const Matrix& spd) {
  check_spd(spd, "matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(spd);
  const Matrix& v = eig.eigenvectors();
  return v * eig.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose();
}

Points sample_mvnormal(const MvNormalParams& params, std::size_t count, Engine& engine) {
  params.validate();
  const auto p = params.mean.size();
  const Matrix root = sqrtm_spd(params.covariance);
  Points z(static_cast<Eigen::Index>(count), p);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index k = 0; k < p; ++k) z(i, k) = standard_normal(engine);
  }
  Points out = z * root;  // root is symmetric
  out.rowwise() += params.mean.transpose();
  return out;
}

Points sample_mvnormal(const MvNormalParams& params, std::size_t count,
                       std::uint64_t seed) {
  Engine engine = make_engine(seed, Stream::kGeneric);
  return sample_mvnormal(params, count, engine);
}

Points sample_mvt(const MvTParams& params, std::size_t count, Engine& engine) {
  params.validate();
  const auto p = params.location.size();
  const Matrix root = sqrtm_spd(params.scatter);
  boost::random::chi_squared_distribution<double> chi2(params.df);
  Points out(static_cast<Eigen::Index>(count), p);
  Vector z(p);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index k = 0; k < p; ++k) z(k) = standard_normal(engine);
    const double w = chi2(engine);
    out.row(i) = (params.location + root * z / std::sqrt(w / params.df)).transpose();
  }
  return out;
}

Points sample_mvt(const MvTParams& params, std::size_t count, std::uint64_t seed) {
  Engine engine = make_engine(seed, Stream::kGeneric);
  return sample_mvt(params, count, engine);
}

Points sample_uniform_box(double lo, double hi, int dimension, std::size_t count,
                          Engine& engine) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("uniform box requires finite lo < hi");
  }
  if (dimension < 1) throw ConfigError("dimension must be positive");
  Points out(static_cast<Eigen::Index>(count), dimension);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (int k = 0; k < dimension; ++k) out(i, k) = lo + (hi - lo) * uniform_open01(engine);
  }
  return out;
}

Points sample_uniform_box(double lo, double hi, int dimension, std::size_t count,
                          std::uint64_t seed) {
  Engine engine = make_engine(seed, Stream::kGeneric);
  return sample_uniform_box(lo, hi, dimension, count, engine);
}

Sampler mvnormal_sampler(MvNormalParams params) {
  params.validate();
  return [params = std::move(params)](std::size_t count, Engine& engine) {
    return sample_mvnormal(params, count, engine);
  };
}

Sampler mvt_sampler(MvTParams params) {
  params.validate();
  return [params = std::move(params)](std::size_t count, Engine& engine) {
    return sample_mvt(params, count, engine);
  };
}

Sampler uniform_box_sampler(double lo, double hi, int dimension) {
  if (!(lo < hi)) throw ConfigError("uniform box requires lo < hi");
  if (dimension < 1) throw ConfigError("dimension must be positive");
  return [=](std::size_t count, Engine& engine) {
    return sample_uniform_box(lo, hi, dimension, count, engine);
  };
}

double chisq_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw ConfigError("chi-square degrees of freedom must be positive");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double chisq_quantile(double u, double dof) {
  if (!(u >= 0.0 && u < 1.0)) throw ConfigError("chi-square quantile level outside [0, 1)");
  if (!(dof > 0.0)) throw ConfigError("chi-square degrees of freedom must be positive");
  if (u == 0.0) return 0.0;
  if (dof == 2.0) return -2.0 * std::log1p(-u);
  return 2.0 * boost::math::gamma_p_inv(0.5 * dof, u);
}

MvNormalParams estimate_normal(const Points& data) {
  const auto n = data.rows();
  const auto p = data.cols();
  if (p < 1 || n < p + 1) {
    throw ConfigError("normal estimation needs at least p + 1 observations");
  }
  if (!data.allFinite()) throw NonFiniteError("data contain non-finite values");
  MvNormalParams out;
  out.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - out.mean.transpose();
  out.covariance = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.covariance, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(top > 0.0) || !(eig.eigenvalues().minCoeff() > 1e-12 * top)) {
    throw EstimationError("sample covariance is numerically rank deficient");
  }
  return out;
}

MvTParams estimate_mvt_moments(const Points& data, double df) {
  if (!(df > 2.0) || !std::isfinite(df)) {
    throw ConfigError("moment estimator needs finite df > 2; supply a plug-in estimator");
  }
  const MvNormalParams normal = estimate_normal(data);
  MvTParams out;
  out.location = normal.mean;
  out.scatter = normal.covariance * ((df - 2.0) / df);
  out.df = df;
  return out;
}

}  // namespace otgof
