// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "oracles.hpp"
#include "otgof/calibration.hpp"
#include "otgof/distributions.hpp"
#include "otgof/hypotests.hpp"
#include "otgof/kernels.hpp"
#include "otgof/lowdisc.hpp"
#include "otgof/transport.hpp"

namespace otgof::testing {
namespace {

constexpr double kUniformityGap = 0.02;
constexpr double kNonnegativityTolerance = 1e-10;
constexpr double kSymmetryTolerance = 1e-12;
constexpr double kEnergyRankCorrelation = 0.95;
constexpr double kLevelBand = 0.015;
constexpr double kAffineLevelBand = 0.02;
constexpr double kAsymptoticGap = 0.05;
constexpr double kChisqRoundTrip = 1e-8;
constexpr double kEigenFloor = -1e-8;
// Familywise level of KS checks that test several margins at once.
constexpr double kFamilywiseAlpha = 0.05;

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

PropertyOutcome outcome(bool pass, const std::string& detail) { return {pass, detail}; }

Points random_points(std::size_t count, int p, Engine& engine) {
  return sample_uniform_box(-1.0, 1.0, p, count, engine);
}

MvNormalParams standard_normal_params(int p) {
  return {Vector::Zero(p), Matrix::Identity(p, p)};
}

MvNormalParams shifted_normal_params() {
  Matrix sigma(2, 2);
  sigma << 2.0, 1.0, 1.0, 1.0;
  return {Vector::Ones(2), sigma};
}

// ---- lowdisc ---------------------------------------------------------------

PropertyOutcome grid_determinism() {
  for (const auto kind : {GridKind::Rectangular, GridKind::Spherical}) {
    const Grid a = make_grid(kind, 3, 2000);
    const Grid b = make_grid(kind, 3, 2000);
    if (!(a.points.array() == b.points.array()).all()) {
      return outcome(false, std::string(to_string(kind)) + " grids differ between calls");
    }
  }
  return outcome(true, "rectangular and spherical grids bit-identical");
}

PropertyOutcome spherical_radius_uniformity() {
  const Grid grid = spherical_grid(2, 10000);
  const Vector norms = grid.points.rowwise().norm();
  double gap = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double r = 0.1 * k;
    const double frac = (norms.array() <= r).cast<double>().mean();
    gap = std::max(gap, std::abs(frac - r));
  }
  return outcome(gap < kUniformityGap, "sup gap " + fmt(gap));
}

PropertyOutcome rectangular_marginal_uniformity() {
  const Grid grid = rectangular_grid(3, 10000);
  double gap = 0.0;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> column(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) column[i] = grid.points(static_cast<Eigen::Index>(i), k);
    gap = std::max(gap, ks_one_sample(column, [](double x) { return x; }));
  }
  return outcome(gap < kUniformityGap, "max per-coordinate KS gap " + fmt(gap));
}

PropertyOutcome grid_support_and_distinctness() {
  for (const auto kind : {GridKind::Rectangular, GridKind::Spherical}) {
    for (const int p : {2, 3, 5}) {
      const Grid grid = make_grid(kind, p, 3000);
      std::set<std::vector<double>> seen;
      for (Eigen::Index i = 0; i < grid.points.rows(); ++i) {
        const auto row = grid.points.row(i);
        if (kind == GridKind::Rectangular) {
          if ((row.array() <= 0.0).any() || (row.array() >= 1.0).any()) {
            return outcome(false, "rectangular point outside (0,1)^p");
          }
        } else if (!(row.norm() < 1.0)) {
          return outcome(false, "spherical point outside the unit ball");
        }
        seen.insert(std::vector<double>(row.data(), row.data() + p));
      }
      if (seen.size() != grid.size()) return outcome(false, "duplicate grid points");
    }
  }
  return outcome(true, "supports respected, no duplicates (p = 2, 3, 5)");
}

// ---- transport -------------------------------------------------------------

PropertyOutcome assignment_small_optimality() {
  Engine engine = make_engine(101, Stream::kGeneric);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
    const Points x = random_points(n, 2, engine);
    const Points g = random_points(n, 2, engine);
    const RowMatrix cost = squared_distance_matrix(x, g);
    const auto solved = solve_assignment(x, g);
    const auto best = brute_force_assignment(cost);
    if (permutation_cost(cost, solved.grid_index) != best.cost) {
      return outcome(false, "suboptimal on trial " + std::to_string(trial));
    }
  }
  return outcome(true, "100 instances with N <= 7 optimal");
}

PropertyOutcome cyclical_monotonicity() {
  Engine engine = make_engine(102, Stream::kGeneric);
  const Points x = sample_mvnormal(standard_normal_params(2), 150, engine);
  const Grid grid = spherical_grid(2, 150);
  const RowMatrix cost = squared_distance_matrix(x, grid.points);
  const auto solved = solve_assignment(x, grid);
  for (int k = 0; k < 2000; ++k) {
    const auto i = static_cast<std::size_t>(uniform01(engine) * 150);
    const auto j = static_cast<std::size_t>(uniform01(engine) * 150);
    const auto si = static_cast<Eigen::Index>(solved.grid_index[i]);
    const auto sj = static_cast<Eigen::Index>(solved.grid_index[j]);
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    const double before = cost(ii, si) + cost(jj, sj);
    const double after = cost(ii, sj) + cost(jj, si);
    if (after < before - 1e-12) return outcome(false, "a pair swap lowered the cost");
  }
  return outcome(true, "2000 random pair swaps never lower the cost");
}

PropertyOutcome scale_equivariance() {
  Engine engine = make_engine(103, Stream::kGeneric);
  const Points x = sample_mvnormal(standard_normal_params(2), 120, engine);
  const Grid grid = spherical_grid(2, 120);
  const auto base = solve_assignment(x, grid);
  for (const double c : {0.3, 4.0, 17.5}) {
    const Points xs = x * c;
    const Points gs = grid.points * c;
    if (solve_assignment(xs, gs).grid_index != base.grid_index) {
      return outcome(false, "assignment changed under scale " + fmt(c));
    }
  }
  return outcome(true, "assignment unchanged for c = 0.3, 4, 17.5");
}

// ---- kernels and statistics ------------------------------------------------

std::vector<Kernel> sample_kernels() {
  return {stable_kernel(0.5), stable_kernel(2.0), stable_kernel(1.0, 1.0),
          stable_kernel(3.0, 0.5), laplace_kernel(1.0, 1.0), laplace_kernel(2.0, 2.5)};
}

PropertyOutcome kernel_bounds() {
  Engine engine = make_engine(104, Stream::kGeneric);
  for (const auto& k : sample_kernels()) {
    const double zero[] = {0.0, 0.0};
    if (kernel_eval(k, zero) != 1.0) return outcome(false, "C(0) != 1");
    for (int i = 0; i < 500; ++i) {
      const double x[] = {4.0 * (uniform01(engine) - 0.5), 4.0 * (uniform01(engine) - 0.5)};
      const double mx[] = {-x[0], -x[1]};
      const double v = kernel_eval(k, x);
      if (!(v > 0.0 && v <= 1.0)) return outcome(false, "kernel value outside (0, 1]");
      if (v != kernel_eval(k, mx)) return outcome(false, "kernel not symmetric");
    }
  }
  return outcome(true, "C(0) = 1, values in (0,1], C(x) = C(-x) for 6 kernels");
}

PropertyOutcome statistic_nonnegative_and_symmetric() {
  Engine engine = make_engine(105, Stream::kGeneric);
  const Grid grid = spherical_grid(2, 60);
  double worst = 0.0;
  double asym = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform01(engine) * 30);
    const auto subset = random_subset(60, 60, engine);
    Points a(static_cast<Eigen::Index>(n), 2);
    Points b(static_cast<Eigen::Index>(60 - n), 2);
    for (std::size_t i = 0; i < 60; ++i) {
      const auto row = grid.points.row(static_cast<Eigen::Index>(subset[i]));
      if (i < n) a.row(static_cast<Eigen::Index>(i)) = row;
      else b.row(static_cast<Eigen::Index>(i - n)) = row;
    }
    for (const auto& k : sample_kernels()) {
      const double d = statistic_d(a, b, k).value;
      const double swapped = statistic_d(b, a, k).value;
      worst = std::min(worst, d);
      asym = std::max(asym, std::abs(d - swapped) / std::max(1.0, std::abs(d)));
    }
  }
  const bool pass = worst >= -kNonnegativityTolerance && asym <= kSymmetryTolerance;
  return outcome(pass, "min D " + fmt(worst) + ", max block-swap difference " + fmt(asym));
}

PropertyOutcome statistic_permutation_invariance() {
  Engine engine = make_engine(106, Stream::kGeneric);
  const Grid grid = spherical_grid(2, 50);
  const Points a = grid.points.topRows(15);
  const Points b = grid.points.bottomRows(35);
  const Kernel k = stable_kernel(2.0);
  const double base = statistic_d(a, b, k).value;
  for (int trial = 0; trial < 20; ++trial) {
    const auto pa = random_subset(15, 15, engine);
    const auto pb = random_subset(35, 35, engine);
    Points a2(15, 2);
    Points b2(35, 2);
    for (int i = 0; i < 15; ++i) a2.row(i) = a.row(static_cast<Eigen::Index>(pa[static_cast<std::size_t>(i)]));
    for (int i = 0; i < 35; ++i) b2.row(i) = b.row(static_cast<Eigen::Index>(pb[static_cast<std::size_t>(i)]));
    if (std::abs(statistic_d(a2, b2, k).value - base) > 1e-12) {
      return outcome(false, "D changed under a within-block permutation");
    }
  }
  return outcome(true, "20 within-block permutations leave D unchanged");
}

PropertyOutcome small_scale_energy_agreement() {
  Engine engine = make_engine(107, Stream::kGeneric);
  const Grid grid = spherical_grid(2, 120);
  const Kernel k = stable_kernel(0.05, 1.0);
  std::vector<double> d_values;
  std::vector<double> e_values;
  for (int trial = 0; trial < 50; ++trial) {
    const auto subset = random_subset(120, 120, engine);
    Points a(20, 2);
    Points b(100, 2);
    for (int i = 0; i < 120; ++i) {
      const auto row = grid.points.row(static_cast<Eigen::Index>(subset[static_cast<std::size_t>(i)]));
      if (i < 20) a.row(i) = row;
      else b.row(i - 20) = row;
    }
    d_values.push_back(2.0 / std::pow(0.05, 1.0) * statistic_d(a, b, k).value);
    e_values.push_back(statistic_energy(a, b, 1.0));
  }
  const double rho = spearman(d_values, e_values);
  return outcome(rho > kEnergyRankCorrelation, "Spearman correlation " + fmt(rho));
}

// ---- calibration -----------------------------------------------------------

PropertyOutcome subset_shortcut_matches_pipeline() {
  const Grid grid = spherical_grid(2, 220);
  const Kernel k = stable_kernel(2.0);
  const auto shortcut = mc_null_statistics(grid, 20, k, 2000, 201);
  const auto pipeline = pipeline_null_statistics(mvnormal_sampler(standard_normal_params(2)),
                                                 grid, 20, 200, k, 2000, 202);
  const double d = ks_two_sample(shortcut, pipeline);
  const double crit = ks_critical(0.01, 2000, 2000);
  return outcome(d < crit, "KS " + fmt(d) + " vs 1% band " + fmt(crit));
}

PropertyOutcome critical_values_monotone() {
  const Grid grid = rectangular_grid(2, 250);
  const double alphas[] = {0.01, 0.05, 0.1, 0.5};
  const auto entries = mc_critical_values(grid, 50, 200, stable_kernel(1.0), alphas, 2000, 203);
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].value > entries[i - 1].value) return outcome(false, "not monotone in alpha");
  }
  for (const auto& e : entries) {
    if (!(e.value > 0.0)) return outcome(false, "non-positive critical value");
  }
  return outcome(true, "c(0.01) >= c(0.05) >= c(0.1) >= c(0.5) > 0");
}

PropertyOutcome covariance_positive_semidefinite() {
  AsymptoticConfig config;
  config.reference_points = 600;
  config.cells = 400;
  for (const auto kind : {GridKind::Rectangular, GridKind::Spherical}) {
    const LimitingProcess process(kind, 2, config);
    if (process.min_eigenvalue() < kEigenFloor * process.max_eigenvalue()) {
      return outcome(false, "eigenvalue below the floor");
    }
    const Matrix cov = process.covariance();
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() != 0.0) {
      return outcome(false, "covariance not symmetric");
    }
    // Diagonal against a direct variance computation.
    const Points ref = make_grid(kind, 2, config.reference_points).points;
    for (Eigen::Index i = 0; i < cov.rows(); i += 37) {
      double s = 0.0;
      double s2 = 0.0;
      for (Eigen::Index l = 0; l < ref.rows(); ++l) {
        const double phase = process.nodes().row(i).dot(ref.row(l));
        const double v = std::cos(phase) + std::sin(phase);
        s += v;
        s2 += v * v;
      }
      const double mean = s / static_cast<double>(ref.rows());
      const double var = s2 / static_cast<double>(ref.rows()) - mean * mean;
      if (std::abs(var - cov(i, i)) > 1e-10) return outcome(false, "diagonal mismatch");
    }
  }
  return outcome(true, "symmetric, eigenvalues above -1e-8 * max, diagonal = direct variance");
}

PropertyOutcome asymptotic_close_to_finite_sample() {
  AsymptoticConfig config;
  const Kernel k = stable_kernel(2.0);
  const double limit = asymptotic_critical_value(config, k, GridKind::Spherical, 2, 0.05, 204).value;
  double worst = 0.0;
  for (const std::size_t n : {50, 80}) {
    for (const std::size_t m : {200, 500}) {
      const double finite =
          mc_critical_value(spherical_grid(2, n + m), n, m, k, 0.05, 2000, 205).value;
      worst = std::max(worst, std::abs(limit - finite));
    }
  }
  return outcome(worst <= kAsymptoticGap, "c_alpha " + fmt(limit) + ", max gap " + fmt(worst));
}

// ---- hypotests -------------------------------------------------------------

PropertyOutcome simple_level_distribution_free() {
  const Grid grid = spherical_grid(2, 250);
  const Kernel kernels[] = {stable_kernel(2.0)};
  const double crit[] = {mc_critical_value(grid, 50, 200, kernels[0], 0.05, 10000, 301).value};
  const Sampler normal = mvnormal_sampler(standard_normal_params(2));
  const Sampler uniform = uniform_box_sampler(0.0, 1.0, 2);
  const double level_normal = simple_rejection_rates(normal, normal, 50, 200, GridKind::Spherical,
                                                     2, kernels, crit, 1000, 302)[0];
  const double level_uniform = simple_rejection_rates(uniform, uniform, 50, 200,
                                                      GridKind::Spherical, 2, kernels, crit,
                                                      1000, 303)[0];
  const bool pass = std::abs(level_normal - 0.05) <= kLevelBand &&
                    std::abs(level_uniform - 0.05) <= kLevelBand;
  return outcome(pass, "levels " + fmt(level_normal) + " (normal), " + fmt(level_uniform) +
                           " (uniform)");
}

PropertyOutcome composite_affine_level() {
  CompositeTestSpec spec;
  spec.family = make_normal_family();
  spec.n = 50;
  spec.m = 200;
  spec.reference_mode = ReferenceMode::GridPoints;
  const double standard =
      warp_speed_study(mvnormal_sampler(standard_normal_params(2)), spec, 1000, 304).rejection_rate;
  const double shifted =
      warp_speed_study(mvnormal_sampler(shifted_normal_params()), spec, 1000, 304).rejection_rate;
  return outcome(std::abs(standard - shifted) <= kAffineLevelBand,
                 "levels " + fmt(standard) + " (N(0,I)), " + fmt(shifted) + " (N(1,S21))");
}

PropertyOutcome p_value_uniformity() {
  SimpleTestSpec spec;
  spec.null_sampler = mvnormal_sampler(standard_normal_params(2));
  spec.m = 100;
  spec.calibration = OnTheFlyCalibration{1000};
  std::vector<double> p_values;
  for (std::uint64_t i = 0; i < 500; ++i) {
    Engine engine = make_engine(305, Stream::kGeneric, i);
    const Points data = spec.null_sampler(20, engine);
    p_values.push_back(*run_simple_test(data, spec, 1000 + i).p_value);
  }
  const double d = ks_one_sample(p_values, [](double x) { return std::clamp(x, 0.0, 1.0); });
  const double crit = ks_critical(0.05, 500);
  return outcome(d < crit, "KS " + fmt(d) + " vs 5% band " + fmt(crit));
}

// ---- distributions ---------------------------------------------------------

PropertyOutcome chisq_round_trip() {
  double worst = 0.0;
  for (const double dof : {1.0, 2.0, 3.0, 5.0, 10.0}) {
    for (double u = 0.001; u <= 0.999 + 1e-12; u += 0.0996) {
      worst = std::max(worst, std::abs(chisq_cdf_by_quadrature(chisq_quantile(u, dof), dof) - u));
    }
    const double u = 0.999;
    worst = std::max(worst, std::abs(chisq_cdf_by_quadrature(chisq_quantile(u, dof), dof) - u));
  }
  return outcome(worst <= kChisqRoundTrip, "max |H(H^{-1}(u)) - u| = " + fmt(worst));
}

PropertyOutcome sampler_marginals() {
  // Six margins are tested, each at a Bonferroni share of the level.
  const std::size_t count = 10000;
  const double crit = ks_critical(kFamilywiseAlpha / 6.0, count);
  double worst = 0.0;
  auto column = [](const Points& x, int k) {
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = x(i, k);
    return out;
  };
  const auto shifted = shifted_normal_params();
  const Points normal = sample_mvnormal(shifted, count, 401);
  for (int k = 0; k < 2; ++k) {
    const double mu = shifted.mean(k);
    const double sd = std::sqrt(shifted.covariance(k, k));
    worst = std::max(worst, ks_one_sample(column(normal, k), [&](double x) {
                       return 0.5 * std::erfc(-(x - mu) / (sd * std::sqrt(2.0)));
                     }));
  }
  const Points uniform = sample_uniform_box(-1.0, 3.0, 2, count, 402);
  for (int k = 0; k < 2; ++k) {
    worst = std::max(worst, ks_one_sample(column(uniform, k), [](double x) {
                       return std::clamp((x + 1.0) / 4.0, 0.0, 1.0);
                     }));
  }
  MvTParams t{Vector::Zero(2), shifted.covariance, 3.0};
  const Points tdraws = sample_mvt(t, count, 403);
  const boost::math::students_t_distribution<double> student(3.0);
  for (int k = 0; k < 2; ++k) {
    const double scale = std::sqrt(t.scatter(k, k));
    worst = std::max(worst, ks_one_sample(column(tdraws, k), [&](double x) {
                       return boost::math::cdf(student, x / scale);
                     }));
  }
  return outcome(worst < crit,
                 "max KS " + fmt(worst) + " vs familywise 5% band " + fmt(crit));
}

}  // namespace

std::vector<PropertyCheck> property_checks() {
  return {
      {"lowdisc", "grid determinism", grid_determinism},
      {"lowdisc", "spherical radius uniformity", spherical_radius_uniformity},
      {"lowdisc", "rectangular marginal uniformity", rectangular_marginal_uniformity},
      {"lowdisc", "grid support and distinctness", grid_support_and_distinctness},
      {"transport", "small-instance optimality", assignment_small_optimality},
      {"transport", "cyclical monotonicity", cyclical_monotonicity},
      {"transport", "scale equivariance", scale_equivariance},
      {"kernels", "kernel bounds and symmetry", kernel_bounds},
      {"kernels", "nonnegativity and block symmetry", statistic_nonnegative_and_symmetric},
      {"kernels", "within-block permutation invariance", statistic_permutation_invariance},
      {"kernels", "small-scale energy agreement", small_scale_energy_agreement},
      {"calibration", "subset shortcut matches pipeline", subset_shortcut_matches_pipeline},
      {"calibration", "critical values monotone in alpha", critical_values_monotone},
      {"calibration", "covariance positive semidefinite", covariance_positive_semidefinite},
      {"calibration", "asymptotic close to finite-sample", asymptotic_close_to_finite_sample},
      {"hypotests", "simple level distribution-free", simple_level_distribution_free},
      {"hypotests", "composite level under affine change", composite_affine_level},
      {"hypotests", "p-value uniformity", p_value_uniformity},
      {"distributions", "chi-square quantile round trip", chisq_round_trip},
      {"distributions", "sampler marginals", sampler_marginals},
  };
}

}  // namespace otgof::testing
