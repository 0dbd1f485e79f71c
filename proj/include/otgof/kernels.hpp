// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

// Characteristic-function kernels and the two-sample rank statistics.
//
// For ranks R_1..R_n (data) and R0_1..R0_m (reference) the statistic is the
// weighted L2 distance between the two empirical characteristic functions,
// scaled by nm/(n+m). Writing C for the characteristic function of the
// weight density w, it reduces to
//
//   D = m/(n(n+m)) sum_{j,k} C(R_j - R_k) + n/(m(n+m)) sum_{j,k} C(R0_j - R0_k)
//       - 2/(n+m) sum_{j,k} C(R_j - R0_k),
//
// so w itself is never needed to evaluate D.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "otgof/types.hpp"

namespace otgof {

enum class KernelFamily {
  /// C(x) = exp(-||a x||^gamma), 0 < gamma <= 2 (spherical stable weight).
  Stable,
  /// C(x) = (1 + ||a x||^2)^{-gamma}, gamma > 0 (generalized Laplace weight).
  Laplace,
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view text);

struct Kernel {
  KernelFamily family = KernelFamily::Stable;
  double scale = 1.0;
  double exponent = 2.0;

  /// Throws ConfigError unless scale > 0 and the exponent is admissible for
  /// the family.
  void validate() const;

  /// C as a function of the squared norm of its argument.
  double eval_squared_norm(double squared_norm) const;

  friend bool operator==(const Kernel&, const Kernel&) = default;
};

Kernel stable_kernel(double scale, double exponent = 2.0);
Kernel laplace_kernel(double scale, double exponent);

double kernel_eval(const Kernel& kernel, std::span<const double> x);

/// Density w of the weight measure whose characteristic function is the
/// kernel, at radius ||t|| in dimension p. Needed only where w must be
/// materialized (the limiting-process integral).
///   Stable, gamma = 2: Gaussian with covariance 2 a^2 I.
///   Laplace:          Gaussian scale mixture with Gamma(gamma, 1) mixing;
///                     closed form through the modified Bessel function K.
///   Stable, gamma < 2: radial Fourier inversion by numerical quadrature.
double weight_density(const Kernel& kernel, double radius, int dimension);

struct StatisticValue {
  double value = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  Kernel kernel;
};

/// Sum over all ordered pairs (j, k) of C(a_j - b_k).
double kernel_cross_sum(const Kernel& kernel, const Points& a, const Points& b);
/// Sum over all ordered pairs (j, k) of C(a_j - a_k), diagonal included.
double kernel_self_sum(const Kernel& kernel, const Points& a);

/// The characteristic-function statistic. Throws DimensionError on empty
/// blocks or mismatched dimension.
StatisticValue statistic_d(const Points& data_ranks, const Points& reference_ranks,
                           const Kernel& kernel);

/// Rank energy statistic with distance exponent gamma > 0:
///   2/(n+m) sum ||R_j - R0_k||^gamma - m/(n(n+m)) sum ||R_j - R_k||^gamma
///   - n/(m(n+m)) sum ||R0_j - R0_k||^gamma.
double statistic_energy(const Points& data_ranks, const Points& reference_ranks,
                        double gamma);

}  // namespace otgof
