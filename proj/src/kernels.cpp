// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "otgof/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "otgof/error.hpp"

namespace otgof {
namespace {

void check_blocks(const Points& a, const Points& b) {
  if (a.rows() == 0 || b.rows() == 0) throw DimensionError("empty rank block");
  if (a.cols() != b.cols()) {
    throw DimensionError("rank blocks differ in dimension: " + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.cols()));
  }
}

double squared_distance(const Points& a, Eigen::Index i, const Points& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double d = a(i, k) - b(j, k);
    s += d * d;
  }
  return s;
}

// Radial inverse Fourier transform of exp(-(a s)^gamma) in dimension p:
//   w(r) = (2 pi)^{-p/2} r^{1-p/2} int_0^inf C(s) J_{p/2-1}(r s) s^{p/2} ds.
// The oscillatory integral is summed over panels no longer than half a
// Bessel period, up to where C drops below 1e-17.
double stable_density_numeric(double a, double gamma, double r, int p) {
  const double half = 0.5 * p;
  const double order = half - 1.0;
  const double s_max = std::pow(39.0, 1.0 / gamma) / a;
  auto integrand = [&](double s, bool at_origin) {
    const double c = std::exp(-std::pow(a * s, gamma));
    if (at_origin) {
      // lim_{r->0} J_v(rs) / r^v = (s/2)^v / Gamma(v + 1).
      return c * std::pow(0.5 * s, order) / std::tgamma(order + 1.0) * std::pow(s, half);
    }
    return c * boost::math::cyl_bessel_j(order, r * s) * std::pow(s, half);
  };
  const bool at_origin = r == 0.0;
  double panel = s_max / 200.0;
  if (!at_origin) panel = std::min(panel, std::numbers::pi / r);
  // Resolve the cusp of C at the origin for small exponents.
  double total = 0.0;
  double lo = 0.0;
  double width = std::min(panel, 1e-3 / a);
  while (lo < s_max) {
    const double hi = std::min(lo + width, s_max);
    total += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double s) { return integrand(s, at_origin); }, lo, hi);
    lo = hi;
    width = std::min(panel, 2.0 * width);
  }
  const double prefactor = std::pow(2.0 * std::numbers::pi, -half);
  if (at_origin) return prefactor * total;
  return prefactor * std::pow(r, 1.0 - half) * total;
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Stable:
      return "stable";
    case KernelFamily::Laplace:
      return "laplace";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view text) {
  if (text == "stable") return KernelFamily::Stable;
  if (text == "laplace") return KernelFamily::Laplace;
  throw ConfigError("unknown kernel family '" + std::string(text) +
                    "' (expected stable or laplace)");
}

void Kernel::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("kernel scale must be positive and finite");
  }
  if (family == KernelFamily::Stable) {
    if (!(exponent > 0.0 && exponent <= 2.0)) {
      throw ConfigError("stable kernel exponent must lie in (0, 2]");
    }
  } else if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw ConfigError("laplace kernel exponent must be positive and finite");
  }
}

double Kernel::eval_squared_norm(double squared_norm) const {
  const double q = scale * scale * squared_norm;
  if (family == KernelFamily::Stable) {
    if (exponent == 2.0) return std::exp(-q);
    return std::exp(-std::pow(q, 0.5 * exponent));
  }
  return std::pow(1.0 + q, -exponent);
}

Kernel stable_kernel(double scale, double exponent) {
  Kernel k{KernelFamily::Stable, scale, exponent};
  k.validate();
  return k;
}

Kernel laplace_kernel(double scale, double exponent) {
  Kernel k{KernelFamily::Laplace, scale, exponent};
  k.validate();
  return k;
}

double kernel_eval(const Kernel& kernel, std::span<const double> x) {
  double q = 0.0;
  for (const double v : x) q += v * v;
  return kernel.eval_squared_norm(q);
}

double weight_density(const Kernel& kernel, double radius, int dimension) {
  kernel.validate();
  if (dimension < 1) throw ConfigError("dimension must be positive");
  if (radius < 0.0) throw ConfigError("radius must be nonnegative");
  const double a = kernel.scale;
  const double p = dimension;
  const double gauss_norm = std::pow(4.0 * std::numbers::pi * a * a, -0.5 * p);
  if (kernel.family == KernelFamily::Stable) {
    if (kernel.exponent == 2.0) return gauss_norm * std::exp(-radius * radius / (4.0 * a * a));
    return stable_density_numeric(a, kernel.exponent, radius, dimension);
  }
  // Gamma(gamma, 1) mixture of N(0, 2 a^2 s I):
  //   w(r) = (4 pi a^2)^{-p/2} 2/Gamma(gamma) (r/(2a))^nu K_nu(r/a),  nu = gamma - p/2.
  const double nu = kernel.exponent - 0.5 * p;
  if (radius == 0.0) {
    if (nu <= 0.0) return std::numeric_limits<double>::infinity();
    return gauss_norm * std::tgamma(nu) / std::tgamma(kernel.exponent);
  }
  const double x = radius / a;
  return gauss_norm * 2.0 / std::tgamma(kernel.exponent) * std::pow(0.5 * x, nu) *
         boost::math::cyl_bessel_k(nu, x);
}

double kernel_cross_sum(const Kernel& kernel, const Points& a, const Points& b) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      row += kernel.eval_squared_norm(squared_distance(a, i, b, j));
    }
    total += row;
  }
  return total;
}

double kernel_self_sum(const Kernel& kernel, const Points& a) {
  double off = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = i + 1; j < a.rows(); ++j) {
      row += kernel.eval_squared_norm(squared_distance(a, i, a, j));
    }
    off += row;
  }
  return static_cast<double>(a.rows()) * kernel.eval_squared_norm(0.0) + 2.0 * off;
}

StatisticValue statistic_d(const Points& data_ranks, const Points& reference_ranks,
                           const Kernel& kernel) {
  check_blocks(data_ranks, reference_ranks);
  kernel.validate();
  const double n = static_cast<double>(data_ranks.rows());
  const double m = static_cast<double>(reference_ranks.rows());
  const double saa = kernel_self_sum(kernel, data_ranks);
  const double sbb = kernel_self_sum(kernel, reference_ranks);
  const double sab = kernel_cross_sum(kernel, data_ranks, reference_ranks);
  StatisticValue out;
  out.value = m / (n * (n + m)) * saa + n / (m * (n + m)) * sbb - 2.0 / (n + m) * sab;
  out.n = static_cast<std::size_t>(data_ranks.rows());
  out.m = static_cast<std::size_t>(reference_ranks.rows());
  out.kernel = kernel;
  return out;
}

double statistic_energy(const Points& data_ranks, const Points& reference_ranks,
                        double gamma) {
  check_blocks(data_ranks, reference_ranks);
  if (!(gamma > 0.0)) throw ConfigError("energy exponent must be positive");
  auto power_sum = [gamma](const Points& x, const Points& y) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < y.rows(); ++j) {
        total += std::pow(squared_distance(x, i, y, j), 0.5 * gamma);
      }
    }
    return total;
  };
  const double n = static_cast<double>(data_ranks.rows());
  const double m = static_cast<double>(reference_ranks.rows());
  return 2.0 / (n + m) * power_sum(data_ranks, reference_ranks) -
         m / (n * (n + m)) * power_sum(data_ranks, data_ranks) -
         n / (m * (n + m)) * power_sum(reference_ranks, reference_ranks);
}

}  // namespace otgof
