// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace otgof::testing {

double digit_reversal(std::uint64_t index, unsigned base) {
  std::vector<unsigned> digits;
  for (std::uint64_t i = index; i > 0; i /= base) digits.push_back(static_cast<unsigned>(i % base));
  // Mirror the digits across the radix point, most significant last.
  double value = 0.0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) value = (value + *it) / base;
  return value;
}

BruteForceAssignment brute_force_assignment(const RowMatrix& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  BruteForceAssignment best{std::numeric_limits<double>::infinity(), perm};
  do {
    const double c = permutation_cost(cost, perm);
    if (c < best.cost) best = {c, perm};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double permutation_cost(const RowMatrix& cost, const std::vector<std::size_t>& perm) {
  double total = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    total += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
  }
  return total;
}

double gaussian_weight_quadrature(const Points& a_block, const Points& b_block, double a,
                                  int nodes) {
  const int p = static_cast<int>(a_block.cols());
  const double half = 8.0 * a;
  const double h = 2.0 * half / nodes;
  const double pi = std::acos(-1.0);
  const double n = static_cast<double>(a_block.rows());
  const double m = static_cast<double>(b_block.rows());
  std::vector<int> idx(static_cast<std::size_t>(p), 0);
  std::vector<double> t(static_cast<std::size_t>(p));
  double total = 0.0;
  while (true) {
    double r2 = 0.0;
    for (int k = 0; k < p; ++k) {
      t[static_cast<std::size_t>(k)] = -half + (idx[static_cast<std::size_t>(k)] + 0.5) * h;
      r2 += t[static_cast<std::size_t>(k)] * t[static_cast<std::size_t>(k)];
    }
    // Density of N(0, 2 a^2 I).
    const double w = std::exp(-r2 / (4.0 * a * a)) / std::pow(4.0 * pi * a * a, 0.5 * p);
    std::complex<double> phi_a = 0.0;
    std::complex<double> phi_b = 0.0;
    for (Eigen::Index j = 0; j < a_block.rows(); ++j) {
      double s = 0.0;
      for (int k = 0; k < p; ++k) s += t[static_cast<std::size_t>(k)] * a_block(j, k);
      phi_a += std::polar(1.0, s);
    }
    for (Eigen::Index j = 0; j < b_block.rows(); ++j) {
      double s = 0.0;
      for (int k = 0; k < p; ++k) s += t[static_cast<std::size_t>(k)] * b_block(j, k);
      phi_b += std::polar(1.0, s);
    }
    total += std::norm(phi_a / n - phi_b / m) * w;
    int k = 0;
    while (k < p && ++idx[static_cast<std::size_t>(k)] == nodes) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == p) break;
  }
  return n * m / (n + m) * total * std::pow(h, p);
}

double naive_energy(const Points& a_block, const Points& b_block, double gamma) {
  auto dist = [gamma](const auto& x, const auto& y) {
    return std::pow((x - y).norm(), gamma);
  };
  const double n = static_cast<double>(a_block.rows());
  const double m = static_cast<double>(b_block.rows());
  double cross = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (Eigen::Index j = b_block.rows() - 1; j >= 0; --j) {
    for (Eigen::Index i = a_block.rows() - 1; i >= 0; --i) cross += dist(a_block.row(i), b_block.row(j));
  }
  for (Eigen::Index j = a_block.rows() - 1; j >= 0; --j) {
    for (Eigen::Index i = a_block.rows() - 1; i >= 0; --i) aa += dist(a_block.row(i), a_block.row(j));
  }
  for (Eigen::Index j = b_block.rows() - 1; j >= 0; --j) {
    for (Eigen::Index i = b_block.rows() - 1; i >= 0; --i) bb += dist(b_block.row(i), b_block.row(j));
  }
  return -n / (m * (n + m)) * bb - m / (n * (n + m)) * aa + 2.0 / (n + m) * cross;
}

double ks_two_sample(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical(double alpha, std::size_t n1, std::size_t n2) {
  // Invert the Kolmogorov tail by bisection.
  double lo = 0.1;
  double hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_tail(mid) > alpha ? lo : hi) = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  const double effective = n2 == 0 ? static_cast<double>(n1)
                                   : static_cast<double>(n1) * n2 / static_cast<double>(n1 + n2);
  return lambda / std::sqrt(effective);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto rank = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
    return r;
  };
  const auto rx = rank(x);
  const auto ry = rank(y);
  const double mean = 0.5 * (static_cast<double>(x.size()) - 1.0);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  return sxy / std::sqrt(sxx * syy);
}

double chisq_cdf_by_quadrature(double x, double dof) {
  if (x <= 0.0) return 0.0;
  const double k = 0.5 * dof;
  const double log_norm = -k * std::log(2.0) - std::lgamma(k);
  // Substituting x = s^2 removes the endpoint singularity for dof < 2.
  // Density in s is 2 s^{dof-1} exp(-s^2/2) / (2^k Gamma(k)).
  auto density = [&](double s) {
    if (s <= 0.0) return dof == 1.0 ? 2.0 * std::exp(log_norm) : 0.0;
    return 2.0 * std::exp(log_norm + (dof - 1.0) * std::log(s) - 0.5 * s * s);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(density, 0.0, std::sqrt(x), 1e-15);
}

}  // namespace otgof::testing
