// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "otgof/lowdisc.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/special_functions/beta.hpp>

#include "otgof/csv.hpp"
#include "otgof/error.hpp"

namespace otgof {
namespace {

constexpr std::array<unsigned, kMaxHaltonDimension> make_prime_table() {
  std::array<unsigned, kMaxHaltonDimension> primes{};
  int found = 0;
  for (unsigned candidate = 2; found < kMaxHaltonDimension; ++candidate) {
    bool prime = true;
    for (int k = 0; k < found && primes[k] * primes[k] <= candidate; ++k) {
      if (candidate % primes[k] == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes[found++] = candidate;
  }
  return primes;
}

constexpr auto kPrimes = make_prime_table();

void check_dimension(int dimension) {
  if (dimension < 1 || dimension > kMaxHaltonDimension) {
    throw ConfigError("dimension " + std::to_string(dimension) +
                      " outside the supported range [1, " +
                      std::to_string(kMaxHaltonDimension) + "]");
  }
}

// Fills out[0..p-1] with the unit vector for angles u[0..p-2].
void sphere_map_into(std::span<const double> u, std::span<double> out) {
  const std::size_t p = out.size();
  if (p == 2) {
    const double angle = 2.0 * std::numbers::pi * u[0];
    out[0] = std::cos(angle);
    out[1] = std::sin(angle);
    return;
  }
  // Polar angle theta of the last coordinate has density ~ sin^{p-2}(theta)
  // on [0, pi]; s = sin^2(theta/2) = (1 - cos theta)/2 is Beta((p-1)/2, (p-1)/2).
  double z = 0.0;
  if (p == 3) {
    z = 1.0 - 2.0 * u[0];
  } else {
    const double shape = 0.5 * static_cast<double>(p - 1);
    double s = u[0];
    if (s > 0.0 && s < 1.0) s = boost::math::ibeta_inv(shape, shape, s);
    z = 1.0 - 2.0 * s;
  }
  const double radius = std::sqrt(std::max(0.0, 1.0 - z * z));
  sphere_map_into(u.subspan(1), out.first(p - 1));
  for (std::size_t k = 0; k + 1 < p; ++k) out[k] *= radius;
  out[p - 1] = z;
}

}  // namespace

std::span<const unsigned> halton_bases(int count) {
  check_dimension(count);
  return std::span<const unsigned>(kPrimes.data(), static_cast<std::size_t>(count));
}

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inverse_base = 1.0 / static_cast<double>(base);
  double factor = inverse_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inverse_base;
  }
  return result;
}

HaltonSequence::HaltonSequence(int dimension, std::uint64_t start)
    : dimension_(dimension), start_(start) {
  check_dimension(dimension);
  if (start == 0) throw ConfigError("Halton start index must be >= 1");
  bases_ = halton_bases(dimension);
}

void HaltonSequence::point(std::uint64_t offset, std::span<double> out) const {
  for (int k = 0; k < dimension_; ++k) {
    out[static_cast<std::size_t>(k)] = radical_inverse(start_ + offset, bases_[k]);
  }
}

Points HaltonSequence::points(std::size_t count) const {
  Points result(static_cast<Eigen::Index>(count), dimension_);
  for (std::size_t i = 0; i < count; ++i) {
    point(i, std::span<double>(result.row(static_cast<Eigen::Index>(i)).data(),
                               static_cast<std::size_t>(dimension_)));
  }
  return result;
}

std::string_view to_string(GridKind kind) {
  return kind == GridKind::Rectangular ? "rectangular" : "spherical";
}

GridKind parse_grid_kind(std::string_view text) {
  if (text == "rectangular" || text == "R" || text == "r") return GridKind::Rectangular;
  if (text == "spherical" || text == "S" || text == "s") return GridKind::Spherical;
  throw ConfigError("unknown grid kind '" + std::string(text) + "'");
}

Grid rectangular_grid(int dimension, std::size_t size) {
  if (size == 0) throw ConfigError("grid size must be >= 1");
  return Grid{GridKind::Rectangular, HaltonSequence(dimension).points(size)};
}

Vector sphere_map(std::span<const double> u) {
  if (u.empty()) throw ConfigError("sphere map needs dimension >= 2");
  for (const double x : u) {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("sphere map argument outside [0,1]");
  }
  Vector out(static_cast<Eigen::Index>(u.size() + 1));
  sphere_map_into(u, std::span<double>(out.data(), u.size() + 1));
  return out;
}

Grid spherical_grid(int dimension, std::size_t size) {
  if (dimension < 2) throw ConfigError("spherical grid needs dimension >= 2");
  if (size == 0) throw ConfigError("grid size must be >= 1");
  const HaltonSequence halton(dimension);
  const auto p = static_cast<std::size_t>(dimension);
  Points points(static_cast<Eigen::Index>(size), dimension);
  std::vector<double> x(p);
  for (std::size_t i = 0; i < size; ++i) {
    halton.point(i, x);
    auto row = std::span<double>(points.row(static_cast<Eigen::Index>(i)).data(), p);
    sphere_map_into(std::span<const double>(x).subspan(1), row);
    for (double& c : row) c *= x[0];
  }
  return Grid{GridKind::Spherical, std::move(points)};
}

Grid make_grid(GridKind kind, int dimension, std::size_t size) {
  return kind == GridKind::Rectangular ? rectangular_grid(dimension, size)
                                       : spherical_grid(dimension, size);
}

void write_grid_csv(std::ostream& out, const Grid& grid) {
  write_points_csv(out, grid.points);
}

}  // namespace otgof
