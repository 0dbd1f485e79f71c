// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

// Low-discrepancy point sets and the two reference grids used for
// optimal-transport ranks:
//
//   * rectangular grid: the first N Halton points in (0,1)^p, approximating
//     the uniform law on the unit cube;
//   * spherical grid:   g_i = x_{i,1} * tau(x_{i,2}, ..., x_{i,p}) where x_i is
//     the i-th Halton point and tau pushes the uniform law on [0,1]^{p-1} to
//     the uniform law on the unit sphere. The radius x_{i,1} is uniform, so the
//     grid approximates the spherically uniform law on the unit ball.
//
// Halton points start at index 1, so no grid point sits at the origin or on
// the boundary of the cube. Points are never scrambled: a (kind, p, N) triple
// always yields the same grid.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otgof/types.hpp"

namespace otgof {

/// Largest dimension for which Halton bases are tabulated.
inline constexpr int kMaxHaltonDimension = 64;

/// Returns the first `count` primes; count <= kMaxHaltonDimension.
std::span<const unsigned> halton_bases(int count);

/// Mirrors the base-`base` digits of `index` across the radix point:
/// sum_k d_k base^{-k-1}. Requires index >= 1 and base >= 2.
double radical_inverse(std::uint64_t index, unsigned base);

class HaltonSequence {
 public:
  /// Throws ConfigError if dimension is outside [1, kMaxHaltonDimension] or
  /// start is 0.
  explicit HaltonSequence(int dimension, std::uint64_t start = 1);

  int dimension() const { return dimension_; }
  std::uint64_t start() const { return start_; }

  /// Writes the point with sequence offset `offset` (index start + offset).
  void point(std::uint64_t offset, std::span<double> out) const;

  /// The first `count` points, one per row.
  Points points(std::size_t count) const;

 private:
  int dimension_;
  std::uint64_t start_;
  std::span<const unsigned> bases_;
};

enum class GridKind { Rectangular, Spherical };

std::string_view to_string(GridKind kind);
/// Accepts "rectangular"/"spherical" (and the short forms "R"/"S").
GridKind parse_grid_kind(std::string_view text);

/// An ordered set of reference points in the support of the reference measure.
struct Grid {
  GridKind kind = GridKind::Rectangular;
  Points points;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  int dimension() const { return static_cast<int>(points.cols()); }
};

Grid rectangular_grid(int dimension, std::size_t size);

/// Maps u in [0,1]^{p-1} to the unit sphere in R^p (p = u.size() + 1 >= 2).
/// Uniform u maps to the uniform law on the sphere.
///   p = 2: (cos 2 pi u, sin 2 pi u)
///   p = 3: (r cos 2 pi u2, r sin 2 pi u2, z) with z = 1 - 2 u1, r = sqrt(1 - z^2)
///   p > 3: recursive; the last coordinate is cos(theta) where theta has
///          density proportional to sin^{p-2}, inverted through the
///          Beta((p-1)/2, (p-1)/2) law of sin^2(theta / 2).
Vector sphere_map(std::span<const double> u);

/// Throws ConfigError for dimension < 2.
Grid spherical_grid(int dimension, std::size_t size);

Grid make_grid(GridKind kind, int dimension, std::size_t size);

/// One point per row in the points CSV format (see csv.hpp).
void write_grid_csv(std::ostream& out, const Grid& grid);

}  // namespace otgof
