// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

// Discrete optimal transport between a point cloud and a reference grid of
// equal size under squared Euclidean cost. The optimal bijection defines the
// multivariate rank of every point: the grid point it is sent to.

#pragma once

#include <cstddef>
#include <vector>

#include "otgof/lowdisc.hpp"
#include "otgof/types.hpp"

namespace otgof {

/// An optimal bijection between pooled points and grid points.
struct RankAssignment {
  /// grid_index[i] is the grid point assigned to point i.
  std::vector<std::size_t> grid_index;
  /// Sum over i of ||point_i - grid_{grid_index[i]}||^2, accumulated in
  /// increasing i.
  double total_cost = 0.0;
};

/// Dense linear assignment by the Jonker-Volgenant shortest augmenting path
/// method. `cost` is square, row i = worker, column j = task. Returns the
/// column assigned to each row. Among columns with equal reduced cost the
/// lowest column index is preferred, so the result is a deterministic
/// function of the matrix.
std::vector<std::size_t> solve_linear_assignment(const RowMatrix& cost);

/// Squared Euclidean distance matrix between the rows of `points` and `grid`.
RowMatrix squared_distance_matrix(const Points& points, const Points& grid);

/// Sum of ||points_i - grid_{assignment[i]}||^2 in increasing i.
double assignment_cost(const Points& points, const Points& grid,
                       const std::vector<std::size_t>& assignment);

/// Globally optimal bijection minimizing the total squared distance.
/// Throws DimensionError on mismatched cardinality or dimension and
/// NonFiniteError on NaN/inf input.
RankAssignment solve_assignment(const Points& points, const Points& grid);
RankAssignment solve_assignment(const Points& points, const Grid& grid);

/// Data block followed by a reference block. Rows 0..n-1 of the pooled matrix
/// are the data, rows n..N-1 the reference sample.
class PooledSample {
 public:
  /// Throws DimensionError on empty blocks or mismatched columns and
  /// NonFiniteError on non-finite rows.
  PooledSample(const Points& data, const Points& reference);

  std::size_t data_size() const { return n_; }
  std::size_t reference_size() const { return m_; }
  std::size_t size() const { return n_ + m_; }
  int dimension() const { return static_cast<int>(pooled_.cols()); }
  const Points& pooled() const { return pooled_; }

 private:
  std::size_t n_;
  std::size_t m_;
  Points pooled_;
};

struct RankSplit {
  Points data_ranks;       // n x p
  Points reference_ranks;  // m x p
  RankAssignment assignment;
};

/// Ranks of both blocks with respect to `grid` (grid.size() == n + m).
RankSplit ranks(const PooledSample& pooled, const Grid& grid);

}  // namespace otgof
