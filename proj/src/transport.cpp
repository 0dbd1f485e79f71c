// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "otgof/transport.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "otgof/error.hpp"

namespace otgof {
namespace {

constexpr std::ptrdiff_t kUnassigned = -1;

void check_finite(const Points& points, const char* what) {
  if (!points.allFinite()) throw NonFiniteError(std::string(what) + " contains non-finite values");
}

}  // namespace

// Jonker & Volgenant (1987): column reduction, reduction transfer, two rounds
// of augmenting row reduction, then Dijkstra-style shortest augmenting paths
// for the rows that are still free. Only column duals v are stored; the row
// dual of an assigned row is its (minimal) reduced cost.
std::vector<std::size_t> solve_linear_assignment(const RowMatrix& cost) {
  if (cost.rows() != cost.cols()) throw DimensionError("assignment cost matrix must be square");
  const auto dim = static_cast<std::ptrdiff_t>(cost.rows());
  if (dim == 0) return {};
  if (!cost.allFinite()) throw NonFiniteError("assignment cost matrix contains non-finite values");

  const double* c = cost.data();
  const auto at = [c, dim](std::ptrdiff_t i, std::ptrdiff_t j) { return c[i * dim + j]; };

  std::vector<double> v(static_cast<std::size_t>(dim));
  std::vector<std::ptrdiff_t> row_to_col(static_cast<std::size_t>(dim), kUnassigned);
  std::vector<std::ptrdiff_t> col_to_row(static_cast<std::size_t>(dim), kUnassigned);
  std::vector<int> matches(static_cast<std::size_t>(dim), 0);

  // Column reduction, last column first.
  for (std::ptrdiff_t j = dim - 1; j >= 0; --j) {
    double min = at(0, j);
    std::ptrdiff_t imin = 0;
    for (std::ptrdiff_t i = 1; i < dim; ++i) {
      if (at(i, j) < min) {
        min = at(i, j);
        imin = i;
      }
    }
    v[j] = min;
    if (++matches[imin] == 1) {
      row_to_col[imin] = j;
      col_to_row[j] = imin;
    } else if (v[j] < v[row_to_col[imin]]) {
      const auto j1 = row_to_col[imin];
      row_to_col[imin] = j;
      col_to_row[j] = imin;
      col_to_row[j1] = kUnassigned;
    }
  }

  // Reduction transfer from rows assigned exactly once.
  std::vector<std::ptrdiff_t> free_rows;
  free_rows.reserve(static_cast<std::size_t>(dim));
  for (std::ptrdiff_t i = 0; i < dim; ++i) {
    if (matches[i] == 0) {
      free_rows.push_back(i);
    } else if (matches[i] == 1) {
      const auto j1 = row_to_col[i];
      double min = std::numeric_limits<double>::infinity();
      for (std::ptrdiff_t j = 0; j < dim; ++j) {
        if (j != j1) min = std::min(min, at(i, j) - v[j]);
      }
      if (std::isfinite(min)) v[j1] -= min;
    }
  }

  // Augmenting row reduction. A step budget keeps floating-point near-ties
  // from stalling the loop; leftover rows go to the augmentation phase.
  for (int pass = 0; pass < 2 && !free_rows.empty(); ++pass) {
    std::vector<std::ptrdiff_t> still_free;
    std::size_t k = 0;
    std::size_t steps = 0;
    const std::size_t step_budget = 8 * static_cast<std::size_t>(dim) + 64;
    while (k < free_rows.size()) {
      if (++steps > step_budget) {
        still_free.insert(still_free.end(), free_rows.begin() + static_cast<std::ptrdiff_t>(k),
                          free_rows.end());
        break;
      }
      const auto i = free_rows[k++];
      double umin = at(i, 0) - v[0];
      std::ptrdiff_t j1 = 0;
      std::ptrdiff_t j2 = kUnassigned;
      double usubmin = std::numeric_limits<double>::infinity();
      for (std::ptrdiff_t j = 1; j < dim; ++j) {
        const double h = at(i, j) - v[j];
        if (h < usubmin) {
          if (h >= umin) {
            usubmin = h;
            j2 = j;
          } else {
            usubmin = umin;
            umin = h;
            j2 = j1;
            j1 = j;
          }
        }
      }
      auto i0 = col_to_row[j1];
      const bool strict = umin < usubmin && std::isfinite(usubmin);
      if (strict) {
        v[j1] -= usubmin - umin;
      } else if (i0 != kUnassigned && j2 != kUnassigned) {
        j1 = j2;
        i0 = col_to_row[j2];
      }
      if (i0 != kUnassigned) row_to_col[i0] = kUnassigned;
      row_to_col[i] = j1;
      col_to_row[j1] = i;
      if (i0 != kUnassigned) {
        if (strict) {
          free_rows[--k] = i0;
        } else {
          still_free.push_back(i0);
        }
      }
    }
    free_rows = std::move(still_free);
  }

  // Shortest augmenting paths. Unscanned columns live in compact parallel
  // arrays (index, distance, dual, predecessor) so that the relaxation pass,
  // which also locates the next column to scan, runs without branches.
  const auto udim = static_cast<std::size_t>(dim);
  std::vector<std::ptrdiff_t> col(udim);
  std::vector<double> dist(udim);
  std::vector<double> dual(udim);
  std::vector<std::ptrdiff_t> pred(udim);
  std::vector<std::ptrdiff_t> ready;
  std::vector<double> ready_dist;
  std::vector<std::ptrdiff_t> path_pred(udim);
  ready.reserve(udim);
  ready_dist.reserve(udim);
  for (const auto start : free_rows) {
    const double* start_row = c + start * dim;
    std::size_t best = 0;
    for (std::size_t k = 0; k < udim; ++k) {
      col[k] = static_cast<std::ptrdiff_t>(k);
      dual[k] = v[k];
      dist[k] = start_row[k] - v[k];
      pred[k] = start;
      // Smaller distance wins; ties go to the lower column index.
      best = dist[k] < dist[best] ? k : best;
    }
    std::size_t count = udim;
    ready.clear();
    ready_dist.clear();
    std::ptrdiff_t end_of_path = kUnassigned;
    double dmin = 0.0;
    while (true) {
      const auto jmin = col[best];
      dmin = dist[best];
      path_pred[jmin] = pred[best];
      --count;
      col[best] = col[count];
      dist[best] = dist[count];
      dual[best] = dual[count];
      pred[best] = pred[count];
      if (col_to_row[jmin] == kUnassigned) {
        end_of_path = jmin;
        break;
      }
      ready.push_back(jmin);
      ready_dist.push_back(dmin);
      const auto i = col_to_row[jmin];
      const double* row = c + i * dim;
      const double h = row[jmin] - v[jmin] - dmin;
      best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      std::ptrdiff_t best_col = dim;
      for (std::size_t k = 0; k < count; ++k) {
        const double candidate = row[col[k]] - dual[k] - h;
        const bool improve = candidate < dist[k];
        dist[k] = improve ? candidate : dist[k];
        pred[k] = improve ? i : pred[k];
        const bool better = dist[k] < best_dist || (dist[k] == best_dist && col[k] < best_col);
        best = better ? k : best;
        best_dist = better ? dist[k] : best_dist;
        best_col = better ? col[k] : best_col;
      }
    }
    for (std::size_t k = 0; k < ready.size(); ++k) v[ready[k]] += ready_dist[k] - dmin;
    auto j = end_of_path;
    while (true) {
      const auto i = path_pred[j];
      col_to_row[j] = i;
      const auto previous = row_to_col[i];
      row_to_col[i] = j;
      if (i == start) break;
      j = previous;
    }
  }

  std::vector<std::size_t> assignment(static_cast<std::size_t>(dim));
  for (std::ptrdiff_t i = 0; i < dim; ++i) {
    if (row_to_col[i] == kUnassigned) throw NumericalError("assignment left a row unassigned");
    assignment[i] = static_cast<std::size_t>(row_to_col[i]);
  }
  return assignment;
}

RowMatrix squared_distance_matrix(const Points& points, const Points& grid) {
  const auto n = points.rows();
  const auto p = points.cols();
  RowMatrix cost(n, grid.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < grid.rows(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        const double d = points(i, k) - grid(j, k);
        s += d * d;
      }
      cost(i, j) = s;
    }
  }
  return cost;
}

double assignment_cost(const Points& points, const Points& grid,
                       const std::vector<std::size_t>& assignment) {
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
      const double d = points(static_cast<Eigen::Index>(i), k) -
                       grid(static_cast<Eigen::Index>(assignment[i]), k);
      s += d * d;
    }
    total += s;
  }
  return total;
}

RankAssignment solve_assignment(const Points& points, const Points& grid) {
  if (points.rows() != grid.rows()) {
    throw DimensionError("assignment needs equal cardinality: " + std::to_string(points.rows()) +
                         " points vs " + std::to_string(grid.rows()) + " grid points");
  }
  if (points.cols() != grid.cols()) {
    throw DimensionError("assignment needs equal dimension: " + std::to_string(points.cols()) +
                         " vs " + std::to_string(grid.cols()));
  }
  check_finite(points, "points");
  check_finite(grid, "grid");
  // Translating the points or scaling them by c > 0 changes the cost only by
  // row and column constants and a positive factor, so the optimal bijection
  // is the same. Matching the points' centre and spread to the grid's gives
  // the column reduction much better starting duals.
  const Eigen::RowVectorXd centre = points.colwise().mean();
  Points normalized = points.rowwise() - centre;
  const double spread = std::sqrt(normalized.rowwise().squaredNorm().mean());
  const double grid_spread =
      std::sqrt((grid.rowwise() - grid.colwise().mean()).rowwise().squaredNorm().mean());
  if (spread > 0.0 && grid_spread > 0.0) normalized *= grid_spread / spread;
  normalized.rowwise() += grid.colwise().mean();
  RankAssignment result;
  result.grid_index = solve_linear_assignment(squared_distance_matrix(normalized, grid));
  result.total_cost = assignment_cost(points, grid, result.grid_index);
  return result;
}

RankAssignment solve_assignment(const Points& points, const Grid& grid) {
  return solve_assignment(points, grid.points);
}

PooledSample::PooledSample(const Points& data, const Points& reference)
    : n_(static_cast<std::size_t>(data.rows())), m_(static_cast<std::size_t>(reference.rows())) {
  if (n_ == 0 || m_ == 0) throw DimensionError("pooled sample needs nonempty data and reference");
  if (data.cols() != reference.cols()) {
    throw DimensionError("data and reference differ in dimension");
  }
  check_finite(data, "data");
  check_finite(reference, "reference sample");
  pooled_.resize(data.rows() + reference.rows(), data.cols());
  pooled_.topRows(data.rows()) = data;
  pooled_.bottomRows(reference.rows()) = reference;
}

RankSplit ranks(const PooledSample& pooled, const Grid& grid) {
  if (grid.size() != pooled.size()) {
    throw DimensionError("grid has " + std::to_string(grid.size()) + " points, pooled sample " +
                         std::to_string(pooled.size()));
  }
  RankSplit split;
  split.assignment = solve_assignment(pooled.pooled(), grid);
  const auto n = static_cast<Eigen::Index>(pooled.data_size());
  const auto m = static_cast<Eigen::Index>(pooled.reference_size());
  split.data_ranks.resize(n, grid.dimension());
  split.reference_ranks.resize(m, grid.dimension());
  for (Eigen::Index i = 0; i < n + m; ++i) {
    const auto g = static_cast<Eigen::Index>(split.assignment.grid_index[static_cast<std::size_t>(i)]);
    if (i < n) {
      split.data_ranks.row(i) = grid.points.row(g);
    } else {
      split.reference_ranks.row(i - n) = grid.points.row(g);
    }
  }
  return split;
}

}  // namespace otgof
