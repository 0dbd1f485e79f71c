// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace otgof {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Point sets are stored one observation per row.
using Points = RowMatrix;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace otgof
