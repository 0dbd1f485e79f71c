// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace otgof {

/// Upper bound on worker threads used by replication loops; 0 selects the
/// number of available cores. Results never depend on this value.
void set_max_threads(int threads);
int max_threads();

/// Runs body(i) for i in [0, count), possibly concurrently. The first
/// exception thrown by any iteration is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace otgof
