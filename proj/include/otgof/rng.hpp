// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace otgof {

using Engine = std::mt19937_64;

/// Stream identifiers. Every random draw in the library comes from an engine
/// keyed by (seed, stream, index), so a replication's randomness does not
/// depend on which thread runs it or in which order.
enum class Stream : std::uint64_t {
  kGeneric = 0,
  kNullSubset = 1,
  kPipelineData = 2,
  kPipelineReference = 3,
  kReference = 4,
  kCalibration = 5,
  kBootstrapData = 6,
  kBootstrapReference = 7,
  kProcess = 8,
  kStudyData = 9,
  kStudyReference = 10,
  kStudyBootstrap = 11,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Engine for replication `index` of `stream` under `seed`. Distinct keys give
/// statistically independent engines.
Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0,
                   std::uint64_t attempt = 0);

/// Uniform double in [0, 1) built from the top 53 bits of one engine output.
inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Uniform double in the open interval (0, 1).
inline double uniform_open01(Engine& engine) {
  return (static_cast<double>(engine() >> 12) + 0.5) * 0x1.0p-52;
}

double standard_normal(Engine& engine);

}  // namespace otgof
