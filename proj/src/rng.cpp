// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "otgof/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace otgof {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t index,
                   std::uint64_t attempt) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ attempt);
  // Seed the full state through seed_seq, whose algorithm is fixed by the
  // standard, so streams agree across standard libraries.
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(stream)};
  return Engine(seq);
}

double standard_normal(Engine& engine) {
  // Boost's ziggurat is a fixed algorithm, unlike std::normal_distribution.
  boost::random::normal_distribution<double> normal;
  return normal(engine);
}

}  // namespace otgof
