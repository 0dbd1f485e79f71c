// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

// Reproduction of the published simulation tables for p = 2:
//   crit         critical values, Monte-Carlo and asymptotic
//   level-power  simple test of N2(0, I), rectangular and spherical ranks
//   composite    normality test with fixed critical values from N2(0, I)
//   warp         normality test calibrated by the warp-speed bootstrap
// Each table is printed as CSV preceded by '#' lines stating every setting
// and replication count. The desk budget trims replications (and for the
// composite tables the m = 1000 blocks) so a run finishes on a laptop.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>

namespace otgof::cli {

enum class Budget { Desk, Full };

Budget parse_budget(std::string_view text);
std::string_view to_string(Budget budget);

std::span<const std::string_view> reproducible_tables();

/// Runs the simulation for `table` and writes it to `out`; one progress line
/// per finished cell goes to `log`. Throws ConfigError for an unknown table.
void reproduce_table(std::string_view table, Budget budget, std::uint64_t seed,
                     std::ostream& out, std::ostream& log);

}  // namespace otgof::cli
