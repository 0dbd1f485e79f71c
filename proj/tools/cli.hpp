// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Exit status: 0 retain or success, 1 reject,
// 2 any error (bad flags, unreadable input, missing table entry, ...).

#pragma once

#include <iosfwd>

namespace otgof::cli {

inline constexpr int kExitRetain = 0;
inline constexpr int kExitReject = 1;
inline constexpr int kExitError = 2;

/// Parses `argv` and runs the selected subcommand. Results go to `out`,
/// human-readable reports and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace otgof::cli
