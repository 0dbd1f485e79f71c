// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

// Plain numeric CSV: one observation per row, comma separated, '.' decimal
// separator, no quoting. Output uses the shortest decimal form that parses
// back to the same double, independent of the C++ or C locale.

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "otgof/types.hpp"

namespace otgof {

std::string format_double(double value);

/// Strict parse of a full field; throws ParseError on trailing garbage.
double parse_double(std::string_view text);

/// Splits one CSV line on commas and trims surrounding blanks from fields.
std::vector<std::string_view> split_fields(std::string_view line);

void write_points_csv(std::ostream& out, const Points& points);

/// Reads a numeric matrix. Blank lines and lines starting with '#' are
/// skipped. With `has_header` the first remaining line is discarded. Every
/// row must have the same number of finite fields; violations throw
/// ParseError naming the 1-based line.
Points read_points_csv(std::istream& in, bool has_header = false);
Points read_points_csv_file(const std::string& path, bool has_header = false);

}  // namespace otgof
