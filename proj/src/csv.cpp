// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include "otgof/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "otgof/error.hpp"

namespace otgof {
namespace {

std::string_view trim(std::string_view s) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

void write_points_csv(std::ostream& out, const Points& points) {
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(points(i, j));
    }
    out << '\n';
  }
}

Points read_points_csv(std::istream& in, bool has_header) {
  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::size_t line_number = 0;
  bool header_pending = has_header;
  std::string line;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line) || line.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(line);
    if (columns == 0) {
      columns = fields.size();
    } else if (fields.size() != columns) {
      throw ParseError("line " + std::to_string(line_number) + ": expected " +
                       std::to_string(columns) + " fields, found " +
                       std::to_string(fields.size()));
    }
    for (const auto field : fields) {
      double value = 0.0;
      try {
        value = parse_double(field);
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_number) + ": " + e.what());
      }
      if (!std::isfinite(value)) {
        throw ParseError("line " + std::to_string(line_number) + ": non-finite value");
      }
      values.push_back(value);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("no data rows");
  Points points(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns));
  std::copy(values.begin(), values.end(), points.data());
  return points;
}

Points read_points_csv_file(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_points_csv(in, has_header);
}

}  // namespace otgof
