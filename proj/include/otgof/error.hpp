// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace otgof {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operands disagree in dimension or cardinality.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input contains NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// A factorization or iteration could not produce a usable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Parameter estimation failed (e.g. rank-deficient scatter matrix).
class EstimationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A critical-table lookup found no entry for the requested key, or
/// an insertion clashed with an existing entry.
class TableError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message carries the offending line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace otgof
