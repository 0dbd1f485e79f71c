// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

// Module invariants as runnable checks, shared by the unit tests and the
// acceptance runner.

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace otgof::testing {

struct PropertyOutcome {
  bool pass = false;
  std::string detail;
};

struct PropertyCheck {
  std::string module;
  std::string name;
  std::function<PropertyOutcome()> run;
};

std::vector<PropertyCheck> property_checks();

}  // namespace otgof::testing
