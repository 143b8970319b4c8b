// Copyright 2026 The ppgtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>
#include <vector>

namespace ppgtts {

struct SelftestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Runs the built-in invariant suite (optionally filtered by substring) and
// returns one entry per check.
std::vector<SelftestResult> run_selftests(const std::string& filter = "");

}  // namespace ppgtts
