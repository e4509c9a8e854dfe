#pragma once

#include <string>
#include <vector>

#include "dotcgo/config.hpp"

namespace dotcgo {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;     // measured quantity
    double tolerance = 0.0; // threshold it is compared against
    std::string detail;
    double seconds = 0.0;
};

struct CheckReport {
    std::vector<CheckResult> results;
    double seconds = 0.0;

    bool all_passed() const;
    std::string json() const;
};

// Oracle cross-validations and invariants on a small N = 8 grid (n = 3).
// The config supplies the seed and is used for the precondition gate.
CheckReport run_checks(const RunConfig& c);

} // namespace dotcgo
