#pragma once

#include <array>
#include <string>
#include <vector>

#include "dotcgo/field.hpp"

namespace dotcgo {

enum class BumpTarget { gamma, D };

// a * exp(-1 / (1 - |x-c|^2/rho^2)) on |x-c| < rho, zero outside.
struct Bump {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double rho = 0.1;
    double amp = 0.0;
    BumpTarget target = BumpTarget::D;
};

struct Phantom {
    std::vector<Bump> bumps;
};

struct CoefficientSet {
    RealField gamma;
    RealField D;
    double k = 0.0;
    double M = 10.0;
};

double bump_value(const Bump& b, const std::array<double, 3>& x, int n);

// gamma = 1 + sum of gamma bumps, D = sum of D bumps.
CoefficientSet make_phantom(const Grid& grid, const Phantom& ph, double k,
                            double M = 10.0);

BumpTarget parse_target(const std::string& s);
const char* target_name(BumpTarget t);

} // namespace dotcgo
