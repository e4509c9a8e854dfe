#pragma once

#include "dotcgo/phantom.hpp"

namespace dotcgo {

// Centred 2n+1 point Laplacian, periodic wrap.
RealField discrete_laplacian(const RealField& f);

// q = -Lap(sqrt(gamma)) / sqrt(gamma).
RealField liouville_q(const CoefficientSet& c);

// Q = q + (k^2 + D)/gamma on closed Omega, q alone outside.
RealField liouville_Q(const CoefficientSet& c);

// v = sqrt(gamma) u
RealField liouville_forward(const CoefficientSet& c, const RealField& u);
ComplexField liouville_forward(const CoefficientSet& c, const ComplexField& u);

} // namespace dotcgo
