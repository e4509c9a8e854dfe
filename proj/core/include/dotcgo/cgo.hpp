#pragma once

#include <cstdint>

#include "dotcgo/boundary.hpp"
#include "dotcgo/phantom.hpp"
#include "dotcgo/spectral.hpp"

namespace dotcgo {

// zeta1 = tau eta1 + i(beta - r eta/2),  zeta2 = -tau eta1 - i(beta + r eta/2)
struct ZetaPair {
    int n = 3;
    double r = 0.0;
    double tau = 0.0;
    RVec eta, eta1, beta;
    CVec zeta1, zeta2;
};

// eta1 drawn uniformly on the unit sphere orthogonal to eta.
ZetaPair make_zeta_pair(int n, double r, const RVec& eta, double tau, std::uint64_t seed);
// Same with eta1 supplied (must be a unit vector orthogonal to eta).
ZetaPair make_zeta_pair(int n, double r, const RVec& eta, double tau, const RVec& eta1);

// Unit vector orthogonal to eta, built from the coordinate axis least
// aligned with eta. Keeps max |eta1.x| on the cube small.
RVec axis_frame(const RVec& eta);

// C_star k^2 / sqrt(2), so that |zeta| = C_star k^2.
double min_tau_for_k(double k, double C_star);

struct RemainderOptions {
    int max_iter = 400;
    double tol = 1e-12;
    SymbolKind symbol = SymbolKind::lattice;
    double reg_floor = -1.0; // < 0: weight default for the symbol kind
    // Solve for psi = exp(i xi0.x) phi with phi periodic and xi0 half a
    // frequency cell in every direction, so the symbol has no zero at xi = 0.
    bool bloch = true;
};

struct CgoSolution {
    CVec zeta;
    CVec zeta_eff; // exponent actually used in exp(zeta.x), lattice or continuum
    ComplexField psi;   // exp(i xi0.x) phi when the Bloch shift is on
    double xnorm_psi = 0.0;
    double xnorm_Q = 0.0;
    double residual = 0.0; // X^{-1/2} norm of p_reg psi + Q psi + Q
    int iterations = 0;
    double contraction = 0.0; // geometric mean ratio of successive update norms
    double min_abs_p = 0.0;
    std::size_t clamped = 0;
    double gauge = 0.0;  // v is stored times exp(-gauge)
    ComplexField v;      // exp(zeta_eff.x - gauge) (1 + psi)
};

BourgainWeight remainder_weight(const Grid& g, const CVec& zeta, const RemainderOptions& o);

// Fixed point psi <- inv_delta_zeta(-Q - Q psi).
CgoSolution solve_remainder(const RealField& Q, const CVec& zeta,
                            const RemainderOptions& opts = {});

struct CgoTrace {
    Eigen::VectorXcd nodal;  // gamma^-1/2 v on boundary nodes, times exp(-gauge)
    Eigen::VectorXcd coeffs; // first m_modes basis coefficients
    double gauge = 0.0;
    double energy = 0.0;
    double captured = 0.0;
    double loss = 0.0; // share of trace energy outside the truncation
};

CgoTrace cgo_trace(const CgoSolution& sol, const CoefficientSet& coeffs,
                   const BoundaryBasis& basis, Eigen::Index m_modes,
                   double max_loss = 0.2);

struct AveragedNorm {
    double mean = 0.0;
    double std_error = 0.0;
};

// Monte Carlo mean of ||Q||^2 in X^{-1/2}_zeta1 over tau in [lambda, 2 lambda]
// and eta1 on the sphere orthogonal to eta (default e_n).
AveragedNorm averaged_q_norm(const CoefficientSet& coeffs, double lambda, double r,
                             int samples, std::uint64_t seed, RVec eta = {});

} // namespace dotcgo
