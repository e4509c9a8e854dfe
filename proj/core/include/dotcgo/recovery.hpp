#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dotcgo/cgo.hpp"

namespace dotcgo {

// Adds sigma * N(0,1) to every entry.
DtNMatrix perturb_dtn(const DtNMatrix& L, double sigma, std::uint64_t seed);

// g2^T (L1 - L2) g1, bilinear, coefficients in the orthonormal basis.
cplx pairing(const DtNMatrix& L1, const DtNMatrix& L2, const Eigen::VectorXcd& g1,
             const Eigen::VectorXcd& g2);

struct RecoverySetup {
    CoefficientSet c1, c2;
    RealField Q1, Q2;
    const BoundaryBasis* basis = nullptr;
    RemainderOptions opts;
    double max_loss = 0.2;
};

RecoverySetup make_setup(const CoefficientSet& c1, const CoefficientSet& c2,
                         const BoundaryBasis& basis, const RemainderOptions& opts = {});

struct ModeEstimate {
    double r = 0.0;
    RVec eta;
    double tau = 0.0;
    cplx fhat_est;
    cplx fhat_true;
    // |<dQ e, psi1 + psi2>|, |<Q2 e, psi1 psi2>|, |<Q1 e, psi1 psi2>|, e = exp((z1+z2).x)
    std::array<double, 3> remainder_terms{0.0, 0.0, 0.0};
    cplx pairing_value;    // in the gauge of the two traces
    double log_scale = 0;  // fhat_est = exp(log_scale) * pairing_value
    bool off_lattice = false;
    double trace_loss = 0.0;
    int iterations = 0;
};

// Direct sum h^n sum (Q2 - Q1) exp(-i xi.x), exact for the sampled fields.
cplx fourier_coefficient(const RealField& dQ, const RVec& xi);

ModeEstimate recover_fourier_mode(const RecoverySetup& setup, const DtNMatrix& L1,
                                  const DtNMatrix& L2, const ZetaPair& zp);

struct RecoveryParams {
    double k = 1.0;
    double alpha = 5.0;
    double a0 = 0.02;
    double T_cut = -1.0;  // <= 0: a0 k^alpha
    double C_star = 1.0;
    double tau_mult = 1.0;
    double s = 4.0;
    int mode_budget = 200;
};

double t_cut_for(const RecoveryParams& p);

// Polar design r_j = T (j/J)^2 times a Fibonacci direction set, snapped to
// the nearest lattice frequencies (duplicates and the r = 0 ray collapse).
std::vector<std::size_t> polar_design_bins(const Grid& g, double T_cut, int mode_budget);

struct Reconstruction {
    RealField dQ;
    double T_cut = 0.0;
    double error_hs = 0.0;   // hs_norm(dQ - oracle)
    double oracle_hs = 0.0;  // hs_norm(oracle)
    int modes_ok = 0;
    int modes_failed = 0;
    int projection_loss = 0;
    int contraction_failure = 0;
    std::vector<ModeEstimate> modes;
};

Reconstruction recover_q_diff(const RecoverySetup& setup, const DtNMatrix& L1,
                              const DtNMatrix& L2, const RecoveryParams& params);

struct EnvelopeParams {
    double C = 1.0;
    double alpha = 5.0;
    double delta = 0.5;
    double s = 4.0;
    double epsilon = 0.5;
    int n = 3;

    double m() const { return 2.0 * s - 2.0; }
};

struct EnvelopeValue {
    double E1 = 0.0; // Q estimate, needs alpha > 4 (NaN otherwise)
    double E2 = 0.0; // gamma^-1 estimate, needs alpha > 2
};

EnvelopeValue envelope(const EnvelopeParams& p, double k, double A);

struct EnvelopeFit {
    double C_ls = 0.0;  // least squares in log space
    double C_min = 0.0; // smallest C bounding every row
    double C = 0.0;     // max of the two
};

// Rows are (k, A, measured error); only E1 is fitted.
EnvelopeFit fit_envelope(const EnvelopeParams& p, const std::vector<double>& k,
                         const std::vector<double>& A, const std::vector<double>& err);

struct GammaInverseDiff {
    double estimate = 0.0;
    double oracle = 0.0;
};

GammaInverseDiff gamma_inverse_diff(const RecoverySetup& setup, const RealField& dQ,
                                    double k, double s);

} // namespace dotcgo
