#pragma once

#include <vector>

#include "dotcgo/boundary.hpp"
#include "dotcgo/phantom.hpp"
#include "dotcgo/spectral.hpp"

// Slow, independent reference computations. Nothing in here may use the
// sparse solver, the FFT or a cached factorisation.
namespace dotcgo::oracle {

// Dense interior operator and boundary coupling built pointwise from the
// stencil formula. Guarded to N <= 12.
struct DenseProblem {
    std::vector<std::size_t> interior, boundary;
    std::vector<double> A;  // nI x nI, row-major
    std::vector<double> C;  // nI x nB, row-major
    std::size_t nI = 0, nB = 0;
};

DenseProblem dense_problem(const CoefficientSet& c);

// Gaussian elimination with partial pivoting. Throws SingularMatrix.
std::vector<double> gauss_solve(std::vector<double> A, std::vector<double> b, std::size_t n);

// Full-lattice solution (zero outside Omega) for boundary data g given in
// the ordering of omega_nodes().boundary.
RealField dense_solve(const CoefficientSet& c, const std::vector<double>& g);

enum class Region { omega, ball, box };

// h^n-weighted sum of the pointwise product over the region mask.
cplx quadrature_integral(const std::vector<ComplexField>& fields, Region region);

// Direct quadrature of (Q2 - Q1) exp(-i r eta.x) over the box.
cplx fourier_mode_oracle(const RealField& Q1, const RealField& Q2, double r, const RVec& eta);

// Direct O(N^2n) DFT, same convention as fft().
std::vector<cplx> direct_dft(const ComplexField& f);

// (sum_xi (1+|xi|^2)^-s |fhat|^2 dmu)^(1/2) from direct_dft.
double hs_norm_direct(const ComplexField& f, double s);

// Right-hand side of the boundary identity written with the paper's volume
// terms: int grad g2^1/2 . grad(g2^-1/2 v1 v2) - (same with g1)
//        + int ((k^2+D2)/g2 - (k^2+D1)/g1) v1 v2.
// v1, v2 live on closed Omega. Gradients are forward differences on lattice
// edges inside Omega.
double lemma41_volume_side(const CoefficientSet& c1, const CoefficientSet& c2,
                           const RealField& v1, const RealField& v2);

// ||diag(w) L diag(w)||_2 by power iteration on M^T M, w = (1+lambda)^-1/4.
double power_norm_star(const Eigen::MatrixXd& L, const Eigen::VectorXd& lambda, int iters = 2000);

} // namespace dotcgo::oracle
