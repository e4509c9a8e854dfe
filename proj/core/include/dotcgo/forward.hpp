#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <memory>

#include "dotcgo/boundary.hpp"
#include "dotcgo/phantom.hpp"

namespace dotcgo {

// Energy form of  div(gamma grad u) + (k^2 + D) u  on the closed cube:
//   a(u, w) = sum_edges c_e gamma_e (du)(dw)/h^2 - sum_nodes m_i (k^2 + D_i) u w
// c_e and m_i are trapezoid cell shares (h^n inside Omega, fractions on
// faces), gamma_e = sqrt(gamma_a gamma_b). The row of a node in the interior
// is h^n times the usual 2n+1 point stencil.
struct OmegaStencil {
    OmegaNodes nodes;
    Eigen::SparseMatrix<double> K_II, K_IB, K_BI, K_BB;
};

OmegaStencil assemble_stencil(const CoefficientSet& c);

struct DirichletSolve {
    RealField u;                 // zero outside closed Omega
    double residual_norm = 0.0;  // relative to the interior rhs
    std::vector<double> flux;    // gamma du/dnu, outward, per boundary node
};

// Factorised interior operator, reusable for many boundary data.
class DirichletSolver {
public:
    explicit DirichletSolver(const CoefficientSet& c, double cond_limit = 1e12);

    DirichletSolve solve(const std::vector<double>& g) const;
    Eigen::MatrixXd solve_interior(const Eigen::MatrixXd& rhs) const;

    const OmegaStencil& stencil() const { return st_; }
    double condition_estimate() const { return cond_; }

private:
    Grid grid_;
    OmegaStencil st_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
    double cond_ = 0.0;
};

DirichletSolve solve_dirichlet(const CoefficientSet& c, const std::vector<double>& g);

// Column j is the basis expansion of the flux produced by Dirichlet data phi_j.
DtNMatrix assemble_dtn(const CoefficientSet& c, const BoundaryBasis& basis,
                       Eigen::Index m_modes);

// Same map on nodal values, (flux * weight) = S g.
Eigen::MatrixXd nodal_schur(const CoefficientSet& c);

// 1-norm condition estimate (Hager / Higham) of a factorised symmetric matrix.
double condition_estimate_1(const Eigen::SparseMatrix<double>& A,
                            const Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu);

} // namespace dotcgo
