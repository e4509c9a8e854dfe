#include "dotcgo/forward.hpp"

#include <cmath>

#include "dotcgo/errors.hpp"

namespace dotcgo {

namespace {

// Number of Omega cells touching node p, and touching the edge p -> p+e_d.
int node_cells(const Grid& g, const std::array<int, 3>& p) {
    int c = 1;
    for (int d = 0; d < g.n; ++d)
        if (p[d] != g.omega_lo() && p[d] != g.omega_hi()) c *= 2;
    return c;
}

int edge_cells(const Grid& g, const std::array<int, 3>& p, int dir) {
    int c = 1;
    for (int d = 0; d < g.n; ++d)
        if (d != dir && p[d] != g.omega_lo() && p[d] != g.omega_hi()) c *= 2;
    return c;
}

} // namespace

OmegaStencil assemble_stencil(const CoefficientSet& c) {
    const Grid& g = c.gamma.grid;
    OmegaStencil st;
    st.nodes = omega_nodes(g);
    const OmegaNodes& on = st.nodes;
    const auto nI = static_cast<Eigen::Index>(on.interior.size());
    const auto nB = static_cast<Eigen::Index>(on.boundary.size());
    const double h = g.h();
    const double hn = std::pow(h, g.n);
    const double k2 = c.k * c.k;

    // four blocks gathered from one pass over nodes and edges
    std::vector<Eigen::Triplet<double>> tII, tIB, tBI, tBB;
    auto add = [&](std::size_t a, std::size_t b, double val) {
        const bool ba = on.is_boundary(a), bb = on.is_boundary(b);
        const int la = on.local[a], lb = on.local[b];
        if (!ba && !bb) tII.emplace_back(la, lb, val);
        else if (!ba && bb) tIB.emplace_back(la, lb, val);
        else if (ba && !bb) tBI.emplace_back(la, lb, val);
        else tBB.emplace_back(la, lb, val);
    };

    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (on.local[idx] < 0) continue;
        const auto p = g.unflatten(idx);
        const double mi = hn * node_cells(g, p) / double(1 << g.n);
        add(idx, idx, -mi * (k2 + c.D[idx]));
        for (int d = 0; d < g.n; ++d) {
            if (p[d] == g.omega_hi()) continue;
            auto q = p;
            q[d] += 1;
            const std::size_t qi = g.flatten(q);
            const double ce = hn * edge_cells(g, p, d) / double(1 << (g.n - 1));
            const double w = ce * std::sqrt(c.gamma[idx] * c.gamma[qi]) / (h * h);
            add(idx, idx, w);
            add(qi, qi, w);
            add(idx, qi, -w);
            add(qi, idx, -w);
        }
    }
    st.K_II.resize(nI, nI);
    st.K_IB.resize(nI, nB);
    st.K_BI.resize(nB, nI);
    st.K_BB.resize(nB, nB);
    st.K_II.setFromTriplets(tII.begin(), tII.end());
    st.K_IB.setFromTriplets(tIB.begin(), tIB.end());
    st.K_BI.setFromTriplets(tBI.begin(), tBI.end());
    st.K_BB.setFromTriplets(tBB.begin(), tBB.end());
    return st;
}

double condition_estimate_1(const Eigen::SparseMatrix<double>& A,
                            const Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu) {
    const Eigen::Index n = A.rows();
    double anorm = 0.0;
    for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
        double s = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it)
            s += std::abs(it.value());
        anorm = std::max(anorm, s);
    }
    // Hager's estimate of ||A^-1||_1; A is symmetric so A^-T = A^-1
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / double(n));
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        Eigen::VectorXd y = lu.solve(x);
        if (!y.allFinite()) return INFINITY;
        est = y.lpNorm<1>();
        Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
        Eigen::VectorXd z = lu.solve(xi);
        Eigen::Index j;
        if (z.cwiseAbs().maxCoeff(&j) <= z.dot(x)) break;
        x.setZero();
        x[j] = 1.0;
    }
    return anorm * est;
}

DirichletSolver::DirichletSolver(const CoefficientSet& c, double cond_limit)
    : grid_(c.gamma.grid), st_(assemble_stencil(c)) {
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    st_.K_II.makeCompressed();
    lu_->compute(st_.K_II);
    if (lu_->info() != Eigen::Success)
        throw NearSingularSystem("interior factorisation failed at k=" +
                                     std::to_string(c.k) + ", perturb k",
                                 0);
    cond_ = condition_estimate_1(st_.K_II, *lu_);
    if (!(cond_ <= cond_limit))
        throw NearSingularSystem("condition estimate " + std::to_string(cond_) +
                                     " at k=" + std::to_string(c.k) +
                                     " (Dirichlet eigenvalue nearby), perturb k",
                                 0);
}

Eigen::MatrixXd DirichletSolver::solve_interior(const Eigen::MatrixXd& rhs) const {
    Eigen::MatrixXd x = lu_->solve(rhs);
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (!x.col(j).allFinite())
            throw NearSingularSystem("non-finite interior solve", static_cast<int>(j));
    return x;
}

DirichletSolve DirichletSolver::solve(const std::vector<double>& g) const {
    const OmegaNodes& on = st_.nodes;
    if (g.size() != on.boundary.size())
        throw DomainViolation("solve_dirichlet: boundary data has wrong length");
    for (double x : g)
        if (!std::isfinite(x)) throw DomainViolation("solve_dirichlet: non-finite data");

    const Eigen::Map<const Eigen::VectorXd> gb(g.data(), static_cast<Eigen::Index>(g.size()));
    const Eigen::VectorXd rhs = -(st_.K_IB * gb);
    const Eigen::VectorXd uI = solve_interior(rhs);

    const Grid& grid = grid_;
    DirichletSolve out;
    out.u = RealField(grid, 0.0);
    for (std::size_t i = 0; i < on.interior.size(); ++i) out.u[on.interior[i]] = uI[i];
    for (std::size_t i = 0; i < on.boundary.size(); ++i) out.u[on.boundary[i]] = g[i];

    const double rn = rhs.norm();
    const double res = (st_.K_II * uI - rhs).norm();
    out.residual_norm = rn > 0.0 ? res / rn : res;

    const double w = std::pow(grid.h(), grid.n - 1);
    const Eigen::VectorXd fl = (st_.K_BI * uI + st_.K_BB * gb) / w;
    out.flux.assign(fl.data(), fl.data() + fl.size());
    return out;
}

DirichletSolve solve_dirichlet(const CoefficientSet& c, const std::vector<double>& g) {
    return DirichletSolver(c).solve(g);
}

DtNMatrix assemble_dtn(const CoefficientSet& c, const BoundaryBasis& basis,
                       Eigen::Index m_modes) {
    if (m_modes < 1 || m_modes > basis.size())
        throw DomainViolation("assemble_dtn: m_modes outside [1, basis size]");
    if (!(basis.grid == c.gamma.grid))
        throw DomainViolation("assemble_dtn: basis built for another grid");
    DirichletSolver solver(c);
    const OmegaStencil& st = solver.stencil();
    const Eigen::MatrixXd Phi = basis.phi.leftCols(m_modes);
    const Eigen::MatrixXd X = solver.solve_interior(st.K_IB * Phi);
    const Eigen::MatrixXd SPhi = st.K_BB * Phi - st.K_BI * X;

    DtNMatrix out;
    out.L = Phi.transpose() * SPhi;
    out.k = c.k;
    out.n = basis.grid.n;
    out.N = basis.grid.N;
    out.basis = basis.id;
    return out;
}

Eigen::MatrixXd nodal_schur(const CoefficientSet& c) {
    DirichletSolver solver(c);
    const OmegaStencil& st = solver.stencil();
    const Eigen::MatrixXd KIB = Eigen::MatrixXd(st.K_IB);
    return Eigen::MatrixXd(st.K_BB) - st.K_BI * solver.solve_interior(KIB);
}

} // namespace dotcgo
