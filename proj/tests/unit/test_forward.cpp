#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dotcgo/errors.hpp"
#include "dotcgo/forward.hpp"
#include "dotcgo/oracle.hpp"

using namespace dotcgo;

namespace {

Grid g8() { return make_grid(3, 8, 1.0, 0.5, 0.9); }

Phantom mixed(double ga, double da, double shift) {
    Phantom p;
    p.bumps.push_back({{0.0, 0.0, 0.0}, 0.45, ga, BumpTarget::gamma});
    p.bumps.push_back({{shift, 0.0, 0.0}, 0.4, da, BumpTarget::D});
    return p;
}

std::vector<double> boundary_values(const Grid& g, double (*f)(const std::array<double, 3>&)) {
    const OmegaNodes on = omega_nodes(g);
    std::vector<double> out;
    for (std::size_t idx : on.boundary) out.push_back(f(g.position(idx)));
    return out;
}

std::vector<double> random_boundary(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> out(omega_nodes(g).boundary.size());
    for (auto& x : out) x = nd(rng);
    return out;
}

} // namespace

TEST(OmegaNodes, Counts) {
    const Grid g = g8();
    const OmegaNodes on = omega_nodes(g);
    const int m = 2 * g.m_omega + 1;
    EXPECT_EQ(on.interior.size(), std::size_t((m - 2) * (m - 2) * (m - 2)));
    EXPECT_EQ(on.boundary.size(), std::size_t(m * m * m - (m - 2) * (m - 2) * (m - 2)));
}

TEST(Dirichlet, ConstantsAreHarmonic) {
    const Grid g = g8();
    const CoefficientSet c = make_phantom(g, Phantom{}, 0.0);
    const std::vector<double> one(omega_nodes(g).boundary.size(), 1.0);
    const DirichletSolve s = solve_dirichlet(c, one);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.in_omega(i)) { EXPECT_NEAR(s.u[i], 1.0, 1e-12); }
    for (double f : s.flux) EXPECT_NEAR(f, 0.0, 1e-10);
}

TEST(Dirichlet, LinearTrace) {
    const Grid g = make_grid(3, 16, 0.5, 0.1875, 0.41);
    const CoefficientSet c = make_phantom(g, Phantom{}, 0.0);
    const auto gb = boundary_values(g, [](const std::array<double, 3>& x) { return x[0]; });
    const DirichletSolve s = solve_dirichlet(c, gb);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.in_omega(i)) { EXPECT_NEAR(s.u[i], g.position(i)[0], 1e-12); }
    // flux equals nu_1 on the open faces x1 = +-L
    const OmegaNodes on = omega_nodes(g);
    const double L = g.L_omega();
    for (std::size_t b = 0; b < on.boundary.size(); ++b) {
        const auto x = g.position(on.boundary[b]);
        const bool x_face = std::abs(std::abs(x[0]) - L) < 1e-12;
        const bool other = std::abs(std::abs(x[1]) - L) < 1e-12 || std::abs(std::abs(x[2]) - L) < 1e-12;
        if (x_face && !other) { EXPECT_NEAR(s.flux[b], x[0] > 0 ? 1.0 : -1.0, 1e-10); }
        if (!x_face && other) { EXPECT_NEAR(s.flux[b], 0.0, 1e-10); }
    }
}

TEST(Dirichlet, MatchesDenseOracle) {
    const Grid g = g8();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        const CoefficientSet c = make_phantom(g, mixed(ua(rng), 4 * ua(rng), 0.05 * ua(rng)), 1.0 + ua(rng));
        const auto gb = random_boundary(g, rng);
        const DirichletSolve s = solve_dirichlet(c, gb);
        const RealField d = oracle::dense_solve(c, gb);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            num = std::max(num, std::abs(s.u[i] - d[i]));
            den = std::max(den, std::abs(d[i]));
        }
        EXPECT_LT(num / den, 1e-8);
        EXPECT_LT(s.residual_norm, 1e-10);
    }
}

TEST(Stencil, InteriorBlockSymmetric) {
    const Grid g = g8();
    const OmegaStencil st = assemble_stencil(make_phantom(g, mixed(0.6, 2.0, 0.02), 1.5));
    const Eigen::SparseMatrix<double> T = st.K_II.transpose();
    EXPECT_LT((Eigen::MatrixXd(st.K_II) - Eigen::MatrixXd(T)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((Eigen::MatrixXd(st.K_IB) - Eigen::MatrixXd(st.K_BI.transpose())).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dtn, SymmetricQuadraticForm) {
    const Grid g = g8();
    const CoefficientSet c = make_phantom(g, mixed(0.5, 3.0, 0.0), 1.0);
    const BoundaryBasis b = build_boundary_basis(g);
    const DtNMatrix L = assemble_dtn(c, b, b.size());
    EXPECT_LT((L.L - L.L.transpose()).cwiseAbs().maxCoeff(), 1e-8 * L.L.cwiseAbs().maxCoeff());
}

TEST(Dtn, ConstantColumnVanishes) {
    const Grid g = g8();
    const BoundaryBasis b = build_boundary_basis(g);
    const DtNMatrix L = assemble_dtn(make_phantom(g, Phantom{}, 0.0), b, 20);
    EXPECT_LT(L.L.col(0).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dtn, PositiveAtZeroFrequency) {
    const Grid g = g8();
    const BoundaryBasis b = build_boundary_basis(g);
    const DtNMatrix L = assemble_dtn(make_phantom(g, mixed(0.8, 0.0, 0.0), 0.0), b, b.size());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L.L + L.L.transpose()));
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(Dtn, Deterministic) {
    const Grid g = g8();
    const CoefficientSet c = make_phantom(g, mixed(0.5, 3.0, 0.0), 2.0);
    const BoundaryBasis b = build_boundary_basis(g);
    const DtNMatrix a = assemble_dtn(c, b, 40), d = assemble_dtn(c, b, 40);
    EXPECT_EQ((a.L - d.L).cwiseAbs().maxCoeff(), 0.0);
}

// <Lambda u, u> = sum gamma |grad u|^2 - (k^2 + D) u^2 with the stencil's own weights.
TEST(Dtn, EnergyIdentity) {
    const Grid g = g8();
    const CoefficientSet c = make_phantom(g, mixed(0.5, 3.0, 0.0), 1.0);
    std::mt19937_64 rng(21);
    const auto gb = random_boundary(g, rng);
    const DirichletSolve s = solve_dirichlet(c, gb);
    const double w = std::pow(g.h(), 2);
    double lhs = 0.0;
    for (std::size_t i = 0; i < gb.size(); ++i) lhs += w * s.flux[i] * gb[i];
    const OmegaStencil st = assemble_stencil(c);
    const OmegaNodes& on = st.nodes;
    Eigen::VectorXd uI(on.interior.size()), uB(on.boundary.size());
    for (std::size_t i = 0; i < on.interior.size(); ++i) uI[i] = s.u[on.interior[i]];
    for (std::size_t i = 0; i < on.boundary.size(); ++i) uB[i] = s.u[on.boundary[i]];
    // energy form a(u,u) with the sign convention of the stencil
    const double energy = uI.dot(st.K_II * uI) + 2 * uI.dot(st.K_IB * uB) + uB.dot(st.K_BB * uB);
    EXPECT_NEAR(lhs, energy, 1e-8 * std::abs(energy));
}

TEST(Dtn, RefinementOrder) {
    // smooth quadrupole data on a homogeneous medium, N = 16, 32, 64
    auto entry = [](int N) {
        const Grid g = make_grid(3, N, 1.0, 0.375, 0.8);
        std::vector<double> gb;
        for (std::size_t idx : omega_nodes(g).boundary) gb.push_back(g.position(idx)[0] * g.position(idx)[1]);
        const DirichletSolve s = solve_dirichlet(make_phantom(g, Phantom{}, 1.0), gb);
        double acc = 0.0;
        const double w = std::pow(g.h(), 2);
        for (std::size_t i = 0; i < gb.size(); ++i) acc += w * s.flux[i] * gb[i];
        return acc;
    };
    const double a = entry(16), b = entry(32), c = entry(64);
    const double order = std::log2(std::abs(a - b) / std::abs(b - c));
    EXPECT_GE(order, 1.5);
}

TEST(Dtn, NearSingularReported) {
    // k^2 at the first discrete Dirichlet eigenvalue of the homogeneous cube
    const Grid g = g8();
    const int m = 2 * g.m_omega;  // cells per side
    const double h = g.h();
    const double lam = 3.0 * 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi / (2.0 * m)), 2);
    const CoefficientSet c = make_phantom(g, Phantom{}, std::sqrt(lam));
    EXPECT_THROW(DirichletSolver{c}, NearSingularSystem);
}
