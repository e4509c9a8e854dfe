#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dotcgo/config.hpp"
#include "dotcgo/errors.hpp"
#include "dotcgo/experiment.hpp"
#include "dotcgo/forward.hpp"
#include "dotcgo/liouville.hpp"
#include "dotcgo/oracle.hpp"
#include "dotcgo/recovery.hpp"

using namespace dotcgo;

namespace {

Grid g8() { return make_grid(3, 8, 1.0, 0.5, 0.9); }

Phantom mixed(double ga, double da, double shift) {
    Phantom p;
    p.bumps.push_back({{0.0, 0.0, 0.0}, 0.45, ga, BumpTarget::gamma});
    p.bumps.push_back({{shift, 0.0, 0.0}, 0.4, da, BumpTarget::D});
    return p;
}

// Reference pair at k = 1 with the full N = 32 basis, built once.
struct Reference {
    RunConfig cfg = default_config();
    Grid g = config_grid(cfg);
    BoundaryBasis basis = build_boundary_basis(g);
    CoefficientSet c1 = make_phantom(g, cfg.phantom1, 1.0, cfg.M);
    CoefficientSet c2 = make_phantom(g, cfg.phantom2, 1.0, cfg.M);
    DtNMatrix L1 = assemble_dtn(c1, basis, basis.size());
    DtNMatrix L2 = assemble_dtn(c2, basis, basis.size());
    RecoverySetup setup = make_setup(c1, c2, basis);
};

const Reference& ref() {
    static const Reference r;
    return r;
}

double ref_mode_error(double tau_mult, double* rel = nullptr) {
    const Reference& r = ref();
    const RVec eta{0, 0, 1};
    const ZetaPair z = make_zeta_pair(3, 0.0, eta, tau_mult * min_tau_for_k(1.0, r.cfg.C_star), axis_frame(eta));
    const ModeEstimate me = recover_fourier_mode(r.setup, r.L1, r.L2, z);
    if (rel) *rel = std::abs(me.fhat_est - me.fhat_true) / std::abs(me.fhat_true);
    return std::abs(me.fhat_est - me.fhat_true);
}

EnvelopeParams paper_params() {
    EnvelopeParams p;
    p.C = 1.0;
    p.alpha = 5.0;
    p.epsilon = 0.5;
    p.s = 4.0;
    p.delta = 0.5;
    return p;
}

// H^-s inner product of two real fields through the FFT.
double hs_inner(const RealField& a, const RealField& b, double s) {
    const SpectralField A = fft(a), B = fft(b);
    double acc = 0.0;
    for (std::size_t i = 0; i < A.c.size(); ++i) {
        double xx = 0.0;
        for (double x : frequency(a.grid, i)) xx += x * x;
        acc += std::pow(1.0 + xx, -s) * (A.c[i] * std::conj(B.c[i])).real();
    }
    return acc * spectral_measure(a.grid);
}

} // namespace

TEST(Pairing, ZeroCases) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Random(6, 6);
    DtNMatrix a, b;
    a.L = L;
    b.L = L;
    const Eigen::VectorXcd g = Eigen::VectorXcd::Random(6);
    EXPECT_EQ(pairing(a, b, g, g), cplx(0.0));
    b.L = Eigen::MatrixXd::Random(6, 6);
    EXPECT_EQ(pairing(a, b, Eigen::VectorXcd::Zero(6), g), cplx(0.0));
    EXPECT_EQ(pairing(a, b, g, Eigen::VectorXcd::Zero(6)), cplx(0.0));
}

// Basis-coordinate pairing against the volume side of the boundary identity.
TEST(Pairing, MatchesVolumeIdentity) {
    const Grid g = g8();
    const CoefficientSet c1 = make_phantom(g, mixed(0.4, 2.0, 0.0), 1.0);
    const CoefficientSet c2 = make_phantom(g, mixed(0.7, 5.0, 0.05), 1.0);
    const BoundaryBasis b = build_boundary_basis(g);
    const DtNMatrix L1 = assemble_dtn(c1, b, b.size()), L2 = assemble_dtn(c2, b, b.size());
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 5; ++t) {
        std::vector<double> g1(b.nodes.size()), g2(b.nodes.size());
        for (auto& x : g1) x = nd(rng);
        for (auto& x : g2) x = nd(rng);
        Eigen::VectorXcd n1(g1.size()), n2(g2.size());
        for (std::size_t i = 0; i < g1.size(); ++i) {
            n1[i] = g1[i];
            n2[i] = g2[i];
        }
        const cplx lhs = pairing(L1, L2, b.project(n1, b.size()), b.project(n2, b.size()));
        const RealField u1 = solve_dirichlet(c1, g1).u, u2 = solve_dirichlet(c2, g2).u;
        RealField v1(g), v2(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            v1[i] = std::sqrt(c1.gamma[i]) * u1[i];
            v2[i] = std::sqrt(c2.gamma[i]) * u2[i];
        }
        const double rhs = oracle::lemma41_volume_side(c1, c2, v1, v2);
        EXPECT_NEAR(lhs.real(), rhs, 1e-6 * std::abs(rhs));
        EXPECT_NEAR(lhs.imag(), 0.0, 1e-10);
    }
}

TEST(Perturb, SeededGaussian) {
    DtNMatrix L;
    L.L = Eigen::MatrixXd::Zero(60, 60);
    EXPECT_EQ(perturb_dtn(L, 0.0, 1).L, L.L);
    const DtNMatrix a = perturb_dtn(L, 1e-3, 5), b = perturb_dtn(L, 1e-3, 5), c = perturb_dtn(L, 1e-3, 6);
    EXPECT_EQ(a.L, b.L);
    EXPECT_NE(a.L, c.L);
    const double sd = std::sqrt(a.L.squaredNorm() / a.L.size());
    EXPECT_NEAR(sd, 1e-3, 5e-5);
}

TEST(FourierCoefficient, MatchesOracle) {
    const Reference& r = ref();
    RealField dQ(r.g);
    for (std::size_t i = 0; i < r.g.size(); ++i) dQ[i] = r.setup.Q2[i] - r.setup.Q1[i];
    for (double rad : {0.0, 3.3, 12.0}) {
        const RVec eta{0.6, 0.0, 0.8}, xi{rad * 0.6, 0.0, rad * 0.8};
        const cplx o = oracle::fourier_mode_oracle(r.setup.Q1, r.setup.Q2, rad, eta);
        EXPECT_NEAR(std::abs(fourier_coefficient(dQ, xi) - o), 0.0, 1e-12 * std::abs(o));
    }
}

TEST(ModeRecovery, IdenticalCoefficientsGiveZero) {
    const Reference& r = ref();
    const RecoverySetup s = make_setup(r.c2, r.c2, r.basis);
    const RVec eta{0, 0, 1};
    const ZetaPair z = make_zeta_pair(3, 0.0, eta, 2.0, axis_frame(eta));
    const ModeEstimate me = recover_fourier_mode(s, r.L2, r.L2, z);
    EXPECT_EQ(me.fhat_est, cplx(0.0));
    EXPECT_EQ(me.fhat_true, cplx(0.0));
}

TEST(ModeRecovery, ZeroFrequencyWithinTenPercent) {
    double rel = 0.0;
    ref_mode_error(4.0, &rel);
    EXPECT_LE(rel, 0.10);
}

TEST(ModeRecovery, ErrorDecreasesWhenTauDoubles) {
    EXPECT_LT(ref_mode_error(8.0), ref_mode_error(4.0));
    EXPECT_LT(ref_mode_error(4.0), ref_mode_error(2.0));
}

TEST(ModeRecovery, RemainderTermsNonNegative) {
    const Reference& r = ref();
    const RVec eta{0, 0, 1};
    const ZetaPair z = make_zeta_pair(3, 2.0, eta, 3.0, axis_frame(eta));
    const ModeEstimate me = recover_fourier_mode(r.setup, r.L1, r.L2, z);
    for (double t : me.remainder_terms) {
        EXPECT_GE(t, 0.0);
        EXPECT_TRUE(std::isfinite(t));
    }
    EXPECT_TRUE(me.off_lattice);
}

TEST(PolarDesign, BinsInsideCutAndUnique) {
    const Grid g = ref().g;
    const auto bins = polar_design_bins(g, 20.0, 200);
    ASSERT_FALSE(bins.empty());
    EXPECT_EQ(bins.front(), 0u);
    for (std::size_t i = 1; i < bins.size(); ++i) EXPECT_LT(bins[i - 1], bins[i]);
    for (std::size_t idx : bins) {
        double rr = 0.0;
        for (double x : frequency(g, idx)) rr += x * x;
        EXPECT_LE(std::sqrt(rr), 20.0 + 1e-12);
    }
}

TEST(QDiff, IdenticalInputsGiveExactZero) {
    const Reference& r = ref();
    const RecoverySetup s = make_setup(r.c1, r.c1, r.basis);
    RecoveryParams p;
    p.T_cut = 8.0;
    const Reconstruction rec = recover_q_diff(s, r.L1, r.L1, p);
    for (double x : rec.dQ.v) EXPECT_EQ(x, 0.0);
    EXPECT_EQ(rec.error_hs, 0.0);
}

TEST(QDiff, SingleBumpCorrelation) {
    const Reference& r = ref();
    RecoveryParams p;
    p.k = 1.0;
    p.T_cut = 8.0;
    p.mode_budget = 200;
    const Reconstruction rec = recover_q_diff(r.setup, r.L1, r.L2, p);
    RealField truth(r.g);
    for (std::size_t i = 0; i < r.g.size(); ++i) truth[i] = r.setup.Q2[i] - r.setup.Q1[i];
    const double s = p.s;
    const double corr = hs_inner(rec.dQ, truth, s) /
                        std::sqrt(hs_inner(rec.dQ, rec.dQ, s) * hs_inner(truth, truth, s));
    EXPECT_GE(corr, 0.5);
    EXPECT_EQ(rec.modes_failed, 0);
}

TEST(QDiff, DiscrepancyFallsWithCut) {
    const Reference& r = ref();
    std::vector<double> err;
    // fixed density: the budget grows with the volume of the frequency ball
    for (double T : {8.0, 16.0, 24.0}) {
        RecoveryParams p;
        p.k = 1.0;
        p.T_cut = T;
        p.mode_budget = static_cast<int>(std::lround(200.0 * std::pow(T / 8.0, 3)));
        err.push_back(recover_q_diff(r.setup, r.L1, r.L2, p).error_hs);
    }
    EXPECT_LT(err[1], err[0]);
    EXPECT_LT(err[2], err[1]);
}

TEST(TCut, RuleAndFloor) {
    RecoveryParams p;
    p.k = 2.0;
    EXPECT_NEAR(t_cut_for(p), 0.02 * 32.0, 1e-14);
    p.T_cut = 0.1;
    EXPECT_THROW(t_cut_for(p), DomainViolation);
}

TEST(Envelope, WorkedExample) {
    const EnvelopeValue e = envelope(paper_params(), 1.0, std::exp(-10.0));
    EXPECT_NEAR(e.E1, std::exp(-4.0) + 1.0, 1e-14);
    EXPECT_NEAR(e.E2, std::exp(-4.0) + 1.0, 1e-14);
}

TEST(Envelope, NonDecreasingInA) {
    for (double k : {1.0, 1.5, 2.0}) {
        double prev = 0.0;
        for (double la = -200.0; la <= -1.0; la += 3.0) {
            const EnvelopeValue e = envelope(paper_params(), k, std::exp(la));
            EXPECT_GE(e.E1, prev);
            prev = e.E1;
        }
    }
}

TEST(Envelope, ExponentialTermTakesOver) {
    const EnvelopeParams p = paper_params();
    const double A = std::exp(-10.0);
    std::vector<bool> lip_dominant;
    for (double k : {1.0, 1.5, 2.0, 3.0}) {  // exp(k^5) overflows past k ~ 4.1
        const double lip = p.C * std::exp(p.C * std::pow(k, p.alpha)) * std::sqrt(A);
        const double e = envelope(p, k, A).E1;
        lip_dominant.push_back(lip > e - lip);
    }
    EXPECT_FALSE(lip_dominant.front());
    EXPECT_TRUE(lip_dominant.back());
    // once the exponential term dominates it stays dominant
    for (std::size_t i = 1; i < lip_dominant.size(); ++i)
        if (lip_dominant[i - 1]) { EXPECT_TRUE(lip_dominant[i]); }
}

TEST(Envelope, Preconditions) {
    const EnvelopeParams p = paper_params();
    EXPECT_THROW(envelope(p, 0.5, 1e-3), DomainViolation);
    EXPECT_THROW(envelope(p, 1.0, 0.5), DomainViolation);
    EXPECT_THROW(envelope(p, 1.0, 0.0), DomainViolation);
    EnvelopeParams q = p;
    q.s = 2.5;
    EXPECT_THROW(envelope(q, 1.0, 1e-3), DomainViolation);
    q = p;
    q.alpha = 3.0;
    EXPECT_TRUE(std::isnan(envelope(q, 1.0, 1e-3).E1));
    EXPECT_TRUE(std::isfinite(envelope(q, 1.0, 1e-3).E2));
}

TEST(EnvelopeFit, BoundsEveryRowAndMinimisesLogResidual) {
    const EnvelopeParams p = paper_params();
    const std::vector<double> k{1.0, 1.2, 1.5}, A{1e-6, 1e-5, 1e-4}, err{3e-3, 1e-3, 8e-4};
    const EnvelopeFit f = fit_envelope(p, k, A, err);
    EXPECT_GE(f.C, f.C_ls);
    EXPECT_GE(f.C, f.C_min);
    EnvelopeParams q = p;
    q.C = f.C;
    for (std::size_t i = 0; i < k.size(); ++i) EXPECT_GE(envelope(q, k[i], A[i]).E1, err[i]);
    q.C = f.C_min * (1 - 1e-6);
    bool some_row_above = false;
    for (std::size_t i = 0; i < k.size(); ++i) some_row_above |= envelope(q, k[i], A[i]).E1 < err[i];
    EXPECT_TRUE(some_row_above);
    auto obj = [&](double C) {
        EnvelopeParams r = p;
        r.C = C;
        double s = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) s += std::pow(std::log(envelope(r, k[i], A[i]).E1 / err[i]), 2);
        return s;
    };
    EXPECT_LE(obj(f.C_ls), obj(f.C_ls * 1.01));
    EXPECT_LE(obj(f.C_ls), obj(f.C_ls / 1.01));
}

TEST(GammaInverse, AbsorptionOnlyContrast) {
    const Reference& r = ref();
    RealField dQ(r.g);
    for (std::size_t i = 0; i < r.g.size(); ++i) dQ[i] = r.setup.Q2[i] - r.setup.Q1[i];
    const GammaInverseDiff d = gamma_inverse_diff(r.setup, dQ, 1.0, 4.0);
    EXPECT_EQ(d.oracle, 0.0);
    RealField dd(r.g, 0.0);
    for (std::size_t i = 0; i < r.g.size(); ++i)
        if (r.g.in_omega(i)) dd[i] = (r.c2.D[i] - r.c1.D[i]) / r.c2.gamma[i];
    EXPECT_LE(d.estimate, hs_norm(dd, 4.0) * (1 + 1e-12));
    EXPECT_EQ(gamma_inverse_diff(r.setup, RealField(r.g, 0.0), 1.0, 4.0).estimate, 0.0);
}

TEST(GammaInverse, PrefactorShrinksErrorWithK) {
    const Grid g = ref().g;
    Phantom p1, p2;
    p2.bumps.push_back({{0.0, 0.0, 0.0}, 4 * g.h(), 0.5, BumpTarget::gamma});
    std::vector<double> err;
    for (double k : {2.0, 4.0}) {
        const CoefficientSet c1 = make_phantom(g, p1, k), c2 = make_phantom(g, p2, k);
        const RecoverySetup s = make_setup(c1, c2, ref().basis);
        RealField dQ(g);
        for (std::size_t i = 0; i < g.size(); ++i) dQ[i] = s.Q2[i] - s.Q1[i];
        const GammaInverseDiff d = gamma_inverse_diff(s, dQ, k, 4.0);
        err.push_back(std::abs(d.estimate - d.oracle));
    }
    EXPECT_LT(err[1], err[0]);
}

TEST(Sweep, IdenticalPhantomsGiveSentinelRows) {
    RunConfig c = default_config();
    c.grid = {3, 8, 1.0, 0.5, 0.9};
    c.phantom1.bumps = {{{0, 0, 0}, 0.4, 2.0, BumpTarget::D}};
    c.phantom2 = c.phantom1;
    const SweepResult r = run_sweep(c, build_boundary_basis(config_grid(c)));
    ASSERT_EQ(r.rows.size(), 3u);
    for (const auto& row : r.rows) {
        EXPECT_TRUE(row.identical);
        EXPECT_EQ(row.A, 0.0);
        EXPECT_TRUE(std::isinf(row.minus_log_A));
        EXPECT_EQ(row.recovery_error_hs, 0.0);
        EXPECT_TRUE(std::isnan(row.envelope_value));
    }
}
