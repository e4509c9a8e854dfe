#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "dotcgo/dotf.hpp"
#include "dotcgo/errors.hpp"
#include "dotcgo/liouville.hpp"

using namespace dotcgo;

namespace {

Grid ref_grid(int N = 32) { return make_grid(3, N, 0.5, 0.1875, 0.41); }

Phantom one_bump(double rho, double amp, BumpTarget t, std::array<double, 3> c = {0, 0, 0}) {
    Phantom p;
    p.bumps.push_back({c, rho, amp, t});
    return p;
}

// Closed form of the mollifier profile.
double profile(double a, double rho, double r2) {
    const double t = r2 / (rho * rho);
    return t < 1.0 ? a * std::exp(-1.0 / (1.0 - t)) : 0.0;
}

// -Lap sqrt(gamma) / sqrt(gamma) for gamma = 1 + a exp(-1/(1-r^2/rho^2)), by
// hand: with f(r) the profile, Lap f = f'' + 2 f'/r, and
// Lap sqrt(g) = Lap f / (2 sqrt g) - |f'|^2 / (4 g^(3/2)).
double q_exact(double a, double rho, double r) {
    const double t = r * r / (rho * rho);
    if (t >= 1.0) return 0.0;
    const double u = 1.0 - t;
    const double f = a * std::exp(-1.0 / u);
    // d/dr of -1/u is -2r/(rho^2 u^2)
    const double e1 = -2.0 * r / (rho * rho * u * u);
    const double fp = f * e1;
    // second derivative of -1/u in r
    const double e2 = -2.0 / (rho * rho * u * u) - 8.0 * r * r / (std::pow(rho, 4) * u * u * u);
    const double fpp = f * (e1 * e1 + e2);
    const double lapf = r > 0 ? fpp + 2.0 * fp / r : 3.0 * f * (-2.0 / (rho * rho));
    const double g = 1.0 + f;
    const double lap_sqrt = lapf / (2.0 * std::sqrt(g)) - fp * fp / (4.0 * std::pow(g, 1.5));
    return -lap_sqrt / std::sqrt(g);
}

} // namespace

TEST(Grid, RejectsOmegaOutsideBall) {
    EXPECT_THROW(make_grid(3, 32, 0.5, 0.25, 0.41), ConfigError);
    EXPECT_THROW(make_grid(3, 32, 0.5, 0.1, 0.41), ConfigError);  // not a multiple of h
    EXPECT_NO_THROW(ref_grid());
}

TEST(Grid, FlattenRoundTrip) {
    const Grid g = make_grid(3, 8, 1.0, 0.5, 0.9);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.flatten(g.unflatten(i)), i);
}

TEST(Phantom, EmptyIsBackground) {
    const Grid g = ref_grid(16);
    const CoefficientSet c = make_phantom(g, Phantom{}, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(c.gamma[i], 1.0);
        EXPECT_EQ(c.D[i], 0.0);
    }
}

TEST(Phantom, CentreValue) {
    const Grid g = ref_grid();
    const double L = g.L_omega();
    const CoefficientSet c = make_phantom(g, one_bump(0.2 * L, 0.5, BumpTarget::gamma), 1.0);
    const std::size_t ctr = g.flatten({16, 16, 16});
    EXPECT_NEAR(c.gamma[ctr], 1.0 + 0.5 * std::exp(-1.0), 1e-15);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.position(i);
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] >= std::pow(0.2 * L, 2)) { EXPECT_EQ(c.gamma[i], 1.0); }
    }
}

TEST(Phantom, OverlapIsPointwiseSum) {
    const Grid g = ref_grid();
    Phantom p;
    p.bumps.push_back({{0.02, 0.0, 0.0}, 0.09, 0.5, BumpTarget::gamma});
    p.bumps.push_back({{-0.02, 0.01, 0.0}, 0.08, 0.7, BumpTarget::gamma});
    const CoefficientSet c = make_phantom(g, p, 1.0);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> ui(12, 20);
    for (int t = 0; t < 10; ++t) {
        const std::size_t idx = g.flatten({ui(rng), ui(rng), ui(rng)});
        const auto x = g.position(idx);
        auto r2 = [&](const std::array<double, 3>& ctr) {
            double s = 0.0;
            for (int d = 0; d < 3; ++d) s += (x[d] - ctr[d]) * (x[d] - ctr[d]);
            return s;
        };
        const double want = 1.0 + profile(0.5, 0.09, r2(p.bumps[0].center)) +
                            profile(0.7, 0.08, r2(p.bumps[1].center));
        EXPECT_NEAR(c.gamma[idx], want, 1e-14);
    }
}

TEST(Phantom, BumpOutsideOmegaRejected) {
    const Grid g = ref_grid();
    EXPECT_THROW(make_phantom(g, one_bump(0.1, 0.3, BumpTarget::D, {0.15, 0, 0}), 1.0), BumpOutsideOmega);
}

TEST(Phantom, PositivityViolated) {
    const Grid g = ref_grid();
    // 1 - 0.99 e^-1 is still positive; push below 1/M with M = 10
    EXPECT_THROW(make_phantom(g, one_bump(0.1, -2.5, BumpTarget::gamma), 1.0, 10.0), PositivityViolated);
}

TEST(Phantom, BackgroundOutsideBall) {
    const Grid g = ref_grid();
    Phantom p;
    p.bumps.push_back({{0.02, -0.01, 0.0}, 0.08, 0.8, BumpTarget::gamma});
    p.bumps.push_back({{0.0, 0.02, 0.0}, 0.08, 3.0, BumpTarget::D});
    const CoefficientSet c = make_phantom(g, p, 2.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.in_ball(i)) {
            EXPECT_EQ(c.gamma[i], 1.0);
            EXPECT_EQ(c.D[i], 0.0);
        }
}

TEST(Liouville, ConstantGammaGivesZeroQ) {
    const Grid g = ref_grid(16);
    const RealField q = liouville_q(make_phantom(g, Phantom{}, 1.0));
    for (double x : q.v) EXPECT_EQ(x, 0.0);
}

TEST(Liouville, QMatchesClosedFormAtCentre) {
    const Grid g = make_grid(3, 64, 1.0, 0.375, 0.8);
    const double rho = 0.25, a = 0.6;
    const RealField q = liouville_q(make_phantom(g, one_bump(rho, a, BumpTarget::gamma), 0.0));
    const double h = g.h();
    const double exact = q_exact(a, rho, 0.0);
    EXPECT_NEAR(exact, a * std::exp(-1.0) * 3.0 / (rho * rho) / (1 + a * std::exp(-1.0)), 1e-12);
    // O(h^2) with a generous constant
    EXPECT_LT(std::abs(q[g.flatten({32, 32, 32})] - exact), 40.0 * h * h * std::abs(exact));
}

TEST(Liouville, QMatchesClosedFormOffCentre) {
    const Grid g = make_grid(3, 64, 1.0, 0.375, 0.8);
    const double rho = 0.25, a = 0.6;
    const RealField q = liouville_q(make_phantom(g, one_bump(rho, a, BumpTarget::gamma), 0.0));
    for (int j : {33, 34, 36}) {  // well resolved part of the profile
        const double r = std::abs(g.coord(j));
        const double exact = q_exact(a, rho, r);
        EXPECT_NEAR(q[g.flatten({j, 32, 32})], exact, 0.05 * std::abs(q_exact(a, rho, 0.0)));
    }
}

TEST(Liouville, QSecondOrderConvergence) {
    const double rho = 0.25, a = 0.6;
    auto err = [&](int N) {
        const Grid g = make_grid(3, N, 1.0, 0.375, 0.8);
        const RealField q = liouville_q(make_phantom(g, one_bump(rho, a, BumpTarget::gamma), 0.0));
        return std::abs(q[g.flatten({N / 2, N / 2, N / 2})] - q_exact(a, rho, 0.0));
    };
    const double order = std::log2(err(32) / err(64));
    EXPECT_GE(order, 1.8);
}

TEST(Liouville, QZeroOutsideBump) {
    const Grid g = ref_grid();
    const RealField q = liouville_q(make_phantom(g, one_bump(0.1, 0.5, BumpTarget::gamma), 0.0));
    const double h = g.h();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.position(i);
        if (std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) > 0.1 + 1.5 * h) { EXPECT_EQ(q[i], 0.0); }
    }
}

TEST(Liouville, HomogeneousQIsIndicator) {
    const Grid g = ref_grid(16);
    const RealField Q = liouville_Q(make_phantom(g, Phantom{}, 1.0));
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(Q[i], g.in_omega(i) ? 1.0 : 0.0);
}

TEST(Liouville, AbsorptionOnlyQ) {
    const Grid g = ref_grid();
    const CoefficientSet c = make_phantom(g, one_bump(0.1, 0.3, BumpTarget::D), 2.0);
    const RealField Q = liouville_Q(c);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(Q[i], g.in_omega(i) ? 4.0 + c.D[i] : 0.0);
}

TEST(Liouville, QRecomposition) {
    const Grid g = ref_grid();
    Phantom p;
    p.bumps.push_back({{0.0, 0.0, 0.0}, 0.12, 0.7, BumpTarget::gamma});
    p.bumps.push_back({{0.01, 0.0, 0.02}, 0.1, 2.0, BumpTarget::D});
    const CoefficientSet c = make_phantom(g, p, 2.0);
    const RealField q = liouville_q(c), Q = liouville_Q(c);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double want = q[i] + (g.in_omega(i) ? (4.0 + c.D[i]) / c.gamma[i] : 0.0);
        EXPECT_NEAR(Q[i], want, 1e-13 * std::max(1.0, std::abs(want)));
        if (!g.in_ball(i)) { EXPECT_EQ(Q[i], 0.0); }
    }
}

TEST(Liouville, ForwardScaling) {
    const Grid g = make_grid(3, 8, 1.0, 0.5, 0.9);
    CoefficientSet c = make_phantom(g, Phantom{}, 1.0);
    RealField u(g, 1.0);
    EXPECT_EQ(liouville_forward(c, u).v, u.v);
    for (auto& x : c.gamma.v) x = 4.0;
    for (double v : liouville_forward(c, u).v) EXPECT_EQ(v, 2.0);
}

TEST(Liouville, ForwardRoundTrip) {
    const Grid g = ref_grid();
    const CoefficientSet c = make_phantom(g, one_bump(0.1, 0.9, BumpTarget::gamma), 1.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    RealField v(g);
    for (auto& x : v.v) x = nd(rng);
    RealField u(g);
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = v[i] / std::sqrt(c.gamma[i]);
    const RealField back = liouville_forward(c, u);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(back[i], v[i], 1e-15 * std::max(1.0, std::abs(v[i])));
}

TEST(Dotf, RoundTripComplex) {
    const Grid g = make_grid(3, 8, 1.0, 0.5, 0.9);
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = cplx(std::sin(double(i)), std::cos(3.0 * i));
    const std::string path = ::testing::TempDir() + "rt.dotf";
    write_dotf(path, f);
    const ComplexField r = read_dotf_complex(path, g);
    EXPECT_EQ(r.v, f.v);
    std::remove(path.c_str());
}

TEST(Dotf, HeaderLayout) {
    const Grid g = make_grid(3, 8, 1.0, 0.5, 0.9);
    const auto bytes = encode_dotf(g, std::vector<cplx>(g.size(), cplx(1.0)), false);
    ASSERT_EQ(bytes.size(), 4u + 4 + 1 + 4 + 8 + 1 + 8 * g.size());
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "DOTF");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[8], 3);
    EXPECT_EQ(bytes[9], 8);
}

TEST(Dotf, TruncatedReportsOffset) {
    const Grid g = make_grid(3, 8, 1.0, 0.5, 0.9);
    auto bytes = encode_dotf(g, std::vector<cplx>(g.size(), cplx(1.0)), true);
    bytes.resize(bytes.size() - 5);
    try {
        decode_dotf(bytes);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_GT(e.offset(), 0u);
        EXPECT_LE(e.offset(), bytes.size());
    }
    bytes[0] = 'X';
    EXPECT_THROW(decode_dotf(bytes), FormatError);
}
