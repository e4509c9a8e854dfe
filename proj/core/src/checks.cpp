#include "dotcgo/checks.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "dotcgo/cgo.hpp"
#include "dotcgo/dotf.hpp"
#include "dotcgo/errors.hpp"
#include "dotcgo/forward.hpp"
#include "dotcgo/liouville.hpp"
#include "dotcgo/oracle.hpp"
#include "dotcgo/recovery.hpp"

namespace dotcgo {

bool CheckReport::all_passed() const {
    for (const auto& r : results)
        if (!r.passed) return false;
    return !results.empty();
}

std::string CheckReport::json() const {
    nlohmann::json j;
    j["passed"] = all_passed();
    j["seconds"] = seconds;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json e{{"name", r.name},
                         {"passed", r.passed},
                         {"tolerance", r.tolerance},
                         {"detail", r.detail},
                         {"seconds", r.seconds}};
        e["value"] = std::isfinite(r.value) ? nlohmann::json(r.value) : nlohmann::json(nullptr);
        arr.push_back(e);
    }
    j["checks"] = arr;
    return j.dump(2);
}

namespace {

using Clock = std::chrono::steady_clock;

// value <= tol passes
CheckResult below(std::string name, double value, double tol, std::string detail = {}) {
    return {std::move(name), value <= tol, value, tol, std::move(detail), 0.0};
}

Grid check_grid() { return make_grid(3, 8, 1.0, 0.5, 0.9); }

Phantom check_phantom(double ga, double da, double shift) {
    Phantom p;
    p.bumps.push_back({{0.0, 0.0, 0.0}, 0.45, ga, BumpTarget::gamma});
    p.bumps.push_back({{shift, 0.0, 0.0}, 0.4, da, BumpTarget::D});
    return p;
}

ComplexField random_complex(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    ComplexField f(g);
    for (auto& x : f.v) x = cplx(nd(rng), nd(rng));
    return f;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CVec null_zeta(double tau, double r) {
    RVec eta{0.0, 0.0, 1.0};
    return make_zeta_pair(3, r, eta, tau, RVec{1.0, 0.0, 0.0}).zeta1;
}

// analytic -Lap sqrt(gamma) / sqrt(gamma) at the centre of one gamma bump
double q_centre_error(int N, double amp, double rho) {
    const Grid g = make_grid(3, N, 1.0, 0.375, 0.8);
    Phantom p;
    p.bumps.push_back({{0.0, 0.0, 0.0}, rho, amp, BumpTarget::gamma});
    const CoefficientSet c = make_phantom(g, p, 0.0);
    const RealField q = liouville_q(c);
    const double f0 = amp * std::exp(-1.0);
    const double exact = f0 * 3.0 / (rho * rho) / (1.0 + f0);
    const std::size_t ctr = g.flatten({N / 2, N / 2, N / 2});
    return std::abs(q[ctr] - exact) / exact;
}

} // namespace

CheckReport run_checks(const RunConfig& cfg) {
    CheckReport rep;
    const auto t_all = Clock::now();
    std::mt19937_64 rng(cfg.seed);
    const Grid g = check_grid();
    const double hn = std::pow(g.h(), g.n);

    auto run = [&](const std::string& name, const std::function<CheckResult()>& fn) {
        const auto t0 = Clock::now();
        CheckResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {name, false, std::nan(""), 0.0, std::string("threw: ") + e.what(), 0.0};
        }
        if (r.name.empty()) r.name = name;
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        rep.results.push_back(r);
    };

    run("phantom.overlap_pointwise", [&] {
        Phantom p;
        p.bumps.push_back({{0.1, 0.0, 0.0}, 0.35, 0.5, BumpTarget::gamma});
        p.bumps.push_back({{-0.1, 0.05, 0.0}, 0.3, 0.7, BumpTarget::gamma});
        const CoefficientSet c = make_phantom(g, p, 1.0);
        std::uniform_int_distribution<std::size_t> ud(0, g.size() - 1);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            std::size_t idx = ud(rng);
            // bias half the samples into the overlap
            if (i % 2 == 0) idx = g.flatten({4 + i % 3 - 1, 4, 4});
            const auto x = g.position(idx);
            const double ref = 1.0 + bump_value(p.bumps[0], x, 3) + bump_value(p.bumps[1], x, 3);
            worst = std::max(worst, std::abs(c.gamma[idx] - ref));
        }
        return below("phantom.overlap_pointwise", worst, 1e-14);
    });

    run("liouville.q_centre_second_order", [&] {
        // the error at the bump centre must drop like h^2
        const double e1 = q_centre_error(32, 0.8, 0.25);
        const double e2 = q_centre_error(64, 0.8, 0.25);
        return below("liouville.q_centre_second_order", e2 / e1, 0.35,
                     "error ratio N=32 -> N=64, h^2 predicts 0.25");
    });

    run("liouville.Q_recomposition", [&] {
        const CoefficientSet c = make_phantom(g, check_phantom(0.6, 3.0, 0.0), 1.5);
        const RealField q = liouville_q(c);
        const RealField Q = liouville_Q(c);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g.in_omega(i)) continue;
            const double ref = q[i] + (c.k * c.k + c.D[i]) / c.gamma[i];
            worst = std::max(worst, std::abs(Q[i] - ref) / std::max(1.0, std::abs(ref)));
        }
        return below("liouville.Q_recomposition", worst, 1e-14);
    });

    run("spectral.fft_roundtrip", [&] {
        const ComplexField f = random_complex(g, rng);
        const ComplexField b = ifft(fft(f));
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            num += std::norm(b[i] - f[i]);
            den += std::norm(f[i]);
        }
        return below("spectral.fft_roundtrip", std::sqrt(num / den), 1e-12);
    });

    run("spectral.fft_vs_direct_dft", [&] {
        const ComplexField f = random_complex(g, rng);
        const SpectralField F = fft(f);
        const std::vector<cplx> D = oracle::direct_dft(f);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            num += std::norm(F.c[i] - D[i]);
            den += std::norm(D[i]);
        }
        return below("spectral.fft_vs_direct_dft", std::sqrt(num / den), 1e-12);
    });

    run("spectral.symbol_scalar", [&] {
        std::normal_distribution<double> nd;
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const CVec z = null_zeta(1.0 + std::abs(nd(rng)) * 5.0, std::abs(nd(rng)));
            RVec xi(3);
            for (auto& x : xi) x = 4.0 * nd(rng);
            // -|xi|^2 + 2 i zeta.xi by real and imaginary parts
            double re = 0.0, im = 0.0;
            for (int d = 0; d < 3; ++d) {
                re += -xi[d] * xi[d] - 2.0 * z[d].imag() * xi[d];
                im += 2.0 * z[d].real() * xi[d];
            }
            const cplx p = symbol_p(z, xi);
            worst = std::max(worst, std::abs(p - cplx(re, im)) / std::max(1.0, std::abs(p)));
        }
        return below("spectral.symbol_scalar", worst, 1e-12);
    });

    run("spectral.duality", [&] {
        const BourgainWeight w = default_weight(null_zeta(3.0, 1.0));
        double worst = -1e300;
        for (int t = 0; t < 20; ++t) {
            const ComplexField f = random_complex(g, rng);
            const ComplexField h = random_complex(g, rng);
            cplx ip = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) ip += f[i] * std::conj(h[i]);
            ip *= hn;
            const double bound = xnorm(f, w, -0.5) * xnorm(h, w, 0.5);
            worst = std::max(worst, std::abs(ip) / bound);
        }
        return below("spectral.duality", worst, 1.0 + 1e-12, "max |<f,g>| / bound");
    });

    run("spectral.inv_delta_single_modes", [&] {
        const BourgainWeight w = default_weight(null_zeta(2.5, 1.3));
        const SymbolTable t = symbol_table(g, w);
        double worst = 0.0;
        std::size_t unclamped = 0;
        for (std::size_t m = 0; m < g.size(); ++m) {
            const RVec xi = frequency(g, m);
            ComplexField f(g);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const auto x = g.position(i);
                double ph = 0.0;
                for (int d = 0; d < 3; ++d) ph += xi[d] * x[d];
                f[i] = std::polar(1.0, ph);
            }
            const InvDeltaResult u = inv_delta_zeta(f, w);
            const double ratio = xnorm(u.u, w, 0.5) / xnorm(f, w, -0.5);
            if (std::abs(t.p[m]) >= w.reg_floor) {
                ++unclamped;
                worst = std::max(worst, std::abs(ratio - 1.0));
            } else {
                worst = std::max(worst, std::max(0.0, ratio - 1.0));
            }
        }
        return below("spectral.inv_delta_single_modes", worst, 1e-12,
                     std::to_string(unclamped) + " unclamped modes");
    });

    run("spectral.hs_lattice_delta", [&] {
        RealField f(g, 0.0);
        f[g.flatten({4, 4, 4})] = 1.0 / hn;
        const double dk = std::numbers::pi / g.R_box;
        double acc = 0.0;
        for (int a = -4; a < 4; ++a)
            for (int b = -4; b < 4; ++b)
                for (int c = -4; c < 4; ++c) {
                    const double xx = dk * dk * (a * a + b * b + c * c);
                    acc += std::pow(1.0 + xx, -4.0);
                }
        const double ref = std::sqrt(acc / std::pow(2.0 * g.R_box, 3));
        return below("spectral.hs_lattice_delta", rel(hs_norm(f, 4.0), ref), 1e-12);
    });

    run("spectral.hs_vs_direct", [&] {
        const ComplexField f = random_complex(g, rng);
        return below("spectral.hs_vs_direct",
                     rel(hs_norm(f, 2.0), oracle::hs_norm_direct(f, 2.0)), 1e-10);
    });

    run("oracle.quadrature_volume", [&] {
        const ComplexField one(g, cplx(1.0));
        const double vol = oracle::quadrature_integral({one}, oracle::Region::omega).real();
        const double exact = std::pow(2.0 * g.L_omega(), 3);
        const std::size_t surf = omega_nodes(g).boundary.size();
        return below("oracle.quadrature_volume", std::abs(vol - exact), hn * surf);
    });

    run("oracle.quadrature_odd", [&] {
        ComplexField f(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.position(i);
            f[i] = x[0] * std::exp(-x[1] * x[1]);
        }
        return below("oracle.quadrature_odd",
                     std::abs(oracle::quadrature_integral({f}, oracle::Region::omega)), 1e-12);
    });

    run("oracle.plancherel", [&] {
        const ComplexField f = random_complex(g, rng);
        const ComplexField h = random_complex(g, rng);
        ComplexField hc(g);
        for (std::size_t i = 0; i < g.size(); ++i) hc[i] = std::conj(h[i]);
        const cplx q = oracle::quadrature_integral({f, hc}, oracle::Region::box);
        const SpectralField F = fft(f), H = fft(h);
        cplx s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += F.c[i] * std::conj(H.c[i]);
        s *= spectral_measure(g);
        return below("oracle.plancherel", std::abs(q - s) / std::abs(q), 1e-10);
    });

    run("oracle.fourier_mode_lattice", [&] {
        const CoefficientSet c1 = make_phantom(g, check_phantom(0.3, 2.0, 0.0), 1.0);
        const CoefficientSet c2 = make_phantom(g, check_phantom(0.3, 3.0, 0.05), 1.0);
        const RealField Q1 = liouville_Q(c1), Q2 = liouville_Q(c2);
        RealField dQ(g);
        for (std::size_t i = 0; i < g.size(); ++i) dQ[i] = Q2[i] - Q1[i];
        const SpectralField F = fft(dQ);
        double worst = 0.0;
        for (std::size_t m : {std::size_t(1), std::size_t(9), std::size_t(73), std::size_t(200)}) {
            const RVec xi = frequency(g, m);
            double r = 0.0;
            for (double x : xi) r += x * x;
            r = std::sqrt(r);
            RVec eta(3);
            for (int d = 0; d < 3; ++d) eta[d] = xi[d] / r;
            const cplx o = oracle::fourier_mode_oracle(Q1, Q2, r, eta);
            const cplx mp = fourier_coefficient(dQ, xi);
            const double sc = std::max(std::abs(o), 1e-3);
            worst = std::max({worst, std::abs(o - F.c[m]) / sc, std::abs(o - mp) / sc});
        }
        return below("oracle.fourier_mode_lattice", worst, 1e-10);
    });

    run("forward.dense_agreement", [&] {
        std::uniform_real_distribution<double> ua(0.0, 1.0);
        double worst = 0.0, worst_res = 0.0;
        for (int t = 0; t < 20; ++t) {
            const CoefficientSet c =
                make_phantom(g, check_phantom(ua(rng), 4.0 * ua(rng), 0.05 * ua(rng)), 1.0 + ua(rng));
            std::vector<double> gb(omega_nodes(g).boundary.size());
            std::normal_distribution<double> nd;
            for (auto& x : gb) x = nd(rng);
            const DirichletSolve s = solve_dirichlet(c, gb);
            const RealField d = oracle::dense_solve(c, gb);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                num = std::max(num, std::abs(s.u[i] - d[i]));
                den = std::max(den, std::abs(d[i]));
            }
            worst = std::max(worst, num / den);
            worst_res = std::max(worst_res, s.residual_norm);
        }
        CheckResult r = below("forward.dense_agreement", worst, 1e-8);
        r.detail = "max interior residual " + std::to_string(worst_res);
        if (worst_res > 1e-10) r.passed = false;
        return r;
    });

    run("forward.dtn_symmetry", [&] {
        const CoefficientSet c = make_phantom(g, check_phantom(0.5, 3.0, 0.0), 1.0);
        DirichletSolver solver(c);
        const std::size_t nb = omega_nodes(g).boundary.size();
        const double w = std::pow(g.h(), g.n - 1);
        std::normal_distribution<double> nd;
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            std::vector<double> a(nb), b(nb);
            for (auto& x : a) x = nd(rng);
            for (auto& x : b) x = nd(rng);
            const DirichletSolve sa = solver.solve(a), sb = solver.solve(b);
            double ab = 0.0, ba = 0.0, sc = 0.0;
            for (std::size_t i = 0; i < nb; ++i) {
                ab += w * sa.flux[i] * b[i];
                ba += w * sb.flux[i] * a[i];
                sc += w * std::abs(sa.flux[i] * b[i]);
            }
            worst = std::max(worst, std::abs(ab - ba) / sc);
        }
        return below("forward.dtn_symmetry", worst, 1e-8);
    });

    run("forward.dtn_deterministic", [&] {
        const CoefficientSet c = make_phantom(g, check_phantom(0.5, 3.0, 0.0), 1.0);
        const BoundaryBasis b = build_boundary_basis(g);
        const DtNMatrix a = assemble_dtn(c, b, b.size());
        const DtNMatrix d = assemble_dtn(c, b, b.size());
        return below("forward.dtn_deterministic", (a.L - d.L).cwiseAbs().maxCoeff(), 0.0);
    });

    run("boundary.norm_star_power_iteration", [&] {
        const BoundaryBasis b = build_boundary_basis(g);
        const Eigen::Index m = std::min<Eigen::Index>(40, b.size());
        std::normal_distribution<double> nd;
        Eigen::MatrixXd L(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) L(i, j) = nd(rng);
        const Eigen::VectorXd lam = b.lambda.head(m);
        return below("boundary.norm_star_power_iteration",
                     rel(operator_norm_star(L, lam), oracle::power_norm_star(L, lam, 20000)), 1e-8);
    });

    run("recovery.pairing_identity", [&] {
        const CoefficientSet c1 = make_phantom(g, check_phantom(0.4, 2.0, 0.0), 1.0);
        const CoefficientSet c2 = make_phantom(g, check_phantom(0.7, 5.0, 0.05), 1.0);
        const std::size_t nb = omega_nodes(g).boundary.size();
        std::normal_distribution<double> nd;
        std::vector<double> g1(nb), g2(nb);
        for (auto& x : g1) x = nd(rng);
        for (auto& x : g2) x = nd(rng);
        const Eigen::MatrixXd S1 = nodal_schur(c1), S2 = nodal_schur(c2);
        const Eigen::Map<Eigen::VectorXd> a(g1.data(), nb), b(g2.data(), nb);
        const double lhs = b.dot((S1 - S2) * a);
        const RealField u1 = solve_dirichlet(c1, g1).u, u2 = solve_dirichlet(c2, g2).u;
        RealField v1(g), v2(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            v1[i] = std::sqrt(c1.gamma[i]) * u1[i];
            v2[i] = std::sqrt(c2.gamma[i]) * u2[i];
        }
        const double rhs = oracle::lemma41_volume_side(c1, c2, v1, v2);
        return below("recovery.pairing_identity", rel(lhs, rhs), 1e-6);
    });

    run("cgo.neumann_first_term", [&] {
        Phantom p;
        p.bumps.push_back({{0.0, 0.0, 0.0}, 0.45, 1e-3, BumpTarget::D});
        CoefficientSet c = make_phantom(g, p, 0.0);
        const RealField Q = liouville_Q(c);
        const CVec z = null_zeta(6.0, 0.0);
        RemainderOptions o;
        o.bloch = false;
        const CgoSolution s = solve_remainder(Q, z, o);
        const BourgainWeight w = remainder_weight(g, z, o);
        ComplexField mq(g);
        for (std::size_t i = 0; i < g.size(); ++i) mq[i] = -Q[i];
        const ComplexField psi1 = inv_delta_zeta(mq, w).u;
        ComplexField d(g);
        for (std::size_t i = 0; i < g.size(); ++i) d[i] = s.psi[i] - psi1[i];
        const double relc = xnorm(d, w, 0.5) / xnorm(psi1, w, 0.5);
        return below("cgo.neumann_first_term", relc, 1e-2, "relative second-order correction");
    });

    run("cgo.spectral_residual", [&] {
        const CoefficientSet c = make_phantom(g, check_phantom(0.5, 3.0, 0.0), 1.0);
        const RealField Q = liouville_Q(c);
        const CVec z = null_zeta(4.0 * min_tau_for_k(1.0, cfg.C_star), 0.0);
        const CgoSolution s = solve_remainder(Q, z);
        return below("cgo.spectral_residual", s.residual / s.xnorm_Q, 1e-8);
    });

    run("cgo.averaged_norm_std_error", [&] {
        const CoefficientSet c = make_phantom(g, check_phantom(0.5, 3.0, 0.0), 1.0);
        const AveragedNorm a = averaged_q_norm(c, 8.0, 0.0, 64, cfg.seed);
        const AveragedNorm b = averaged_q_norm(c, 8.0, 0.0, 128, cfg.seed + 1);
        // the standard error falls like 1/sqrt(samples)
        const double ratio = a.std_error / b.std_error;
        const double dev = std::max(ratio / std::sqrt(2.0), std::sqrt(2.0) / ratio);
        return below("cgo.averaged_norm_std_error", dev, 1.5, "ratio " + std::to_string(ratio));
    });

    run("recovery.envelope_crossover", [&] {
        EnvelopeParams p;
        const double A = std::exp(-40.0);
        // where the exponential term overtakes the logarithmic max
        double cross = 0.0;
        for (double k : {1.0, 2.0, 4.0, 8.0}) {
            const double lip = p.C * std::exp(p.C * std::pow(k, p.alpha)) * std::sqrt(A);
            const double logt = k * k * std::pow(std::pow(k, p.alpha) - std::log(A), 1.0 - p.s);
            const double hol = std::pow(k, -p.alpha * p.epsilon / (1.0 + p.epsilon));
            const double e1 = envelope(p, k, A).E1;
            if (rel(e1, lip + std::max({hol, std::pow(k, 4.0 - p.alpha), logt})) > 1e-12)
                return CheckResult{"", false, k, 0.0, "envelope disagrees with term sum", 0.0};
            if (cross == 0.0 && lip > std::max({hol, std::pow(k, 4.0 - p.alpha), logt}))
                cross = k;
        }
        return CheckResult{"", cross > 1.0, cross, 8.0,
                           "first k where the Lipschitz term dominates", 0.0};
    });

    run("dotf.corrupted_file", [&] {
        std::vector<unsigned char> bytes =
            encode_dotf(g, std::vector<cplx>(g.size(), cplx(1.0)), false);
        bytes[0] = 'X';
        std::size_t off1 = 99, off2 = 99;
        try {
            decode_dotf(bytes);
        } catch (const FormatError& e) {
            off1 = e.offset();
        }
        bytes[0] = 'D';
        bytes.resize(bytes.size() - 3);
        try {
            decode_dotf(bytes);
        } catch (const FormatError& e) {
            off2 = e.offset();
        }
        const bool ok = off1 == 0 && off2 != 99 && off2 > 0;
        return CheckResult{"", ok, double(off2), 0.0,
                           "magic offset " + std::to_string(off1) + ", truncation offset " +
                               std::to_string(off2),
                           0.0};
    });

    run("config.tau_below_min_rejected", [&] {
        RunConfig c = cfg;
        c.tau = 0.5 * min_tau_for_k(*std::max_element(c.k.begin(), c.k.end()), c.C_star);
        try {
            validate(c);
        } catch (const ConfigError& e) {
            return CheckResult{"", true, c.tau, 0.0, e.what(), 0.0};
        }
        return CheckResult{"", false, c.tau, 0.0, "config accepted", 0.0};
    });

    rep.seconds = std::chrono::duration<double>(Clock::now() - t_all).count();
    return rep;
}

} // namespace dotcgo
