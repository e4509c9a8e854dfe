#include "dotcgo/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "dotcgo/errors.hpp"
#include "dotcgo/liouville.hpp"
#include "dotcgo/parallel.hpp"

namespace dotcgo {

DtNMatrix perturb_dtn(const DtNMatrix& L, double sigma, std::uint64_t seed) {
    DtNMatrix out = L;
    if (sigma <= 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, sigma);
    for (Eigen::Index j = 0; j < out.L.cols(); ++j)
        for (Eigen::Index i = 0; i < out.L.rows(); ++i) out.L(i, j) += nd(rng);
    return out;
}

cplx pairing(const DtNMatrix& L1, const DtNMatrix& L2, const Eigen::VectorXcd& g1,
             const Eigen::VectorXcd& g2) {
    if (L1.modes() != L2.modes() || g1.size() != L1.modes() || g2.size() != L1.modes())
        throw DomainViolation("pairing: size mismatch");
    const Eigen::VectorXcd t = (L1.L - L2.L).cast<cplx>() * g1;
    return g2.transpose() * t;
}

RecoverySetup make_setup(const CoefficientSet& c1, const CoefficientSet& c2,
                         const BoundaryBasis& basis, const RemainderOptions& opts) {
    RecoverySetup s;
    s.c1 = c1;
    s.c2 = c2;
    s.Q1 = liouville_Q(c1);
    s.Q2 = liouville_Q(c2);
    s.basis = &basis;
    s.opts = opts;
    return s;
}

cplx fourier_coefficient(const RealField& dQ, const RVec& xi) {
    const Grid& g = dQ.grid;
    const double hn = std::pow(g.h(), g.n);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (dQ[i] == 0.0) continue;
        const auto x = g.position(i);
        double ph = 0.0;
        for (int d = 0; d < g.n; ++d) ph += xi[d] * x[d];
        acc += dQ[i] * std::polar(1.0, -ph);
    }
    return hn * acc;
}

ModeEstimate recover_fourier_mode(const RecoverySetup& setup, const DtNMatrix& L1,
                                  const DtNMatrix& L2, const ZetaPair& zp) {
    const Grid& g = setup.Q1.grid;
    const BoundaryBasis& basis = *setup.basis;
    const Eigen::Index m = L1.modes();

    const CgoSolution s1 = solve_remainder(setup.Q1, zp.zeta1, setup.opts);
    const CgoSolution s2 = solve_remainder(setup.Q2, zp.zeta2, setup.opts);
    const CgoTrace t1 = cgo_trace(s1, setup.c1, basis, m, setup.max_loss);
    const CgoTrace t2 = cgo_trace(s2, setup.c2, basis, m, setup.max_loss);

    ModeEstimate me;
    me.r = zp.r;
    me.eta = zp.eta;
    me.tau = zp.tau;
    me.pairing_value = pairing(L1, L2, t1.coeffs, t2.coeffs);
    me.log_scale = t1.gauge + t2.gauge;
    me.fhat_est = std::exp(me.log_scale) * me.pairing_value;
    me.trace_loss = std::max(t1.loss, t2.loss);
    me.iterations = s1.iterations + s2.iterations;

    RealField dQ(g);
    for (std::size_t i = 0; i < g.size(); ++i) dQ[i] = setup.Q2[i] - setup.Q1[i];
    RVec xi(g.n);
    for (int d = 0; d < g.n; ++d) xi[d] = zp.r * zp.eta[d];
    me.fhat_true = fourier_coefficient(dQ, xi);
    const double dk = std::numbers::pi / g.R_box;
    for (int d = 0; d < g.n; ++d) {
        const double q = xi[d] / dk;
        if (std::abs(q - std::round(q)) > 1e-9) me.off_lattice = true;
    }

    const double hn = std::pow(g.h(), g.n);
    cplx a = 0.0, b = 0.0, c = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (setup.Q1[i] == 0.0 && setup.Q2[i] == 0.0) continue;
        const auto x = g.position(i);
        cplx e = 0.0;
        for (int d = 0; d < g.n; ++d) e += (s1.zeta_eff[d] + s2.zeta_eff[d]) * x[d];
        const cplx ex = std::exp(e);
        const cplx pp = s1.psi[i] * s2.psi[i];
        a += dQ[i] * ex * (s1.psi[i] + s2.psi[i]);
        b += setup.Q2[i] * ex * pp;
        c += setup.Q1[i] * ex * pp;
    }
    me.remainder_terms = {hn * std::abs(a), hn * std::abs(b), hn * std::abs(c)};
    return me;
}

double t_cut_for(const RecoveryParams& p) {
    const double rule = p.a0 * std::pow(p.k, p.alpha);
    if (p.T_cut <= 0.0) return rule;
    if (p.T_cut < rule) throw DomainViolation("T_cut below a0 k^alpha");
    return p.T_cut;
}

std::vector<std::size_t> polar_design_bins(const Grid& g, double T_cut, int mode_budget) {
    if (mode_budget < 1) throw DomainViolation("mode_budget must be positive");
    const double dk = std::numbers::pi / g.R_box;
    std::vector<RVec> dirs;
    int J = std::max(1, static_cast<int>(std::lround(std::cbrt(double(mode_budget)))));
    int K = std::max(1, (mode_budget - 1) / J);
    if (g.n == 2) {
        J = std::max(1, static_cast<int>(std::lround(std::sqrt(double(mode_budget)))));
        K = std::max(1, (mode_budget - 1) / J);
        for (int i = 0; i < K; ++i) {
            const double t = 2.0 * std::numbers::pi * i / K;
            dirs.push_back({std::cos(t), std::sin(t)});
        }
    } else {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < K; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / K;
            const double rr = std::sqrt(1.0 - z * z);
            dirs.push_back({rr * std::cos(golden * i), rr * std::sin(golden * i), z});
        }
    }
    std::set<std::size_t> bins;
    bins.insert(0); // r = 0
    for (int j = 1; j <= J; ++j) {
        const double r = T_cut * double(j * j) / double(J * J);
        for (const RVec& e : dirs) {
            std::array<int, 3> p{0, 0, 0};
            bool inside = true;
            for (int d = 0; d < g.n; ++d) {
                const long q = std::lround(r * e[d] / dk);
                if (q < -g.N / 2 || q >= g.N / 2) inside = false;
                p[d] = static_cast<int>((q + g.N) % g.N);
            }
            if (!inside) continue;
            const std::size_t idx = g.flatten(p);
            double rr = 0.0;
            for (double x : frequency(g, idx)) rr += x * x;
            if (std::sqrt(rr) <= T_cut + 1e-12) bins.insert(idx);
        }
    }
    return {bins.begin(), bins.end()};
}

namespace {

std::size_t mirror(const Grid& g, std::size_t idx) {
    auto p = g.unflatten(idx);
    for (int d = 0; d < g.n; ++d) p[d] = (g.N - p[d]) % g.N;
    return g.flatten(p);
}

} // namespace

Reconstruction recover_q_diff(const RecoverySetup& setup, const DtNMatrix& L1,
                              const DtNMatrix& L2, const RecoveryParams& params) {
    const Grid& g = setup.Q1.grid;
    Reconstruction rec;
    rec.T_cut = t_cut_for(params);
    const double tau_base = params.tau_mult * min_tau_for_k(params.k, params.C_star);

    // one estimate per bin, -xi is filled from +xi by conjugation
    std::vector<std::size_t> todo;
    {
        std::set<std::size_t> seen;
        for (std::size_t idx : polar_design_bins(g, rec.T_cut, params.mode_budget)) {
            if (seen.count(idx) || seen.count(mirror(g, idx))) continue;
            seen.insert(idx);
            todo.push_back(idx);
        }
    }

    struct Slot {
        bool ok = false;
        bool projection = false;
        ModeEstimate me;
    };
    std::vector<Slot> slots(todo.size());
    parallel_for(todo.size(), [&](std::size_t j) {
        const RVec xi = frequency(g, todo[j]);
        double r = 0.0;
        for (double x : xi) r += x * x;
        r = std::sqrt(r);
        RVec eta(g.n, 0.0);
        if (r > 0.0)
            for (int d = 0; d < g.n; ++d) eta[d] = xi[d] / r;
        else
            eta[g.n - 1] = 1.0;
        const double tau = std::max(tau_base, 0.5 * r);
        try {
            const ZetaPair zp = make_zeta_pair(g.n, r, eta, tau, axis_frame(eta));
            slots[j].me = recover_fourier_mode(setup, L1, L2, zp);
            slots[j].ok = std::isfinite(std::abs(slots[j].me.fhat_est));
        } catch (const ProjectionLoss&) {
            slots[j].projection = true;
        } catch (const ContractionFailure&) {
        } catch (const FrameInfeasible&) {
        }
    });

    SpectralField F{g, std::vector<cplx>(g.size(), cplx(0.0))};
    std::vector<char> filled(g.size(), 0);
    for (std::size_t j = 0; j < todo.size(); ++j) {
        if (!slots[j].ok) {
            ++rec.modes_failed;
            if (slots[j].projection) ++rec.projection_loss;
            else ++rec.contraction_failure;
            continue;
        }
        ++rec.modes_ok;
        const std::size_t idx = todo[j];
        F.c[idx] = slots[j].me.fhat_est;
        filled[idx] = 1;
        const std::size_t mi = mirror(g, idx);
        if (!filled[mi]) {
            F.c[mi] = std::conj(slots[j].me.fhat_est);
            filled[mi] = 1;
        }
        rec.modes.push_back(slots[j].me);
    }
    rec.dQ = real_part(ifft(F));

    RealField diff(g), truth(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        truth[i] = setup.Q2[i] - setup.Q1[i];
        diff[i] = rec.dQ[i] - truth[i];
    }
    rec.error_hs = hs_norm(diff, params.s);
    rec.oracle_hs = hs_norm(truth, params.s);
    return rec;
}

namespace {

void check_envelope(const EnvelopeParams& p, double k, double A) {
    if (k < 1.0) throw DomainViolation("envelope: k must be >= 1");
    if (!(A > 0.0)) throw DomainViolation("envelope: A must be positive");
    if (-std::log(A) < 1.0) throw DomainViolation("envelope: -log A < 1");
    if (!(2.0 * p.s > p.n + 3)) throw DomainViolation("envelope: need 2s > n + 3");
    if (!(p.alpha > 2.0)) throw DomainViolation("envelope: need alpha > 2");
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw DomainViolation("envelope: eps in (0,1)");
}

} // namespace

EnvelopeValue envelope(const EnvelopeParams& p, double k, double A) {
    check_envelope(p, k, A);
    const double lip = p.C * std::exp(p.C * std::pow(k, p.alpha) + 0.5 * std::log(A));
    EnvelopeValue e;
    if (p.alpha > 4.0) {
        const double t1 = std::pow(k, -p.alpha * p.epsilon / (1.0 + p.epsilon));
        const double t2 = std::pow(k, 4.0 - p.alpha);
        const double t3 = k * k * std::pow(std::pow(k, p.alpha) - std::log(A), 1.0 - p.s);
        e.E1 = lip + p.C * std::max({t1, t2, t3});
    } else {
        e.E1 = std::numeric_limits<double>::quiet_NaN();
    }
    e.E2 = lip + p.C * std::max(1.0 / (k * k), std::pow(k, 2.0 - p.alpha));
    return e;
}

EnvelopeFit fit_envelope(const EnvelopeParams& p, const std::vector<double>& k,
                         const std::vector<double>& A, const std::vector<double>& err) {
    if (k.empty() || k.size() != A.size() || k.size() != err.size())
        throw DomainViolation("fit_envelope: ragged input");
    if (!(p.alpha > 4.0)) throw DomainViolation("fit_envelope: E1 needs alpha > 4");
    auto E1 = [&](double logC, std::size_t i) {
        EnvelopeParams q = p;
        q.C = std::exp(logC);
        return envelope(q, k[i], A[i]).E1;
    };
    auto objective = [&](double logC) {
        double s = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            const double e = E1(logC, i);
            if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
            const double t = std::log(e) - std::log(std::max(err[i], 1e-300));
            s += t * t;
        }
        return s;
    };
    // coarse scan, then golden section around the best grid point
    double best = -30.0, fbest = objective(best);
    for (double x = -30.0; x <= 10.0; x += 0.05) {
        const double f = objective(x);
        if (f < fbest) { fbest = f; best = x; }
    }
    double a = best - 0.05, b = best + 0.05;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80; ++it) {
        const double c = b - gr * (b - a), d = a + gr * (b - a);
        if (objective(c) < objective(d)) b = d; else a = c;
    }
    EnvelopeFit fit;
    fit.C_ls = std::exp(0.5 * (a + b));

    auto bounds_all = [&](double logC) {
        for (std::size_t i = 0; i < k.size(); ++i)
            if (!(E1(logC, i) >= err[i])) return false;
        return true;
    };
    double lo = -60.0, hi = 10.0;
    if (bounds_all(lo)) {
        fit.C_min = std::exp(lo);
    } else {
        while (!bounds_all(hi)) hi += 5.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (bounds_all(mid) ? hi : lo) = mid;
        }
        fit.C_min = std::exp(hi);
    }
    fit.C = std::max(fit.C_ls, fit.C_min);
    return fit;
}

GammaInverseDiff gamma_inverse_diff(const RecoverySetup& setup, const RealField& dQ,
                                    double k, double s) {
    if (k < 1.0) throw DomainViolation("gamma_inverse_diff: k must be >= 1");
    const Grid& g = dQ.grid;
    RealField est(g, 0.0), truth(g, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_omega(i)) continue;
        est[i] = dQ[i];
        truth[i] = 1.0 / setup.c1.gamma[i] - 1.0 / setup.c2.gamma[i];
    }
    GammaInverseDiff out;
    out.estimate = hs_norm(est, s) / (k * k);
    out.oracle = hs_norm(truth, s);
    return out;
}

} // namespace dotcgo
