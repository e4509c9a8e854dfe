#include "dotcgo/cgo.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dotcgo/errors.hpp"
#include "dotcgo/liouville.hpp"
#include "dotcgo/parallel.hpp"

namespace dotcgo {

namespace {

double rdot(const RVec& a, const RVec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

RVec normalized(RVec v) {
    const double s = std::sqrt(rdot(v, v));
    for (double& x : v) x /= s;
    return v;
}

void check_unit(const RVec& v, int n, const char* what) {
    if (static_cast<int>(v.size()) != n || std::abs(rdot(v, v) - 1.0) > 1e-12)
        throw FrameInfeasible(std::string(what) + " must be a unit vector of length n");
}

} // namespace

ZetaPair make_zeta_pair(int n, double r, const RVec& eta, double tau, const RVec& eta1) {
    if (!(tau > 0.0)) throw FrameInfeasible("tau must be positive");
    if (r < 0.0) throw FrameInfeasible("r must be non-negative");
    if (tau < 0.5 * r) throw FrameInfeasible("tau < r/2 leaves |beta|^2 negative");
    if (n == 2 && r > 0.0) throw FrameInfeasible("n = 2 supports r = 0 only");
    if (n != 2 && n != 3) throw FrameInfeasible("n must be 2 or 3");
    check_unit(eta, n, "eta");
    check_unit(eta1, n, "eta1");
    if (std::abs(rdot(eta, eta1)) > 1e-12) throw FrameInfeasible("eta1 not orthogonal to eta");

    ZetaPair z;
    z.n = n;
    z.r = r;
    z.tau = tau;
    z.eta = eta;
    z.eta1 = eta1;
    z.beta.assign(n, 0.0);
    if (n == 3) {
        const RVec c{eta[1] * eta1[2] - eta[2] * eta1[1], eta[2] * eta1[0] - eta[0] * eta1[2],
                     eta[0] * eta1[1] - eta[1] * eta1[0]};
        const double b = std::sqrt(std::max(0.0, tau * tau - 0.25 * r * r));
        for (int d = 0; d < 3; ++d) z.beta[d] = b * c[d];
    } else {
        // plane: beta must carry all of tau for zeta.zeta = 0
        z.beta = {-tau * eta1[1], tau * eta1[0]};
    }
    z.zeta1.resize(n);
    z.zeta2.resize(n);
    for (int d = 0; d < n; ++d) {
        z.zeta1[d] = cplx(tau * eta1[d], z.beta[d] - 0.5 * r * eta[d]);
        z.zeta2[d] = cplx(-tau * eta1[d], -z.beta[d] - 0.5 * r * eta[d]);
    }
    return z;
}

ZetaPair make_zeta_pair(int n, double r, const RVec& eta, double tau, std::uint64_t seed) {
    if (n != 2 && n != 3) throw FrameInfeasible("n must be 2 or 3");
    check_unit(eta, n, "eta");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    RVec v(n);
    double len = 0.0;
    do {
        for (double& x : v) x = nd(rng);
        const double a = rdot(v, eta);
        for (int d = 0; d < n; ++d) v[d] -= a * eta[d];
        len = std::sqrt(rdot(v, v));
    } while (len < 1e-8);
    for (double& x : v) x /= len;
    // one re-orthogonalisation pass keeps eta.eta1 at round-off
    const double a = rdot(v, eta);
    for (int d = 0; d < n; ++d) v[d] -= a * eta[d];
    return make_zeta_pair(n, r, eta, tau, normalized(v));
}

RVec axis_frame(const RVec& eta) {
    const int n = static_cast<int>(eta.size());
    int best = 0;
    for (int d = 1; d < n; ++d)
        if (std::abs(eta[d]) < std::abs(eta[best])) best = d;
    RVec v(n, 0.0);
    v[best] = 1.0;
    const double a = rdot(v, eta);
    for (int d = 0; d < n; ++d) v[d] -= a * eta[d];
    return normalized(v);
}

double min_tau_for_k(double k, double C_star) {
    if (k < 1.0 || !(C_star > 0.0))
        throw DomainViolation("min_tau_for_k needs k >= 1 and C_star > 0");
    return C_star * k * k / std::sqrt(2.0);
}

BourgainWeight remainder_weight(const Grid& g, const CVec& zeta, const RemainderOptions& o) {
    BourgainWeight w = o.symbol == SymbolKind::lattice ? cgo_weight(zeta, g) : default_weight(zeta);
    if (o.symbol == SymbolKind::continuum)
        w.reg_floor = std::sqrt(norm2(zeta)) * std::pow(frequency_cell(g), 1.0 / g.n);
    if (o.reg_floor >= 0.0) w.reg_floor = o.reg_floor;
    if (o.bloch) w.shift.assign(g.n, 0.5 * std::numbers::pi / g.R_box);
    return w;
}

CgoSolution solve_remainder(const RealField& Q, const CVec& zeta, const RemainderOptions& opts) {
    const Grid& g = Q.grid;
    if (static_cast<int>(zeta.size()) != g.n) throw DomainViolation("zeta has wrong length");
    const BourgainWeight w = remainder_weight(g, zeta, opts);
    const SymbolTable t = symbol_table(g, w);

    CgoSolution sol;
    sol.zeta = zeta;
    sol.zeta_eff = w.zeta;
    sol.min_abs_p = t.min_abs_p;
    sol.clamped = t.clamped;
    sol.psi = ComplexField(g, 0.0);

    // twist exp(i xi0.x); identically 1 without the shift
    ComplexField twist(g, cplx(1.0));
    if (!w.shift.empty())
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.position(i);
            double ph = 0.0;
            for (int d = 0; d < g.n; ++d) ph += w.shift[d] * x[d];
            twist[i] = std::polar(1.0, ph);
        }
    ComplexField Qt(g);
    for (std::size_t i = 0; i < g.size(); ++i) Qt[i] = Q[i] * std::conj(twist[i]);
    sol.xnorm_Q = xnorm(fft(Qt), t, -0.5);

    if (sol.xnorm_Q > 0.0) {
        double last = std::numeric_limits<double>::infinity();
        double first = 0.0;
        int growth = 0;
        bool done = false;
        ComplexField src(g);
        for (int it = 0; it < opts.max_iter; ++it) {
            for (std::size_t i = 0; i < g.size(); ++i) src[i] = -(Qt[i] + Q[i] * sol.psi[i]);
            SpectralField S = fft(src);
            for (std::size_t i = 0; i < S.c.size(); ++i) S.c[i] /= t.p_reg[i];
            ComplexField next = ifft(S);

            ComplexField diff(g);
            for (std::size_t i = 0; i < g.size(); ++i) diff[i] = next[i] - sol.psi[i];
            const double dif = xnorm(fft(diff), t, 0.5);
            sol.psi = std::move(next);
            sol.iterations = it + 1;
            if (!std::isfinite(dif)) throw ContractionFailure("remainder iteration diverged");
            if (it == 0) first = dif;
            else if (first > 0.0) sol.contraction = std::pow(dif / first, 1.0 / it);
            growth = dif > last ? growth + 1 : 0;
            if (growth >= 3)
                throw ContractionFailure("update norm grew three times in a row, |zeta| too small");
            last = dif;
            if (dif < opts.tol * sol.xnorm_Q) {
                done = true;
                break;
            }
        }
        if (!done) throw ContractionFailure("no convergence within max_iter");
    }

    // residual of the regularised equation the iteration actually solves,
    // measured on the periodic factor phi
    ComplexField qpsi(g);
    for (std::size_t i = 0; i < g.size(); ++i) qpsi[i] = Qt[i] + Q[i] * sol.psi[i];
    SpectralField R = fft(qpsi);
    const SpectralField P = fft(sol.psi);
    for (std::size_t i = 0; i < R.c.size(); ++i) R.c[i] += t.p_reg[i] * P.c[i];
    sol.residual = xnorm(R, t, -0.5);
    sol.xnorm_psi = xnorm(P, t, 0.5);
    for (std::size_t i = 0; i < g.size(); ++i) sol.psi[i] *= twist[i];

    // scaled exponential, max over the box factored out
    double gmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.position(i);
        double e = 0.0;
        for (int d = 0; d < g.n; ++d) e += sol.zeta_eff[d].real() * x[d];
        gmax = std::max(gmax, e);
    }
    sol.gauge = gmax;
    sol.v = ComplexField(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.position(i);
        cplx e = 0.0;
        for (int d = 0; d < g.n; ++d) e += sol.zeta_eff[d] * x[d];
        sol.v[i] = std::exp(e - gmax) * (1.0 + sol.psi[i]);
    }
    return sol;
}

CgoTrace cgo_trace(const CgoSolution& sol, const CoefficientSet& coeffs,
                   const BoundaryBasis& basis, Eigen::Index m_modes, double max_loss) {
    const Grid& g = basis.grid;
    if (m_modes < 1 || m_modes > basis.size())
        throw DomainViolation("cgo_trace: m_modes outside the basis");
    const auto nb = static_cast<Eigen::Index>(basis.nodes.size());

    // re-gauge on the boundary nodes only
    double gmax = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : basis.nodes) {
        const auto x = g.position(idx);
        double e = 0.0;
        for (int d = 0; d < g.n; ++d) e += sol.zeta_eff[d].real() * x[d];
        gmax = std::max(gmax, e);
    }
    CgoTrace tr;
    tr.gauge = gmax;
    tr.nodal.resize(nb);
    for (Eigen::Index a = 0; a < nb; ++a) {
        const std::size_t idx = basis.nodes[a];
        const auto x = g.position(idx);
        cplx e = 0.0;
        for (int d = 0; d < g.n; ++d) e += sol.zeta_eff[d] * x[d];
        tr.nodal[a] = std::exp(e - gmax) * (1.0 + sol.psi[idx]) / std::sqrt(coeffs.gamma[idx]);
    }
    tr.coeffs = basis.project(tr.nodal, m_modes);
    tr.energy = basis.weight * tr.nodal.squaredNorm();
    tr.captured = tr.coeffs.squaredNorm();
    tr.loss = tr.energy > 0.0 ? std::max(0.0, 1.0 - tr.captured / tr.energy) : 0.0;
    if (tr.loss > max_loss)
        throw ProjectionLoss("trace loses " + std::to_string(100.0 * tr.loss) +
                             "% of its energy to the basis truncation");
    return tr;
}

AveragedNorm averaged_q_norm(const CoefficientSet& coeffs, double lambda, double r,
                             int samples, std::uint64_t seed, RVec eta) {
    if (lambda < 1.0 || samples < 16)
        throw DomainViolation("averaged_q_norm needs lambda >= 1 and samples >= 16");
    const Grid& g = coeffs.gamma.grid;
    if (eta.empty()) {
        eta.assign(g.n, 0.0);
        eta[g.n - 1] = 1.0;
    }
    const RealField Q = liouville_Q(coeffs);
    const SpectralField Qhat = fft(Q);

    // draws made up front so the result does not depend on scheduling
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(lambda, 2.0 * lambda);
    std::vector<double> taus(samples);
    std::vector<std::uint64_t> seeds(samples);
    for (int i = 0; i < samples; ++i) {
        taus[i] = std::max(ud(rng), 0.5 * r);
        seeds[i] = rng();
    }
    std::vector<double> vals(samples);
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        const ZetaPair zp = make_zeta_pair(g.n, r, eta, taus[i], seeds[i]);
        const SymbolTable t = symbol_table(g, cgo_weight(zp.zeta1, g));
        const double x = xnorm(Qhat, t, -0.5);
        vals[i] = x * x;
    });
    AveragedNorm out;
    for (double v : vals) out.mean += v;
    out.mean /= samples;
    double var = 0.0;
    for (double v : vals) var += (v - out.mean) * (v - out.mean);
    var /= std::max(1, samples - 1);
    out.std_error = std::sqrt(var / samples);
    return out;
}

} // namespace dotcgo
