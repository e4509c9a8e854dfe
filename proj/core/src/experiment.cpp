#include "dotcgo/experiment.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "dotcgo/errors.hpp"
#include "dotcgo/forward.hpp"
#include "dotcgo/liouville.hpp"

#ifndef DOTCGO_VERSION
#define DOTCGO_VERSION "unknown"
#endif

namespace dotcgo {

using json = nlohmann::json;

const char* version_string() { return DOTCGO_VERSION; }

std::uint64_t noise_seed(std::uint64_t seed, std::size_t row, int which) {
    // splitmix64 step over (seed, row, which)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (2 * row + which + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Grid config_grid(const RunConfig& c) {
    return make_grid(c.grid.n, c.grid.N, c.grid.R_box, c.grid.L_Omega, c.grid.R);
}

RecoveryParams recovery_params(const RunConfig& c, double k) {
    RecoveryParams p;
    p.k = k;
    p.alpha = c.alpha;
    p.a0 = c.a0;
    p.T_cut = c.T_cut;
    p.C_star = c.C_star;
    p.tau_mult = c.tau_mult;
    p.s = c.s;
    p.mode_budget = c.mode_budget;
    return p;
}

EnvelopeParams envelope_params(const RunConfig& c) {
    EnvelopeParams e;
    e.alpha = c.alpha;
    e.delta = c.delta;
    e.s = c.s;
    e.epsilon = c.epsilon;
    e.n = c.grid.n;
    return e;
}

SweepResult run_sweep(const RunConfig& c, const BoundaryBasis& basis) {
    const Grid g = config_grid(c);
    SweepResult res;
    RemainderOptions opts;
    opts.max_iter = c.max_iter;
    opts.tol = c.tol;

    for (std::size_t row = 0; row < c.k.size(); ++row) {
        const auto t0 = std::chrono::steady_clock::now();
        StabilityRecord rec;
        rec.k = c.k[row];
        const RecoveryParams rp = recovery_params(c, rec.k);
        rec.T_cut = t_cut_for(rp);
        try {
            const CoefficientSet c1 = make_phantom(g, c.phantom1, rec.k, c.M);
            const CoefficientSet c2 = make_phantom(g, c.phantom2, rec.k, c.M);
            const DtNMatrix L1 = assemble_dtn(c1, basis, basis.size());
            const DtNMatrix L2 = assemble_dtn(c2, basis, basis.size());
            if ((L1.L - L2.L).cwiseAbs().maxCoeff() == 0.0) {
                rec.identical = true;
                rec.A = 0.0;
                rec.minus_log_A = std::numeric_limits<double>::infinity();
                rec.envelope_value = std::numeric_limits<double>::quiet_NaN();
                rec.message = "IdenticalData";
            } else {
                const DtNMatrix N1 = perturb_dtn(L1, c.sigma, noise_seed(c.seed, row, 0));
                const DtNMatrix N2 = perturb_dtn(L2, c.sigma, noise_seed(c.seed, row, 1));
                const Eigen::Index mA = std::min<Eigen::Index>(c.m_modes, basis.size());
                const DataProxy dp = data_proxy_A(leading_block(N1, mA), leading_block(N2, mA),
                                                  basis.lambda.head(mA), c.delta);
                rec.A = dp.A;
                rec.minus_log_A = dp.minus_log_A;

                RecoverySetup setup = make_setup(c1, c2, basis, opts);
                setup.max_loss = c.max_loss;
                const Eigen::Index mp = c.m_pair > 0
                                            ? std::min<Eigen::Index>(c.m_pair, basis.size())
                                            : basis.size();
                const Reconstruction r =
                    recover_q_diff(setup, leading_block(N1, mp), leading_block(N2, mp), rp);
                rec.recovery_error_hs = r.error_hs;
                rec.oracle_hs = r.oracle_hs;
                rec.modes_ok = r.modes_ok;
                rec.modes_failed = r.modes_failed;
                rec.projection_loss = r.projection_loss;
                rec.contraction_failure = r.contraction_failure;
                if (r.modes_ok == 0) {
                    rec.failed = true;
                    rec.message = "no mode estimate succeeded";
                }
            }
        } catch (const Error& e) {
            rec.failed = true;
            rec.message = e.what();
        }
        rec.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (rec.failed) res.all_ok = false;
        res.rows.push_back(rec);
    }

    // fit C on rows inside the envelope's domain
    const EnvelopeParams ep = envelope_params(c);
    std::vector<double> ks, As, errs;
    for (const auto& r : res.rows)
        if (!r.failed && !r.identical && r.minus_log_A >= 1.0) {
            ks.push_back(r.k);
            As.push_back(r.A);
            errs.push_back(r.recovery_error_hs);
        }
    if (!ks.empty()) {
        res.fit = fit_envelope(ep, ks, As, errs);
        res.fit_ok = true;
    }
    for (auto& r : res.rows) {
        if (r.identical) continue;
        if (!res.fit_ok || r.failed || r.minus_log_A < 1.0) {
            r.envelope_value = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        EnvelopeParams fp = ep;
        fp.C = res.fit.C;
        r.envelope_value = envelope(fp, r.k, r.A).E1;
    }
    return res;
}

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json num_json(double x) {
    if (std::isfinite(x)) return x;
    return num(x);
}

} // namespace

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream os;
    os << "k,A,minus_log_A,recovery_error_hs,envelope_value,T_cut,modes_ok,modes_failed\n";
    for (const auto& row : r.rows)
        os << num(row.k) << ',' << num(row.A) << ',' << num(row.minus_log_A) << ','
           << num(row.recovery_error_hs) << ',' << num(row.envelope_value) << ','
           << num(row.T_cut) << ',' << row.modes_ok << ',' << row.modes_failed << '\n';
    return os.str();
}

std::string sweep_manifest(const RunConfig& c, const SweepResult& r) {
    json m;
    m["version"] = version_string();
    m["config"] = json::parse(config_to_json(c));
    json seeds = json::array();
    for (std::size_t i = 0; i < c.k.size(); ++i)
        seeds.push_back({{"k", c.k[i]},
                         {"noise_seed_1", noise_seed(c.seed, i, 0)},
                         {"noise_seed_2", noise_seed(c.seed, i, 1)}});
    m["seeds"] = {{"run", c.seed}, {"rows", seeds}};
    m["envelope_fit"] = {{"ok", r.fit_ok},
                         {"C_ls", num_json(r.fit.C_ls)},
                         {"C_min", num_json(r.fit.C_min)},
                         {"C", num_json(r.fit.C)}};
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"k", row.k},
                        {"A", num_json(row.A)},
                        {"minus_log_A", num_json(row.minus_log_A)},
                        {"recovery_error_hs", num_json(row.recovery_error_hs)},
                        {"oracle_hs", num_json(row.oracle_hs)},
                        {"envelope_value", num_json(row.envelope_value)},
                        {"T_cut", row.T_cut},
                        {"modes_ok", row.modes_ok},
                        {"modes_failed", row.modes_failed},
                        {"projection_loss", row.projection_loss},
                        {"contraction_failure", row.contraction_failure},
                        {"identical", row.identical},
                        {"failed", row.failed},
                        {"message", row.message},
                        {"seconds", row.seconds}});
    m["rows"] = rows;
    m["all_ok"] = r.all_ok;
    return m.dump(2);
}

Calibration calibrate_c_star(const RunConfig& c, const std::vector<double>& ks, double max_C) {
    const Grid g = config_grid(c);
    Calibration cal;
    RemainderOptions opts;
    opts.max_iter = c.max_iter;
    opts.tol = c.tol;
    RVec eta(g.n, 0.0);
    eta[g.n - 1] = 1.0;
    for (double C = 1.0; C <= max_C; C *= 2.0) {
        bool good = true;
        for (double k : ks) {
            const double tau = min_tau_for_k(k, C);
            const ZetaPair zp = make_zeta_pair(g.n, 0.0, eta, tau, axis_frame(eta));
            for (int which = 0; which < 2; ++which) {
                const CoefficientSet cs =
                    make_phantom(g, which == 0 ? c.phantom1 : c.phantom2, k, c.M);
                const RealField Q = liouville_Q(cs);
                CalibrationStep st{C, k, which, false, 0.0, 0};
                try {
                    const CgoSolution s = solve_remainder(Q, which == 0 ? zp.zeta1 : zp.zeta2, opts);
                    st.converged = true;
                    st.contraction = s.contraction;
                    st.iterations = s.iterations;
                } catch (const ContractionFailure&) {
                }
                cal.steps.push_back(st);
                if (!st.converged || st.contraction > 0.5) good = false;
            }
        }
        if (good) {
            cal.C_star = C;
            break;
        }
    }
    return cal;
}

} // namespace dotcgo
