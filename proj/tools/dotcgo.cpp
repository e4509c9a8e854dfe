// dotcgo command line front end.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dotcgo/checks.hpp"
#include "dotcgo/config.hpp"
#include "dotcgo/dotf.hpp"
#include "dotcgo/errors.hpp"
#include "dotcgo/experiment.hpp"
#include "dotcgo/forward.hpp"
#include "dotcgo/liouville.hpp"
#include "dotcgo/recovery.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace dotcgo;

namespace {

struct Globals {
    std::string config_path;
    std::vector<std::string> sets;
};

RunConfig resolve(const Globals& gl) {
    std::string text;
    if (!gl.config_path.empty()) {
        std::ifstream is(gl.config_path);
        if (!is) throw ConfigError("cannot open config " + gl.config_path);
        std::stringstream ss;
        ss << is.rdbuf();
        text = ss.str();
    } else {
        text = "{}";
    }
    for (const auto& s : gl.sets) apply_override(text, s);
    RunConfig c = parse_config(text);
    validate(c);
    return c;
}

fs::path out_dir(const RunConfig& c) {
    fs::path p(c.output);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot write " + p.string());
    os << s;
}

std::string knum(double k) {
    std::ostringstream os;
    os << k;
    return os.str();
}

BoundaryBasis basis_for(const RunConfig& c) {
    return cached_basis(config_grid(c), c.basis_cache);
}

RVec eta_for(const RunConfig& c) {
    if (!c.eta.empty()) return c.eta;
    RVec e(c.grid.n, 0.0);
    e[c.grid.n - 1] = 1.0;
    return e;
}

double tau_for(const RunConfig& c, double k) {
    const double t = c.tau > 0.0 ? c.tau : c.tau_mult * min_tau_for_k(k, c.C_star);
    return std::max(t, 0.5 * c.r);
}

int cmd_phantom(const RunConfig& c) {
    const Grid g = config_grid(c);
    const fs::path dir = out_dir(c);
    for (double k : c.k) {
        for (int j = 1; j <= 2; ++j) {
            const CoefficientSet cs = make_phantom(g, j == 1 ? c.phantom1 : c.phantom2, k, c.M);
            const std::string tag = "_" + std::to_string(j) + "_k" + knum(k);
            write_dotf((dir / ("gamma" + tag + ".dotf")).string(), cs.gamma);
            write_dotf((dir / ("D" + tag + ".dotf")).string(), cs.D);
            write_dotf((dir / ("Q" + tag + ".dotf")).string(), liouville_Q(cs));
        }
    }
    std::cout << "wrote phantom fields to " << dir.string() << "\n";
    return 0;
}

int cmd_forward(const RunConfig& c) {
    const Grid g = config_grid(c);
    const fs::path dir = out_dir(c);
    const BoundaryBasis b = basis_for(c);
    const Eigen::Index m = std::min<Eigen::Index>(c.m_modes, b.size());
    for (double k : c.k) {
        for (int j = 1; j <= 2; ++j) {
            const CoefficientSet cs = make_phantom(g, j == 1 ? c.phantom1 : c.phantom2, k, c.M);
            const std::string tag = "_" + std::to_string(j) + "_k" + knum(k);
            write_dotf((dir / ("gamma" + tag + ".dotf")).string(), cs.gamma);
            write_dotf((dir / ("D" + tag + ".dotf")).string(), cs.D);
            write_dotf((dir / ("Q" + tag + ".dotf")).string(), liouville_Q(cs));
            save_dtn(assemble_dtn(cs, b, m), (dir / ("dtn" + tag)).string());
        }
        std::cout << "k=" << k << ": DtN pair written (" << m << " modes)\n";
    }
    return 0;
}

int cmd_dtn(const RunConfig& c) {
    const Grid g = config_grid(c);
    const BoundaryBasis b = basis_for(c);
    const Eigen::Index m = std::min<Eigen::Index>(c.m_modes, b.size());
    json rows = json::array();
    for (std::size_t i = 0; i < c.k.size(); ++i) {
        const double k = c.k[i];
        const DtNMatrix L1 = perturb_dtn(
            assemble_dtn(make_phantom(g, c.phantom1, k, c.M), b, m), c.sigma, noise_seed(c.seed, i, 0));
        const DtNMatrix L2 = perturb_dtn(
            assemble_dtn(make_phantom(g, c.phantom2, k, c.M), b, m), c.sigma, noise_seed(c.seed, i, 1));
        json row{{"k", k}};
        try {
            const DataProxy dp = data_proxy_A(L1, L2, b.lambda.head(m), c.delta);
            row.update({{"d", dp.d},
                        {"A", dp.A},
                        {"minus_log_A", dp.minus_log_A},
                        {"log_ok", dp.log_ok},
                        {"tail_ratio", dp.tail_ratio}});
        } catch (const IdenticalData&) {
            row.update({{"A", 0.0}, {"identical", true}});
        }
        rows.push_back(row);
    }
    const std::string out = rows.dump(2);
    write_text(out_dir(c) / "dtn.json", out);
    std::cout << out << "\n";
    return 0;
}

int cmd_cgo(const RunConfig& c, bool calibrate) {
    if (calibrate) {
        const Calibration cal = calibrate_c_star(c, c.k);
        json steps = json::array();
        for (const auto& s : cal.steps)
            steps.push_back({{"C_star", s.C_star},
                             {"k", s.k},
                             {"potential", s.which + 1},
                             {"converged", s.converged},
                             {"contraction", s.contraction},
                             {"iterations", s.iterations}});
        const json j{{"C_star", cal.C_star}, {"steps", steps}};
        write_text(out_dir(c) / "calibration.json", j.dump(2));
        std::cout << j.dump(2) << "\n";
        return cal.C_star > 0.0 ? 0 : 1;
    }
    const Grid g = config_grid(c);
    const double k = c.k.front();
    const CoefficientSet cs = make_phantom(g, c.phantom1, k, c.M);
    const ZetaPair zp = make_zeta_pair(g.n, c.r, eta_for(c), tau_for(c, k), c.seed);
    RemainderOptions opts;
    opts.max_iter = c.max_iter;
    opts.tol = c.tol;
    const CgoSolution s = solve_remainder(liouville_Q(cs), zp.zeta1, opts);
    const fs::path dir = out_dir(c);
    write_dotf((dir / "psi.dotf").string(), s.psi);
    const json j{{"k", k},
                 {"tau", zp.tau},
                 {"r", zp.r},
                 {"iterations", s.iterations},
                 {"contraction", s.contraction},
                 {"residual", s.residual},
                 {"xnorm_Q", s.xnorm_Q},
                 {"xnorm_psi", s.xnorm_psi},
                 {"ratio", s.xnorm_psi / s.xnorm_Q},
                 {"min_abs_p", s.min_abs_p},
                 {"clamped", s.clamped}};
    write_text(dir / "cgo.json", j.dump(2));
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_recover(const RunConfig& c) {
    const Grid g = config_grid(c);
    const BoundaryBasis b = basis_for(c);
    const double k = c.k.front();
    const CoefficientSet c1 = make_phantom(g, c.phantom1, k, c.M);
    const CoefficientSet c2 = make_phantom(g, c.phantom2, k, c.M);
    const Eigen::Index mp = c.m_pair > 0 ? std::min<Eigen::Index>(c.m_pair, b.size()) : b.size();
    const DtNMatrix L1 = perturb_dtn(assemble_dtn(c1, b, mp), c.sigma, noise_seed(c.seed, 0, 0));
    const DtNMatrix L2 = perturb_dtn(assemble_dtn(c2, b, mp), c.sigma, noise_seed(c.seed, 0, 1));
    RemainderOptions opts;
    opts.max_iter = c.max_iter;
    opts.tol = c.tol;
    RecoverySetup setup = make_setup(c1, c2, b, opts);
    setup.max_loss = c.max_loss;
    const Reconstruction r = recover_q_diff(setup, L1, L2, recovery_params(c, k));
    const GammaInverseDiff gi = gamma_inverse_diff(setup, r.dQ, k, c.s);

    const fs::path dir = out_dir(c);
    write_dotf((dir / "dQ.dotf").string(), r.dQ);
    std::ostringstream modes;
    modes << "r,eta_x,eta_y,eta_z,tau,est_re,est_im,true_re,true_im,rem1,rem2,rem3,trace_loss\n";
    modes.precision(10);
    for (const auto& m : r.modes) {
        modes << m.r;
        for (int d = 0; d < 3; ++d) modes << ',' << (d < g.n ? m.eta[d] : 0.0);
        modes << ',' << m.tau << ',' << m.fhat_est.real() << ',' << m.fhat_est.imag() << ','
              << m.fhat_true.real() << ',' << m.fhat_true.imag() << ',' << m.remainder_terms[0]
              << ',' << m.remainder_terms[1] << ',' << m.remainder_terms[2] << ','
              << m.trace_loss << '\n';
    }
    write_text(dir / "modes.csv", modes.str());
    const json j{{"k", k},
                 {"T_cut", r.T_cut},
                 {"error_hs", r.error_hs},
                 {"oracle_hs", r.oracle_hs},
                 {"modes_ok", r.modes_ok},
                 {"modes_failed", r.modes_failed},
                 {"projection_loss", r.projection_loss},
                 {"contraction_failure", r.contraction_failure},
                 {"gamma_inverse_estimate", gi.estimate},
                 {"gamma_inverse_oracle", gi.oracle}};
    write_text(dir / "recover.json", j.dump(2));
    std::cout << j.dump(2) << "\n";
    return r.modes_ok > 0 ? 0 : 1;
}

int cmd_sweep(const RunConfig& c) {
    if (c.k.size() < 3) throw ConfigError("k: sweep needs at least 3 frequencies");
    const BoundaryBasis b = basis_for(c);
    const SweepResult r = run_sweep(c, b);
    const fs::path dir = out_dir(c);
    const std::string csv = sweep_csv(r);
    write_text(dir / "sweep.csv", csv);
    write_text(dir / "manifest.json", sweep_manifest(c, r));
    std::cout << csv;
    if (r.fit_ok) std::cout << "envelope C = " << r.fit.C << "\n";
    for (const auto& row : r.rows)
        if (row.failed) std::cerr << "k=" << row.k << " failed: " << row.message << "\n";
    return r.all_ok ? 0 : 1;
}

int cmd_check(const RunConfig& c) {
    const CheckReport rep = run_checks(c);
    for (const auto& r : rep.results)
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  value=" << r.value
                  << "  tol=" << r.tolerance << (r.detail.empty() ? "" : "  " + r.detail) << "\n";
    write_text(out_dir(c) / "check.json", rep.json());
    std::cout << (rep.all_passed() ? "all checks passed" : "some checks failed") << " in "
              << rep.seconds << " s\n";
    return rep.all_passed() ? 0 : 1;
}

int cmd_bound(const RunConfig& c, double A, double C) {
    EnvelopeParams p = envelope_params(c);
    p.C = C;
    json rows = json::array();
    for (double k : c.k) {
        const EnvelopeValue e = envelope(p, k, A);
        rows.push_back({{"k", k},
                        {"A", A},
                        {"E1", std::isfinite(e.E1) ? json(e.E1) : json(nullptr)},
                        {"E2", e.E2}});
    }
    std::cout << rows.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Increasing-stability experiments for diffuse optical tomography with CGO solutions"};
    app.set_version_flag("--version", std::string(version_string()));
    app.require_subcommand(1);
    app.fallthrough();
    Globals gl;
    app.add_option("-c,--config", gl.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--set", gl.sets, "Override a config key, e.g. --set grid.N=16 --set k=[1,2]");

    auto* phantom = app.add_subcommand("phantom", "Write gamma, D and Q fields as DOTF");
    auto* forward = app.add_subcommand("forward", "Write fields and DtN matrices for every k");
    auto* dtn = app.add_subcommand("dtn", "Compute the data proxy A for every k");
    auto* cgo = app.add_subcommand("cgo", "Solve for one CGO remainder, or calibrate C_star");
    bool calibrate = false;
    cgo->add_flag("--calibrate", calibrate, "Search the smallest contracting C_star");
    auto* recover = app.add_subcommand("recover", "Reconstruct Q2 - Q1 at the first k");
    auto* sweep = app.add_subcommand("sweep", "Frequency sweep: CSV plus manifest");
    auto* check = app.add_subcommand("check", "Oracle and invariant suite on N = 8");
    auto* bound = app.add_subcommand("bound", "Evaluate the stability envelope");
    double A = 1e-6, C = 1.0;
    bound->add_option("--A", A, "Data proxy A")->required();
    bound->add_option("--C", C, "Envelope constant");

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig c = resolve(gl);
        if (*phantom) return cmd_phantom(c);
        if (*forward) return cmd_forward(c);
        if (*dtn) return cmd_dtn(c);
        if (*cgo) return cmd_cgo(c, calibrate);
        if (*recover) return cmd_recover(c);
        if (*sweep) return cmd_sweep(c);
        if (*check) return cmd_check(c);
        if (*bound) return cmd_bound(c, A, C);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
