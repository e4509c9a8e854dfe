#include "dotcgo/config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dotcgo/cgo.hpp"
#include "dotcgo/errors.hpp"
#include "dotcgo/grid.hpp"

namespace dotcgo {

using json = nlohmann::json;

namespace {

json phantom_json(const Phantom& p, int n) {
    json bumps = json::array();
    for (const Bump& b : p.bumps) {
        std::vector<double> c(b.center.begin(), b.center.begin() + n);
        bumps.push_back({{"center", c},
                         {"radius", b.rho},
                         {"amplitude", b.amp},
                         {"target", target_name(b.target)}});
    }
    return {{"bumps", bumps}};
}

Phantom phantom_from(const json& j, const std::string& where) {
    Phantom p;
    for (const auto& [key, val] : j.items())
        if (key != "bumps") throw ConfigError(where + ": unknown key \"" + key + "\"");
    if (!j.contains("bumps")) return p;
    for (const auto& b : j.at("bumps")) {
        Bump bump;
        const auto c = b.at("center").get<std::vector<double>>();
        if (c.size() > 3) throw ConfigError(where + ": bump centre has more than 3 entries");
        for (std::size_t d = 0; d < c.size(); ++d) bump.center[d] = c[d];
        bump.rho = b.at("radius").get<double>();
        bump.amp = b.at("amplitude").get<double>();
        bump.target = parse_target(b.value("target", std::string("D")));
        p.bumps.push_back(bump);
    }
    return p;
}

} // namespace

RunConfig default_config() {
    RunConfig c;
    const double h = 2.0 * c.grid.R_box / c.grid.N;
    // homogeneous medium against one smooth absorption bump
    c.phantom2.bumps = {Bump{{0.0, 0.0, 0.0}, 4.0 * h, 10.0, BumpTarget::D}};
    return c;
}

std::string config_to_json(const RunConfig& c) {
    json j;
    j["grid"] = {{"n", c.grid.n},
                 {"N", c.grid.N},
                 {"R_box", c.grid.R_box},
                 {"L_Omega", c.grid.L_Omega},
                 {"R", c.grid.R}};
    j["phantom1"] = phantom_json(c.phantom1, c.grid.n);
    j["phantom2"] = phantom_json(c.phantom2, c.grid.n);
    j["M"] = c.M;
    j["k"] = c.k;
    j["delta"] = c.delta;
    j["s"] = c.s;
    j["alpha"] = c.alpha;
    j["epsilon"] = c.epsilon;
    j["a0"] = c.a0;
    j["C_star"] = c.C_star;
    j["tau_mult"] = c.tau_mult;
    j["tau"] = c.tau;
    j["T_cut"] = c.T_cut;
    j["mode_budget"] = c.mode_budget;
    j["sigma"] = c.sigma;
    j["seed"] = c.seed;
    j["m_modes"] = c.m_modes;
    j["m_pair"] = c.m_pair;
    j["max_loss"] = c.max_loss;
    j["max_iter"] = c.max_iter;
    j["tol"] = c.tol;
    j["r"] = c.r;
    j["eta"] = c.eta;
    j["output"] = c.output;
    j["basis_cache"] = c.basis_cache;
    return j.dump(2);
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    RunConfig c = default_config();
    static const std::set<std::string> known = {
        "grid", "phantom1", "phantom2", "M", "k", "delta", "s", "alpha", "epsilon", "a0",
        "C_star", "tau_mult", "tau", "T_cut", "mode_budget", "sigma", "seed", "m_modes",
        "m_pair", "max_loss", "max_iter", "tol", "r", "eta", "output", "basis_cache"};
    try {
        for (const auto& [key, val] : j.items())
            if (!known.count(key)) throw ConfigError("unknown config key \"" + key + "\"");
        if (j.contains("grid")) {
            const json& g = j["grid"];
            for (const auto& [key, val] : g.items())
                if (key != "n" && key != "N" && key != "R_box" && key != "L_Omega" && key != "R")
                    throw ConfigError("grid: unknown key \"" + key + "\"");
            c.grid.n = g.value("n", c.grid.n);
            c.grid.N = g.value("N", c.grid.N);
            c.grid.R_box = g.value("R_box", c.grid.R_box);
            c.grid.L_Omega = g.value("L_Omega", c.grid.L_Omega);
            c.grid.R = g.value("R", c.grid.R);
        }
        if (j.contains("phantom1")) c.phantom1 = phantom_from(j["phantom1"], "phantom1");
        if (j.contains("phantom2")) c.phantom2 = phantom_from(j["phantom2"], "phantom2");
        if (j.contains("k")) {
            c.k = j["k"].is_array() ? j["k"].get<std::vector<double>>()
                                    : std::vector<double>{j["k"].get<double>()};
        }
        c.M = j.value("M", c.M);
        c.delta = j.value("delta", c.delta);
        c.s = j.value("s", c.s);
        c.alpha = j.value("alpha", c.alpha);
        c.epsilon = j.value("epsilon", c.epsilon);
        c.a0 = j.value("a0", c.a0);
        c.C_star = j.value("C_star", c.C_star);
        c.tau_mult = j.value("tau_mult", c.tau_mult);
        c.tau = j.value("tau", c.tau);
        c.T_cut = j.value("T_cut", c.T_cut);
        c.mode_budget = j.value("mode_budget", c.mode_budget);
        c.sigma = j.value("sigma", c.sigma);
        c.seed = j.value("seed", c.seed);
        c.m_modes = j.value("m_modes", c.m_modes);
        c.m_pair = j.value("m_pair", c.m_pair);
        c.max_loss = j.value("max_loss", c.max_loss);
        c.max_iter = j.value("max_iter", c.max_iter);
        c.tol = j.value("tol", c.tol);
        c.r = j.value("r", c.r);
        if (j.contains("eta")) c.eta = j["eta"].get<std::vector<double>>();
        c.output = j.value("output", c.output);
        c.basis_cache = j.value("basis_cache", c.basis_cache);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

void apply_override(std::string& text, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json j = text.empty() ? json::object() : json::parse(text);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    std::string ptr = "/";
    for (char ch : path) ptr += ch == '.' ? '/' : ch;
    j[json::json_pointer(ptr)] = value;
    text = j.dump();
}

void validate(const RunConfig& c) {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    make_grid(c.grid.n, c.grid.N, c.grid.R_box, c.grid.L_Omega, c.grid.R);
    if (c.k.empty()) fail("k: list is empty");
    for (double k : c.k)
        if (!(k >= 1.0)) fail("k: every frequency must be >= 1");
    if (!(c.M > 1.0)) fail("M: must exceed 1");
    if (!(c.delta > 0.0 && c.delta < 1.0)) fail("delta: must lie in (0,1)");
    if (!(2.0 * c.s > c.grid.n + 3)) fail("s: need 2s > n + 3");
    if (!(c.alpha > 4.0)) fail("alpha: need alpha > 4");
    if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) fail("epsilon: must lie in (0,1)");
    if (!(c.a0 > 0.0)) fail("a0: must be positive");
    if (!(c.C_star > 0.0)) fail("C_star: must be positive");
    if (!(c.tau_mult >= 1.0)) fail("tau_mult: tau below min_tau_for_k (need tau_mult >= 1)");
    if (c.tau > 0.0)
        for (double k : c.k)
            if (c.tau < min_tau_for_k(k, c.C_star))
                fail("tau: below min_tau_for_k(" + std::to_string(k) + ")");
    if (c.T_cut > 0.0)
        for (double k : c.k)
            if (c.T_cut < c.a0 * std::pow(k, c.alpha)) fail("T_cut: below a0 k^alpha");
    if (c.mode_budget < 1) fail("mode_budget: must be positive");
    if (!(c.sigma >= 0.0)) fail("sigma: must be >= 0");
    if (c.m_modes < 1) fail("m_modes: must be positive");
    if (c.m_pair < 0) fail("m_pair: must be >= 0");
    if (!(c.max_loss > 0.0 && c.max_loss <= 1.0)) fail("max_loss: must lie in (0,1]");
    if (c.max_iter < 1) fail("max_iter: must be positive");
    if (!(c.tol > 0.0)) fail("tol: must be positive");
    if (c.r < 0.0) fail("r: must be >= 0");
    if (!c.eta.empty()) {
        if (static_cast<int>(c.eta.size()) != c.grid.n) fail("eta: length must equal n");
        double s = 0.0;
        for (double x : c.eta) s += x * x;
        if (std::abs(s - 1.0) > 1e-9) fail("eta: must be a unit vector");
    }
    if (c.tau > 0.0 && c.tau < 0.5 * c.r) fail("tau: below r/2");
}

} // namespace dotcgo
