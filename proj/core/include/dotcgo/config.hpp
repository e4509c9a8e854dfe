#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dotcgo/phantom.hpp"

namespace dotcgo {

struct GridSpec {
    int n = 3;
    int N = 32;
    double R_box = 0.5;
    double L_Omega = 0.1875;
    double R = 0.41;
};

struct RunConfig {
    GridSpec grid;
    Phantom phantom1;
    Phantom phantom2;
    double M = 10.0;

    std::vector<double> k{1.0, 2.0, 4.0};
    double delta = 0.5;
    double s = 4.0;
    double alpha = 5.0;
    double epsilon = 0.5;   // Holder proxy for smooth phantoms
    double a0 = 0.02;
    double C_star = 1.0;
    double tau_mult = 1.0;
    double tau = -1.0;      // explicit tau for single-mode commands, <= 0 unset
    double T_cut = -1.0;    // <= 0: a0 k^alpha
    int mode_budget = 200;
    double sigma = 1e-6;
    std::uint64_t seed = 20240917;
    int m_modes = 128;      // truncation for A and the stored DtN files
    int m_pair = 0;         // truncation for CGO traces in the pairing, 0 = full basis
    double max_loss = 0.2;
    int max_iter = 400;
    double tol = 1e-12;
    double r = 0.0;         // single-mode commands
    std::vector<double> eta;// single-mode commands, default e_n

    std::string output = "dotcgo-out";
    std::string basis_cache;
};

// Built-in reference experiment.
RunConfig default_config();

// Reads JSON text. Unknown keys are an error.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// "a.b=value"; value is parsed as JSON when possible, else taken as a string.
void apply_override(std::string& json_text, const std::string& assignment);

std::string config_to_json(const RunConfig& c);

// Checks every module precondition reachable from the config; throws
// ConfigError naming the first violated constraint.
void validate(const RunConfig& c);

} // namespace dotcgo
