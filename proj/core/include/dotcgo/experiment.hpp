#pragma once

#include <string>
#include <vector>

#include "dotcgo/config.hpp"
#include "dotcgo/recovery.hpp"

namespace dotcgo {

// One row of the frequency sweep. Rows whose clean DtN maps coincide are
// marked identical: A = 0, minus_log_A = inf, errors 0, envelope NaN.
struct StabilityRecord {
    double k = 0.0;
    double A = 0.0;
    double minus_log_A = 0.0;
    double recovery_error_hs = 0.0;
    double oracle_hs = 0.0;
    double envelope_value = 0.0;
    double T_cut = 0.0;
    int modes_ok = 0;
    int modes_failed = 0;
    int projection_loss = 0;
    int contraction_failure = 0;
    bool identical = false;
    bool failed = false;
    std::string message;
    double seconds = 0.0;
};

struct SweepResult {
    std::vector<StabilityRecord> rows;
    EnvelopeFit fit;
    bool fit_ok = false;
    bool all_ok = true;
};

// Per-row noise seeds, derived from the run seed.
std::uint64_t noise_seed(std::uint64_t seed, std::size_t row, int which);

Grid config_grid(const RunConfig& c);
RecoveryParams recovery_params(const RunConfig& c, double k);
EnvelopeParams envelope_params(const RunConfig& c);

SweepResult run_sweep(const RunConfig& c, const BoundaryBasis& basis);

std::string sweep_csv(const SweepResult& r);
// Config, seeds, fitted envelope, rows and library version.
std::string sweep_manifest(const RunConfig& c, const SweepResult& r);

struct CalibrationStep {
    double C_star = 0.0;
    double k = 0.0;
    int which = 0;
    bool converged = false;
    double contraction = 0.0;
    int iterations = 0;
};

struct Calibration {
    double C_star = 0.0; // 0 when no candidate up to the limit contracts
    std::vector<CalibrationStep> steps;
};

// Smallest power of two C for which solve_remainder converges with
// contraction factor <= 0.5 on both potentials at tau = min_tau_for_k(k, C).
Calibration calibrate_c_star(const RunConfig& c, const std::vector<double>& ks,
                             double max_C = 64.0);

const char* version_string();

} // namespace dotcgo
