#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "dotcgo/checks.hpp"
#include "dotcgo/config.hpp"
#include "dotcgo/errors.hpp"
#include "dotcgo/experiment.hpp"

using namespace dotcgo;

namespace {

RunConfig small_config() {
    RunConfig c = default_config();
    c.grid = {3, 8, 1.0, 0.5, 0.9};
    c.phantom1.bumps.clear();
    c.phantom2.bumps = {{{0, 0, 0}, 0.4, 2.0, BumpTarget::D}};
    c.mode_budget = 40;
    return c;
}

std::string message_of(const RunConfig& c) {
    try {
        validate(c);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Config, DefaultIsValid) { EXPECT_NO_THROW(validate(default_config())); }

TEST(Config, JsonRoundTrip) {
    const RunConfig a = small_config();
    const RunConfig b = parse_config(config_to_json(a));
    EXPECT_EQ(config_to_json(a), config_to_json(b));
    EXPECT_EQ(b.grid.N, 8);
    ASSERT_EQ(b.phantom2.bumps.size(), 1u);
    EXPECT_EQ(b.phantom2.bumps[0].amp, 2.0);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(parse_config(R"({"nonsense": 1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"grid": {"NN": 8}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"k": "fast"})"), ConfigError);
    EXPECT_THROW(parse_config("{"), ConfigError);
}

TEST(Config, OverrideParsesJsonValues) {
    std::string text = config_to_json(default_config());
    apply_override(text, "grid.N=16");
    apply_override(text, "k=[1,3]");
    apply_override(text, "output=run-a");
    const RunConfig c = parse_config(text);
    EXPECT_EQ(c.grid.N, 16);
    EXPECT_EQ(c.k, (std::vector<double>{1.0, 3.0}));
    EXPECT_EQ(c.output, "run-a");
    EXPECT_THROW(apply_override(text, "no-equals-sign"), ConfigError);
}

TEST(Config, FirstViolatedConstraintIsNamed) {
    RunConfig c = default_config();
    c.s = 3.0;
    EXPECT_EQ(message_of(c), "s: need 2s > n + 3");
    c = default_config();
    c.alpha = 4.0;
    EXPECT_EQ(message_of(c), "alpha: need alpha > 4");
    c = default_config();
    c.delta = 1.0;
    EXPECT_EQ(message_of(c), "delta: must lie in (0,1)");
    c = default_config();
    c.k = {0.5};
    EXPECT_EQ(message_of(c), "k: every frequency must be >= 1");
    c = default_config();
    c.eta = {0.0, 1.0};
    EXPECT_EQ(message_of(c), "eta: length must equal n");
}

TEST(Config, TauBelowMinimumRejected) {
    RunConfig c = default_config();
    c.tau = 0.5 * min_tau_for_k(1.0, c.C_star);
    EXPECT_NE(message_of(c).find("tau: below min_tau_for_k"), std::string::npos);
    c.tau = min_tau_for_k(4.0, c.C_star);
    EXPECT_EQ(message_of(c), "");
}

TEST(Config, GridRejectedBeforeCompute) {
    RunConfig c = default_config();
    c.grid.L_Omega = 0.3;
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Sweep, CsvSchemaAndDeterminism) {
    const RunConfig c = small_config();
    const BoundaryBasis b = build_boundary_basis(config_grid(c));
    const SweepResult r1 = run_sweep(c, b), r2 = run_sweep(c, b);
    const std::string csv = sweep_csv(r1);
    EXPECT_EQ(csv, sweep_csv(r2));
    std::istringstream is(csv);
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header, "k,A,minus_log_A,recovery_error_hs,envelope_value,T_cut,modes_ok,modes_failed");
    int lines = 0;
    for (std::string line; std::getline(is, line);)
        if (!line.empty()) ++lines;
    EXPECT_EQ(lines, 3);
}

TEST(Sweep, ManifestReproducesRun) {
    const RunConfig c = small_config();
    const SweepResult r = run_sweep(c, build_boundary_basis(config_grid(c)));
    const auto m = nlohmann::json::parse(sweep_manifest(c, r));
    EXPECT_EQ(m.at("version").get<std::string>(), version_string());
    const RunConfig back = parse_config(m.at("config").dump());
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(m.at("rows").size(), 3u);
    EXPECT_TRUE(m.contains("seeds"));
    EXPECT_TRUE(m.contains("envelope_fit"));
}

TEST(Sweep, NoiseSeedsDistinct) {
    EXPECT_NE(noise_seed(1, 0, 1), noise_seed(1, 0, 2));
    EXPECT_NE(noise_seed(1, 0, 1), noise_seed(1, 1, 1));
    EXPECT_EQ(noise_seed(7, 2, 1), noise_seed(7, 2, 1));
}

TEST(Check, ReportIsMachineReadable) {
    const CheckReport rep = run_checks(default_config());
    EXPECT_TRUE(rep.all_passed());
    const auto j = nlohmann::json::parse(rep.json());
    EXPECT_EQ(j.at("checks").size(), rep.results.size());
    EXPECT_TRUE(j.at("passed").get<bool>());
}
