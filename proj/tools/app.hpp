#pragma once

#include <optional>
#include <string>

#include "rsq/ode.hpp"
#include "rsq/params.hpp"
#include "rsq/sweep.hpp"

namespace rsq::app {

// Parsed and validated config file plus command-line overrides. The file is
// JSON with four fixed sections (physical, knobs, integrator, output) and
// two optional subcommand sections (sweep, optimize); unknown keys anywhere
// are rejected.
struct RunConfig {
    PhysicalConfig physical;
    double g0 = 0.0;
    double tau_p = 1.0;
    double f_s = 0.05;
    double f_p = 0.03;
    double theta = 0.0;
    IntegratorOptions integrator;
    std::string out_dir = "out";
    bool want_csv = true;
    bool want_json = true;
    std::optional<SweepSpec> sweep;
    double optimize_target_db = 10.0;
    OptimizerBounds optimize_bounds;
    KnobResolution optimize_resolution;
};

// Throws ConfigError naming the offending field path.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Defaults used when a subcommand runs without --config.
RunConfig default_config();

struct CliOptions {
    std::string config_path;  // empty = none given
    std::string out_dir;      // empty = take from config
    std::string format;       // empty = take from config; else csv|json|both
    int threads = 0;          // 0 = hardware concurrency
    std::string figure;       // replicate only
};

RunConfig load_effective_config(const CliOptions& cli, bool config_required);

int cmd_run(const RunConfig& cfg, const CliOptions& cli);
int cmd_replicate(const RunConfig& cfg, const CliOptions& cli);
int cmd_sweep(const RunConfig& cfg, const CliOptions& cli);
int cmd_optimize(const RunConfig& cfg, const CliOptions& cli);
int cmd_validate_pump(const RunConfig& cfg, const CliOptions& cli);

// Full argv entry point: subcommand dispatch plus the exit-code contract
// (0 success, 2 config error, 3 numerical failure, 4 infeasible).
int run_cli(int argc, const char* const* argv);

} // namespace rsq::app
