#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsq/ode.hpp"
#include "rsq/params.hpp"
#include "rsq/spectrum.hpp"

namespace rsq {

enum class Knob { g0, tau_p, f_s, f_p };

const char* knob_name(Knob k);

struct AxisSpec {
    Knob knob = Knob::g0;
    double min = 0.0;
    double max = 0.0;
    int count = 0;
};

// Two swept knobs plus fixed values for the others. Axis values are
// inclusive linear spacings.
struct SweepSpec {
    AxisSpec axis1;
    AxisSpec axis2;
    double g0 = 1.0;
    double tau_p = 1.0;
    double f_s = 0.05;
    double f_p = 0.03;
    double theta = 0.0;
    std::optional<double> target_squeezing_db;

    void validate() const;  // throws ConfigError
    double axis_value(const AxisSpec& axis, int index) const;
};

struct CellResult {
    bool ok = false;
    std::string error;  // set when !ok
    DimensionlessRun run;
    SqueezeSummary summary;
    double n_generated_total = 0.0;
};

// Row-major over (axis1, axis2): cell (i, j) lives at i * axis2.count + j.
struct SweepGrid {
    SweepSpec spec;
    IntegratorOptions opts;
    std::uint64_t config_hash = 0;  // over device, spec, and tolerances
    std::vector<CellResult> cells;

    const CellResult& at(int i, int j) const;
};

// Evaluates every cell (integrate, locate events, summarize). Individual
// cell failures are recorded in place and never abort the grid. threads = 0
// means one worker per hardware thread; results are assembled in row-major
// order regardless of the worker count, so output is deterministic.
SweepGrid run_sweep(const SweepSpec& spec, const PhysicalConfig& cfg, int threads = 0,
                    const IntegratorOptions& opts = {});

struct OptimizerBounds {
    double g0_min = 0.1, g0_max = 3.0;
    double tau_p_min = 1.0, tau_p_max = 16.0;
    double f_s_min = 0.01, f_s_max = 0.5;
    double f_p_min = 0.01, f_p_max = 0.1;
};

// Final pattern-search step sizes per knob.
struct KnobResolution {
    double g0 = 0.01;
    double tau_p = 0.05;
    double f_s = 0.005;
    double f_p = 0.0025;
};

struct OptimumResult {
    bool feasible = false;  // squeezing target met at the reported knobs
    double g0 = 0.0, tau_p = 0.0, f_s = 0.0, f_p = 0.0;
    SqueezeSummary summary;
    double n_generated_total = 0.0;
    std::size_t evaluations = 0;
};

// Minimizes antisqueezing_db subject to squeezing_db >= target_db over the
// four knobs: deterministic coarse grid, then pattern search down to the
// given resolutions, ties broken toward smaller g0 then smaller tau_p. If
// no knob set meets the target the result instead carries the best
// achievable squeezing (feasible = false).
OptimumResult constrained_optimum(const PhysicalConfig& cfg, double target_db = 10.0,
                                  const OptimizerBounds& bounds = {},
                                  const KnobResolution& resolution = {},
                                  int threads = 0, const IntegratorOptions& opts = {});

// Smallest g0 in [g0_lo, g0_hi] whose squeezing reaches target_db at the
// given shape knobs, by bisection (squeezing grows with g0 throughout the
// studied regime). Throws InfeasibleError if even g0_hi falls short.
double min_g0_for_target(const PhysicalConfig& cfg, double tau_p, double f_s,
                         double f_p, double target_db, double g0_lo = 0.05,
                         double g0_hi = 3.0, const IntegratorOptions& opts = {});

} // namespace rsq
