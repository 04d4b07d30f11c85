#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rsq/dynamics.hpp"
#include "rsq/params.hpp"
#include "rsq/pump.hpp"
#include "rsq/special.hpp"
#include "rsq/spectrum.hpp"
#include "rsq/sweep.hpp"

namespace {

const rsq::PhysicalConfig& device() {
    static const rsq::PhysicalConfig cfg = rsq::PhysicalConfig::reference_device();
    return cfg;
}

rsq::DimensionlessRun reference_run() {
    return rsq::derive_run(device(), 1.0, 3.0, 0.045, 0.03);
}

void bm_erfcx(benchmark::State& state) {
    // Sweep the argument so both the series and continued-fraction branches
    // are exercised.
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rsq::erfcx(x));
        x += 0.37;
        if (x > 30.0) x = -2.0;
    }
}
BENCHMARK(bm_erfcx);

void bm_pump_envelope_eval(benchmark::State& state) {
    const rsq::DimensionlessRun run = reference_run();
    const rsq::PumpEnvelope env(run);
    double t = -15.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(env(t));
        t += 0.13;
        if (t > 40.0) t = -15.0;
    }
}
BENCHMARK(bm_pump_envelope_eval);

void bm_pump_exact_oracle(benchmark::State& state) {
    const rsq::DimensionlessRun run = reference_run();
    const double lo = -6.0 * run.tau_p - 1.0;
    const double hi = 6.0 * run.tau_p + 10.0 / run.Gamma_pL + 1.0;
    const double step = 1.0 / 8.0;
    const int n = static_cast<int>(std::ceil((hi - lo) / step)) + 1;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = lo + step * i;
    for (auto _ : state)
        benchmark::DoNotOptimize(rsq::g_exact_oracle(run, grid));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_pump_exact_oracle);

void bm_integrate_reference(benchmark::State& state) {
    const rsq::DimensionlessRun run = reference_run();
    const rsq::PumpEnvelope env(run);
    for (auto _ : state)
        benchmark::DoNotOptimize(rsq::integrate(run, env));
}
BENCHMARK(bm_integrate_reference)->Unit(benchmark::kMillisecond);

void bm_summarize(benchmark::State& state) {
    const rsq::DimensionlessRun run = reference_run();
    const rsq::Trajectory traj = rsq::integrate(run, rsq::PumpEnvelope(run));
    for (auto _ : state)
        benchmark::DoNotOptimize(rsq::summarize(run, traj));
}
BENCHMARK(bm_summarize);

void bm_sweep_row(benchmark::State& state) {
    // One 1 x 8 strip of the production grid, single worker: the per-cell
    // cost that sweep and optimizer throughput scale from.
    rsq::SweepSpec spec;
    spec.axis1 = {rsq::Knob::f_s, 0.05, 0.05, 2};
    spec.axis2 = {rsq::Knob::tau_p, 1.0, 8.0, 4};
    spec.g0 = 0.7;
    spec.f_p = 0.03;
    for (auto _ : state)
        benchmark::DoNotOptimize(rsq::run_sweep(spec, device(), 1));
    state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(bm_sweep_row)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
