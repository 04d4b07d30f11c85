#include "rsq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "rsq/constants.hpp"
#include "rsq/errors.hpp"

namespace rsq {

namespace {

// State layout: [r, n_th, dx2, dy2, lost] with lost = Gamma_sL int n_sig dt~.
constexpr std::size_t kDim = 5;

double signal_photons(double r, double n_th) {
    return (n_th + 0.5) * std::cosh(2.0 * r) - 0.5;
}

struct Rhs {
    double Gamma_sL;
    const std::function<double(double)>* gain;

    void operator()(double t, const std::array<double, kDim>& y,
                    std::array<double, kDim>& dydt) const {
        const double g = (*gain)(t);
        const double r = y[0], n_th = y[1];
        dydt[0] = Gamma_sL * (0.5 * g - 0.5 * std::sinh(2.0 * r) / (2.0 * n_th + 1.0));
        dydt[1] = Gamma_sL * (std::sinh(r) * std::sinh(r) - n_th);
        dydt[2] = Gamma_sL * (1.0 - (1.0 + g) * y[2]);
        dydt[3] = Gamma_sL * (1.0 - (1.0 - g) * y[3]);
        dydt[4] = Gamma_sL * signal_photons(r, n_th);
    }
};

double default_t_start(const DimensionlessRun& run) {
    return -std::max(5.0 * run.tau_p, 3.0 * run.tau_p + 10.0);
}

// Coarse low-tolerance pass to locate the antisqueezing peak, extending the
// window until the peak is interior.
double estimate_t_A(const DimensionlessRun& run, const std::function<double(double)>& gain,
                    double t_start) {
    const double lambda = std::max(1.0 - run.sigma_ell_p, 1e-12);
    double t_end = 3.0 * run.tau_p + 15.0 / std::min(lambda, run.Gamma_sL);
    IntegratorOptions coarse;
    coarse.rel_tol = 1e-6;
    coarse.abs_tol = 1e-9;
    Rhs rhs{run.Gamma_sL, &gain};
    for (int attempt = 0; attempt < 6; ++attempt) {
        auto sol = integrate_dopri5<kDim>(rhs, t_start, t_end, {0, 0, 1, 1, 0}, coarse);
        std::size_t best = 0;
        for (std::size_t i = 1; i < sol.ts.size(); ++i)
            if (sol.ys[i][3] > sol.ys[best][3]) best = i;
        const double t_A = sol.ts[best];
        if (t_A < t_start + 0.9 * (t_end - t_start)) return t_A;
        t_end = t_start + 1.5 * (t_end - t_start);
    }
    throw NumericalError("antisqueezing peak not bracketed; window extension gave up");
}

Trajectory sample_trajectory(const DimensionlessRun& run,
                             const std::function<double(double)>& gain,
                             const DenseSolution<kDim>& sol) {
    const double t_start = sol.ts.front(), t_end = sol.ts.back();
    const double dt = std::min(0.25, run.tau_p / 40.0);
    auto n = static_cast<std::size_t>(std::ceil((t_end - t_start) / dt)) + 1;
    n = std::clamp<std::size_t>(n, 801, 60001);

    Trajectory traj;
    traj.run = run;
    traj.t.resize(n);
    traj.g.resize(n);
    traj.r.resize(n);
    traj.n_th.resize(n);
    traj.dx2.resize(n);
    traj.dy2.resize(n);
    traj.dx2_ode.resize(n);
    traj.dy2_ode.resize(n);
    traj.n_sig.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t_start + (t_end - t_start) * i / (n - 1);
        const auto y = sol.sample(t);
        traj.t[i] = t;
        traj.g[i] = gain(t);
        traj.r[i] = y[0];
        traj.n_th[i] = y[1];
        traj.dx2[i] = (2.0 * y[1] + 1.0) * std::exp(-2.0 * y[0]);
        traj.dy2[i] = (2.0 * y[1] + 1.0) * std::exp(2.0 * y[0]);
        traj.dx2_ode[i] = y[2];
        traj.dy2_ode[i] = y[3];
        traj.n_sig[i] = signal_photons(y[0], y[1]);
    }
    const auto& yf = sol.ys.back();
    traj.n_generated_total = signal_photons(yf[0], yf[1]) + yf[4];
    return traj;
}

std::pair<double, double> resolve_window(const DimensionlessRun& run,
                                         const std::function<double(double)>& gain,
                                         const IntegratorOptions& opts) {
    const double t_start = opts.t_start_override.value_or(default_t_start(run));
    if (t_start > -5.0 * run.tau_p)
        throw ConfigError("integrator.t_start_override must be <= -5 tau_p so the pump "
                          "is negligible at the start");
    double t_end;
    if (opts.t_end_override) {
        t_end = *opts.t_end_override;
        if (!(t_end > t_start))
            throw ConfigError("integrator.t_end_override must exceed the start time");
    } else {
        t_end = estimate_t_A(run, gain, t_start) + 8.0 / run.Gamma_sL;
    }
    return {t_start, t_end};
}

} // namespace

Trajectory integrate(const DimensionlessRun& run, const PumpEnvelope& env,
                     const IntegratorOptions& opts) {
    const std::function<double(double)> gain = [&env](double t) { return env(t); };
    const auto [t_start, t_end] = resolve_window(run, gain, opts);
    Rhs rhs{run.Gamma_sL, &gain};
    auto sol = integrate_dopri5<kDim>(rhs, t_start, t_end, {0, 0, 1, 1, 0}, opts);
    return sample_trajectory(run, gain, sol);
}

Trajectory integrate_gain(const DimensionlessRun& run,
                          const std::function<double(double)>& gain, double t_start,
                          double t_end, const IntegratorOptions& opts) {
    Rhs rhs{run.Gamma_sL, &gain};
    auto sol = integrate_dopri5<kDim>(rhs, t_start, t_end, {0, 0, 1, 1, 0}, opts);
    return sample_trajectory(run, gain, sol);
}

Trajectory integrate_pump_cutoff(const DimensionlessRun& run, const PumpEnvelope& env,
                                 double t_cut, const IntegratorOptions& opts) {
    const std::function<double(double)> full = [&env](double t) { return env(t); };
    const auto [t_start, t_end] = resolve_window(run, full, opts);
    if (!(t_cut > t_start && t_cut < t_end))
        throw ConfigError("pump cutoff time must lie inside the integration window");

    const std::function<double(double)> dark = [](double) { return 0.0; };
    Rhs rhs_lit{run.Gamma_sL, &full};
    Rhs rhs_dark{run.Gamma_sL, &dark};
    auto first = integrate_dopri5<kDim>(rhs_lit, t_start, t_cut, {0, 0, 1, 1, 0}, opts);
    auto second = integrate_dopri5<kDim>(rhs_dark, t_cut, t_end, first.ys.back(), opts);
    // Splice; the duplicated node at t_cut keeps Hermite data for both sides.
    first.ts.insert(first.ts.end(), second.ts.begin(), second.ts.end());
    first.ys.insert(first.ys.end(), second.ys.begin(), second.ys.end());
    first.fs.insert(first.fs.end(), second.fs.begin(), second.fs.end());

    const std::function<double(double)> cut_gain = [&env, t_cut](double t) {
        return t > t_cut ? 0.0 : env(t);
    };
    return sample_trajectory(run, cut_gain, first);
}

SqueezeEvents locate_events(const Trajectory& traj) {
    const auto& t = traj.t;
    const std::size_t n = t.size();
    if (n < 3) throw NumericalError("trajectory too short to locate extrema");

    std::size_t i_min = 0, i_max = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (traj.dx2[i] < traj.dx2[i_min]) i_min = i;
        if (traj.dy2[i] > traj.dy2[i_max]) i_max = i;
    }
    const std::size_t tail = n - std::max<std::size_t>(1, n / 10);
    if (i_max >= tail || traj.dy2.back() >= traj.dy2[tail])
        throw NumericalError("antisqueezing still rising near the end of the window; "
                             "extend the integration window");
    if (i_min == 0 || i_min == n - 1 || i_max == 0)
        throw NumericalError("variance extremum fell on the window boundary; "
                             "extend the integration window");

    const auto refine = [&](const std::vector<double>& v, std::size_t i) {
        const double d = t[1] - t[0];
        const double denom = v[i + 1] - 2.0 * v[i] + v[i - 1];
        if (std::abs(denom) < 1e-300) return std::pair<double, double>{t[i], v[i]};
        const double slope = v[i + 1] - v[i - 1];
        return std::pair<double, double>{t[i] - 0.5 * d * slope / denom,
                                         v[i] - slope * slope / (8.0 * denom)};
    };
    SqueezeEvents ev;
    std::tie(ev.t_m, ev.dx2_min) = refine(traj.dx2, i_min);
    std::tie(ev.t_A, ev.dy2_max) = refine(traj.dy2, i_max);
    return ev;
}

double phase_phi(const DimensionlessRun& run, double t) {
    return -2.0 * run.omega_s_TR * t + run.theta + 0.5 * constants::pi;
}

} // namespace rsq
