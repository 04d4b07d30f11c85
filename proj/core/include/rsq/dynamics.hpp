#pragma once

#include <functional>
#include <vector>

#include "rsq/ode.hpp"
#include "rsq/params.hpp"
#include "rsq/pump.hpp"

namespace rsq {

// Time series of the squeezed-thermal state driven by the pump envelope.
// Every vector shares the uniform grid t. The quadrature variances are
// stored twice: dx2/dy2 from the closed forms (2 n_th + 1) exp(-+ 2r), and
// dx2_ode/dy2_ode from direct integration of the variance equations; the
// two routes are independent and agree to integrator tolerance.
struct Trajectory {
    DimensionlessRun run;
    std::vector<double> t;        // round trips
    std::vector<double> g;        // pump envelope along t
    std::vector<double> r;        // squeeze parameter
    std::vector<double> n_th;     // effective thermal occupation
    std::vector<double> dx2;      // squeezed-quadrature variance (closed form)
    std::vector<double> dy2;      // antisqueezed-quadrature variance (closed form)
    std::vector<double> dx2_ode;  // same, via the variance ODE
    std::vector<double> dy2_ode;
    std::vector<double> n_sig;    // intracavity signal photons
    double n_generated_total = 0.0;  // emitted + lost + still inside at the end
};

struct SqueezeEvents {
    double t_m = 0.0;      // time of minimum dx2
    double dx2_min = 0.0;
    double t_A = 0.0;      // time of maximum dy2
    double dy2_max = 0.0;
};

// Vacuum-start integration of
//   dr/dt~    = Gamma_sL [ g/2 - sinh(r) cosh(r) / (2 n_th + 1) ]
//   dn_th/dt~ = Gamma_sL [ sinh^2(r) - n_th ]
// plus the variance equations and the photon-loss accumulator, over a
// window chosen so the pump is negligible at the start (t~0 =
// -max(5 tau_p, 3 tau_p + 10)) and the antisqueezing peak has fully decayed
// by the end (a coarse pre-pass estimates the peak time, then
// t~end = t~A_estimate + 8/Gamma_sL). opts overrides replace either end.
Trajectory integrate(const DimensionlessRun& run, const PumpEnvelope& env,
                     const IntegratorOptions& opts = {});

// Same dynamics with an arbitrary smooth gain over an explicit window.
Trajectory integrate_gain(const DimensionlessRun& run,
                          const std::function<double(double)>& gain, double t_start,
                          double t_end, const IntegratorOptions& opts = {});

// integrate() with the pump forced dark for t~ > t_cut, split at the
// discontinuity so the integrator never steps across it. Window selection
// matches integrate(), so the returned grid aligns with the uncut run.
Trajectory integrate_pump_cutoff(const DimensionlessRun& run, const PumpEnvelope& env,
                                 double t_cut, const IntegratorOptions& opts = {});

// Grid argmin of dx2 and argmax of dy2, refined by a three-point quadratic
// fit. Requires both extrema interior and dy2 already decaying over the
// final tenth of the window; otherwise throws NumericalError instructing a
// longer window.
SqueezeEvents locate_events(const Trajectory& traj);

// Pump-frame local-oscillator phase -2 omega~_s t~ + theta + pi/2 with
// omega~_s the signal phase advance per round trip.
double phase_phi(const DimensionlessRun& run, double t);

} // namespace rsq
