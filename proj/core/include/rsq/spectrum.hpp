#pragma once

#include <vector>

#include "rsq/dynamics.hpp"
#include "rsq/params.hpp"

namespace rsq {

struct SpectrumPoint {
    double omega = 0.0;  // dimensionless Omega~ = Omega T_R
    double value = 1.0;  // shot-noise-normalized S
    // The closed form assumes |Omega~| well below pi (one free spectral
    // range); points beyond pi/4 carry this advisory flag.
    bool validity_warning = false;
};

// Channel-waveguide squeezing figures for one run: the events, the
// zero-frequency extremes, and their dB forms. squeezing_db is positive
// when noise is below vacuum (s_min0 < 1).
struct SqueezeSummary {
    SqueezeEvents events;
    double s_min0 = 1.0;
    double s_max0 = 1.0;
    double squeezing_db = 0.0;      // -10 log10(s_min0)
    double antisqueezing_db = 0.0;  // +10 log10(s_max0)
    std::vector<SpectrumPoint> spectrum;  // optional samples at the squeeze phase
};

// Instantaneous spectrum at local-oscillator angle beta, with the ring
// state taken at the maximal-squeezing time of traj:
//   S = 1 + (1-f_s) Gamma_sL^2 / (2 (Gamma_sL^2/4 + Omega~^2))
//         x { (n_th+1/2) cosh 2r - 1/2 - (n_th+1/2) sinh 2r cos(phi - 2 beta) }.
SpectrumPoint s_of_omega(const DimensionlessRun& run, const Trajectory& traj,
                         const SqueezeEvents& events, double omega, double beta);

// Zero-frequency noise floor 1 + (1-f_s)(dx2_min - 1). The f_s = 1/2
// critical-coupling case caps extractable squeezing at 3 dB.
double min_noise_floor(double f_s, double dx2_min);

// Conservative zero-frequency antisqueezing ceiling
// 1 + (1-f_s) [1 + Gamma_sL (t_A - t_m)/2] (dy2_max - 1).
// Throws std::domain_error when t_A < t_m.
double max_noise_ceiling(double f_s, double Gamma_sL, double t_m, double t_A,
                         double dy2_max);

// 10 log10(s); throws std::domain_error for s <= 0.
double to_db(double s_linear);
double from_db(double db);

// locate_events plus the noise floor/ceiling bookkeeping in one call.
SqueezeSummary summarize(const DimensionlessRun& run, const Trajectory& traj);

} // namespace rsq
