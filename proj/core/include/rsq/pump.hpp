#pragma once

#include <vector>

#include "rsq/params.hpp"

namespace rsq {

struct PumpPeak {
    double t = 0.0;      // round trips
    double value = 0.0;  // g at the peak
};

// In-ring dimensionless pump envelope g(t~) in the single-resonance
// (Lorentzian) approximation of the ring response:
//
//   g(t~) = P erfcx(y(t~)) exp(-2 ln2 t~^2 / tau_p^2),
//   y(t~) = (1 - sigma_p ell_p) tau_p / sqrt(8 ln2) - sqrt(8 ln2) t~ / (2 tau_p),
//   P     = g0 sqrt(pi tau_p (1 - sigma_p^2) ell_p^2) / (Gamma_sL sqrt(8 ln2)).
//
// The erfcx fusion keeps the rising edge finite; for the deep decaying tail
// (y well below 0, where even erfcx would overflow) the evaluation switches
// to the algebraically identical pure-exponential form
//   y^2 - 2 ln2 t~^2 / tau_p^2 = y(0)^2 - (1 - sigma_p ell_p) t~,
// so g is finite and accurate for every t~.
class PumpEnvelope {
public:
    explicit PumpEnvelope(const DimensionlessRun& run);

    double operator()(double t) const;

    // Location and height of the single maximum, refined by golden-section
    // search after a coarse scan.
    PumpPeak peak() const;

    double prefactor() const { return prefactor_; }
    const DimensionlessRun& run() const { return run_; }

private:
    DimensionlessRun run_;
    double prefactor_ = 0.0;  // P
    double lambda_ = 0.0;     // 1 - sigma_p ell_p
    double y0_ = 0.0;         // y(0)
};

inline double g_of_t(const PumpEnvelope& env, double t) { return env(t); }

// Exact in-ring envelope used as the validation reference for PumpEnvelope.
// The ring's full periodic frequency response
//   alpha~_p(omega) ~ i sqrt(1 - sigma_p^2) ell_p e^{i omega T_R}
//                     / (1 - sigma_p ell_p e^{i omega T_R})
// is multiplied by the Gaussian input spectrum and inverse-transformed
// numerically; the returned values use the same normalization as
// PumpEnvelope, so the two are directly comparable.
//
// The grid must be uniform, spaced no wider than 1/8 round trip (coarser
// grids alias the round-trip structure and are rejected), and span at least
// [-6 tau_p, 6 tau_p + 10/Gamma_pL]. Throws ConfigError on violations.
std::vector<double> g_exact_oracle(const DimensionlessRun& run,
                                   const std::vector<double>& t_grid);

} // namespace rsq
