#pragma once

namespace rsq {

// Dimensional device parameters for a ring resonator side-coupled to a
// channel waveguide, with a chi(2) medium pumped at the second harmonic of
// the signal. All values SI.
struct PhysicalConfig {
    double ring_radius = 0.0;        // m
    double n_eff = 0.0;              // shared phase index (pump and signal)
    double signal_wavelength = 0.0;  // m
    double chi2_eff = 0.0;           // m/V
    double A_eff = 0.0;              // m^2, effective transverse mode area
    double Q_sI = 0.0;               // intrinsic quality factor, signal
    double Q_pI = 0.0;               // intrinsic quality factor, pump
    double group_index = 0.0;        // n_g, used only for photon bookkeeping

    // Throws ConfigError naming the offending field ("physical.<name>").
    void validate() const;

    // 50 um AlN-like ring used by all bundled studies.
    static PhysicalConfig reference_device();
};

// Per-run dimensionless quantities. Times are in round-trip units
// (t~ = t/T_R), rates are per round trip. Immutable after derivation.
struct DimensionlessRun {
    // inputs
    double g0 = 0.0;     // pump strength
    double tau_p = 0.0;  // pump intensity FWHM in round trips
    double f_s = 0.0;    // Q_sL/Q_sI, signal loading ratio
    double f_p = 0.0;    // Q_pL/Q_pI, pump loading ratio
    double theta = 0.0;  // pump phase (rad)

    // derived
    double Gamma_sL = 0.0;     // loaded signal decay per round trip
    double Gamma_pL = 0.0;     // loaded pump decay per round trip
    double Gamma_pI = 0.0;     // intrinsic pump decay per round trip
    double sigma_ell_p = 0.0;  // pump through-coupling x loss, exp(-Gamma_pL/2)
    double ell_p = 0.0;        // pump intrinsic loss factor, exp(-Gamma_pI/2)
    double sigma_p = 0.0;      // pump through-coupling alone
    double escape_s = 0.0;     // 1 - f_s, signal escape efficiency
    double omega_s_TR = 0.0;   // signal optical phase advance per round trip
};

// T_R = n_eff * 2 pi R / c.
double round_trip_time(const PhysicalConfig& cfg);

// omega_s = 2 pi c / lambda_s.
double omega_signal(const PhysicalConfig& cfg);

// Single-photon nonlinear coupling magnitude |eta| (J) for the degenerate
// down-conversion process in this geometry.
double coupling_eta(const PhysicalConfig& cfg);

// Populates every derived field from the knobs, using the exact logarithmic
// loss relations: sigma_ell_p = exp(-Gamma_pL/2), ell_p = exp(-Gamma_pI/2),
// sigma_p = sigma_ell_p / ell_p. Throws ConfigError on out-of-range knobs
// (f_s, f_p must lie in (0,1); tau_p > 0; g0 >= 0).
DimensionlessRun derive_run(const PhysicalConfig& cfg, double g0, double tau_p,
                            double f_s, double f_p, double theta = 0.0);

// Inverts g0 = (4 |eta| T_R sqrt(N_c) / hbar) (ln2/pi)^(1/4) for the pump
// photon number N_c launched in the channel waveguide. Requires g0 > 0.
double pump_strength_to_photons(const PhysicalConfig& cfg, double g0);

// Exact inverse of pump_strength_to_photons.
double photons_to_pump_strength(const PhysicalConfig& cfg, double n_photons);

// Intracavity pump photon number corresponding to an envelope value g,
// inverting g = 4 |eta| |alpha_p| / (hbar Gamma_sL).
double ring_pump_photons(const PhysicalConfig& cfg, const DimensionlessRun& run,
                         double g);

} // namespace rsq
