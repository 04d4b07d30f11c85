#include "rsq/params.hpp"

#include <cmath>
#include <string>

#include "rsq/constants.hpp"
#include "rsq/errors.hpp"

namespace rsq {

namespace {

void require_positive(double value, const char* field) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConfigError(std::string(field) + " must be a positive finite number");
}

} // namespace

void PhysicalConfig::validate() const {
    require_positive(ring_radius, "physical.ring_radius");
    require_positive(n_eff, "physical.n_eff");
    require_positive(signal_wavelength, "physical.signal_wavelength");
    require_positive(chi2_eff, "physical.chi2_eff");
    require_positive(A_eff, "physical.A_eff");
    require_positive(Q_sI, "physical.Q_sI");
    require_positive(Q_pI, "physical.Q_pI");
    require_positive(group_index, "physical.group_index");
    if (Q_sI < 1.0) throw ConfigError("physical.Q_sI must be >= 1");
    if (Q_pI < 1.0) throw ConfigError("physical.Q_pI must be >= 1");
}

PhysicalConfig PhysicalConfig::reference_device() {
    PhysicalConfig cfg;
    cfg.ring_radius = 50e-6;
    cfg.n_eff = 2.2;
    cfg.signal_wavelength = 1550e-9;
    cfg.chi2_eff = 54e-12;
    cfg.A_eff = 0.71e-12;
    cfg.Q_sI = 2e6;
    cfg.Q_pI = 8e5;
    cfg.group_index = 2.2;
    return cfg;
}

double round_trip_time(const PhysicalConfig& cfg) {
    cfg.validate();
    return cfg.n_eff * 2.0 * constants::pi * cfg.ring_radius / constants::c_light;
}

double omega_signal(const PhysicalConfig& cfg) {
    cfg.validate();
    return 2.0 * constants::pi * constants::c_light / cfg.signal_wavelength;
}

double coupling_eta(const PhysicalConfig& cfg) {
    const double omega_s = omega_signal(cfg);
    const double omega_p = 2.0 * omega_s;
    using constants::eps0;
    using constants::hbar;
    using constants::pi;
    return hbar * omega_s * cfg.chi2_eff *
           std::sqrt(hbar * omega_p / (16.0 * pi * eps0 * cfg.ring_radius * cfg.A_eff));
}

DimensionlessRun derive_run(const PhysicalConfig& cfg, double g0, double tau_p,
                            double f_s, double f_p, double theta) {
    cfg.validate();
    if (!(g0 >= 0.0) || !std::isfinite(g0))
        throw ConfigError("knobs.g0 must be finite and >= 0");
    if (!(tau_p > 0.0) || !std::isfinite(tau_p))
        throw ConfigError("knobs.tau_p must be finite and > 0");
    if (!(f_s > 0.0 && f_s < 1.0))
        throw ConfigError("knobs.f_s must lie in (0, 1)");
    if (!(f_p > 0.0 && f_p < 1.0))
        throw ConfigError("knobs.f_p must lie in (0, 1)");
    if (!std::isfinite(theta))
        throw ConfigError("knobs.theta must be finite");

    DimensionlessRun run;
    run.g0 = g0;
    run.tau_p = tau_p;
    run.f_s = f_s;
    run.f_p = f_p;
    run.theta = theta;

    const double omega_s_TR = omega_signal(cfg) * round_trip_time(cfg);
    run.omega_s_TR = omega_s_TR;
    run.Gamma_sL = omega_s_TR / (f_s * cfg.Q_sI);
    run.Gamma_pL = 2.0 * omega_s_TR / (f_p * cfg.Q_pI);
    run.Gamma_pI = 2.0 * omega_s_TR / cfg.Q_pI;
    run.sigma_ell_p = std::exp(-0.5 * run.Gamma_pL);
    run.ell_p = std::exp(-0.5 * run.Gamma_pI);
    run.sigma_p = run.sigma_ell_p / run.ell_p;
    run.escape_s = 1.0 - f_s;
    return run;
}

double pump_strength_to_photons(const PhysicalConfig& cfg, double g0) {
    if (!(g0 > 0.0)) throw ConfigError("knobs.g0 must be > 0 to infer a photon number");
    const double T_R = round_trip_time(cfg);
    const double root = g0 * constants::hbar / (4.0 * coupling_eta(cfg) * T_R);
    using constants::ln2;
    using constants::pi;
    return root * root * std::sqrt(pi / ln2);
}

double photons_to_pump_strength(const PhysicalConfig& cfg, double n_photons) {
    if (!(n_photons > 0.0)) throw ConfigError("photon number must be > 0");
    const double T_R = round_trip_time(cfg);
    return 4.0 * coupling_eta(cfg) * T_R * std::sqrt(n_photons) *
           std::pow(constants::ln2 / constants::pi, 0.25) / constants::hbar;
}

double ring_pump_photons(const PhysicalConfig& cfg, const DimensionlessRun& run,
                         double g) {
    const double T_R = round_trip_time(cfg);
    const double amp = g * constants::hbar * run.Gamma_sL / (4.0 * coupling_eta(cfg) * T_R);
    return amp * amp;
}

} // namespace rsq
