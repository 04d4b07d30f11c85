#include "rsq/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsq/constants.hpp"

namespace rsq {

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + w * (ys[i + 1] - ys[i]);
}

} // namespace

SpectrumPoint s_of_omega(const DimensionlessRun& run, const Trajectory& traj,
                         const SqueezeEvents& events, double omega, double beta) {
    const double r = interp(traj.t, traj.r, events.t_m);
    const double n_th = interp(traj.t, traj.n_th, events.t_m);
    const double phi = phase_phi(run, events.t_m);
    const double gs = run.Gamma_sL;
    const double lorentz = gs * gs / (2.0 * (0.25 * gs * gs + omega * omega));
    const double braces = (n_th + 0.5) * std::cosh(2.0 * r) - 0.5 -
                          (n_th + 0.5) * std::sinh(2.0 * r) * std::cos(phi - 2.0 * beta);
    SpectrumPoint p;
    p.omega = omega;
    p.value = 1.0 + run.escape_s * lorentz * braces;
    p.validity_warning = std::abs(omega) > 0.25 * constants::pi;
    return p;
}

double min_noise_floor(double f_s, double dx2_min) {
    return 1.0 + (1.0 - f_s) * (dx2_min - 1.0);
}

double max_noise_ceiling(double f_s, double Gamma_sL, double t_m, double t_A,
                         double dy2_max) {
    if (t_A < t_m)
        throw std::domain_error("antisqueezing peak time precedes squeezing peak time");
    return 1.0 + (1.0 - f_s) * (1.0 + 0.5 * Gamma_sL * (t_A - t_m)) * (dy2_max - 1.0);
}

double to_db(double s_linear) {
    if (!(s_linear > 0.0)) throw std::domain_error("dB conversion needs a positive value");
    return 10.0 * std::log10(s_linear);
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

SqueezeSummary summarize(const DimensionlessRun& run, const Trajectory& traj) {
    SqueezeSummary s;
    s.events = locate_events(traj);
    s.s_min0 = min_noise_floor(run.f_s, s.events.dx2_min);
    s.s_max0 = max_noise_ceiling(run.f_s, run.Gamma_sL, s.events.t_m, s.events.t_A,
                                 s.events.dy2_max);
    s.squeezing_db = -to_db(s.s_min0);
    s.antisqueezing_db = to_db(s.s_max0);
    return s;
}

} // namespace rsq
