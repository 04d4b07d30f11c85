#include "rsq/pump.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "rsq/constants.hpp"
#include "rsq/errors.hpp"
#include "rsq/special.hpp"

namespace rsq {

namespace {

const double kSqrt8Ln2 = std::sqrt(8.0 * constants::ln2);

// exp(x) that underflows to exactly 0 instead of raising range errors.
double exp_or_zero(double x) { return x < -745.0 ? 0.0 : std::exp(x); }

} // namespace

PumpEnvelope::PumpEnvelope(const DimensionlessRun& run) : run_(run) {
    lambda_ = 1.0 - run.sigma_ell_p;
    y0_ = lambda_ * run.tau_p / kSqrt8Ln2;
    const double sigma2 = run.sigma_p * run.sigma_p;
    prefactor_ = run.g0 *
                 std::sqrt(constants::pi * run.tau_p * (1.0 - sigma2) * run.ell_p * run.ell_p) /
                 (run.Gamma_sL * kSqrt8Ln2);
}

double PumpEnvelope::operator()(double t) const {
    const double y = y0_ - kSqrt8Ln2 * t / (2.0 * run_.tau_p);
    if (y > -25.0)
        return prefactor_ * erfcx(y) * gaussian_fwhm(t, run_.tau_p);
    // Deep tail: 2 exp(y^2) would overflow, but the Gaussian factor cancels
    // it exactly; the correction term reuses erfcx on the safe branch.
    const double lead = 2.0 * exp_or_zero(y0_ * y0_ - lambda_ * t);
    const double corr = erfcx(-y) * gaussian_fwhm(t, run_.tau_p);
    return prefactor_ * (lead - corr);
}

PumpPeak PumpEnvelope::peak() const {
    const double lo = -2.0 * run_.tau_p;
    const double hi = 6.0 * run_.tau_p + 10.0 / std::max(lambda_, 1e-12);
    constexpr int kScan = 4096;
    double best_t = lo, best_g = (*this)(lo);
    for (int i = 1; i <= kScan; ++i) {
        const double t = lo + (hi - lo) * i / kScan;
        const double g = (*this)(t);
        if (g > best_g) {
            best_g = g;
            best_t = t;
        }
    }
    // Golden-section refinement inside the bracketing cells.
    const double cell = (hi - lo) / kScan;
    double a = best_t - cell, b = best_t + cell;
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = (*this)(c), fd = (*this)(d);
    while (b - a > 1e-11 * std::max(1.0, std::abs(best_t))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = (*this)(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = (*this)(d);
        }
    }
    const double t_pk = 0.5 * (a + b);
    return {t_pk, (*this)(t_pk)};
}

std::vector<double> g_exact_oracle(const DimensionlessRun& run,
                                   const std::vector<double>& t_grid) {
    using constants::pi;
    if (t_grid.size() < 2)
        throw ConfigError("pump oracle grid needs at least two points");
    const double dt = t_grid[1] - t_grid[0];
    if (!(dt > 0.0)) throw ConfigError("pump oracle grid must be increasing");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (std::abs(t_grid[i] - t_grid[i - 1] - dt) > 1e-9 * dt)
            throw ConfigError("pump oracle grid must be uniform");
    }
    if (dt > 0.125 + 1e-12)
        throw ConfigError(
            "pump oracle grid spacing " + std::to_string(dt) +
            " round trips is too coarse to resolve the round-trip structure "
            "(aliasing); need spacing <= 1/8");
    const double span_lo = -6.0 * run.tau_p;
    const double span_hi = 6.0 * run.tau_p + 10.0 / run.Gamma_pL;
    if (t_grid.front() > span_lo + 1e-9 || t_grid.back() < span_hi - 1e-9)
        throw ConfigError("pump oracle grid must span at least [-6 tau_p, 6 tau_p + 10/Gamma_pL]");

    const double sl = run.sigma_ell_p;
    const double lambda = 1.0 - sl;
    const double a = run.tau_p * run.tau_p / (8.0 * constants::ln2);
    // Truncate where the Gaussian spectrum reaches ~1e-18 of its peak; the
    // kernel is bounded by 1/(1 - sigma_ell_p), so the tail is negligible.
    const double u_max = std::sqrt(41.5 / a);
    const double du = std::min({2.0 * pi / 64.0, lambda / 12.0, u_max / 50.0});
    const auto n_u = static_cast<std::size_t>(std::ceil(u_max / du));

    // Same normalization as PumpEnvelope: the analytic formula equals
    // 2 P x (this transform with the kernel linearized about resonance), so
    // using the exact kernel here gives the comparable exact envelope.
    PumpEnvelope env(run);
    const double prefactor = 2.0 * env.prefactor();

    std::vector<double> kernel_re(n_u + 1), kernel_im(n_u + 1), gauss(n_u + 1);
    for (std::size_t j = 0; j <= n_u; ++j) {
        const double u = j * du;
        const std::complex<double> eiu(std::cos(u), std::sin(u));
        const std::complex<double> k = eiu / (1.0 - sl * eiu);
        kernel_re[j] = k.real();
        kernel_im[j] = k.imag();
        gauss[j] = exp_or_zero(-a * u * u);
    }

    std::vector<double> out(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        // Half-range trapezoid of Re[gauss(u) K(u) e^{-iut}]; the integrand
        // is conjugate-symmetric so this is the full real transform.
        double acc = 0.5 * gauss[0] * kernel_re[0];
        for (std::size_t j = 1; j <= n_u; ++j) {
            const double u = j * du;
            const double c = std::cos(u * t), s = std::sin(u * t);
            double term = gauss[j] * (kernel_re[j] * c + kernel_im[j] * s);
            if (j == n_u) term *= 0.5;
            acc += term;
        }
        out[i] = std::abs(prefactor * acc * du / pi);
    }
    return out;
}

} // namespace rsq
