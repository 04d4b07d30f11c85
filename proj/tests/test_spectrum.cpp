#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rsq/constants.hpp"
#include "rsq/dynamics.hpp"
#include "rsq/params.hpp"
#include "rsq/pump.hpp"
#include "rsq/spectrum.hpp"

using namespace rsq;

namespace {

struct Fixture {
    DimensionlessRun run;
    Trajectory traj;
    SqueezeEvents events;
    double phi;  // local-oscillator phase at the squeezing peak

    explicit Fixture(double g0 = 1.0, double tau_p = 3.0, double f_s = 0.045,
                     double f_p = 0.03, double theta = 0.0)
        : run(derive_run(PhysicalConfig::reference_device(), g0, tau_p, f_s, f_p,
                         theta)),
          traj(integrate(run, PumpEnvelope(run))),
          events(locate_events(traj)),
          phi(phase_phi(run, events.t_m)) {}

    // Linear interpolation at t_m, matching the spectrum's state sampling.
    double interp(const std::vector<double>& v, double t) const {
        const auto it = std::upper_bound(traj.t.begin(), traj.t.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - traj.t.begin()) - 1;
        const double w = (t - traj.t[i]) / (traj.t[i + 1] - traj.t[i]);
        return v[i] * (1.0 - w) + v[i + 1] * w;
    }

    // The spectrum samples r and n_th at t_m and applies the closed forms,
    // so the reference variances must be built the same way rather than by
    // interpolating dx2/dy2 directly.
    double dx2_at(double t) const {
        return (2.0 * interp(traj.n_th, t) + 1.0) * std::exp(-2.0 * interp(traj.r, t));
    }
    double dy2_at(double t) const {
        return (2.0 * interp(traj.n_th, t) + 1.0) * std::exp(2.0 * interp(traj.r, t));
    }
};

} // namespace

TEST_SUITE("spectrum") {

TEST_CASE("zero-frequency value at the squeeze phase equals the noise floor") {
    const Fixture fx;
    const SpectrumPoint p = s_of_omega(fx.run, fx.traj, fx.events, 0.0, fx.phi / 2);
    CHECK(p.value ==
          doctest::Approx(min_noise_floor(fx.run.f_s, fx.dx2_at(fx.events.t_m)))
              .epsilon(1e-10));
    CHECK(!p.validity_warning);
}

TEST_CASE("orthogonal phase reads the antisqueezed variance at t_m") {
    const Fixture fx;
    const double beta = fx.phi / 2 + constants::pi / 2;
    const SpectrumPoint p = s_of_omega(fx.run, fx.traj, fx.events, 0.0, beta);
    const double dy2_tm = fx.dy2_at(fx.events.t_m);
    CHECK(p.value ==
          doctest::Approx(1.0 + (1.0 - fx.run.f_s) * (dy2_tm - 1.0)).epsilon(1e-10));
}

TEST_CASE("spectrum is even in frequency with its extreme at zero") {
    const Fixture fx;
    for (const double beta : {fx.phi / 2, fx.phi / 2 + 0.3, fx.phi / 2 + 1.2}) {
        const double s0 = s_of_omega(fx.run, fx.traj, fx.events, 0.0, beta).value;
        for (const double w : {0.001, 0.005, 0.01, 0.02, 0.05}) {
            const double sp = s_of_omega(fx.run, fx.traj, fx.events, w, beta).value;
            const double sm = s_of_omega(fx.run, fx.traj, fx.events, -w, beta).value;
            CHECK(sp == doctest::Approx(sm).epsilon(1e-13));
            CHECK(std::abs(sp - 1.0) <= std::abs(s0 - 1.0) + 1e-13);
        }
    }
}

TEST_CASE("deviation from shot noise is Lorentzian in frequency") {
    const Fixture fx;
    const double beta = fx.phi / 2;
    const double s0 = s_of_omega(fx.run, fx.traj, fx.events, 0.0, beta).value;
    const double sh =
        s_of_omega(fx.run, fx.traj, fx.events, fx.run.Gamma_sL / 2, beta).value;
    CHECK((sh - 1.0) == doctest::Approx(0.5 * (s0 - 1.0)).epsilon(1e-12));
}

TEST_CASE("squeeze phase minimizes the zero-frequency noise") {
    const Fixture fx(1.0, 3.0, 0.045, 0.03, 0.9);
    const double s_best = s_of_omega(fx.run, fx.traj, fx.events, 0.0, fx.phi / 2).value;
    for (int k = 0; k < 64; ++k) {
        const double beta = -constants::pi + constants::pi * k / 32.0;
        CHECK(s_of_omega(fx.run, fx.traj, fx.events, 0.0, beta).value >=
              s_best - 1e-12);
    }
}

TEST_CASE("validity warning beyond a quarter free spectral range") {
    const Fixture fx;
    CHECK(!s_of_omega(fx.run, fx.traj, fx.events, constants::pi / 4 - 1e-6, 0.0)
               .validity_warning);
    CHECK(s_of_omega(fx.run, fx.traj, fx.events, constants::pi / 4 + 1e-6, 0.0)
              .validity_warning);
    CHECK(s_of_omega(fx.run, fx.traj, fx.events, -constants::pi / 3, 0.0)
              .validity_warning);
}

TEST_CASE("noise floor formula and monotonicity in under-coupling") {
    CHECK(min_noise_floor(0.05, 0.1) == doctest::Approx(1.0 + 0.95 * (-0.9)));
    // With dx2 < 1, keeping less light (larger f_s) raises the floor.
    double prev = -1.0;
    for (double f_s = 0.05; f_s < 0.96; f_s += 0.1) {
        const double floor = min_noise_floor(f_s, 0.1);
        CHECK(floor > prev);
        prev = floor;
    }
    // Critical coupling caps the floor at one half.
    CHECK(min_noise_floor(0.5, 0.0) == doctest::Approx(0.5));
    // The floor never goes below the retained fraction.
    for (const double f_s : {0.05, 0.2, 0.5})
        CHECK(min_noise_floor(f_s, 1e-12) >= f_s - 1e-9);
}

TEST_CASE("noise ceiling only inflates the direct estimate") {
    const double direct = 1.0 + 0.95 * (50.0 - 1.0);
    CHECK(max_noise_ceiling(0.05, 0.03, 2.0, 2.0, 50.0) ==
          doctest::Approx(direct).epsilon(1e-14));
    CHECK(max_noise_ceiling(0.05, 0.03, 2.0, 30.0, 50.0) > direct);
    CHECK_THROWS_AS(max_noise_ceiling(0.05, 0.03, 5.0, 2.0, 50.0),
                    std::domain_error);
}

TEST_CASE("dB conversions") {
    CHECK(to_db(1.0) == doctest::Approx(0.0));
    CHECK(to_db(0.1) == doctest::Approx(-10.0).epsilon(1e-13));
    CHECK(to_db(std::pow(10.0, 2.19)) == doctest::Approx(21.9).epsilon(1e-13));
    for (const double s : {1e-4, 0.3, 1.0, 7.0, 1e6})
        CHECK(from_db(to_db(s)) == doctest::Approx(s).epsilon(1e-13));
    CHECK_THROWS_AS(to_db(0.0), std::domain_error);
    CHECK_THROWS_AS(to_db(-3.0), std::domain_error);
}

TEST_CASE("summary wires the floor, ceiling, and dB sign convention") {
    const Fixture fx;
    const SqueezeSummary s = summarize(fx.run, fx.traj);
    CHECK(s.s_min0 ==
          doctest::Approx(min_noise_floor(fx.run.f_s, s.events.dx2_min))
              .epsilon(1e-12));
    CHECK(s.s_max0 ==
          doctest::Approx(max_noise_ceiling(fx.run.f_s, fx.run.Gamma_sL,
                                            s.events.t_m, s.events.t_A,
                                            s.events.dy2_max))
              .epsilon(1e-12));
    CHECK(s.squeezing_db == doctest::Approx(-to_db(s.s_min0)).epsilon(1e-12));
    CHECK(s.antisqueezing_db == doctest::Approx(to_db(s.s_max0)).epsilon(1e-12));
    CHECK(s.squeezing_db > 0.0);  // below vacuum at these knobs
    CHECK(s.antisqueezing_db > s.squeezing_db);
    CHECK(s.s_max0 >= 1.0 + (1.0 - fx.run.f_s) * (s.events.dy2_max - 1.0) - 1e-9);
}

TEST_CASE("critical coupling caps extractable squeezing at 3 dB") {
    const Fixture fx(2.0, 4.0, 0.5, 0.03);
    const SqueezeSummary s = summarize(fx.run, fx.traj);
    CHECK(s.s_min0 >= 0.5 - 1e-12);
    CHECK(s.squeezing_db <= 10.0 * std::log10(2.0) + 1e-9);
}

} // TEST_SUITE
