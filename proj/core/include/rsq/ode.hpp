#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rsq/errors.hpp"

namespace rsq {

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    // Window overrides for dynamics integrations; when unset the window is
    // chosen automatically from the pump duration and decay rate.
    std::optional<double> t_start_override;
    std::optional<double> t_end_override;
    std::size_t max_steps = 2'000'000;
};

// Accepted steps of one integration: times, states, and derivatives, enough
// for cubic Hermite interpolation anywhere inside the window.
template <std::size_t N>
class DenseSolution {
public:
    std::vector<double> ts;
    std::vector<std::array<double, N>> ys;
    std::vector<std::array<double, N>> fs;

    std::array<double, N> sample(double t) const {
        if (t <= ts.front()) return ys.front();
        if (t >= ts.back()) return ys.back();
        const auto it = std::upper_bound(ts.begin(), ts.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
        const double h = ts[i + 1] - ts[i];
        const double th = (t - ts[i]) / h;
        const double th2 = th * th, th3 = th2 * th;
        const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
        const double h10 = th3 - 2.0 * th2 + th;
        const double h01 = -2.0 * th3 + 3.0 * th2;
        const double h11 = th3 - th2;
        std::array<double, N> y;
        for (std::size_t k = 0; k < N; ++k)
            y[k] = h00 * ys[i][k] + h10 * h * fs[i][k] + h01 * ys[i + 1][k] +
                   h11 * h * fs[i + 1][k];
        return y;
    }
};

// Dormand-Prince 5(4) embedded pair with step-size control and FSAL reuse.
// rhs(t, y, dydt) must fill dydt; throws NumericalError on step-size
// underflow, non-finite states, or exceeding opts.max_steps.
template <std::size_t N, class RHS>
DenseSolution<N> integrate_dopri5(RHS&& rhs, double t0, double t1,
                                  std::array<double, N> y0,
                                  const IntegratorOptions& opts = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (!(t1 > t0)) throw NumericalError("integration window is empty");

    DenseSolution<N> sol;
    std::array<double, N> y = y0, k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ytmp{}, ynew{};
    double t = t0;
    rhs(t, y, k1);
    sol.ts.push_back(t);
    sol.ys.push_back(y);
    sol.fs.push_back(k1);

    double h = std::min(1e-3, (t1 - t0) * 0.01);
    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > opts.max_steps)
            throw NumericalError("integrator exceeded " + std::to_string(opts.max_steps) +
                                 " steps before t~=" + std::to_string(t1) +
                                 "; tolerance not met");
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw NumericalError("step size underflow at t~=" + std::to_string(t));
        if (t + h > t1) h = t1 - t;

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                  b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < N; ++i) {
            if (!std::isfinite(ynew[i])) finite = false;
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale =
                opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / scale) * (ei / scale);
        }
        err = std::sqrt(err / N);
        if (!finite || !std::isfinite(err)) {
            // Retry with a smaller step; the underflow guard above turns a
            // genuine blow-up into a diagnostic naming the time.
            h *= 0.25;
            continue;
        }
        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
            sol.ts.push_back(t);
            sol.ys.push_back(y);
            sol.fs.push_back(k1);
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        h *= factor;
    }
    return sol;
}

} // namespace rsq
