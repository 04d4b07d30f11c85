#include "rsq/special.hpp"

#include <cmath>
#include <limits>

#include "rsq/constants.hpp"

namespace rsq {

bool& erfcx_overflow_flag() {
    thread_local bool flag = false;
    return flag;
}

namespace {

// Laplace continued fraction, reliable for x >= 5:
//   erfcx(x) = 1 / (sqrt(pi) * (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))))
// Evaluated bottom-up at fixed depth; 40 levels give full double accuracy
// over the whole x >= 5 range.
double erfcx_cf(double x) {
    double f = x;
    for (int k = 40; k >= 1; --k) f = x + (0.5 * k) / f;
    return 1.0 / (std::sqrt(constants::pi) * f);
}

} // namespace

double erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x >= 5.0) return erfcx_cf(x);
    if (x >= 0.0) return std::exp(x * x) * std::erfc(x);
    // Reflection; the subtraction is benign (no cancellation for x < 0).
    const double lead = 2.0 * std::exp(x * x);
    if (!std::isfinite(lead)) {
        erfcx_overflow_flag() = true;
        return std::numeric_limits<double>::infinity();
    }
    return lead - erfcx(-x);
}

double gaussian_fwhm(double t, double tau) {
    const double z = t / tau;
    return std::exp(-2.0 * constants::ln2 * z * z);
}

} // namespace rsq
