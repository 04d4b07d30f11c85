#pragma once

namespace rsq {

// Scaled complementary error function erfcx(x) = exp(x^2) erfc(x).
//
// For x >= 0 the result is in (0, 1] and accurate to ~1e-14 relative.
// For x < 0 the reflection erfcx(x) = 2 exp(x^2) - erfcx(-x) is used; once
// 2 exp(x^2) exceeds the double range (x < about -26.64) the function
// returns +inf and sets the sticky per-thread flag below. Callers that can
// reach that regime must either check the flag or avoid it algebraically.
double erfcx(double x);

// Sticky per-thread overflow indicator for erfcx. Reset by assigning false.
bool& erfcx_overflow_flag();

// Field envelope exp(-2 ln2 t^2 / tau^2) whose intensity (its square) has
// full width tau at half maximum. Requires tau > 0.
double gaussian_fwhm(double t, double tau);

} // namespace rsq
