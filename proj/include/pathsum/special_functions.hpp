#pragma once

namespace pathsum {

// Generalized hypergeometric 0F2(; b1, b2; z) by direct power series,
// relative-term stopping at 1e-14. Non-positive integer b1 or b2 is a
// parameter pole.
double hyp0f2(double b1, double b2, double z);

// Modified Bessel function of the first kind, integer order, power series
// with relative-term stopping at 1e-14. Negative orders use I_{-nu} = I_nu.
double bessel_i(int nu, double x);

} // namespace pathsum
