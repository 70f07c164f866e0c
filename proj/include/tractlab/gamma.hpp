#pragma once

#include "tractlab/value.hpp"

namespace tractlab {

// Principal-branch log of the gamma function, valid on the whole plane away
// from the poles at the non-positive integers. Uses a Lanczos rational kernel
// for Re z >= 1/2 and the reflection formula otherwise; log sin is computed in
// an overflow-safe form so large |Im z| stays accurate.
Complex complexLogGamma(Complex z);

// Gamma itself, with PoleHit inside poleRadius of a non-positive integer and
// Overflow once log|Gamma| passes the representability threshold.
ComplexValue complexGamma(Complex z, double poleRadius = kDefaultPoleRadius);

// Digamma psi(z) = Gamma'(z)/Gamma(z); recurrence into Re z >= 8 plus the
// Bernoulli asymptotic series, reflection for Re z < 1/2.
Complex digamma(Complex z);

// log(sin w) without overflow for large |Im w|; branch chosen per half-plane,
// imaginary part meaningful mod 2*pi.
Complex logSinComplex(Complex w);

// log(1+x) for complex x, accurate near x = 0.
Complex clog1p(Complex x);

}  // namespace tractlab
