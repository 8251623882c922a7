#pragma once

#include "hmf4/apfloat.hpp"

namespace hmf4 {

// Exact Bernoulli number B_n with the B_1 = -1/2 convention; cached.
Rat bernoulli(long n);

// Gamma function for complex s at the precision carried by s.
// Nonpositive-integer s is a pole and raises DomainError naming it.
APComplex gamma_complete(const APComplex& s);

// Upper incomplete gamma Gamma(s, x) = int_x^inf u^(s-1) e^(-u) du for
// real x > 0 and complex s. Continued fraction for x >= max(1, 0.8|s|),
// otherwise Gamma(s) minus the lower-incomplete series with an upward
// shift of s when its real part is small; exact nonpositive-integer s
// is handled through the exponential integral. Relative accuracy is the
// operand precision with a documented guard of 64 bits internally.
APComplex gamma_upper(const APComplex& s, const APReal& x);

}  // namespace hmf4
