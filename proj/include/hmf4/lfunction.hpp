#pragma once

#include <string>
#include <vector>

#include "hmf4/apfloat.hpp"
#include "hmf4/forms.hpp"

namespace hmf4 {

// Partial sum of f(it) = sum a(n) e^(-2 pi n t) with an explicit bound
// on the dropped tail, derived from the |a(n)| <= C n^alpha growth model
// (alpha from the weight, C empirical with safety factor 2).
struct EvalResult {
    APReal value;
    APReal tail_bound;   // dropped terms beyond the known coefficients
    APReal round_bound;  // accumulated rounding of the partial sum
    long terms_used = 0;
};

EvalResult eval_form(const Series& f, Weight w, const APReal& t, long bits);

// Value of the completed L-function at one point, with the reported
// truncation tail bound and an accumulated rounding bound. The total
// error budget is tail_bound + round_bound.
struct LValue {
    APComplex s;
    APComplex value;
    APReal tail_bound;
    APReal round_bound;
    long terms_used = 0;
    std::string method;   // "gamma_series" or "quadrature"
    std::string form_id;  // weight, route, coefficient hash
};

APReal lvalue_budget(const LValue& v);

// Completed L-function of a W4-eigenform of the stated sign:
//   L*(f,s) = sum_n a(n) [ (pi n)^(-s) Gamma(s, pi n)
//                          + sign (pi n)^(s-k-1/2) Gamma(k+1/2-s, pi n) ].
LValue lstar_eigen(const Series& f, Weight w, int sign, const APComplex& s, long bits);

// Generic (non-eigen) variant: the second kernel uses the coefficients
// of f|W4, supplied as fw4.
LValue lstar_generic(const Series& f, const Series& fw4, Weight w, const APComplex& s,
                     long bits);

// Independent oracle: tanh-sinh quadrature of
//   int_{1/2}^T [ f|W4(it) (2t)^(k+1/2-s) + f(it) (2t)^s ] dt/t
// with an explicit exponential bound for the tail beyond T. Shares no
// kernel with the gamma-series route.
LValue lstar_quadrature(const Series& f, const Series& fw4, Weight w, const APComplex& s,
                        long bits);

// |L*(f, k+1/2-s) - L*(f|W4, s)|, both sides via lstar_generic.
APReal functional_equation_residual(const Series& f, const Series& fw4, Weight w,
                                    const APComplex& s, long bits);

struct ScanPoint {
    Rat sigma;
    LValue lvalue;
    int sign = 0;  // sign of the value, 0 when inside the error budget
};

// L* of a sign-eigenform on the grid lo, lo+step, ..., <= hi.
std::vector<ScanPoint> scan_real(const Series& f, Weight w, int sign, const Rat& lo,
                                 const Rat& hi, const Rat& step, long bits);

}  // namespace hmf4
