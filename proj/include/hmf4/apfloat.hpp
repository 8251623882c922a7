#pragma once

#include <mpfr.h>

#include <string>

#include "hmf4/rat.hpp"

namespace hmf4 {

// Arbitrary-precision real backed by MPFR, round-to-nearest throughout.
// The precision (working_bits) travels with the value; binary operations
// produce results at the larger of the operand precisions.
class APReal {
public:
    explicit APReal(long bits = 128);
    APReal(long bits, long v);
    APReal(long bits, const Rat& v);
    APReal(long bits, const std::string& decimal);
    APReal(const APReal& o);
    APReal(APReal&& o) noexcept;
    APReal& operator=(const APReal& o);
    APReal& operator=(APReal&& o) noexcept;
    ~APReal();

    long bits() const { return mpfr_get_prec(x_); }
    mpfr_ptr raw() { return x_; }
    mpfr_srcptr raw() const { return x_; }

    int sgn() const { return mpfr_sgn(x_); }
    bool is_nan() const { return mpfr_nan_p(x_) != 0; }
    bool is_inf() const { return mpfr_inf_p(x_) != 0; }
    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(x_, MPFR_RNDN); }

    // Scientific notation with the given count of significant digits.
    std::string str(long digits) const;

    APReal operator-() const;
    APReal& operator+=(const APReal& o);
    APReal& operator-=(const APReal& o);
    APReal& operator*=(const APReal& o);
    APReal& operator/=(const APReal& o);

    static APReal pi(long bits);

private:
    mpfr_t x_;
};

APReal operator+(const APReal& a, const APReal& b);
APReal operator-(const APReal& a, const APReal& b);
APReal operator*(const APReal& a, const APReal& b);
APReal operator/(const APReal& a, const APReal& b);
APReal operator*(long a, const APReal& b);
APReal operator/(const APReal& a, long b);
APReal operator+(const APReal& a, long b);
APReal operator-(const APReal& a, long b);

bool operator<(const APReal& a, const APReal& b);
bool operator>(const APReal& a, const APReal& b);
bool operator<=(const APReal& a, const APReal& b);
bool operator>=(const APReal& a, const APReal& b);
bool operator==(const APReal& a, const APReal& b);
bool operator<(const APReal& a, long b);
bool operator>(const APReal& a, long b);
bool operator<=(const APReal& a, long b);
bool operator>=(const APReal& a, long b);

APReal abs(const APReal& a);
APReal max(const APReal& a, const APReal& b);
APReal min(const APReal& a, const APReal& b);
APReal exp(const APReal& a);
APReal log(const APReal& a);
APReal sqrt(const APReal& a);
APReal pow(const APReal& a, const APReal& b);  // a > 0 expected
APReal pow_si(const APReal& a, long n);
APReal ldexp(const APReal& a, long e);  // a * 2^e, exact
APReal sin(const APReal& a);
APReal cos(const APReal& a);
APReal atan2(const APReal& y, const APReal& x);
APReal sinh(const APReal& a);
APReal cosh(const APReal& a);
APReal tanh(const APReal& a);

// 2^-(bits - margin) at the value's own precision: the unit used for
// "negligible at working precision" style thresholds.
APReal epsilon_at(long bits, long margin = 0);

// Copy of a rounded to the given precision.
APReal round_to(const APReal& a, long bits);

// Complex value as a pair of APReals of equal precision.
class APComplex {
public:
    explicit APComplex(long bits = 128) : re_(bits), im_(bits) {}
    APComplex(const APReal& re) : re_(re), im_(re.bits()) {}
    APComplex(const APReal& re, const APReal& im) : re_(re), im_(im) {}
    APComplex(long bits, const Rat& re, const Rat& im)
        : re_(bits, re), im_(bits, im) {}

    const APReal& real() const { return re_; }
    const APReal& imag() const { return im_; }
    long bits() const { return re_.bits(); }
    bool is_real() const { return im_.is_zero(); }

    APComplex operator-() const { return {-re_, -im_}; }

    std::string str(long digits) const;  // "a+bi" / "a-bi" / "a" when real

private:
    APReal re_, im_;
};

APComplex operator+(const APComplex& a, const APComplex& b);
APComplex operator-(const APComplex& a, const APComplex& b);
APComplex operator*(const APComplex& a, const APComplex& b);
APComplex operator/(const APComplex& a, const APComplex& b);
APComplex operator*(const APReal& a, const APComplex& b);

APComplex conj(const APComplex& a);
APReal norm(const APComplex& a);  // re^2 + im^2
APReal abs(const APComplex& a);
APComplex exp(const APComplex& a);
APComplex log(const APComplex& a);  // principal branch
APComplex pow(const APComplex& base, const APComplex& expo);
// x^w for real x > 0: exp(w log x).
APComplex rpow(const APReal& x, const APComplex& w);
APComplex pow_si(const APComplex& a, long n);
APComplex round_to(const APComplex& a, long bits);

}  // namespace hmf4
