#include "hmf4/apfloat.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

namespace hmf4 {

namespace {
constexpr mpfr_rnd_t R = MPFR_RNDN;
long clamp_bits(long bits) { return std::max(bits, 64L); }
}  // namespace

APReal::APReal(long bits) {
    mpfr_init2(x_, clamp_bits(bits));
    mpfr_set_zero(x_, 1);
}

APReal::APReal(long bits, long v) {
    mpfr_init2(x_, clamp_bits(bits));
    mpfr_set_si(x_, v, R);
}

APReal::APReal(long bits, const Rat& v) {
    mpfr_init2(x_, clamp_bits(bits));
    mpfr_set_q(x_, v.get_mpq_t(), R);
}

APReal::APReal(long bits, const std::string& decimal) {
    mpfr_init2(x_, clamp_bits(bits));
    if (mpfr_set_str(x_, decimal.c_str(), 10, R) != 0) {
        mpfr_clear(x_);
        throw DomainError("APReal: cannot parse '" + decimal + "'");
    }
}

APReal::APReal(const APReal& o) {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_set(x_, o.x_, R);
}

APReal::APReal(APReal&& o) noexcept {
    mpfr_init2(x_, mpfr_get_prec(o.x_));
    mpfr_swap(x_, o.x_);
}

APReal& APReal::operator=(const APReal& o) {
    if (this != &o) {
        mpfr_set_prec(x_, mpfr_get_prec(o.x_));
        mpfr_set(x_, o.x_, R);
    }
    return *this;
}

APReal& APReal::operator=(APReal&& o) noexcept {
    if (this != &o) mpfr_swap(x_, o.x_);
    return *this;
}

APReal::~APReal() { mpfr_clear(x_); }

std::string APReal::str(long digits) const {
    if (digits < 2) digits = 2;
    std::vector<char> buf(static_cast<size_t>(digits) + 64);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Re", static_cast<int>(digits - 1), x_);
    return std::string(buf.data());
}

APReal APReal::operator-() const {
    APReal out(bits());
    mpfr_neg(out.x_, x_, R);
    return out;
}

APReal& APReal::operator+=(const APReal& o) {
    if (o.bits() > bits()) mpfr_prec_round(x_, o.bits(), R);
    mpfr_add(x_, x_, o.x_, R);
    return *this;
}
APReal& APReal::operator-=(const APReal& o) {
    if (o.bits() > bits()) mpfr_prec_round(x_, o.bits(), R);
    mpfr_sub(x_, x_, o.x_, R);
    return *this;
}
APReal& APReal::operator*=(const APReal& o) {
    if (o.bits() > bits()) mpfr_prec_round(x_, o.bits(), R);
    mpfr_mul(x_, x_, o.x_, R);
    return *this;
}
APReal& APReal::operator/=(const APReal& o) {
    if (o.bits() > bits()) mpfr_prec_round(x_, o.bits(), R);
    mpfr_div(x_, x_, o.x_, R);
    return *this;
}

APReal APReal::pi(long bits) {
    APReal out(bits);
    mpfr_const_pi(out.raw(), R);
    return out;
}

namespace {
long join_bits(const APReal& a, const APReal& b) { return std::max(a.bits(), b.bits()); }
}  // namespace

APReal operator+(const APReal& a, const APReal& b) {
    APReal out(join_bits(a, b));
    mpfr_add(out.raw(), a.raw(), b.raw(), R);
    return out;
}
APReal operator-(const APReal& a, const APReal& b) {
    APReal out(join_bits(a, b));
    mpfr_sub(out.raw(), a.raw(), b.raw(), R);
    return out;
}
APReal operator*(const APReal& a, const APReal& b) {
    APReal out(join_bits(a, b));
    mpfr_mul(out.raw(), a.raw(), b.raw(), R);
    return out;
}
APReal operator/(const APReal& a, const APReal& b) {
    APReal out(join_bits(a, b));
    mpfr_div(out.raw(), a.raw(), b.raw(), R);
    return out;
}
APReal operator*(long a, const APReal& b) {
    APReal out(b.bits());
    mpfr_mul_si(out.raw(), b.raw(), a, R);
    return out;
}
APReal operator/(const APReal& a, long b) {
    APReal out(a.bits());
    mpfr_div_si(out.raw(), a.raw(), b, R);
    return out;
}
APReal operator+(const APReal& a, long b) {
    APReal out(a.bits());
    mpfr_add_si(out.raw(), a.raw(), b, R);
    return out;
}
APReal operator-(const APReal& a, long b) {
    APReal out(a.bits());
    mpfr_sub_si(out.raw(), a.raw(), b, R);
    return out;
}

bool operator<(const APReal& a, const APReal& b) { return mpfr_less_p(a.raw(), b.raw()) != 0; }
bool operator>(const APReal& a, const APReal& b) { return mpfr_greater_p(a.raw(), b.raw()) != 0; }
bool operator<=(const APReal& a, const APReal& b) {
    return mpfr_lessequal_p(a.raw(), b.raw()) != 0;
}
bool operator>=(const APReal& a, const APReal& b) {
    return mpfr_greaterequal_p(a.raw(), b.raw()) != 0;
}
bool operator==(const APReal& a, const APReal& b) { return mpfr_equal_p(a.raw(), b.raw()) != 0; }
bool operator<(const APReal& a, long b) { return mpfr_cmp_si(a.raw(), b) < 0; }
bool operator>(const APReal& a, long b) { return mpfr_cmp_si(a.raw(), b) > 0; }
bool operator<=(const APReal& a, long b) { return mpfr_cmp_si(a.raw(), b) <= 0; }
bool operator>=(const APReal& a, long b) { return mpfr_cmp_si(a.raw(), b) >= 0; }

#define HMF4_UNARY(name, fn)                \
    APReal name(const APReal& a) {          \
        APReal out(a.bits());               \
        fn(out.raw(), a.raw(), R);          \
        return out;                         \
    }

HMF4_UNARY(abs, mpfr_abs)
HMF4_UNARY(exp, mpfr_exp)
HMF4_UNARY(log, mpfr_log)
HMF4_UNARY(sqrt, mpfr_sqrt)
HMF4_UNARY(sin, mpfr_sin)
HMF4_UNARY(cos, mpfr_cos)
HMF4_UNARY(sinh, mpfr_sinh)
HMF4_UNARY(cosh, mpfr_cosh)
HMF4_UNARY(tanh, mpfr_tanh)
#undef HMF4_UNARY

APReal max(const APReal& a, const APReal& b) {
    APReal out(join_bits(a, b));
    mpfr_max(out.raw(), a.raw(), b.raw(), R);
    return out;
}
APReal min(const APReal& a, const APReal& b) {
    APReal out(join_bits(a, b));
    mpfr_min(out.raw(), a.raw(), b.raw(), R);
    return out;
}
APReal pow(const APReal& a, const APReal& b) {
    APReal out(join_bits(a, b));
    mpfr_pow(out.raw(), a.raw(), b.raw(), R);
    return out;
}
APReal pow_si(const APReal& a, long n) {
    APReal out(a.bits());
    mpfr_pow_si(out.raw(), a.raw(), n, R);
    return out;
}
APReal ldexp(const APReal& a, long e) {
    APReal out(a.bits());
    mpfr_mul_2si(out.raw(), a.raw(), e, R);
    return out;
}
APReal atan2(const APReal& y, const APReal& x) {
    APReal out(join_bits(y, x));
    mpfr_atan2(out.raw(), y.raw(), x.raw(), R);
    return out;
}

APReal epsilon_at(long bits, long margin) {
    APReal out(bits, 1L);
    return ldexp(out, -(bits - margin));
}

APReal round_to(const APReal& a, long bits) {
    APReal out(bits);
    mpfr_set(out.raw(), a.raw(), R);
    return out;
}

// --- APComplex ---

std::string APComplex::str(long digits) const {
    if (im_.is_zero()) return re_.str(digits);
    std::string i = im_.str(digits);
    if (!i.empty() && i[0] == '-') return re_.str(digits) + i + "i";
    return re_.str(digits) + "+" + i + "i";
}

APComplex operator+(const APComplex& a, const APComplex& b) {
    return {a.real() + b.real(), a.imag() + b.imag()};
}
APComplex operator-(const APComplex& a, const APComplex& b) {
    return {a.real() - b.real(), a.imag() - b.imag()};
}
APComplex operator*(const APComplex& a, const APComplex& b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}
APComplex operator/(const APComplex& a, const APComplex& b) {
    APReal d = norm(b);
    return {(a.real() * b.real() + a.imag() * b.imag()) / d,
            (a.imag() * b.real() - a.real() * b.imag()) / d};
}
APComplex operator*(const APReal& a, const APComplex& b) {
    return {a * b.real(), a * b.imag()};
}

APComplex conj(const APComplex& a) { return {a.real(), -a.imag()}; }

APReal norm(const APComplex& a) { return a.real() * a.real() + a.imag() * a.imag(); }

APReal abs(const APComplex& a) {
    APReal out(a.bits());
    mpfr_hypot(out.raw(), a.real().raw(), a.imag().raw(), R);
    return out;
}

APComplex exp(const APComplex& a) {
    APReal m = exp(a.real());
    return {m * cos(a.imag()), m * sin(a.imag())};
}

APComplex log(const APComplex& a) {
    return {log(abs(a)), atan2(a.imag(), a.real())};
}

APComplex pow(const APComplex& base, const APComplex& expo) {
    return exp(expo * log(base));
}

APComplex rpow(const APReal& x, const APComplex& w) {
    if (!(x > 0)) throw DomainError("rpow: base must be positive");
    APReal lx = log(x);
    return exp(APComplex(w.real() * lx, w.imag() * lx));
}

APComplex pow_si(const APComplex& a, long n) {
    if (n < 0) {
        APComplex inv = APComplex(APReal(a.bits(), 1L)) / a;
        return pow_si(inv, -n);
    }
    APComplex out(APReal(a.bits(), 1L));
    APComplex base = a;
    while (n > 0) {
        if (n & 1) out = out * base;
        base = base * base;
        n >>= 1;
    }
    return out;
}

APComplex round_to(const APComplex& a, long bits) {
    return {round_to(a.real(), bits), round_to(a.imag(), bits)};
}

}  // namespace hmf4
