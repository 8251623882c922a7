#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mpfr.h>

#include <string>
#include <vector>

#include "hmf4/gamma.hpp"

using namespace hmf4;

namespace {

const long kBits = 192;

APReal ap(const std::string& s) { return APReal(kBits, s); }

// relative distance between a complex library value and an MPFR real
// reference
APReal rel_to(const APComplex& got, const APReal& ref) {
    return abs(got - APComplex(ref)) / abs(ref);
}

APReal rel_c(const APComplex& got, const APComplex& ref) {
    return abs(got - ref) / abs(ref);
}

APReal tol(long margin) { return ldexp(APReal(kBits, 1L), -(kBits - margin)); }

APReal mpfr_gamma_ref(const APReal& x) {
    APReal out(kBits);
    mpfr_gamma(out.raw(), x.raw(), MPFR_RNDN);
    return out;
}

APReal mpfr_gamma_inc_ref(const APReal& s, const APReal& x) {
    APReal out(kBits);
    mpfr_gamma_inc(out.raw(), s.raw(), x.raw(), MPFR_RNDN);
    return out;
}

}  // namespace

TEST_CASE("Bernoulli numbers are the exact table values") {
    CHECK(bernoulli(0) == 1);
    CHECK(bernoulli(1) == Rat(-1, 2));
    CHECK(bernoulli(2) == Rat(1, 6));
    CHECK(bernoulli(3) == 0);
    CHECK(bernoulli(4) == Rat(-1, 30));
    CHECK(bernoulli(6) == Rat(1, 42));
    CHECK(bernoulli(8) == Rat(-1, 30));
    CHECK(bernoulli(10) == Rat(5, 66));
    CHECK(bernoulli(12) == Rat(-691, 2730));
    CHECK(bernoulli(11) == 0);
}

TEST_CASE("complete gamma matches MPFR on the real axis") {
    std::vector<std::string> xs = {"0.5",   "1",    "1.5",  "2.7",  "5.25",
                                   "10.75", "21.5", "-0.5", "-2.25"};
    for (const auto& s : xs) {
        APReal x = ap(s);
        APComplex got = gamma_complete(APComplex(x));
        APReal ref = mpfr_gamma_ref(x);
        CHECK(rel_to(got, ref) < tol(24));
    }
}

TEST_CASE("complete gamma: recurrence, half-integer value, poles") {
    APComplex s(ap("1.3"), ap("2.1"));
    APComplex lhs = gamma_complete(s + APComplex(APReal(kBits, 1L)));
    APComplex rhs = s * gamma_complete(s);
    CHECK(rel_c(lhs, rhs) < tol(24));

    APComplex half = gamma_complete(APComplex(ap("0.5")));
    APReal sqrt_pi = sqrt(APReal::pi(kBits));
    CHECK(rel_to(half, sqrt_pi) < tol(24));

    CHECK_THROWS_AS(gamma_complete(APComplex(APReal(kBits, 0L))), DomainError);
    CHECK_THROWS_AS(gamma_complete(APComplex(APReal(kBits, -1L))), DomainError);
    CHECK_THROWS_AS(gamma_complete(APComplex(APReal(kBits, -5L))), DomainError);
}

TEST_CASE("upper incomplete gamma matches MPFR for real parameters") {
    std::vector<std::string> ss = {"0.5", "1", "2.25", "5.5", "-0.75"};
    std::vector<std::string> xs = {"0.1", "0.7", "1", "3.25", "10", "50"};
    for (const auto& s_str : ss) {
        for (const auto& x_str : xs) {
            APReal s = ap(s_str);
            APReal x = ap(x_str);
            APComplex got = gamma_upper(APComplex(s), x);
            APReal ref = mpfr_gamma_inc_ref(s, x);
            INFO("s=", s_str, " x=", x_str);
            CHECK(rel_to(got, ref) < tol(32));
        }
    }
}

TEST_CASE("upper incomplete gamma at nonpositive integer order matches MPFR") {
    for (long s : {0L, -1L, -2L, -3L}) {
        for (const auto& x_str : {"0.3", "1", "4.5", "20"}) {
            APReal x = ap(x_str);
            APComplex got = gamma_upper(APComplex(APReal(kBits, s)), x);
            APReal ref = mpfr_gamma_inc_ref(APReal(kBits, s), x);
            INFO("s=", s, " x=", x_str);
            CHECK(rel_to(got, ref) < tol(32));
        }
    }
}

TEST_CASE("Gamma(1/2, x) equals sqrt(pi) erfc(sqrt(x)) on [pi, 100 pi]") {
    APReal pi = APReal::pi(kBits);
    APReal ratio = log(APReal(kBits, 100L));
    for (int j = 0; j <= 8; ++j) {
        APReal x = pi * exp(j * ratio / 8);
        APComplex got = gamma_upper(APComplex(ap("0.5")), x);
        APReal erfc_ref(kBits);
        APReal sx = sqrt(x);
        mpfr_erfc(erfc_ref.raw(), sx.raw(), MPFR_RNDN);
        APReal ref = sqrt(pi) * erfc_ref;
        CHECK(rel_to(got, ref) < tol(32));
    }
}

TEST_CASE("incomplete gamma recurrence for complex order") {
    // Gamma(s+1, x) = s Gamma(s, x) + x^s e^(-x)
    std::vector<APComplex> orders = {APComplex(ap("2.25"), ap("1.5")),
                                     APComplex(ap("-1.75"), ap("0.5")),
                                     APComplex(ap("0.25"), ap("-3"))};
    for (const APComplex& s : orders) {
        for (const auto& x_str : {"0.3", "1", "3", "10", "40"}) {
            APReal x = ap(x_str);
            APComplex lhs = gamma_upper(s + APComplex(APReal(kBits, 1L)), x);
            APComplex rhs = s * gamma_upper(s, x) + rpow(x, s) * APComplex(exp(-x));
            INFO("x=", x_str);
            CHECK(abs(lhs - rhs) / max(abs(lhs), abs(rhs)) < tol(40));
        }
    }
}
