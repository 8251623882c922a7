#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "hmf4/series.hpp"

using namespace hmf4;

namespace {

Series random_series(std::mt19937& rng, long prec) {
    std::vector<Rat> c;
    c.reserve(static_cast<size_t>(prec));
    for (long n = 0; n < prec; ++n) {
        long num = static_cast<long>(rng() % 19) - 9;
        long den = 1 + static_cast<long>(rng() % 9);
        Rat r(num, den);
        r.canonicalize();
        c.push_back(r);
    }
    return Series(std::move(c));
}

}  // namespace

TEST_CASE("zero and one constructors") {
    Series z = Series::zero(5);
    CHECK(z.prec() == 5);
    CHECK(z.is_zero_to_prec());
    CHECK_FALSE(z.valuation().has_value());

    Series o = Series::one(3);
    CHECK(o.prec() == 3);
    CHECK(o.coeff(0) == 1);
    CHECK(o.coeff(2) == 0);
    CHECK(o.valuation() == 0);
}

TEST_CASE("out-of-precision access throws instead of returning zero") {
    Series o = Series::one(3);
    CHECK_THROWS(o.coeff(3));
    CHECK_THROWS(o.coeff(100));
}

TEST_CASE("small arithmetic identities") {
    Series a({1, 1, 0});  // 1 + q
    Series sq = mul(a, a);
    CHECK(sq.prec() == 3);
    CHECK(sq.coeff(0) == 1);
    CHECK(sq.coeff(1) == 2);
    CHECK(sq.coeff(2) == 1);

    Series cube = pow(a, 3);
    CHECK(cube.coeff(0) == 1);
    CHECK(cube.coeff(1) == 3);
    CHECK(cube.coeff(2) == 3);

    CHECK(equal_to_min_prec(add(a, neg(a)), Series::zero(3)));
    CHECK(equal_to_min_prec(sub(a, a), Series::zero(3)));
    Series tw = scale(Rat(3, 2), a);
    CHECK(tw.coeff(0) == Rat(3, 2));
    CHECK(tw.coeff(1) == Rat(3, 2));

    CHECK(equal_to_min_prec(pow(a, 0), Series::one(3)));
}

TEST_CASE("multiplication truncates to the smaller precision") {
    Series a = Series::one(5);
    Series b = Series::one(9);
    CHECK(mul(a, b).prec() == 5);
    CHECK(add(a, b).prec() == 5);
}

TEST_CASE("valuation and truncation") {
    Series f({0, 0, 5, 7});
    CHECK(f.valuation() == 2);
    Series t = f.truncated(2);
    CHECK(t.prec() == 2);
    CHECK(t.is_zero_to_prec());
}

TEST_CASE("substituting q -> q^m spreads coefficients") {
    Series f({7, 1, 2, 3, 4, 5});
    Series g = v_operator(f, 2);
    CHECK(g.prec() == 6);
    CHECK(g.coeff(0) == 7);
    CHECK(g.coeff(1) == 0);
    CHECK(g.coeff(2) == 1);
    CHECK(g.coeff(3) == 0);
    CHECK(g.coeff(4) == 2);
    CHECK(g.coeff(5) == 0);
}

TEST_CASE("ring axioms hold on random series") {
    std::mt19937 rng(987654u);
    for (int trial = 0; trial < 20; ++trial) {
        Series a = random_series(rng, 12);
        Series b = random_series(rng, 12);
        Series c = random_series(rng, 12);
        CHECK(equal_to_min_prec(mul(a, b), mul(b, a)));
        CHECK(equal_to_min_prec(mul(mul(a, b), c), mul(a, mul(b, c))));
        CHECK(equal_to_min_prec(mul(add(a, b), c), add(mul(a, c), mul(b, c))));
        CHECK(equal_to_min_prec(pow(a, 3), mul(a, mul(a, a))));
    }
}
