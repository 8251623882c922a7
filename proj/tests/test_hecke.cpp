#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "hmf4/hecke.hpp"
#include "oracles.hpp"

using namespace hmf4;

TEST_CASE("operator coefficients follow the three-term rule (independent data)") {
    // weight 9/2 witness, coefficients assembled by test-local convolution
    auto a = oracle::theta_delta4_coeffs(100);
    long k = 4, p = 3;
    Series f(std::vector<Rat>(a.begin(), a.end()));
    Series b = t_p2_coeffs(f, p, k, 11);
    for (long n = 1; n < 11; ++n) {
        long chi_arg = (k % 2 == 0) ? n : -n;
        long expect = a[static_cast<size_t>(9 * n)] +
                      oracle::legendre(chi_arg, p) * 27 * a[static_cast<size_t>(n)];
        if (n % 9 == 0) expect += 2187 * a[static_cast<size_t>(n / 9)];
        CHECK(b.coeff(n) == expect);
    }
    // the witness is an eigenvector with eigenvalue a(9) + 27 = 12
    CHECK(a[9] + 27 == 12);
    CHECK(equal_to_min_prec(b, scale(Rat(12), f.truncated(11))));
}

TEST_CASE("matrices on the eigenspaces are exact and commute for k = 4..12") {
    for (long k = 4; k <= 12; ++k) {
        long prec = 25 * (k / 2 + 2) + 8;
        for (int sign : {+1, -1}) {
            FormSpace sp = eigen_space(k, sign, prec);
            if (sp.dim() == 0) continue;
            HeckeMatrix t9 = t_p2_matrix(sp, 3);
            HeckeMatrix t25 = t_p2_matrix(sp, 5);
            HeckeMatrix ab = hecke_mul(t9, t25);
            HeckeMatrix ba = hecke_mul(t25, t9);
            CHECK(ab.entries == ba.entries);
        }
        FormSpace cusp = cusp_space(k, prec);
        if (cusp.dim() == 0) continue;
        HeckeMatrix t9 = t_p2_matrix(cusp, 3);
        HeckeMatrix t25 = t_p2_matrix(cusp, 5);
        CHECK(hecke_mul(t9, t25).entries == hecke_mul(t25, t9).entries);
    }
}

TEST_CASE("matrix columns reproduce the operator images exactly") {
    FormSpace sp = cusp_space(8, 120);
    HeckeMatrix m = t_p2_matrix(sp, 3);
    long out_prec = 120 / 9;
    for (long j = 0; j < sp.dim(); ++j) {
        Series image = t_p2_coeffs(sp.basis_series[static_cast<size_t>(j)], 3, 8, out_prec);
        Series predicted = Series::zero(out_prec);
        for (long i = 0; i < sp.dim(); ++i)
            predicted = add(predicted,
                            scale(m.entries[static_cast<size_t>(i)][static_cast<size_t>(j)],
                                  sp.basis_series[static_cast<size_t>(i)].truncated(out_prec)));
        CHECK(equal_to_min_prec(image, predicted));
    }
}

TEST_CASE("one-dimensional space: exact eigenvalue 12 at p=3, k=4") {
    FormSpace sp = eigen_space(4, +1, 308);
    REQUIRE(sp.dim() == 1);
    HeckeMatrix m = t_p2_matrix(sp, 3);
    CHECK(m.entries[0][0] == 12);
    auto eigens = eigen_decompose(sp, {3}, 128);
    REQUIRE(eigens.size() == 1);
    CHECK(eigens[0].exact);
    CHECK(eigens[0].eigenvalues_exact.at(3) == 12);
    CHECK(eigens[0].label == "k4+e0");
}

TEST_CASE("exact eigenforms satisfy the eigen equation as exact series") {
    FormSpace sp = eigen_space(8, +1, 25 * 8 + 8);
    auto eigens = eigen_decompose(sp, {3, 5}, 128);
    REQUIRE(eigens.size() == 2);
    for (const Eigenform& e : eigens) {
        REQUIRE(e.exact);
        Series f = e.series();
        for (long p : {3L, 5L}) {
            long out = f.prec() / (p * p);
            Series b = t_p2_coeffs(f, p, 8, out);
            CHECK(equal_to_min_prec(b, scale(e.eigenvalues_exact.at(p), f.truncated(out))));
        }
    }
    // sorted ascending by eigenvalue tuple
    CHECK(eigens[0].eigenvalues_exact.at(3) < eigens[1].eigenvalues_exact.at(3));
}

TEST_CASE("embedded eigenforms satisfy the eigen equation numerically") {
    long k = 12, bits = 128;
    long prec = 9 * 40 + 8;
    for (int sign : {+1, -1}) {
        FormSpace sp = eigen_space(k, sign, prec);
        if (sp.dim() == 0) continue;
        auto eigens = eigen_decompose(sp, {3, 5, 7}, bits);
        CHECK(static_cast<long>(eigens.size()) == sp.dim());
        for (const Eigenform& e : eigens) {
            const APReal& lam = e.eigenvalues.at(3);
            APReal worst(bits);
            APReal scale_max(bits, 1L);
            for (long n = 1; n < 40; ++n) {
                long chi_arg = (k % 2 == 0) ? n : -n;
                int chi = oracle::legendre(chi_arg, 3);
                APReal b = e.coeffs[static_cast<size_t>(9 * n)];
                long pk1 = 177147;   // 3^11
                b += (chi * pk1) * e.coeffs[static_cast<size_t>(n)];
                if (n % 9 == 0) {
                    long p2k1 = 94143178827;  // 3^23
                    b += p2k1 * e.coeffs[static_cast<size_t>(n / 9)];
                }
                APReal resid = abs(b - lam * e.coeffs[static_cast<size_t>(n)]);
                worst = max(worst, resid);
                scale_max = max(scale_max, abs(lam * e.coeffs[static_cast<size_t>(n)]));
            }
            CHECK(worst / scale_max < epsilon_at(bits, 40));
        }
    }
}

TEST_CASE("characteristic polynomial is monic and annihilates the matrix") {
    FormSpace sp = eigen_space(12, +1, 25 * 9 + 8);
    REQUIRE(sp.dim() >= 2);
    HeckeMatrix m = t_p2_matrix(sp, 3);
    std::vector<Rat> cp = characteristic_polynomial(m);
    REQUIRE(static_cast<long>(cp.size()) == sp.dim() + 1);
    CHECK(cp.back() == 1);
    // Cayley-Hamilton, exactly
    long d = sp.dim();
    std::vector<std::vector<Rat>> acc(static_cast<size_t>(d),
                                      std::vector<Rat>(static_cast<size_t>(d), Rat(0)));
    HeckeMatrix power = m;  // m^1
    for (long i = 0; i < d; ++i) acc[static_cast<size_t>(i)][static_cast<size_t>(i)] = cp[0];
    for (size_t deg = 1; deg < cp.size(); ++deg) {
        for (long i = 0; i < d; ++i)
            for (long j = 0; j < d; ++j)
                acc[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
                    cp[deg] * power.entries[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (deg + 1 < cp.size()) power = hecke_mul(power, m);
    }
    for (const auto& row : acc)
        for (const Rat& v : row) CHECK(v == 0);
}

TEST_CASE("witness decomposes over the eigenbasis") {
    long bits = 128;
    FormSpace sp = eigen_space(8, +1, 25 * 8 + 8);
    auto eigens = eigen_decompose(sp, {3, 5}, bits);
    Series g = plus_witness(8).expand(sp.prec);
    std::vector<APReal> comp = express_in_eigenbasis(sp, eigens, g, bits);
    REQUIRE(static_cast<long>(comp.size()) == sp.dim());
    APReal worst(bits);
    APReal scale_max(bits, 1L);
    for (long n = 1; n < 60; ++n) {
        APReal rebuilt(bits);
        for (size_t i = 0; i < comp.size(); ++i)
            rebuilt += comp[i] * eigens[i].coeffs[static_cast<size_t>(n)];
        APReal want(bits, g.coeff(n));
        worst = max(worst, abs(rebuilt - want));
        scale_max = max(scale_max, abs(want));
    }
    CHECK(worst / scale_max < epsilon_at(bits, 40));
}

TEST_CASE("too-short series raise the precision requirement") {
    Series d = delta4(10);
    CHECK_THROWS_AS(t_p2_coeffs(d, 3, 4, 5), InsufficientPrecision);
    try {
        t_p2_coeffs(d, 3, 4, 5);
    } catch (const InsufficientPrecision& e) {
        CHECK(e.required_prec >= 45);
    }
    FormSpace sp = eigen_space(8, +1, 30);
    CHECK_THROWS_AS(t_p2_matrix(sp, 7), InsufficientPrecision);
}

TEST_CASE("empty spaces yield empty operators and decompositions") {
    FormSpace sp = eigen_space(4, -1, 40);
    CHECK(sp.dim() == 0);
    CHECK(t_p2_matrix(sp, 3).dim() == 0);
    CHECK(eigen_decompose(sp, {3}, 128).empty());
}
