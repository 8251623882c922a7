#include "hmf4/gamma.hpp"

#include <cmath>
#include <mutex>
#include <vector>

namespace hmf4 {

namespace {
constexpr long kGuardBits = 64;
}

Rat bernoulli(long n) {
    if (n < 0) throw DomainError("bernoulli: negative index");
    static std::mutex mu;
    static std::vector<Rat> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (cache.empty()) cache.push_back(Rat(1));
    // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
    while (static_cast<long>(cache.size()) <= n) {
        long m = static_cast<long>(cache.size());
        Rat acc(0);
        for (long j = 0; j < m; ++j) {
            mpz_class binom;
            mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(m + 1),
                         static_cast<unsigned long>(j));
            acc += Rat(binom) * cache[static_cast<size_t>(j)];
        }
        cache.push_back(-acc / Rat(m + 1));
    }
    return cache[static_cast<size_t>(n)];
}

namespace {

bool is_nonpositive_integer(const APComplex& s) {
    return s.imag().is_zero() && mpfr_integer_p(s.real().raw()) && s.real() <= 0;
}

// log Gamma(z) by the Stirling asymptotic series; requires Re(z) >= shift
// threshold for the carried precision (caller guarantees).
APComplex log_gamma_shifted(const APComplex& z) {
    long wb = z.bits();
    APReal half(wb, ratq(1, 2));
    APComplex lg = (z - APComplex(half)) * log(z) - z;
    APReal two_pi = 2 * APReal::pi(wb);
    lg = lg + APComplex(ldexp(log(two_pi), -1));
    APComplex inv_z2 = pow_si(z, -2);
    APComplex zpow = APComplex(APReal(wb, 1L)) / z;  // z^(1-2j), j=1
    APReal eps = epsilon_at(wb, 8);
    long max_terms = wb / 4 + 32;
    for (long j = 1; j <= max_terms; ++j) {
        Rat c = bernoulli(2 * j) / Rat((2 * j) * (2 * j - 1));
        APComplex term = APReal(wb, c) * zpow;
        lg = lg + term;
        if (abs(term) < eps * max(APReal(wb, 1L), abs(lg))) break;
        zpow = zpow * inv_z2;
    }
    return lg;
}

APComplex gamma_at(const APComplex& s, long wb) {
    APComplex z = round_to(s, wb);
    // Shift until the asymptotic series reaches full accuracy.
    long shift_to = static_cast<long>(0.35 * static_cast<double>(wb)) + 8;
    APComplex prod(APReal(wb, 1L));
    long m = 0;
    if (z.real() < shift_to) m = shift_to - z.real().to_long() + 1;
    for (long i = 0; i < m; ++i) {
        APComplex factor = z + APComplex(APReal(wb, i));
        prod = prod * factor;
    }
    APComplex shifted = z + APComplex(APReal(wb, m));
    return exp(log_gamma_shifted(shifted)) / prod;
}

// Continued fraction for Gamma(s,x), modified Lentz. Valid for x > 0;
// efficient in the regime x >= max(1, 0.8|s|).
APComplex gamma_upper_cf(const APComplex& s, const APReal& x, long wb) {
    APReal one(wb, 1L);
    APReal fpmin = epsilon_at(wb, 0);
    fpmin = fpmin * fpmin * fpmin;  // far below any meaningful magnitude
    APReal eps = epsilon_at(wb, 4);
    APComplex b = APComplex(x + one) - s;
    APComplex c = APComplex(one / fpmin);
    APComplex d = b;
    if (abs(d) < fpmin) d = APComplex(fpmin);
    d = APComplex(one) / d;
    APComplex h = d;
    const long max_iter = 200000;
    long i = 1;
    for (; i <= max_iter; ++i) {
        APComplex an = APReal(wb, -i) * (APComplex(APReal(wb, i)) - s);
        b = b + APComplex(APReal(wb, 2L));
        d = an * d + b;
        if (abs(d) < fpmin) d = APComplex(fpmin);
        c = b + an / c;
        if (abs(c) < fpmin) c = APComplex(fpmin);
        d = APComplex(one) / d;
        APComplex del = d * c;
        h = h * del;
        if (abs(del - APComplex(one)) < eps) break;
    }
    if (i > max_iter)
        throw ConsistencyError("gamma_upper: continued fraction failed to converge");
    // Gamma(s,x) = e^{-x} x^s h
    return APComplex(exp(-x)) * rpow(x, s) * h;
}

// Lower-incomplete series gamma_low(s,x) = x^s e^{-x} sum x^n / (s...(s+n)).
APComplex gamma_lower_series(const APComplex& s, const APReal& x, long wb) {
    APReal eps = epsilon_at(wb, 8);
    APComplex term = APComplex(APReal(wb, 1L)) / s;
    APComplex sum = term;
    const long max_iter = 100000;
    long n = 1;
    for (; n <= max_iter; ++n) {
        term = term * (APComplex(x) / (s + APComplex(APReal(wb, n))));
        sum = sum + term;
        if (abs(term) < eps * abs(sum)) break;
    }
    if (n > max_iter) throw ConsistencyError("gamma_upper: lower series failed to converge");
    return rpow(x, s) * APComplex(exp(-x)) * sum;
}

}  // namespace

APComplex gamma_complete(const APComplex& s) {
    if (is_nonpositive_integer(s))
        throw DomainError("gamma_complete: pole at s = " +
                          std::to_string(s.real().to_long()));
    long wb = s.bits() + kGuardBits;
    return round_to(gamma_at(s, wb), s.bits());
}

APComplex gamma_upper(const APComplex& s, const APReal& x) {
    if (!(x > 0)) throw DomainError("gamma_upper: x must be positive");
    long bits = std::max(s.bits(), x.bits());
    long wb = bits + kGuardBits;
    APComplex z = round_to(s, wb);
    APReal xw = round_to(x, wb);

    APReal threshold = max(APReal(wb, 1L), APReal(wb, ratq(4, 5)) * abs(z));
    if (xw >= threshold) return round_to(gamma_upper_cf(z, xw, wb), bits);

    if (is_nonpositive_integer(z)) {
        // Gamma(0,x) = E1(x) = -Ei(-x); then walk the index down via
        // Gamma(s-1,x) = (Gamma(s,x) - x^(s-1) e^(-x)) / (s-1).
        long m = -z.real().to_long();
        APReal e1(wb);
        {
            APReal neg_x = -xw;
            mpfr_eint(e1.raw(), neg_x.raw(), MPFR_RNDN);
            e1 = -e1;
        }
        APReal emx = exp(-xw);
        APReal g = e1;
        APReal xpow = APReal(wb, 1L) / xw;  // x^(-j) for j = 1..m
        for (long j = 1; j <= m; ++j) {
            g = (g - xpow * emx) / APReal(wb, -j);
            xpow = xpow / xw;
        }
        return round_to(APComplex(g), bits);
    }

    // Shift s upward so the series suffers no pole proximity and no
    // catastrophic cancellation in Gamma(s) - lower(s,x).
    double re = z.real().to_double();
    double xd = xw.to_double();
    long m = 0;
    if (re <= 0.25) m = static_cast<long>(std::ceil(0.25 - re)) + 1;
    if (re + static_cast<double>(m) < xd + 1.0)
        m = static_cast<long>(std::ceil(xd + 1.0 - re)) + 1;
    APComplex zs = z + APComplex(APReal(wb, m));
    APComplex g = gamma_at(zs, wb) - gamma_lower_series(zs, xw, wb);
    APReal emx = exp(-xw);
    for (long j = m; j >= 1; --j) {
        APComplex sj = z + APComplex(APReal(wb, j - 1));
        g = (g - rpow(xw, sj) * APComplex(emx)) / sj;
    }
    return round_to(g, bits);
}

}  // namespace hmf4
