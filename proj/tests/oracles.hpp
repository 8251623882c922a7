#pragma once

// Test-local reference implementations, kept deliberately naive and
// independent of the library's algorithms: divisor sums by trial
// division, theta coefficients by enumerating squares, products by
// schoolbook convolution, Legendre symbols by Euler's criterion.

#include <cstdlib>
#include <vector>

#include "hmf4/rat.hpp"

namespace oracle {

inline long sigma1(long n) {
    long s = 0;
    for (long d = 1; d <= n; ++d)
        if (n % d == 0) s += d;
    return s;
}

// coefficient vector of 1 + 2 sum_{m>=1} q^(m^2)
inline std::vector<long> theta_coeffs(long prec) {
    std::vector<long> c(static_cast<size_t>(prec), 0);
    if (prec > 0) c[0] = 1;
    for (long m = 1; m * m < prec; ++m) c[static_cast<size_t>(m * m)] = 2;
    return c;
}

// coefficient vector of sum over odd n of sigma1(n) q^n
inline std::vector<long> f2_coeffs(long prec) {
    std::vector<long> c(static_cast<size_t>(prec), 0);
    for (long n = 1; n < prec; n += 2) c[static_cast<size_t>(n)] = sigma1(n);
    return c;
}

inline std::vector<long> conv(const std::vector<long>& a, const std::vector<long>& b) {
    size_t n = std::min(a.size(), b.size());
    std::vector<long> c(n, 0);
    for (size_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; i + j < n; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

inline std::vector<long> scaled(std::vector<long> a, long s) {
    for (long& x : a) x *= s;
    return a;
}

inline std::vector<long> added(std::vector<long> a, const std::vector<long>& b) {
    for (size_t i = 0; i < a.size() && i < b.size(); ++i) a[i] += b[i];
    return a;
}

// theta^4 by repeated convolution of the squares indicator
inline std::vector<long> theta4_coeffs(long prec) {
    auto t = theta_coeffs(prec);
    auto t2 = conv(t, t);
    return conv(t2, t2);
}

// number of (a,b,c,d) in Z^4 with a^2+b^2+c^2+d^2 = n, by exhaustion
inline long r4_bruteforce(long n) {
    long count = 0;
    long s = 0;
    while (s * s <= n) ++s;
    for (long a = -s; a <= s; ++a)
        for (long b = -s; b <= s; ++b)
            for (long c = -s; c <= s; ++c) {
                long rem = n - a * a - b * b - c * c;
                if (rem < 0) continue;
                long d = 0;
                while (d * d < rem) ++d;
                if (d * d == rem) count += (d == 0) ? 1 : 2;
            }
    return count;
}

// delta4 = F2 * theta^4 - 16 * F2^2, assembled from the pieces above
inline std::vector<long> delta4_coeffs(long prec) {
    auto f2 = f2_coeffs(prec);
    auto a = conv(f2, theta4_coeffs(prec));
    auto b = scaled(conv(f2, f2), -16);
    return added(a, b);
}

inline std::vector<long> theta_delta4_coeffs(long prec) {
    return conv(theta_coeffs(prec), delta4_coeffs(prec));
}

inline long modpow(long base, long e, long m) {
    long r = 1 % m;
    base %= m;
    if (base < 0) base += m;
    while (e > 0) {
        if (e & 1) r = (r * base) % m;
        base = (base * base) % m;
        e >>= 1;
    }
    return r;
}

// Legendre symbol (a | p) for odd prime p, by Euler's criterion
inline int legendre(long a, long p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    long e = modpow(a, (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
}

}  // namespace oracle
