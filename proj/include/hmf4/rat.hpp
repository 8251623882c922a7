#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace hmf4 {

// Exact rational coefficient. mpq_class keeps values canonical (lowest
// terms, positive denominator) through all arithmetic; raw two-argument
// construction does not, so go through ratq() instead.
using Rat = mpq_class;

inline Rat ratq(long num, long den) {
    if (den == 0) throw std::invalid_argument("ratq: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_canonical(const Rat& r) {
    if (mpz_sgn(r.get_den().get_mpz_t()) <= 0) return false;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return g == 1;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

// Thrown when a request needs more series coefficients than are known.
class InsufficientPrecision : public std::runtime_error {
public:
    InsufficientPrecision(const std::string& what, long required)
        : std::runtime_error(what), required_prec(required) {}
    long required_prec;
};

// Domain/usage errors (bad k, unknown form, malformed input).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Internal cross-checks that must hold if the construction is correct
// (dimension formula, space membership, closed-form agreement).
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace hmf4
