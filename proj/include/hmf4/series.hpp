#pragma once

#include <optional>
#include <vector>

#include "hmf4/rat.hpp"

namespace hmf4 {

// Truncated q-expansion with exact rational coefficients. A Series of
// precision P represents a form known modulo q^P: coefficients of q^n for
// n >= P are unknown, not zero. Immutable after construction; all
// operations are pure and report the precision of their result.
class Series {
public:
    explicit Series(long prec);
    Series(std::vector<Rat> coeffs);

    static Series zero(long prec);
    static Series one(long prec);

    long prec() const { return static_cast<long>(coeffs_.size()); }

    // Exact coefficient of q^n. Out-of-precision access is an error,
    // never a silent zero.
    const Rat& coeff(long n) const;

    // Smallest n with coeff(n) != 0, or nullopt if every known
    // coefficient vanishes (zero to precision).
    std::optional<long> valuation() const;

    bool is_zero_to_prec() const { return !valuation().has_value(); }

    Series truncated(long new_prec) const;

    const std::vector<Rat>& coeffs() const { return coeffs_; }

    // Mutating access for builders only; series are treated as immutable
    // once handed out.
    Rat& at(long n) { return coeffs_[static_cast<size_t>(n)]; }

    friend Series add(const Series& a, const Series& b);
    friend Series sub(const Series& a, const Series& b);
    friend Series mul(const Series& a, const Series& b);
    friend Series neg(const Series& a);
    friend Series scale(const Rat& c, const Series& a);

private:
    std::vector<Rat> coeffs_;  // coeffs_[n] is the coefficient of q^n
};

Series add(const Series& a, const Series& b);
Series sub(const Series& a, const Series& b);

// Cauchy product truncated to min(a.prec, b.prec). Inputs with integer
// coefficients take an mpz fast path; results are bit-for-bit identical
// to the rational path.
Series mul(const Series& a, const Series& b);

Series neg(const Series& a);
Series scale(const Rat& c, const Series& a);

// Binary exponentiation; pow(a, 0) is the constant-one series at a.prec.
Series pow(const Series& a, long e);

// g(z) |-> g(mz), i.e. q |-> q^m. Precision is preserved: coefficients of
// q^n for n < prec stay correct since n/m < prec.
Series v_operator(const Series& a, long m);

bool equal_to_min_prec(const Series& a, const Series& b);

}  // namespace hmf4
