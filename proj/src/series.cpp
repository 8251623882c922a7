#include "hmf4/series.hpp"

#include <algorithm>
#include <string>

namespace hmf4 {

Series::Series(long prec) {
    if (prec < 1) throw DomainError("Series: precision must be >= 1");
    coeffs_.assign(static_cast<size_t>(prec), Rat(0));
}

Series::Series(std::vector<Rat> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw DomainError("Series: precision must be >= 1");
}

Series Series::zero(long prec) { return Series(prec); }

Series Series::one(long prec) {
    Series s(prec);
    s.coeffs_[0] = 1;
    return s;
}

const Rat& Series::coeff(long n) const {
    if (n < 0) throw DomainError("Series::coeff: negative index");
    if (n >= prec())
        throw InsufficientPrecision(
            "Series::coeff: index " + std::to_string(n) +
                " is beyond known precision " + std::to_string(prec()),
            n + 1);
    return coeffs_[static_cast<size_t>(n)];
}

std::optional<long> Series::valuation() const {
    for (long n = 0; n < prec(); ++n)
        if (coeffs_[static_cast<size_t>(n)] != 0) return n;
    return std::nullopt;
}

Series Series::truncated(long new_prec) const {
    if (new_prec < 1) throw DomainError("Series::truncated: precision must be >= 1");
    if (new_prec > prec())
        throw InsufficientPrecision("Series::truncated: cannot extend precision", new_prec);
    Series out(new_prec);
    std::copy(coeffs_.begin(), coeffs_.begin() + new_prec, out.coeffs_.begin());
    return out;
}

Series add(const Series& a, const Series& b) {
    long n = std::min(a.prec(), b.prec());
    Series out(n);
    for (long i = 0; i < n; ++i)
        out.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
    return out;
}

Series sub(const Series& a, const Series& b) {
    long n = std::min(a.prec(), b.prec());
    Series out(n);
    for (long i = 0; i < n; ++i)
        out.coeffs_[i] = a.coeffs_[i] - b.coeffs_[i];
    return out;
}

Series neg(const Series& a) {
    Series out(a.prec());
    for (long i = 0; i < a.prec(); ++i) out.coeffs_[i] = -a.coeffs_[i];
    return out;
}

Series scale(const Rat& c, const Series& a) {
    Series out(a.prec());
    for (long i = 0; i < a.prec(); ++i) out.coeffs_[i] = c * a.coeffs_[i];
    return out;
}

namespace {

bool all_integral(const Series& s) {
    for (const Rat& c : s.coeffs())
        if (c.get_den() != 1) return false;
    return true;
}

// Schoolbook convolution on numerators only. Valid when every
// coefficient has denominator 1; exact integer arithmetic, so the result
// matches the rational path bit for bit.
void conv_mpz(const Series& a, const Series& b, Series& out) {
    long n = out.prec();
    std::vector<mpz_class> acc(static_cast<size_t>(n), mpz_class(0));
    for (long i = 0; i < std::min(a.prec(), n); ++i) {
        const mpz_class& ai = a.coeffs()[i].get_num();
        if (ai == 0) continue;
        mpz_srcptr ap = ai.get_mpz_t();
        long jmax = std::min(b.prec(), n - i);
        for (long j = 0; j < jmax; ++j) {
            const mpz_class& bj = b.coeffs()[j].get_num();
            if (bj == 0) continue;
            mpz_addmul(acc[i + j].get_mpz_t(), ap, bj.get_mpz_t());
        }
    }
    for (long i = 0; i < n; ++i) out.at(i) = Rat(acc[i]);
}

void conv_mpq(const Series& a, const Series& b, Series& out) {
    long n = out.prec();
    mpq_t term;
    mpq_init(term);
    for (long i = 0; i < std::min(a.prec(), n); ++i) {
        if (a.coeffs()[i] == 0) continue;
        long jmax = std::min(b.prec(), n - i);
        for (long j = 0; j < jmax; ++j) {
            if (b.coeffs()[j] == 0) continue;
            mpq_mul(term, a.coeffs()[i].get_mpq_t(), b.coeffs()[j].get_mpq_t());
            mpq_add(out.at(i + j).get_mpq_t(), out.at(i + j).get_mpq_t(), term);
        }
    }
    mpq_clear(term);
}

}  // namespace

Series mul(const Series& a, const Series& b) {
    long n = std::min(a.prec(), b.prec());
    Series out(n);
    if (all_integral(a) && all_integral(b))
        conv_mpz(a, b, out);
    else
        conv_mpq(a, b, out);
    return out;
}

Series pow(const Series& a, long e) {
    if (e < 0) throw DomainError("pow: negative exponent");
    Series result = Series::one(a.prec());
    if (e == 0) return result;
    Series base = a;
    while (true) {
        if (e & 1) result = mul(result, base);
        e >>= 1;
        if (e == 0) break;
        base = mul(base, base);
    }
    return result;
}

Series v_operator(const Series& a, long m) {
    if (m < 1) throw DomainError("v_operator: m must be >= 1");
    Series out(a.prec());
    for (long n = 0; n < a.prec(); ++n)
        if (n % m == 0) out.at(n) = a.coeff(n / m);
    return out;
}

bool equal_to_min_prec(const Series& a, const Series& b) {
    long n = std::min(a.prec(), b.prec());
    for (long i = 0; i < n; ++i)
        if (a.coeff(i) != b.coeff(i)) return false;
    return true;
}

}  // namespace hmf4
