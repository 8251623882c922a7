#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hmf4/series.hpp"

namespace hmf4 {

// Weight stored as 2w so half-integral weights are exact integers.
struct Weight {
    long twice = 0;

    static Weight half_integral(long k) { return Weight{2 * k + 1}; }
    static Weight integral(long w) { return Weight{2 * w}; }

    bool is_half_integral() const { return twice % 2 != 0; }
    // For half-integral weight k + 1/2, the integer part k.
    long k() const { return (twice - 1) / 2; }

    std::string str() const;

    bool operator==(const Weight&) const = default;
};

// Homogeneous polynomial in the generators theta (weight 1/2) and F2
// (weight 2): a finite sum of monomials theta^a F2^b with a + 4b equal to
// twice the weight. Zero coefficients are never stored.
class RingElement {
public:
    using Key = std::pair<long, long>;  // (a, b)

    explicit RingElement(Weight w) : weight_(w) {}

    static RingElement theta();
    static RingElement f2();
    static RingElement delta4();  // F2*(theta^4 - 16*F2)
    static RingElement d2();      // theta^4 - 32*F2
    static RingElement monomial(long a, long b, const Rat& c = Rat(1));

    Weight weight() const { return weight_; }
    const std::map<Key, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void set(long a, long b, const Rat& c);
    Rat get(long a, long b) const;

    RingElement operator+(const RingElement& o) const;
    RingElement operator-(const RingElement& o) const;
    RingElement operator*(const RingElement& o) const;  // weight adds
    RingElement scaled(const Rat& c) const;

    bool operator==(const RingElement& o) const {
        return weight_ == o.weight_ && terms_ == o.terms_;
    }

    Series expand(long prec) const;

private:
    Weight weight_;
    std::map<Key, Rat> terms_;
};

// The Fricke involution as a ring map: theta |-> theta,
// F2 |-> theta^4/16 - F2, extended multiplicatively. This is the
// (-2iz)^(-w) normalization applied uniformly; under it w4(delta4) =
// delta4 and w4(d2) = -d2.
RingElement w4(const RingElement& e);

// --- generator q-expansions ---

// theta(z) = 1 + 2q + 2q^4 + 2q^9 + ...
Series theta(long prec);

// P = 1 - 24 sum sigma_1(n) q^n, the weight-2 quasi-Eisenstein series.
Series quasi_eisenstein_p(long prec);

// F2 = (1/24)(-P(z) + 3P(2z) - 2P(4z)) = sum over odd n of sigma_1(n) q^n.
// Construction-time cross-check against the closed form.
Series f2(long prec);

// delta4 = F2*(theta^4 - 16 F2): weight 4, valuation 1, leading coeff 1.
Series delta4(long prec);

// Same form via its q-product q * prod_{n == 0,+-1 mod 4} (1-q^n)^8.
Series delta4_product(long prec);

// d2 = theta^4 - 32 F2: weight 2, value 1 at infinity.
Series d2(long prec);

enum class SpaceKind { full, cusp, plus, minus };

std::string kind_str(SpaceKind k);

// Echelonized basis of a space of forms of fixed weight. Basis series
// have strictly increasing pivot valuations, unit pivots, and zeros at
// the other pivots (reduced echelon), so membership and coordinates are
// read off by pivot matching.
struct FormSpace {
    Weight weight;
    SpaceKind kind = SpaceKind::full;
    long prec = 0;
    std::vector<RingElement> basis_elems;
    std::vector<Series> basis_series;
    std::vector<long> pivots;

    long dim() const { return static_cast<long>(basis_series.size()); }
    long max_pivot() const { return pivots.empty() ? 0 : pivots.back(); }

    // Exact coordinates of f over the basis, by pivot matching; checks
    // that the combination reproduces every available coefficient of f.
    std::vector<Rat> coordinates(const Series& f) const;
};

// Span of the monomials theta^a F2^b of the given weight, echelonized.
// For weight k+1/2 the monomial count is floor(k/2) + 1.
FormSpace monomial_space(Weight w, long prec);

// Cusp subspace of weight k+1/2: constant term of f and of w4(f) both
// zero. Dimension is checked against sup{0, floor(k/2) - 1} and a
// mismatch raises ConsistencyError.
FormSpace cusp_space(long k, long prec);

// The (+/-)-eigenspace of w4 on cusp_space(k).
FormSpace eigen_space(long k, int sign, long prec);

// delta4 * theta^(2k-7), the explicitly constructed nonvanishing witness
// in the plus space; requires k >= 4.
RingElement plus_witness(long k);

// delta4 * d2 * theta^(2k-11), the minus-space witness; requires k >= 6.
RingElement minus_witness(long k);

}  // namespace hmf4
