#include "hmf4/hecke.hpp"

#include <algorithm>
#include <optional>
#include <utility>

namespace hmf4 {

Series t_p2_coeffs(const Series& f, long p, long k, long prec_out) {
    mpz_class pz(p);
    if (p < 3 || p % 2 == 0 || mpz_probab_prime_p(pz.get_mpz_t(), 40) == 0)
        throw DomainError("t_p2_coeffs: p must be an odd prime");
    if (k < 1) throw DomainError("t_p2_coeffs: k must be >= 1");
    if (prec_out < 1) throw DomainError("t_p2_coeffs: prec_out must be >= 1");
    long need = p * p * prec_out;
    if (f.prec() < need)
        throw InsufficientPrecision(
            "t_p2_coeffs: input needs prec >= p^2 * prec_out = " + std::to_string(need), need);
    mpz_class pk1, p2k1;
    mpz_ui_pow_ui(pk1.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(k - 1));
    mpz_ui_pow_ui(p2k1.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(2 * k - 1));
    Series out(prec_out);
    for (long n = 0; n < prec_out; ++n) {
        Rat b = f.coeff(p * p * n);
        if (n > 0) {
            mpz_class neff((k % 2 == 0) ? n : -n);
            int chi = mpz_legendre(neff.get_mpz_t(), pz.get_mpz_t());
            if (chi != 0) b += Rat(chi) * Rat(pk1) * f.coeff(n);
        }
        if (n % (p * p) == 0) b += Rat(p2k1) * f.coeff(n / (p * p));
        out.at(n) = b;
    }
    return out;
}

HeckeMatrix t_p2_matrix(const FormSpace& space, long p) {
    if (space.kind == SpaceKind::full)
        throw DomainError("t_p2_matrix: space must be cusp, plus, or minus");
    long need_out = space.max_pivot() + 1;
    long prec_out = space.prec / (p * p);
    if (space.dim() > 0 && prec_out < need_out)
        throw InsufficientPrecision(
            "t_p2_matrix: space.prec must be >= p^2 * (max pivot + 1) = " +
                std::to_string(p * p * need_out),
            p * p * need_out);
    HeckeMatrix m;
    m.p = p;
    m.k = space.weight.k();
    m.space = &space;
    long d = space.dim();
    m.entries.assign(static_cast<size_t>(d), std::vector<Rat>(static_cast<size_t>(d)));
    for (long j = 0; j < d; ++j) {
        Series img =
            t_p2_coeffs(space.basis_series[static_cast<size_t>(j)], p, m.k, prec_out);
        std::vector<Rat> coords;
        try {
            coords = space.coordinates(img);
        } catch (const ConsistencyError&) {
            throw ConsistencyError("t_p2_matrix: T(p^2) image not in space (p=" +
                                   std::to_string(p) + ", basis index " + std::to_string(j) +
                                   ")");
        }
        for (long i = 0; i < d; ++i)
            m.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                coords[static_cast<size_t>(i)];
    }
    return m;
}

HeckeMatrix hecke_mul(const HeckeMatrix& a, const HeckeMatrix& b) {
    if (a.space != b.space || a.dim() != b.dim())
        throw DomainError("hecke_mul: matrices live on different spaces");
    HeckeMatrix out;
    out.p = a.p;
    out.k = a.k;
    out.space = a.space;
    long d = a.dim();
    out.entries.assign(static_cast<size_t>(d), std::vector<Rat>(static_cast<size_t>(d)));
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) {
            Rat s(0);
            for (long l = 0; l < d; ++l)
                s += a.entries[static_cast<size_t>(i)][static_cast<size_t>(l)] *
                     b.entries[static_cast<size_t>(l)][static_cast<size_t>(j)];
            out.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
        }
    return out;
}

Series Eigenform::series() const {
    if (!exact) throw DomainError("Eigenform::series: eigenform is not exact");
    Series out(space->prec);
    for (long n = 0; n < space->prec; ++n) {
        Rat s(0);
        for (size_t i = 0; i < coords_exact.size(); ++i)
            s += coords_exact[i] * space->basis_series[i].coeff(n);
        out.at(n) = s;
    }
    return out;
}

// ---------- exact polynomial and matrix helpers ----------

namespace {

using Poly = std::vector<Rat>;  // coefficients, low degree first
using RatMat = std::vector<std::vector<Rat>>;

void poly_trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

long poly_deg(const Poly& p) { return static_cast<long>(p.size()) - 1; }

Poly poly_deriv(const Poly& p) {
    Poly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(Rat(static_cast<long>(i)) * p[i]);
    return d;
}

Rat poly_eval(const Poly& p, const Rat& x) {
    Rat acc(0);
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

APReal poly_eval_ap(const std::vector<APReal>& p, const APReal& x) {
    APReal acc(x.bits());
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

// Remainder of a by b (b nonzero), for the Sturm chain.
Poly poly_rem(Poly a, const Poly& b) {
    poly_trim(a);
    while (poly_deg(a) >= poly_deg(b) && !a.empty()) {
        Rat f = a.back() / b.back();
        long shift = poly_deg(a) - poly_deg(b);
        for (size_t i = 0; i < b.size(); ++i)
            a[static_cast<size_t>(shift) + i] -= f * b[i];
        a.pop_back();
        poly_trim(a);
    }
    return a;
}

Poly poly_div_exact(Poly a, const Poly& b) {
    poly_trim(a);
    Poly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rat(0));
    while (poly_deg(a) >= poly_deg(b) && !a.empty()) {
        Rat f = a.back() / b.back();
        long shift = poly_deg(a) - poly_deg(b);
        q[static_cast<size_t>(shift)] = f;
        for (size_t i = 0; i < b.size(); ++i)
            a[static_cast<size_t>(shift) + i] -= f * b[i];
        a.pop_back();
        poly_trim(a);
    }
    if (!a.empty()) throw ConsistencyError("poly_div_exact: division is not exact");
    return q;
}

Poly poly_monic(Poly p) {
    poly_trim(p);
    if (p.empty()) return p;
    Rat lead = p.back();
    for (Rat& c : p) c /= lead;
    return p;
}

Poly poly_gcd(Poly a, Poly b) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        Poly r = poly_rem(a, b);
        a = std::move(b);
        b = poly_monic(std::move(r));
    }
    return poly_monic(std::move(a));
}

// Characteristic polynomial det(xI - M) by the Faddeev-LeVerrier
// recurrence, exact over the rationals.
Poly char_poly(const RatMat& m) {
    long d = static_cast<long>(m.size());
    Poly c(static_cast<size_t>(d) + 1, Rat(0));
    c[static_cast<size_t>(d)] = 1;
    RatMat n = m;
    for (long step = 1; step <= d; ++step) {
        Rat tr(0);
        for (long i = 0; i < d; ++i) tr += n[static_cast<size_t>(i)][static_cast<size_t>(i)];
        Rat ck = -tr / Rat(step);
        c[static_cast<size_t>(d - step)] = ck;
        if (step == d) break;
        RatMat shifted = n;
        for (long i = 0; i < d; ++i)
            shifted[static_cast<size_t>(i)][static_cast<size_t>(i)] += ck;
        RatMat next(static_cast<size_t>(d), std::vector<Rat>(static_cast<size_t>(d)));
        for (long i = 0; i < d; ++i)
            for (long j = 0; j < d; ++j) {
                Rat s(0);
                for (long l = 0; l < d; ++l)
                    s += m[static_cast<size_t>(i)][static_cast<size_t>(l)] *
                         shifted[static_cast<size_t>(l)][static_cast<size_t>(j)];
                next[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
            }
        n = std::move(next);
    }
    return c;
}

int sturm_variations(const std::vector<Poly>& chain, const Rat& x) {
    int vars = 0, last = 0;
    for (const Poly& p : chain) {
        int s = sgn(poly_eval(p, x));
        if (s == 0) continue;
        if (last != 0 && s != last) ++vars;
        last = s;
    }
    return vars;
}

std::vector<Poly> sturm_chain(const Poly& p) {
    std::vector<Poly> chain;
    chain.push_back(p);
    Poly d = poly_deriv(p);
    poly_trim(d);
    if (!d.empty()) chain.push_back(d);
    while (chain.size() >= 2) {
        Poly r = poly_rem(chain[chain.size() - 2], chain.back());
        poly_trim(r);
        if (r.empty()) break;
        for (Rat& c : r) c = -c;
        chain.push_back(std::move(r));
    }
    return chain;
}

long sturm_count(const std::vector<Poly>& chain, const Rat& lo, const Rat& hi) {
    return sturm_variations(chain, lo) - sturm_variations(chain, hi);
}

Rat cauchy_root_bound(const Poly& p) {
    Rat lead = p.back();
    Rat m(0);
    for (size_t i = 0; i + 1 < p.size(); ++i) {
        Rat r = abs(p[i] / lead);
        if (r > m) m = r;
    }
    return m + 1;
}

struct IsolatedRoot {
    bool exact = false;
    Rat value;        // exact root when exact
    Rat lo, hi;       // isolating interval (lo, hi] otherwise
    bool repeated = false;  // multiplicity >= 2 in the original char poly
};

// Isolate all real roots of the square-free poly sq. A dyadic midpoint
// that happens to be an exact root is captured, the poly deflated, and
// the whole pass restarted (interval results of an aborted pass are
// discarded so no root is reported twice).
std::vector<IsolatedRoot> isolate_roots(Poly sq, const std::vector<Poly>& gcd_chain) {
    std::vector<IsolatedRoot> exact_found;
    std::vector<IsolatedRoot> intervals;
    for (;;) {
        poly_trim(sq);
        intervals.clear();
        if (poly_deg(sq) < 1) break;
        std::vector<Poly> chain = sturm_chain(sq);
        Rat bound = cauchy_root_bound(sq);
        std::vector<std::pair<Rat, Rat>> work;
        work.push_back({-bound, bound});
        bool deflated = false;
        while (!work.empty() && !deflated) {
            auto [lo, hi] = work.back();
            work.pop_back();
            long cnt = sturm_count(chain, lo, hi);
            if (cnt == 0) continue;
            if (cnt == 1) {
                IsolatedRoot r;
                r.lo = lo;
                r.hi = hi;
                if (!gcd_chain.empty() && sturm_count(gcd_chain, lo, hi) > 0) r.repeated = true;
                intervals.push_back(std::move(r));
                continue;
            }
            Rat mid = (lo + hi) / 2;
            if (poly_eval(sq, mid) == 0) {
                IsolatedRoot r;
                r.exact = true;
                r.value = mid;
                if (!gcd_chain.empty() && poly_eval(gcd_chain.front(), mid) == 0)
                    r.repeated = true;
                exact_found.push_back(std::move(r));
                Poly lin = {-mid, Rat(1)};
                sq = poly_div_exact(std::move(sq), lin);
                deflated = true;
                continue;
            }
            work.push_back({lo, mid});
            work.push_back({mid, hi});
        }
        if (!deflated) break;
    }
    for (IsolatedRoot& r : intervals) exact_found.push_back(std::move(r));
    return exact_found;
}

// Numeric refinement of an isolating interval to ~(bits+32) absolute
// precision by sign bisection; exact rational evaluation resolves any
// numerically ambiguous midpoint.
APReal refine_root(const Poly& sq, const IsolatedRoot& r, long bits,
                   std::optional<Rat>* hit_exact) {
    long wb = bits + 96;
    std::vector<APReal> sq_ap;
    APReal scale(wb, 1L);
    for (const Rat& c : sq) {
        sq_ap.emplace_back(wb, c);
        scale = max(scale, abs(sq_ap.back()));
    }
    Rat lo = r.lo, hi = r.hi;
    int sign_lo = sgn(poly_eval(sq, lo));
    int sign_hi = sgn(poly_eval(sq, hi));
    if (sign_lo == 0) {  // root exactly at open endpoint: cannot be ours
        sign_lo = -sign_hi;
    }
    if (sign_hi == 0) {
        *hit_exact = hi;
        return APReal(wb, hi);
    }
    APReal tiny = ldexp(scale, -(wb - 32));
    for (long it = 0; it < bits + 40; ++it) {
        Rat mid = (lo + hi) / 2;
        APReal val = poly_eval_ap(sq_ap, APReal(wb, mid));
        int s;
        if (abs(val) < tiny) {
            Rat exact_val = poly_eval(sq, mid);
            s = sgn(exact_val);
            if (s == 0) {
                *hit_exact = mid;
                return APReal(wb, mid);
            }
        } else {
            s = val.sgn();
        }
        if (s == sign_lo)
            lo = mid;
        else
            hi = mid;
    }
    return APReal(wb, (lo + hi) / 2);
}

// Best rational approximation with bounded denominator, by continued
// fractions of the high-precision value.
std::optional<Rat> rational_candidate(const APReal& x, long denom_bits) {
    long wb = x.bits();
    mpz_class bound(1);
    mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(),
                 static_cast<unsigned long>(denom_bits));
    mpz_class h0(1), h1(0), k0(0), k1(1);  // convergents h/k
    APReal cur = x;
    APReal stop = epsilon_at(wb, 24);
    for (int i = 0; i < 200; ++i) {
        APReal fl(wb);
        mpfr_floor(fl.raw(), cur.raw());
        mpz_class a;
        mpfr_get_z(a.get_mpz_t(), fl.raw(), MPFR_RNDN);
        mpz_class h = a * h0 + h1;
        mpz_class k = a * k0 + k1;
        if (k > bound) break;
        h1 = h0; h0 = h;
        k1 = k0; k0 = k;
        APReal frac = cur - fl;
        if (frac < stop) break;
        cur = APReal(wb, 1L) / frac;
    }
    if (k0 == 0) return std::nullopt;
    Rat cand(h0, k0);
    cand.canonicalize();
    // Accept only if the candidate matches x to well beyond the
    // denominator-bound information content.
    APReal diff = abs(x - APReal(wb, cand));
    if (diff < ldexp(max(APReal(wb, 1L), abs(x)), -(std::min(wb - 32, 3 * denom_bits))))
        return cand;
    return std::nullopt;
}

// Reduced row echelon nullspace basis of an exact matrix (columns of the
// result are the basis vectors).
RatMat rat_nullspace(RatMat m, long cols) {
    long rows = static_cast<long>(m.size());
    std::vector<long> pivot_col_of_row;
    long r = 0;
    for (long c = 0; c < cols && r < rows; ++c) {
        long pr = -1;
        for (long i = r; i < rows; ++i)
            if (m[static_cast<size_t>(i)][static_cast<size_t>(c)] != 0) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(m[static_cast<size_t>(r)], m[static_cast<size_t>(pr)]);
        Rat inv = Rat(1) / m[static_cast<size_t>(r)][static_cast<size_t>(c)];
        for (long j = 0; j < cols; ++j) m[static_cast<size_t>(r)][static_cast<size_t>(j)] *= inv;
        for (long i = 0; i < rows; ++i) {
            if (i == r) continue;
            Rat f = m[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (f != 0)
                for (long j = 0; j < cols; ++j)
                    m[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
                        f * m[static_cast<size_t>(r)][static_cast<size_t>(j)];
        }
        pivot_col_of_row.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(static_cast<size_t>(cols), false);
    for (long c : pivot_col_of_row) is_pivot[static_cast<size_t>(c)] = true;
    RatMat basis;  // each entry: one column vector of length cols
    for (long free_c = 0; free_c < cols; ++free_c) {
        if (is_pivot[static_cast<size_t>(free_c)]) continue;
        std::vector<Rat> v(static_cast<size_t>(cols), Rat(0));
        v[static_cast<size_t>(free_c)] = 1;
        for (long i = 0; i < r; ++i)
            v[static_cast<size_t>(pivot_col_of_row[static_cast<size_t>(i)])] =
                -m[static_cast<size_t>(i)][static_cast<size_t>(free_c)];
        basis.push_back(std::move(v));
    }
    return basis;
}

// Solve B R = C exactly for full-column-rank B; throws if inconsistent.
RatMat solve_restriction(const RatMat& b_cols, const RatMat& c_cols) {
    long d = static_cast<long>(b_cols.front().size());
    long m = static_cast<long>(b_cols.size());
    // Augmented [B | C], both as d x m column sets.
    RatMat aug(static_cast<size_t>(d), std::vector<Rat>(static_cast<size_t>(2 * m)));
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < m; ++j) {
            aug[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                b_cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
            aug[static_cast<size_t>(i)][static_cast<size_t>(m + j)] =
                c_cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
        }
    std::vector<long> pivot_rows;
    long r = 0;
    for (long c = 0; c < m && r < d; ++c) {
        long pr = -1;
        for (long i = r; i < d; ++i)
            if (aug[static_cast<size_t>(i)][static_cast<size_t>(c)] != 0) {
                pr = i;
                break;
            }
        if (pr < 0) throw ConsistencyError("solve_restriction: basis not full rank");
        std::swap(aug[static_cast<size_t>(r)], aug[static_cast<size_t>(pr)]);
        Rat inv = Rat(1) / aug[static_cast<size_t>(r)][static_cast<size_t>(c)];
        for (long j = 0; j < 2 * m; ++j) aug[static_cast<size_t>(r)][static_cast<size_t>(j)] *= inv;
        for (long i = 0; i < d; ++i) {
            if (i == r) continue;
            Rat f = aug[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (f != 0)
                for (long j = 0; j < 2 * m; ++j)
                    aug[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
                        f * aug[static_cast<size_t>(r)][static_cast<size_t>(j)];
        }
        ++r;
    }
    // Rows beyond the rank must have vanished on the C side.
    for (long i = r; i < d; ++i)
        for (long j = 0; j < m; ++j)
            if (aug[static_cast<size_t>(i)][static_cast<size_t>(m + j)] != 0)
                throw ConsistencyError(
                    "solve_restriction: subspace is not invariant under the operator");
    RatMat res(static_cast<size_t>(m), std::vector<Rat>(static_cast<size_t>(m)));
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
            res[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                aug[static_cast<size_t>(i)][static_cast<size_t>(m + j)];
    return res;
}

std::vector<Rat> rat_matvec(const RatMat& m, const std::vector<Rat>& v) {
    long d = static_cast<long>(m.size());
    std::vector<Rat> out(static_cast<size_t>(d), Rat(0));
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < static_cast<long>(v.size()); ++j)
            out[static_cast<size_t>(i)] +=
                m[static_cast<size_t>(i)][static_cast<size_t>(j)] * v[static_cast<size_t>(j)];
    return out;
}

std::vector<APReal> ap_matvec(const std::vector<std::vector<APReal>>& m,
                              const std::vector<APReal>& v) {
    size_t d = m.size();
    std::vector<APReal> out;
    out.reserve(d);
    for (size_t i = 0; i < d; ++i) {
        APReal s(v.empty() ? 64 : v.front().bits());
        for (size_t j = 0; j < v.size(); ++j) s += m[i][j] * v[j];
        out.push_back(std::move(s));
    }
    return out;
}

// Kernel vector of a numerically singular square matrix (nullity
// expected exactly 1), by full-pivot Gaussian elimination.
std::vector<APReal> numeric_kernel(std::vector<std::vector<APReal>> a, long wb) {
    long d = static_cast<long>(a.size());
    std::vector<long> col_of(static_cast<size_t>(d));
    for (long j = 0; j < d; ++j) col_of[static_cast<size_t>(j)] = j;
    APReal scale(wb, 1L);
    for (auto& row : a)
        for (auto& e : row) scale = max(scale, abs(e));
    APReal tiny = ldexp(scale, -(wb - 48));
    for (long step = 0; step < d - 1; ++step) {
        long bi = step, bj = step;
        APReal best = abs(a[static_cast<size_t>(step)][static_cast<size_t>(step)]);
        for (long i = step; i < d; ++i)
            for (long j = step; j < d; ++j) {
                APReal v = abs(a[static_cast<size_t>(i)][static_cast<size_t>(j)]);
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (best < tiny)
            throw ConsistencyError(
                "numeric_kernel: nullity exceeds 1 (unsplit eigenvalue block)");
        std::swap(a[static_cast<size_t>(step)], a[static_cast<size_t>(bi)]);
        if (bj != step) {
            for (long i = 0; i < d; ++i)
                std::swap(a[static_cast<size_t>(i)][static_cast<size_t>(step)],
                          a[static_cast<size_t>(i)][static_cast<size_t>(bj)]);
            std::swap(col_of[static_cast<size_t>(step)], col_of[static_cast<size_t>(bj)]);
        }
        for (long i = step + 1; i < d; ++i) {
            APReal f = a[static_cast<size_t>(i)][static_cast<size_t>(step)] /
                       a[static_cast<size_t>(step)][static_cast<size_t>(step)];
            for (long j = step; j < d; ++j)
                a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    a[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                    f * a[static_cast<size_t>(step)][static_cast<size_t>(j)];
        }
    }
    // Back substitution with the last (permuted) variable set to 1.
    std::vector<APReal> x(static_cast<size_t>(d), APReal(wb));
    x[static_cast<size_t>(d - 1)] = APReal(wb, 1L);
    for (long i = d - 2; i >= 0; --i) {
        APReal s(wb);
        for (long j = i + 1; j < d; ++j)
            s += a[static_cast<size_t>(i)][static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
        APReal piv = a[static_cast<size_t>(i)][static_cast<size_t>(i)];
        if (abs(piv) < tiny)
            throw ConsistencyError(
                "numeric_kernel: nullity exceeds 1 (unsplit eigenvalue block)");
        x[static_cast<size_t>(i)] = -s / piv;
    }
    std::vector<APReal> out(static_cast<size_t>(d), APReal(wb));
    for (long j = 0; j < d; ++j) out[static_cast<size_t>(col_of[static_cast<size_t>(j)])] = x[static_cast<size_t>(j)];
    return out;
}

struct Leaf {
    bool exact = false;
    std::vector<Rat> vec_exact;
    std::vector<APReal> vec_num;
};

struct PendingBlock {
    RatMat cols;  // exact basis columns in full-space coordinates
    size_t prime_idx = 0;
};

std::vector<Rat> combine_cols(const RatMat& cols, const std::vector<Rat>& w) {
    size_t d = cols.front().size();
    std::vector<Rat> v(d, Rat(0));
    for (size_t j = 0; j < cols.size(); ++j)
        for (size_t i = 0; i < d; ++i) v[i] += w[j] * cols[j][i];
    return v;
}

}  // namespace

std::vector<Rat> characteristic_polynomial(const HeckeMatrix& m) {
    return char_poly(m.entries);
}

std::vector<Eigenform> eigen_decompose(const FormSpace& space,
                                       const std::vector<long>& primes, long bits) {
    if (space.dim() == 0) return {};
    if (primes.empty()) throw DomainError("eigen_decompose: need at least one prime");
    long d = space.dim();
    long wb = bits + 64;

    std::map<long, HeckeMatrix> mats;
    auto matrix_for = [&](long p) -> const HeckeMatrix& {
        auto it = mats.find(p);
        if (it == mats.end()) it = mats.emplace(p, t_p2_matrix(space, p)).first;
        return it->second;
    };

    std::vector<Leaf> leaves;
    std::vector<PendingBlock> work;
    {
        PendingBlock root;
        root.cols.assign(static_cast<size_t>(d),
                         std::vector<Rat>(static_cast<size_t>(d), Rat(0)));
        for (long j = 0; j < d; ++j) root.cols[static_cast<size_t>(j)][static_cast<size_t>(j)] = 1;
        work.push_back(std::move(root));
    }

    while (!work.empty()) {
        PendingBlock blk = std::move(work.back());
        work.pop_back();
        long m = static_cast<long>(blk.cols.size());
        if (m == 1) {
            Leaf lf;
            lf.exact = true;
            lf.vec_exact = blk.cols.front();
            leaves.push_back(std::move(lf));
            continue;
        }
        if (blk.prime_idx >= primes.size())
            throw ConsistencyError("eigen_decompose: block of dimension " + std::to_string(m) +
                                   " not separated by the prime set");
        const HeckeMatrix& big = matrix_for(primes[blk.prime_idx]);
        // Restriction R with big.entries * B = B * R.
        RatMat image_cols;
        for (const auto& col : blk.cols) image_cols.push_back(rat_matvec(big.entries, col));
        RatMat r = solve_restriction(blk.cols, image_cols);

        Poly cp = char_poly(r);
        Poly dcp = poly_deriv(cp);
        Poly g = poly_gcd(cp, dcp);
        Poly sq = poly_deg(g) >= 1 ? poly_div_exact(cp, g) : cp;
        sq = poly_monic(std::move(sq));
        std::vector<Poly> gcd_ch = poly_deg(g) >= 1 ? sturm_chain(g) : std::vector<Poly>{};

        std::vector<IsolatedRoot> roots = isolate_roots(sq, gcd_ch);
        if (static_cast<long>(roots.size()) != poly_deg(sq))
            throw ConsistencyError(
                "eigen_decompose: real-root count does not match the square-free degree");

        for (const IsolatedRoot& root : roots) {
            std::optional<Rat> exact_val;
            APReal approx(wb);
            if (root.exact) {
                exact_val = root.value;
            } else {
                std::optional<Rat> hit;
                approx = refine_root(sq, root, bits, &hit);
                if (hit.has_value()) {
                    exact_val = hit;
                } else {
                    auto cand = rational_candidate(approx, std::max(16L, bits / 3));
                    if (cand.has_value() && poly_eval(cp, *cand) == 0) exact_val = cand;
                }
            }
            if (exact_val.has_value()) {
                RatMat shifted = r;
                for (long i = 0; i < m; ++i)
                    shifted[static_cast<size_t>(i)][static_cast<size_t>(i)] -= *exact_val;
                RatMat kernel = rat_nullspace(shifted, m);
                if (kernel.empty())
                    throw ConsistencyError("eigen_decompose: verified root with empty kernel");
                if (kernel.size() == 1) {
                    Leaf lf;
                    lf.exact = true;
                    lf.vec_exact = combine_cols(blk.cols, kernel.front());
                    leaves.push_back(std::move(lf));
                } else {
                    PendingBlock sub;
                    sub.prime_idx = blk.prime_idx + 1;
                    for (const auto& w : kernel) sub.cols.push_back(combine_cols(blk.cols, w));
                    work.push_back(std::move(sub));
                }
            } else {
                if (root.repeated)
                    throw ConsistencyError(
                        "eigen_decompose: repeated irrational eigenvalue block left unsplit");
                std::vector<std::vector<APReal>> shifted(
                    static_cast<size_t>(m), std::vector<APReal>(static_cast<size_t>(m), APReal(wb)));
                for (long i = 0; i < m; ++i)
                    for (long j = 0; j < m; ++j) {
                        shifted[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                            APReal(wb, r[static_cast<size_t>(i)][static_cast<size_t>(j)]);
                        if (i == j)
                            shifted[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                                shifted[static_cast<size_t>(i)][static_cast<size_t>(j)] - approx;
                    }
                std::vector<APReal> w = numeric_kernel(std::move(shifted), wb);
                Leaf lf;
                lf.exact = false;
                lf.vec_num.assign(static_cast<size_t>(d), APReal(wb));
                for (long j = 0; j < m; ++j)
                    for (long i = 0; i < d; ++i)
                        lf.vec_num[static_cast<size_t>(i)] +=
                            w[static_cast<size_t>(j)] *
                            APReal(wb, blk.cols[static_cast<size_t>(j)][static_cast<size_t>(i)]);
                leaves.push_back(std::move(lf));
            }
        }
    }

    if (static_cast<long>(leaves.size()) != d)
        throw ConsistencyError("eigen_decompose: produced " + std::to_string(leaves.size()) +
                               " eigenvectors in dimension " + std::to_string(d));

    // Assemble eigenforms: eigenvalues for every requested prime, with
    // exactness preserved where the vector is rational.
    std::vector<Eigenform> forms;
    APReal num_tol = ldexp(APReal(wb, 1L), -(bits / 2));
    for (Leaf& lf : leaves) {
        Eigenform ef;
        ef.space = &space;
        ef.bits = bits;
        ef.exact = lf.exact;
        if (lf.exact) {
            // Normalize: first nonzero coordinate (= first nonzero
            // coefficient, at its pivot) becomes 1.
            long i0 = -1;
            for (long i = 0; i < d; ++i)
                if (lf.vec_exact[static_cast<size_t>(i)] != 0) {
                    i0 = i;
                    break;
                }
            if (i0 < 0) throw ConsistencyError("eigen_decompose: zero eigenvector");
            Rat piv = lf.vec_exact[static_cast<size_t>(i0)];
            for (Rat& c : lf.vec_exact) c /= piv;
            ef.coords_exact = lf.vec_exact;
            for (const Rat& c : ef.coords_exact) ef.coords.emplace_back(bits, c);
            for (long p : primes) {
                const HeckeMatrix& mp = matrix_for(p);
                std::vector<Rat> u = rat_matvec(mp.entries, ef.coords_exact);
                Rat lambda = u[static_cast<size_t>(i0)];  // since v[i0] = 1
                for (long i = 0; i < d; ++i)
                    if (u[static_cast<size_t>(i)] !=
                        lambda * ef.coords_exact[static_cast<size_t>(i)])
                        throw ConsistencyError(
                            "eigen_decompose: vector is not a simultaneous eigenvector (p=" +
                            std::to_string(p) + ")");
                ef.eigenvalues_exact[p] = lambda;
                ef.eigenvalues.emplace(p, APReal(bits, lambda));
            }
        } else {
            // Normalize by the first coordinate that is nonzero beyond
            // the numeric tolerance.
            APReal maxc(wb);
            for (const APReal& c : lf.vec_num) maxc = max(maxc, abs(c));
            long i0 = -1;
            for (long i = 0; i < d; ++i)
                if (abs(lf.vec_num[static_cast<size_t>(i)]) > num_tol * maxc) {
                    i0 = i;
                    break;
                }
            if (i0 < 0) throw ConsistencyError("eigen_decompose: zero numeric eigenvector");
            APReal piv = lf.vec_num[static_cast<size_t>(i0)];
            for (APReal& c : lf.vec_num) c /= piv;
            std::vector<std::vector<APReal>> mp_num;
            for (long p : primes) {
                const HeckeMatrix& mp = matrix_for(p);
                mp_num.assign(static_cast<size_t>(d),
                              std::vector<APReal>(static_cast<size_t>(d), APReal(wb)));
                for (long i = 0; i < d; ++i)
                    for (long j = 0; j < d; ++j)
                        mp_num[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                            APReal(wb, mp.entries[static_cast<size_t>(i)][static_cast<size_t>(j)]);
                std::vector<APReal> u = ap_matvec(mp_num, lf.vec_num);
                APReal lambda = u[static_cast<size_t>(i0)];  // v[i0] = 1
                for (long i = 0; i < d; ++i) {
                    APReal resid =
                        abs(u[static_cast<size_t>(i)] -
                            lambda * lf.vec_num[static_cast<size_t>(i)]);
                    if (resid > num_tol * max(APReal(wb, 1L), abs(lambda)))
                        throw ConsistencyError(
                            "eigen_decompose: numeric vector fails simultaneity (p=" +
                            std::to_string(p) + ")");
                }
                ef.eigenvalues.emplace(p, round_to(lambda, bits));
            }
            for (const APReal& c : lf.vec_num) ef.coords.push_back(round_to(c, bits));
        }
        // Embedded coefficients a(n) = sum_i coords_i * basis_i(n).
        ef.coeffs.reserve(static_cast<size_t>(space.prec));
        for (long n = 0; n < space.prec; ++n) {
            if (ef.exact) {
                Rat s(0);
                for (long i = 0; i < d; ++i)
                    s += ef.coords_exact[static_cast<size_t>(i)] *
                         space.basis_series[static_cast<size_t>(i)].coeff(n);
                ef.coeffs.emplace_back(bits, s);
            } else {
                APReal s(wb);
                for (long i = 0; i < d; ++i)
                    s += APReal(wb, space.basis_series[static_cast<size_t>(i)].coeff(n)) *
                         ef.coords[static_cast<size_t>(i)];
                ef.coeffs.push_back(round_to(s, bits));
            }
        }
        forms.push_back(std::move(ef));
    }

    std::sort(forms.begin(), forms.end(), [&](const Eigenform& a, const Eigenform& b) {
        for (long p : primes) {
            const APReal& la = a.eigenvalues.at(p);
            const APReal& lb = b.eigenvalues.at(p);
            if (la < lb) return true;
            if (lb < la) return false;
        }
        return false;
    });
    char sign_char = space.kind == SpaceKind::plus    ? '+'
                     : space.kind == SpaceKind::minus ? '-'
                                                      : 'c';
    for (size_t i = 0; i < forms.size(); ++i)
        forms[i].label = "k" + std::to_string(space.weight.k()) + sign_char + "e" +
                         std::to_string(i);
    return forms;
}

std::vector<APReal> express_in_eigenbasis(const FormSpace& space,
                                          const std::vector<Eigenform>& basis,
                                          const Series& f, long bits) {
    long d = space.dim();
    if (static_cast<long>(basis.size()) != d)
        throw DomainError("express_in_eigenbasis: eigenbasis size mismatch");
    std::vector<Rat> target = space.coordinates(f);  // exact membership check
    if (d == 0) return {};
    long wb = bits + 64;
    // Solve V x = target with V's columns the eigenform coordinates.
    std::vector<std::vector<APReal>> a(static_cast<size_t>(d),
                                       std::vector<APReal>(static_cast<size_t>(d + 1), APReal(wb)));
    for (long i = 0; i < d; ++i) {
        for (long j = 0; j < d; ++j)
            a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                round_to(basis[static_cast<size_t>(j)].coords[static_cast<size_t>(i)], wb);
        a[static_cast<size_t>(i)][static_cast<size_t>(d)] =
            APReal(wb, target[static_cast<size_t>(i)]);
    }
    std::vector<long> perm(static_cast<size_t>(d));
    for (long i = 0; i < d; ++i) perm[static_cast<size_t>(i)] = i;
    for (long step = 0; step < d; ++step) {
        long bi = step;
        APReal best = abs(a[static_cast<size_t>(step)][static_cast<size_t>(step)]);
        for (long i = step + 1; i < d; ++i) {
            APReal v = abs(a[static_cast<size_t>(i)][static_cast<size_t>(step)]);
            if (v > best) {
                best = v;
                bi = i;
            }
        }
        if (best.is_zero())
            throw ConsistencyError("express_in_eigenbasis: singular eigenbasis matrix");
        std::swap(a[static_cast<size_t>(step)], a[static_cast<size_t>(bi)]);
        for (long i = step + 1; i < d; ++i) {
            APReal fct = a[static_cast<size_t>(i)][static_cast<size_t>(step)] /
                         a[static_cast<size_t>(step)][static_cast<size_t>(step)];
            for (long j = step; j <= d; ++j)
                a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    a[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                    fct * a[static_cast<size_t>(step)][static_cast<size_t>(j)];
        }
    }
    std::vector<APReal> x(static_cast<size_t>(d), APReal(wb));
    for (long i = d - 1; i >= 0; --i) {
        APReal s = a[static_cast<size_t>(i)][static_cast<size_t>(d)];
        for (long j = i + 1; j < d; ++j)
            s = s - a[static_cast<size_t>(i)][static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
        x[static_cast<size_t>(i)] = s / a[static_cast<size_t>(i)][static_cast<size_t>(i)];
    }
    // Residual check against the exact coordinates.
    APReal maxc(wb);
    for (const Rat& t : target) maxc = max(maxc, abs(APReal(wb, t)));
    APReal tol = ldexp(max(APReal(wb, 1L), maxc), -(bits / 2));
    for (long i = 0; i < d; ++i) {
        APReal s(wb);
        for (long j = 0; j < d; ++j)
            s += round_to(basis[static_cast<size_t>(j)].coords[static_cast<size_t>(i)], wb) *
                 x[static_cast<size_t>(j)];
        if (abs(s - APReal(wb, target[static_cast<size_t>(i)])) > tol)
            throw ConsistencyError("express_in_eigenbasis: residual above tolerance");
    }
    std::vector<APReal> out;
    out.reserve(static_cast<size_t>(d));
    for (const APReal& xi : x) out.push_back(round_to(xi, bits));
    return out;
}

}  // namespace hmf4
