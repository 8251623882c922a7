#include "hmf4/forms.hpp"

#include <algorithm>
#include <mutex>

namespace hmf4 {

std::string Weight::str() const {
    if (twice % 2 == 0) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
}

// --- RingElement ---

RingElement RingElement::monomial(long a, long b, const Rat& c) {
    if (a < 0 || b < 0) throw DomainError("RingElement::monomial: negative exponent");
    RingElement e(Weight{a + 4 * b});
    e.set(a, b, c);
    return e;
}

RingElement RingElement::theta() { return monomial(1, 0); }
RingElement RingElement::f2() { return monomial(0, 1); }

RingElement RingElement::delta4() {
    RingElement e(Weight{8});
    e.set(4, 1, Rat(1));
    e.set(0, 2, Rat(-16));
    return e;
}

RingElement RingElement::d2() {
    RingElement e(Weight{4});
    e.set(4, 0, Rat(1));
    e.set(0, 1, Rat(-32));
    return e;
}

void RingElement::set(long a, long b, const Rat& c) {
    if (a < 0 || b < 0) throw DomainError("RingElement::set: negative exponent");
    if (a + 4 * b != weight_.twice)
        throw DomainError("RingElement::set: monomial weight mismatch");
    if (c == 0)
        terms_.erase({a, b});
    else
        terms_[{a, b}] = c;
}

Rat RingElement::get(long a, long b) const {
    auto it = terms_.find({a, b});
    return it == terms_.end() ? Rat(0) : it->second;
}

RingElement RingElement::operator+(const RingElement& o) const {
    if (weight_ != o.weight_) throw DomainError("RingElement: weight mismatch in +");
    RingElement out = *this;
    for (const auto& [key, c] : o.terms_) {
        Rat s = out.get(key.first, key.second) + c;
        out.set(key.first, key.second, s);
    }
    return out;
}

RingElement RingElement::operator-(const RingElement& o) const {
    return *this + o.scaled(Rat(-1));
}

RingElement RingElement::operator*(const RingElement& o) const {
    RingElement out(Weight{weight_.twice + o.weight_.twice});
    for (const auto& [k1, c1] : terms_)
        for (const auto& [k2, c2] : o.terms_) {
            long a = k1.first + k2.first, b = k1.second + k2.second;
            Rat s = out.get(a, b) + c1 * c2;
            out.set(a, b, s);
        }
    return out;
}

RingElement RingElement::scaled(const Rat& c) const {
    RingElement out(weight_);
    if (c == 0) return out;
    for (const auto& [key, v] : terms_) out.terms_[key] = c * v;
    return out;
}

RingElement w4(const RingElement& e) {
    // theta^a F2^b |-> theta^a (theta^4/16 - F2)^b
    //              = sum_j C(b,j) (-1)^j 16^(j-b) theta^(a+4(b-j)) F2^j
    RingElement out(e.weight());
    for (const auto& [key, c] : e.terms()) {
        long a = key.first, b = key.second;
        for (long j = 0; j <= b; ++j) {
            mpz_class binom;
            mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(b),
                         static_cast<unsigned long>(j));
            Rat factor(binom);
            if (j % 2 != 0) factor = -factor;
            mpz_class den(1);
            mpz_ui_pow_ui(den.get_mpz_t(), 16, static_cast<unsigned long>(b - j));
            factor /= Rat(den);
            long a2 = a + 4 * (b - j);
            Rat s = out.get(a2, j) + c * factor;
            out.set(a2, j, s);
        }
    }
    return out;
}

// --- generator q-expansions ---

Series theta(long prec) {
    Series s(prec);
    s.at(0) = 1;
    for (long m = 1; m * m < prec; ++m) s.at(m * m) = 2;
    return s;
}

namespace {

std::vector<long> sigma1_table(long prec) {
    std::vector<long> sig(static_cast<size_t>(prec), 0);
    for (long d = 1; d < prec; ++d)
        for (long n = d; n < prec; n += d) sig[static_cast<size_t>(n)] += d;
    return sig;
}

}  // namespace

Series quasi_eisenstein_p(long prec) {
    Series s(prec);
    s.at(0) = 1;
    auto sig = sigma1_table(prec);
    for (long n = 1; n < prec; ++n) s.at(n) = Rat(-24 * sig[static_cast<size_t>(n)]);
    return s;
}

Series f2(long prec) {
    Series p = quasi_eisenstein_p(prec);
    Series combo = scale(ratq(1, 24),
                         add(sub(v_operator(scale(Rat(3), p), 2), p),
                             neg(v_operator(scale(Rat(2), p), 4))));
    // Closed form: sigma_1(n) on odd n, 0 on even n.
    auto sig = sigma1_table(prec);
    for (long n = 0; n < prec; ++n) {
        Rat expect = (n % 2 == 1) ? Rat(sig[static_cast<size_t>(n)]) : Rat(0);
        if (combo.coeff(n) != expect)
            throw ConsistencyError("f2: Eisenstein combination disagrees with closed form at n=" +
                                   std::to_string(n));
    }
    return combo;
}

namespace {

// Process-wide memo for generator powers, keyed by (exponent, prec).
// Purely an evaluation cache: behavior is as if absent.
class PowerCache {
public:
    const Series& theta_pow(long a, long prec) {
        return get(theta_cache_, a, prec, [&] { return theta(prec); });
    }
    const Series& f2_pow(long b, long prec) {
        return get(f2_cache_, b, prec, [&] { return f2(prec); });
    }

private:
    using Map = std::map<std::pair<long, long>, Series>;

    template <typename Gen>
    const Series& get(Map& cache, long e, long prec, Gen gen) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache.find({e, prec});
        if (it != cache.end()) return it->second;
        if (e == 0)
            return cache.emplace(std::make_pair(e, prec), Series::one(prec)).first->second;
        if (e == 1) return cache.emplace(std::make_pair(e, prec), gen()).first->second;
        // Build the chain below without holding work inside the map walk.
        Series base = [&] {
            auto it1 = cache.find({1, prec});
            if (it1 != cache.end()) return it1->second;
            return cache.emplace(std::make_pair(1L, prec), gen()).first->second;
        }();
        long have = e - 1;
        while (cache.find({have, prec}) == cache.end()) --have;
        Series cur = cache.at({have, prec});
        for (long i = have + 1; i <= e; ++i) {
            cur = mul(cur, base);
            cache.emplace(std::make_pair(i, prec), cur);
        }
        return cache.at({e, prec});
    }

    std::mutex mu_;
    Map theta_cache_;
    Map f2_cache_;
};

PowerCache& power_cache() {
    static PowerCache cache;
    return cache;
}

}  // namespace

Series RingElement::expand(long prec) const {
    Series out(prec);
    for (const auto& [key, c] : terms_) {
        const Series& tp = power_cache().theta_pow(key.first, prec);
        const Series& fp = power_cache().f2_pow(key.second, prec);
        out = add(out, scale(c, mul(tp, fp)));
    }
    return out;
}

Series delta4(long prec) { return RingElement::delta4().expand(prec); }

Series delta4_product(long prec) {
    // q * prod over n == 0,+-1 (mod 4) of (1-q^n)^8, truncated.
    std::vector<mpz_class> acc(static_cast<size_t>(prec), mpz_class(0));
    acc[0] = 1;
    for (long n = 1; n < prec; ++n) {
        long r = n % 4;
        if (r == 2) continue;
        for (int rep = 0; rep < 8; ++rep)
            for (long i = prec - 1; i >= n; --i)
                acc[static_cast<size_t>(i)] -= acc[static_cast<size_t>(i - n)];
    }
    Series out(prec);
    for (long i = prec - 1; i >= 1; --i) out.at(i) = Rat(acc[static_cast<size_t>(i - 1)]);
    return out;
}

Series d2(long prec) { return RingElement::d2().expand(prec); }

// --- spaces ---

std::string kind_str(SpaceKind k) {
    switch (k) {
        case SpaceKind::full: return "full";
        case SpaceKind::cusp: return "cusp";
        case SpaceKind::plus: return "plus";
        case SpaceKind::minus: return "minus";
    }
    return "?";
}

std::vector<Rat> FormSpace::coordinates(const Series& f) const {
    std::vector<Rat> coords(static_cast<size_t>(dim()), Rat(0));
    long overlap = std::min(f.prec(), prec);
    if (!pivots.empty() && overlap <= max_pivot())
        throw InsufficientPrecision("FormSpace::coordinates: series too short to match pivots",
                                    max_pivot() + 1);
    for (long i = 0; i < dim(); ++i)
        coords[static_cast<size_t>(i)] = f.coeff(pivots[static_cast<size_t>(i)]);
    // Residual must vanish on every coefficient both sides know.
    for (long n = 0; n < overlap; ++n) {
        Rat s(0);
        for (long i = 0; i < dim(); ++i)
            s += coords[static_cast<size_t>(i)] * basis_series[static_cast<size_t>(i)].coeff(n);
        if (s != f.coeff(n))
            throw ConsistencyError("FormSpace::coordinates: series is not in the space (n=" +
                                   std::to_string(n) + ")");
    }
    return coords;
}

namespace {

// Enumerate the monomial exponents (a, b) with a + 4b = twice_weight,
// ordered by increasing b (= increasing q-valuation).
std::vector<RingElement::Key> monomial_keys(Weight w) {
    std::vector<RingElement::Key> keys;
    for (long b = 0; 4 * b <= w.twice; ++b) keys.push_back({w.twice - 4 * b, b});
    return keys;
}

struct Row {
    RingElement elem;
    Series series;
};

// Reduced echelon form by q-valuation with exact rational elimination.
// Monomials in theta, F2 are linearly independent, so a row that becomes
// zero to precision means the precision cannot separate the space.
std::vector<Row> echelonize(std::vector<Row> rows, long prec) {
    std::vector<Row> basis;
    while (!rows.empty()) {
        long best = -1;
        long best_val = prec;
        for (long i = 0; i < static_cast<long>(rows.size()); ++i) {
            auto v = rows[static_cast<size_t>(i)].series.valuation();
            if (!v.has_value())
                throw InsufficientPrecision(
                    "echelonize: a row vanished to precision; raise prec", 2 * prec);
            if (*v < best_val) {
                best_val = *v;
                best = i;
            }
        }
        Row pivot = std::move(rows[static_cast<size_t>(best)]);
        rows.erase(rows.begin() + best);
        Rat lead = pivot.series.coeff(best_val);
        pivot.series = scale(Rat(1) / lead, pivot.series);
        pivot.elem = pivot.elem.scaled(Rat(1) / lead);
        for (Row& r : rows) {
            Rat c = r.series.coeff(best_val);
            if (c != 0) {
                r.series = sub(r.series, scale(c, pivot.series));
                r.elem = r.elem - pivot.elem.scaled(c);
            }
        }
        for (Row& r : basis) {
            Rat c = r.series.coeff(best_val);
            if (c != 0) {
                r.series = sub(r.series, scale(c, pivot.series));
                r.elem = r.elem - pivot.elem.scaled(c);
            }
        }
        basis.push_back(std::move(pivot));
    }
    std::sort(basis.begin(), basis.end(), [](const Row& x, const Row& y) {
        return *x.series.valuation() < *y.series.valuation();
    });
    return basis;
}

FormSpace space_from_rows(Weight w, SpaceKind kind, long prec, std::vector<Row> rows) {
    FormSpace sp;
    sp.weight = w;
    sp.kind = kind;
    sp.prec = prec;
    for (Row& r : echelonize(std::move(rows), prec)) {
        sp.pivots.push_back(*r.series.valuation());
        sp.basis_elems.push_back(std::move(r.elem));
        sp.basis_series.push_back(std::move(r.series));
    }
    return sp;
}

// Coefficient of theta^(twice) F2^0 in x, viewed in monomial coordinates:
// the constant term of the q-expansion, since F2 has valuation 1 and
// theta has constant term 1.
Rat const_term_coord(const RingElement& e) { return e.get(e.weight().twice, 0); }

}  // namespace

FormSpace monomial_space(Weight w, long prec) {
    if (w.twice < 1) throw DomainError("monomial_space: weight must be positive");
    auto keys = monomial_keys(w);
    if (prec < static_cast<long>(keys.size()) + 1)
        throw InsufficientPrecision("monomial_space: prec < dim + 1",
                                    static_cast<long>(keys.size()) + 1);
    std::vector<Row> rows;
    for (auto [a, b] : keys) {
        RingElement e = RingElement::monomial(a, b);
        rows.push_back({e, e.expand(prec)});
    }
    return space_from_rows(w, SpaceKind::full, prec, std::move(rows));
}

FormSpace cusp_space(long k, long prec) {
    if (k < 0) throw DomainError("cusp_space: k must be >= 0");
    Weight w = Weight::half_integral(k);
    FormSpace full = monomial_space(w, prec);

    // Two exact linear conditions on the full space: constant term of f
    // and constant term of w4(f). The cusp 1/2 needs no condition.
    std::vector<Row> rows;
    std::vector<std::pair<Rat, Rat>> conds;  // (c0(f), c0(w4 f)) per basis elem
    for (long i = 0; i < full.dim(); ++i) {
        const RingElement& e = full.basis_elems[static_cast<size_t>(i)];
        conds.push_back({const_term_coord(e), const_term_coord(w4(e))});
    }
    // Nullspace of the 2 x dim condition matrix by elimination.
    long d = full.dim();
    std::vector<std::vector<Rat>> m(2, std::vector<Rat>(static_cast<size_t>(d)));
    for (long i = 0; i < d; ++i) {
        m[0][static_cast<size_t>(i)] = conds[static_cast<size_t>(i)].first;
        m[1][static_cast<size_t>(i)] = conds[static_cast<size_t>(i)].second;
    }
    std::vector<long> pivot_cols;
    long r = 0;
    for (long c = 0; c < d && r < 2; ++c) {
        long pr = -1;
        for (long i = r; i < 2; ++i)
            if (m[static_cast<size_t>(i)][static_cast<size_t>(c)] != 0) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(m[static_cast<size_t>(r)], m[static_cast<size_t>(pr)]);
        Rat inv = Rat(1) / m[static_cast<size_t>(r)][static_cast<size_t>(c)];
        for (long j = c; j < d; ++j) m[static_cast<size_t>(r)][static_cast<size_t>(j)] *= inv;
        for (long i = 0; i < 2; ++i) {
            if (i == r) continue;
            Rat f = m[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (f != 0)
                for (long j = c; j < d; ++j)
                    m[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
                        f * m[static_cast<size_t>(r)][static_cast<size_t>(j)];
        }
        pivot_cols.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(static_cast<size_t>(d), false);
    for (long c : pivot_cols) is_pivot[static_cast<size_t>(c)] = true;
    for (long free_c = 0; free_c < d; ++free_c) {
        if (is_pivot[static_cast<size_t>(free_c)]) continue;
        // x[free_c] = 1, pivot coordinates from the reduced rows.
        std::vector<Rat> x(static_cast<size_t>(d), Rat(0));
        x[static_cast<size_t>(free_c)] = 1;
        for (long i = 0; i < r; ++i)
            x[static_cast<size_t>(pivot_cols[static_cast<size_t>(i)])] =
                -m[static_cast<size_t>(i)][static_cast<size_t>(free_c)];
        RingElement e(w);
        Series s(prec);
        for (long i = 0; i < d; ++i) {
            if (x[static_cast<size_t>(i)] == 0) continue;
            e = e + full.basis_elems[static_cast<size_t>(i)].scaled(x[static_cast<size_t>(i)]);
            s = add(s, scale(x[static_cast<size_t>(i)],
                             full.basis_series[static_cast<size_t>(i)]));
        }
        rows.push_back({std::move(e), std::move(s)});
    }

    FormSpace sp = space_from_rows(w, SpaceKind::cusp, prec, std::move(rows));
    long expect = std::max(0L, k / 2 - 1);
    if (sp.dim() != expect)
        throw ConsistencyError("cusp_space: dimension " + std::to_string(sp.dim()) +
                               " at k=" + std::to_string(k) + " contradicts the formula " +
                               std::to_string(expect));
    for (long i = 0; i < sp.dim(); ++i) {
        const RingElement& e = sp.basis_elems[static_cast<size_t>(i)];
        if (const_term_coord(e) != 0 || const_term_coord(w4(e)) != 0)
            throw ConsistencyError("cusp_space: basis element fails a cusp condition");
    }
    return sp;
}

FormSpace eigen_space(long k, int sign, long prec) {
    if (sign != 1 && sign != -1) throw DomainError("eigen_space: sign must be +1 or -1");
    FormSpace cusp = cusp_space(k, prec);
    long d = cusp.dim();
    if (d == 0) {
        FormSpace sp;
        sp.weight = cusp.weight;
        sp.kind = sign > 0 ? SpaceKind::plus : SpaceKind::minus;
        sp.prec = prec;
        return sp;
    }
    // Projector route: (f + sign*w4(f))/2 spans the eigenspace as f runs
    // over the cusp basis; w4 preserves the cusp space exactly.
    std::vector<Row> rows;
    for (long i = 0; i < d; ++i) {
        const RingElement& e = cusp.basis_elems[static_cast<size_t>(i)];
        RingElement proj = (e + w4(e).scaled(Rat(sign))).scaled(ratq(1, 2));
        if (proj.is_zero()) continue;
        rows.push_back({proj, proj.expand(prec)});
    }
    // Drop dependent projections: echelonize handles independence, but a
    // zero-to-precision row from a genuinely dependent projection must be
    // removed first (projections of different basis vectors can coincide).
    std::vector<Row> indep;
    for (Row& r : rows) {
        std::vector<Row> trial;
        for (const Row& b : indep) trial.push_back({b.elem, b.series});
        trial.push_back({r.elem, r.series});
        bool dependent = false;
        {
            // exact dependence test on monomial coordinates
            std::vector<std::vector<Rat>> mat;
            auto keys = monomial_keys(cusp.weight);
            for (const Row& t : trial) {
                std::vector<Rat> v;
                for (auto [a, b2] : keys) v.push_back(t.elem.get(a, b2));
                mat.push_back(std::move(v));
            }
            long rank = 0;
            long cols = static_cast<long>(keys.size());
            for (long c = 0; c < cols && rank < static_cast<long>(mat.size()); ++c) {
                long pr = -1;
                for (long i = rank; i < static_cast<long>(mat.size()); ++i)
                    if (mat[static_cast<size_t>(i)][static_cast<size_t>(c)] != 0) {
                        pr = i;
                        break;
                    }
                if (pr < 0) continue;
                std::swap(mat[static_cast<size_t>(rank)], mat[static_cast<size_t>(pr)]);
                Rat inv = Rat(1) / mat[static_cast<size_t>(rank)][static_cast<size_t>(c)];
                for (long j = 0; j < cols; ++j)
                    mat[static_cast<size_t>(rank)][static_cast<size_t>(j)] *= inv;
                for (long i = 0; i < static_cast<long>(mat.size()); ++i) {
                    if (i == rank) continue;
                    Rat f = mat[static_cast<size_t>(i)][static_cast<size_t>(c)];
                    if (f != 0)
                        for (long j = 0; j < cols; ++j)
                            mat[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
                                f * mat[static_cast<size_t>(rank)][static_cast<size_t>(j)];
                }
                ++rank;
            }
            dependent = rank < static_cast<long>(mat.size());
        }
        if (!dependent) indep.push_back(std::move(r));
    }
    FormSpace sp = space_from_rows(cusp.weight, sign > 0 ? SpaceKind::plus : SpaceKind::minus,
                                   prec, std::move(indep));
    // Every basis element must be an exact w4 eigenvector.
    for (const RingElement& e : sp.basis_elems)
        if (!(w4(e) == e.scaled(Rat(sign))))
            throw ConsistencyError("eigen_space: basis element is not a w4 eigenvector");
    return sp;
}

RingElement plus_witness(long k) {
    if (k < 4) throw DomainError("plus_witness: k >= 4 required");
    return RingElement::delta4() * RingElement::monomial(2 * k - 7, 0);
}

RingElement minus_witness(long k) {
    if (k < 6) throw DomainError("minus_witness: k >= 6 required");
    return RingElement::delta4() * RingElement::d2() * RingElement::monomial(2 * k - 11, 0);
}

}  // namespace hmf4
