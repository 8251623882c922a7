#include "hmf4/lfunction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hmf4/gamma.hpp"

namespace hmf4 {

namespace {

constexpr long kGuard = 48;

// FNV-1a over the decimal coefficient strings: a stable form identity.
std::string coeff_hash(const Series& f) {
    unsigned long long h = 1469598103934665603ULL;
    for (long n = 0; n < f.prec(); ++n) {
        std::string s = rat_str(f.coeff(n));
        s.push_back(',');
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", h);
    return buf;
}

// Growth-model exponent alpha = (2k+1)/4 + 1/2 for weight k+1/2.
Rat growth_alpha(Weight w) { return ratq(w.twice + 2, 4); }

// Empirical constant C = 2 max |a(n)| / n^alpha over available n >= 1.
APReal growth_constant(const std::vector<const Series*>& fs, Weight w, long wb) {
    APReal alpha(wb, growth_alpha(w));
    APReal c(wb);
    for (const Series* f : fs)
        for (long n = 1; n < f->prec(); ++n) {
            const Rat& a = f->coeff(n);
            if (a == 0) continue;
            APReal q = abs(APReal(wb, a)) / pow(APReal(wb, n), alpha);
            c = max(c, q);
        }
    return 2 * c;
}

}  // namespace

APReal lvalue_budget(const LValue& v) { return v.tail_bound + v.round_bound; }

EvalResult eval_form(const Series& f, Weight w, const APReal& t, long bits) {
    if (!(t > 0)) throw DomainError("eval_form: t must be positive");
    long wb = bits + 32;
    long terms = f.prec();
    APReal tw = round_to(t, wb);
    APReal q = exp(-2 * (APReal::pi(wb) * tw));
    APReal value(wb);
    APReal qpow(wb, 1L);
    APReal max_term(wb);
    for (long n = 0; n < terms; ++n) {
        const Rat& a = f.coeff(n);
        if (a != 0) {
            APReal term = APReal(wb, a) * qpow;
            max_term = max(max_term, abs(term));
            value += term;
        }
        qpow = qpow * q;
    }
    APReal alpha(wb, growth_alpha(w));
    APReal c = growth_constant({&f}, w, wb);
    // tail <= C P^alpha q^P / (1 - rho), rho = q (1 + 1/P)^alpha
    APReal p_ap(wb, terms);
    APReal rho = q * pow((p_ap + 1) / p_ap, alpha);
    if (!(rho < 1))
        throw InsufficientPrecision("eval_form: tail model diverges; raise series precision",
                                    2 * terms + 64);
    APReal tail = c * pow(p_ap, alpha) * qpow / (APReal(wb, 1L) - rho);
    APReal cap = ldexp(max(APReal(wb, 1L), abs(value)), -(bits - 24));
    if (!(tail <= cap)) {
        double need = (static_cast<double>(bits) * 0.6931 +
                       alpha.to_double() * std::log(static_cast<double>(terms) + 1.0)) /
                          (6.2831 * t.to_double()) +
                      16.0;
        throw InsufficientPrecision("eval_form: tail bound above target at this precision",
                                    std::max(2 * terms, static_cast<long>(need) + 1));
    }
    // Each addition/multiplication rounds at wb bits; the partial sums
    // are bounded by terms * max_term, so the accumulated error is below
    // (terms + 4) * max_term * 2^(4 - wb).
    APReal round_bound =
        ldexp((terms + 4) * max_term, -(wb - 4)) + ldexp(abs(value), -(bits - 2));
    return {round_to(value, bits), round_to(tail, bits), round_to(round_bound, bits), terms};
}

namespace {

struct SumSpec {
    const Series* fa;      // first-kernel coefficients
    const Series* fb;      // second-kernel coefficients
    Rat fb_scale;          // applied to fb (carries the eigen sign)
    Weight w;
    APComplex s;
    long bits;
    std::string route;
};

LValue lstar_sum(const SumSpec& sp) {
    long wb = sp.bits + kGuard;
    const Series& fa = *sp.fa;
    const Series& fb = *sp.fb;
    if (fa.coeff(0) != 0 || fb.coeff(0) != 0)
        throw DomainError("lstar: form must be cuspidal (constant term zero)");
    long avail = std::min(fa.prec(), fb.prec()) - 1;  // usable n range: 1..avail
    if (avail < 1) throw DomainError("lstar: series has no coefficients beyond the constant");

    APComplex s = round_to(sp.s, wb);
    APReal kappa(wb, ratq(sp.w.twice, 2));
    APComplex s2 = APComplex(kappa) - s;

    APReal pi = APReal::pi(wb);
    APReal alpha(wb, growth_alpha(sp.w));
    APReal c = growth_constant({&fa, &fb}, sp.w, wb);
    APReal c_eff = max(APReal(wb, 1L), abs(APReal(wb, sp.fb_scale))) * c;

    // Tail term bound B(n) = (4C/pi) n^(alpha-1) e^(-pi n), valid once
    // pi n >= 2 max(Re s - 1, Re s2 - 1, 0).
    APReal x0(wb);
    x0 = max(x0, 2 * (s.real() - 1));
    x0 = max(x0, 2 * (s2.real() - 1));
    long n_min = static_cast<long>(x0.to_double() / 3.14159) + 1;
    APReal target = ldexp(APReal(wb, 1L), -(sp.bits - 24));

    auto tail_at = [&](long n) -> APReal {
        // sum_{m > n} B(m) <= B(n+1) / (1 - rho)
        APReal np(wb, n + 1);
        APReal b = (4 * c_eff / pi) * pow(np, alpha - 1) * exp(-(pi * np));
        APReal ratio_pow = alpha - 1 > 0 ? pow((np + 1) / np, alpha - 1) : APReal(wb, 1L);
        APReal rho = exp(-pi) * ratio_pow;
        return b / (APReal(wb, 1L) - rho);
    };

    long terms = -1;
    for (long n = std::max(1L, n_min); n <= avail; ++n) {
        if (tail_at(n) <= target) {
            terms = n;
            break;
        }
    }
    if (terms < 0) {
        long need = avail;
        for (long n = std::max(1L, n_min);; ++n) {
            if (tail_at(n) <= target || n > 2000000) {
                need = n + 1;
                break;
            }
        }
        throw InsufficientPrecision(
            "lstar: series precision cannot reach the tail target; need prec >= " +
                std::to_string(need + 1),
            need + 1);
    }

    APComplex value(wb);
    APReal max_term(wb);
    for (long n = 1; n <= terms; ++n) {
        APReal x = pi * APReal(wb, n);
        APComplex kernel(wb);
        const Rat& a = fa.coeff(n);
        if (a != 0)
            kernel = APReal(wb, a) * (rpow(x, -s) * gamma_upper(s, x));
        Rat b = sp.fb_scale * fb.coeff(n);
        if (b != 0)
            kernel = kernel + APReal(wb, b) * (rpow(x, -s2) * gamma_upper(s2, x));
        value = value + kernel;
        max_term = max(max_term, abs(kernel));
    }

    LValue out;
    out.s = round_to(sp.s, sp.bits);
    out.value = round_to(value, sp.bits);
    out.tail_bound = round_to(tail_at(terms), sp.bits);
    out.round_bound =
        round_to(ldexp(APReal(wb, terms + 4) * max(max_term, APReal(wb, 1L)), -(wb - 8)),
                 sp.bits);
    out.terms_used = terms;
    out.method = "gamma_series";
    out.form_id = "w=" + sp.w.str() + "|" + sp.route + "|#" + coeff_hash(fa);
    return out;
}

}  // namespace

LValue lstar_eigen(const Series& f, Weight w, int sign, const APComplex& s, long bits) {
    if (sign != 1 && sign != -1) throw DomainError("lstar_eigen: sign must be +1 or -1");
    SumSpec sp{&f, &f, Rat(sign), w, s, bits, sign > 0 ? "plus" : "minus"};
    return lstar_sum(sp);
}

LValue lstar_generic(const Series& f, const Series& fw4, Weight w, const APComplex& s,
                     long bits) {
    SumSpec sp{&f, &fw4, Rat(1), w, s, bits, "generic"};
    return lstar_sum(sp);
}

APReal functional_equation_residual(const Series& f, const Series& fw4, Weight w,
                                    const APComplex& s, long bits) {
    APComplex kappa_minus_s = APComplex(APReal(bits + kGuard, ratq(w.twice, 2))) - s;
    LValue lhs = lstar_generic(f, fw4, w, kappa_minus_s, bits);
    LValue rhs = lstar_generic(fw4, f, w, s, bits);
    return abs(lhs.value - rhs.value);
}

LValue lstar_quadrature(const Series& f, const Series& fw4, Weight w, const APComplex& s,
                        long bits) {
    long wb = bits + kGuard;
    if (f.coeff(0) != 0 || fw4.coeff(0) != 0)
        throw DomainError("lstar_quadrature: form must be cuspidal");
    long terms = std::min(f.prec(), fw4.prec());
    if (terms < 2) throw DomainError("lstar_quadrature: series too short");

    APComplex sc = round_to(s, wb);
    APReal pi = APReal::pi(wb);
    APReal kappa(wb, ratq(w.twice, 2));
    APComplex s2 = APComplex(kappa) - sc;

    // Exponent scale c and coefficient-mass M for the tail past T.
    APReal c_exp = max(max(sc.real(), s2.real()), APReal(wb, 1L));
    APReal alpha(wb, growth_alpha(w));
    APReal growth_c = growth_constant({&f, &fw4}, w, wb);
    APReal e2pi = exp(-2 * pi);
    APReal mass(wb);
    {
        APReal qpow(wb, 1L);  // e^{-2 pi (n-1)} at n = 1
        for (long n = 1; n < terms; ++n) {
            Rat av = abs(f.coeff(n));
            Rat bv = abs(fw4.coeff(n));
            const Rat& big = av > bv ? av : bv;
            if (big != 0) mass += APReal(wb, big) * qpow;
            qpow = qpow * e2pi;
        }
        APReal p_ap(wb, terms);
        APReal rho = e2pi * pow((p_ap + 1) / p_ap, alpha);
        mass += growth_c * pow(p_ap, alpha) * qpow / (APReal(wb, 1L) - rho);
    }

    APReal target = ldexp(APReal(wb, 1L), -(bits - 24));
    // tail(T) <= 2 M (2T)^c e^{-2 pi T} / (pi T), needs T >= max(1, c/pi).
    long t_upper = std::max(1L, static_cast<long>(c_exp.to_double() / 3.14159) + 1);
    APReal tail_T(wb);
    for (;; ++t_upper) {
        APReal t_ap(wb, t_upper);
        tail_T = 2 * (mass * pow(2 * t_ap, c_exp) * exp(-2 * (pi * t_ap))) / (pi * t_ap);
        if (tail_T <= target) break;
        if (t_upper > 4000)
            throw ConsistencyError("lstar_quadrature: tail bound does not shrink");
    }

    // Per-point series truncation error, uniform over t >= 1/2.
    APReal trunc_pt;
    {
        APReal p_ap(wb, terms);
        APReal q_half = exp(-pi);  // e^{-2 pi t} at t = 1/2
        APReal rho = q_half * pow((p_ap + 1) / p_ap, alpha);
        trunc_pt = growth_c * pow(p_ap, alpha) * pow(q_half, p_ap) /
                   (APReal(wb, 1L) - rho);
    }

    // Integrand g(t) = [f|W4(it) (2t)^(kappa - s) + f(it) (2t)^s] / t.
    std::vector<APReal> ca, cb;
    ca.reserve(static_cast<size_t>(terms));
    cb.reserve(static_cast<size_t>(terms));
    for (long n = 0; n < terms; ++n) {
        ca.emplace_back(wb, f.coeff(n));
        cb.emplace_back(wb, fw4.coeff(n));
    }
    long evals = 0;
    auto integrand = [&](const APReal& t) -> APComplex {
        ++evals;
        APReal q = exp(-2 * (pi * t));
        APReal fa(wb), fb(wb);
        APReal qpow = q;  // start at n = 1 (constant terms are zero)
        for (long n = 1; n < terms; ++n) {
            if (!ca[static_cast<size_t>(n)].is_zero()) fa += ca[static_cast<size_t>(n)] * qpow;
            if (!cb[static_cast<size_t>(n)].is_zero()) fb += cb[static_cast<size_t>(n)] * qpow;
            qpow = qpow * q;
        }
        APReal two_t = 2 * t;
        APComplex val = APComplex(fb) * rpow(two_t, APComplex(kappa) - sc) +
                        APComplex(fa) * rpow(two_t, sc);
        return (APReal(wb, 1L) / t) * val;
    };

    // tanh-sinh nodes on [1/2, T]: t(u) = m + r tanh((pi/2) sinh u).
    APReal m_mid = (APReal(wb, ratq(1, 2)) + APReal(wb, t_upper)) / 2;
    APReal r_half = (APReal(wb, t_upper) - APReal(wb, ratq(1, 2))) / 2;
    APReal half_pi = pi / 2;
    APReal w_floor = ldexp(APReal(wb, 1L), -(wb + 32));

    auto node = [&](const APReal& u, APReal* weight) -> APReal {
        APReal sh = half_pi * sinh(u);
        APReal th = tanh(sh);
        APReal ch = cosh(sh);
        *weight = r_half * half_pi * cosh(u) / (ch * ch);
        return m_mid + r_half * th;
    };

    double u_max_d =
        std::asinh((2.0 / 3.14159) * (static_cast<double>(wb + 32) * 0.6931 + 4.0));
    APComplex total(wb);
    APComplex prev(wb);
    APReal h(wb, 1L);
    long level = 0;
    bool converged = false;
    APReal quad_err(wb, 1L);
    for (; level <= 14; ++level) {
        long jmax = static_cast<long>(std::ceil(u_max_d / h.to_double()));
        APComplex sum(wb);
        // Level 0 takes every node; deeper levels add the odd multiples.
        long start = level == 0 ? 0 : 1;
        long stride = level == 0 ? 1 : 2;
        for (long j = start; j <= jmax; j += stride) {
            APReal u = APReal(wb, j) * h;
            APReal weight(wb);
            APReal tj = node(u, &weight);
            if (weight < w_floor) continue;
            APComplex g = integrand(tj);
            if (j == 0) {
                sum = sum + weight * g;
            } else {
                APReal un = -u;
                APReal wn(wb);
                APReal tn = node(un, &wn);
                sum = sum + weight * g + wn * integrand(tn);
            }
        }
        if (level == 0) {
            total = h * sum;
        } else {
            total = APReal(wb, ratq(1, 2)) * total + h * sum;
        }
        if (level >= 2) {
            quad_err = abs(total - prev);
            if (quad_err <= ldexp(max(APReal(wb, 1L), abs(total)), -(bits + 8))) {
                converged = true;
                ++level;
                break;
            }
        }
        prev = total;
        h = ldexp(h, -1);
    }
    if (!converged)
        throw ConsistencyError(
            "lstar_quadrature: no convergence after 14 levels; last delta " +
            quad_err.str(8));

    APReal trunc_total =
        4 * (trunc_pt * pow(2 * APReal(wb, t_upper), c_exp) * APReal(wb, t_upper));

    LValue out;
    out.s = round_to(s, bits);
    out.value = round_to(total, bits);
    out.tail_bound = round_to(tail_T + trunc_total + quad_err, bits);
    out.round_bound = round_to(ldexp(max(APReal(wb, 1L), abs(total)), -(bits - 8)), bits);
    out.terms_used = evals;
    out.method = "quadrature";
    out.form_id = "w=" + w.str() + "|generic|#" + coeff_hash(f);
    return out;
}

std::vector<ScanPoint> scan_real(const Series& f, Weight w, int sign, const Rat& lo,
                                 const Rat& hi, const Rat& step, long bits) {
    if (step <= 0) throw DomainError("scan_real: step must be positive");
    if (lo > hi) throw DomainError("scan_real: lo must be <= hi");
    std::vector<ScanPoint> out;
    if (lo == hi) return out;
    for (Rat sigma = lo; sigma <= hi; sigma += step) {
        APComplex s(bits + kGuard, sigma, Rat(0));
        LValue v = lstar_eigen(f, w, sign, s, bits);
        APReal budget = lvalue_budget(v);
        int sgn_out = 0;
        if (v.value.real() > budget)
            sgn_out = 1;
        else if (v.value.real() < -budget)
            sgn_out = -1;
        out.push_back({sigma, std::move(v), sgn_out});
    }
    return out;
}

}  // namespace hmf4
