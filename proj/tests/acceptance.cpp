// Acceptance gate: ten criteria, one PASS/FAIL line each, with the
// tolerance stated on the line. Exit code is the number of failed
// criteria. The final criterion reruns the numeric ones at doubled
// series precision and 64 extra bits and demands identical outcomes.

#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hmf4/forms.hpp"
#include "hmf4/hecke.hpp"
#include "hmf4/lfunction.hpp"
#include "hmf4/verify.hpp"
#include "oracles.hpp"

using namespace hmf4;
using verify::CheckResult;
using verify::CheckStatus;

namespace {

// named sub-results of one criterion; stability (criterion 10) compares
// these between the base and the high-precision configuration
using Outcome = std::vector<std::pair<std::string, bool>>;

struct Config {
    long bits;
    long prec;
    long hecke_prec;
};

bool all_ok(const Outcome& o) {
    for (const auto& [k, v] : o)
        if (!v) return false;
    return true;
}

std::string first_bad(const Outcome& o) {
    for (const auto& [k, v] : o)
        if (!v) return k;
    return "";
}

bool same_outcomes(const Outcome& a, const Outcome& b, std::string& why) {
    if (a.size() != b.size()) {
        why = "sub-result counts differ";
        return false;
    }
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].first != b[i].first) {
            why = "sub-result keys differ at " + a[i].first;
            return false;
        }
        if (a[i].second != b[i].second) {
            why = a[i].first + " changed " + (a[i].second ? "pass->fail" : "fail->pass");
            return false;
        }
    }
    return true;
}

Outcome subset(const std::vector<CheckResult>& cs, const std::set<std::string>& ids) {
    Outcome o;
    for (const auto& c : cs)
        if (ids.count(c.check_id))
            o.emplace_back(c.check_id, c.status == CheckStatus::pass);
    return o;
}

Outcome from_checks(const std::vector<CheckResult>& cs, const std::string& prefix) {
    Outcome o;
    for (const auto& c : cs)
        o.emplace_back(prefix + c.check_id, c.status == CheckStatus::pass);
    return o;
}

// ---- criterion 1: dimension tables ----------------------------------

bool criterion1() {
    for (long k = 0; k <= 30; ++k) {
        long prec = 2 * (k / 2) + 16;
        if (monomial_space(Weight::half_integral(k), prec).dim() != k / 2 + 1)
            return false;
        long want = k / 2 - 1 > 0 ? k / 2 - 1 : 0;
        if (cusp_space(k, prec).dim() != want) return false;
    }
    for (long k = 4; k <= 14; ++k) {
        long prec = 2 * (k / 2) + 16;
        if (eigen_space(k, +1, prec).dim() + eigen_space(k, -1, prec).dim() !=
            cusp_space(k, prec).dim())
            return false;
    }
    return true;
}

// ---- criterion 2: dual construction of delta4 -----------------------

bool criterion2() {
    Series a = delta4(501);
    Series b = delta4_product(501);
    for (long n = 0; n <= 500; ++n)
        if (a.coeff(n) != b.coeff(n)) return false;
    return true;
}

// ---- criterion 5: Hecke operators -----------------------------------

Outcome criterion5(const Config& cfg) {
    Outcome out;
    for (long k = 4; k <= 12; ++k) {
        std::string ks = std::to_string(k);
        {
            FormSpace cusp = cusp_space(k, 25 * (k / 2 + 2) + 8);
            bool comm = true;
            if (cusp.dim() > 0) {
                HeckeMatrix t9 = t_p2_matrix(cusp, 3);
                HeckeMatrix t25 = t_p2_matrix(cusp, 5);
                comm = hecke_mul(t9, t25).entries == hecke_mul(t25, t9).entries;
            }
            out.emplace_back("commute-cusp-k" + ks, comm);
        }
        for (int sign : {+1, -1}) {
            std::string tag = (sign > 0 ? "plus-k" : "minus-k") + ks;
            FormSpace sp = eigen_space(k, sign, cfg.hecke_prec);
            if (sp.dim() == 0) {
                out.emplace_back("eigen-ratio-" + tag, true);
                continue;
            }
            // membership: matrix construction decomposes every operator
            // image over the basis and verifies all known coefficients
            bool member = true, comm = true;
            try {
                HeckeMatrix t9 = t_p2_matrix(sp, 3);
                HeckeMatrix t25 = t_p2_matrix(sp, 5);
                comm = hecke_mul(t9, t25).entries == hecke_mul(t25, t9).entries;
            } catch (const std::exception&) {
                member = false;
            }
            out.emplace_back("membership-" + tag, member);
            out.emplace_back("commute-" + tag, comm);

            bool ratio_ok = member;
            if (member) {
                auto eigens = eigen_decompose(sp, {3, 5}, cfg.bits);
                if (static_cast<long>(eigens.size()) != sp.dim()) ratio_ok = false;
                APReal threshold(cfg.bits, "1e-20");
                for (const Eigenform& e : eigens) {
                    for (long p : {3L, 5L}) {
                        if (e.exact) {
                            Series f = e.series();
                            Series b = t_p2_coeffs(f, p, k, 101);
                            if (!equal_to_min_prec(
                                    b, scale(e.eigenvalues_exact.at(p), f.truncated(101))))
                                ratio_ok = false;
                            continue;
                        }
                        const APReal& lam = e.eigenvalues.at(p);
                        long pk1 = 1, p2k1 = 1;
                        for (long i = 0; i < k - 1; ++i) pk1 *= p;
                        for (long i = 0; i < 2 * k - 1; ++i) p2k1 *= p;
                        APReal worst(cfg.bits);
                        APReal scale_max(cfg.bits, 1L);
                        for (long n = 1; n <= 100; ++n) {
                            int chi = oracle::legendre(k % 2 == 0 ? n : -n, p);
                            APReal b = e.coeffs[static_cast<size_t>(p * p * n)];
                            b += (chi * pk1) * e.coeffs[static_cast<size_t>(n)];
                            if (n % (p * p) == 0)
                                b += p2k1 * e.coeffs[static_cast<size_t>(n / (p * p))];
                            worst = max(worst,
                                        abs(b - lam * e.coeffs[static_cast<size_t>(n)]));
                            scale_max = max(scale_max,
                                            abs(lam * e.coeffs[static_cast<size_t>(n)]));
                        }
                        if (!(worst / scale_max < threshold)) ratio_ok = false;
                    }
                }
            }
            out.emplace_back("eigen-ratio-" + tag, ratio_ok);
        }
    }
    return out;
}

// ---- criterion 6: functional equation -------------------------------

Outcome criterion6(const Config& cfg) {
    Outcome out;
    APReal tol(cfg.bits, "1e-20");
    for (long k = 4; k <= 10; ++k) {
        RingElement g = plus_witness(k);
        Series f = g.expand(cfg.prec);
        Series fw4 = w4(g).expand(cfg.prec);
        Weight w = Weight::half_integral(k);
        // points drawn from a per-k generator so both precision
        // configurations test the same set
        std::mt19937 rng(777000u + static_cast<unsigned>(k));
        for (int j = 0; j < 5; ++j) {
            Rat re(-8 + static_cast<long>(rng() % (4 * k + 28)), 4);
            Rat im(static_cast<long>(rng() % 25) - 12, 4);
            re.canonicalize();
            im.canonicalize();
            APComplex s(cfg.bits, re, im);
            APReal resid = functional_equation_residual(f, fw4, w, s, cfg.bits);
            out.emplace_back("fe-k" + std::to_string(k) + "-pt" + std::to_string(j),
                             resid < tol);
        }
    }
    return out;
}

// ---- criterion 7: dual evaluation methods ---------------------------

Outcome criterion7(const Config& cfg) {
    Outcome out;
    struct Probe {
        const char* name;
        long k;
        int sign;
    };
    for (const Probe& pr : {Probe{"f1", 4, +1}, Probe{"f2", 6, -1}}) {
        RingElement g = pr.sign > 0 ? plus_witness(pr.k) : minus_witness(pr.k);
        Series f = g.expand(cfg.prec);
        Weight w = Weight::half_integral(pr.k);
        Rat center(2 * pr.k + 1, 4);
        std::vector<std::pair<std::string, APComplex>> points = {
            {"s0", APComplex(cfg.bits, Rat(0), Rat(0))},
            {"s1", APComplex(cfg.bits, Rat(1), Rat(0))},
            {"center", APComplex(cfg.bits, center, Rat(0))},
            {"sk", APComplex(cfg.bits, Rat(pr.k), Rat(0))},
            {"s2p3i", APComplex(cfg.bits, Rat(2), Rat(3))}};
        APReal rel_tol(cfg.bits, "1e-15");
        for (const auto& [pname, s] : points) {
            LValue a = lstar_eigen(f, w, pr.sign, s, cfg.bits);
            LValue b = lstar_quadrature(f, scale(Rat(pr.sign), f), w, s, cfg.bits);
            APReal diff = abs(a.value - b.value);
            APReal scale_ref = max(abs(a.value), abs(b.value));
            bool ok = diff < rel_tol * scale_ref ||
                      diff <= lvalue_budget(a) + lvalue_budget(b);
            out.emplace_back(std::string("dual-") + pr.name + "-" + pname, ok);
        }
    }
    return out;
}

// ---- criteria 8 and 9: the theorem suites ---------------------------

Outcome criterion8(const Config& cfg) {
    Outcome out;
    for (long k = 4; k <= 10; ++k) {
        auto cs = verify::verify_nonvanishing_plus(k, verify::default_sigma_grid(k),
                                                   cfg.bits, cfg.prec);
        Outcome part = from_checks(cs, "");
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

Outcome criterion9(const Config& cfg) {
    Outcome out;
    for (long k = 6; k <= 10; ++k) {
        auto cs = verify::verify_sign_pattern_minus(k, verify::default_sigma_grid(k),
                                                    cfg.bits, cfg.prec);
        Outcome part = from_checks(cs, "");
        out.insert(out.end(), part.begin(), part.end());
    }
    Series f2c = minus_witness(6).expand(cfg.prec);
    LValue v = lstar_eigen(f2c, Weight::half_integral(6), -1,
                           APComplex(cfg.bits, Rat(13, 4), Rat(0)), cfg.bits);
    out.emplace_back("central-value-f2",
                     abs(v.value) < APReal(cfg.bits, "1e-20"));
    return out;
}

}  // namespace

int main() {
    const Config base{128, 300, 25 * 101 + 8};
    const Config doubled{base.bits + 64, 2 * base.prec, 2 * base.hecke_prec};
    const std::set<std::string> crit3_ids = {
        "theta-axis-transform", "f2-axis-transform",       "delta4-axis-transform",
        "d2-axis-transform",    "w4-ring-convention-numeric", "w4-involution-exact"};
    const std::set<std::string> crit4_ids = {"theta4-32f2-at-i-half", "d2-zero-at-i-half",
                                             "delta4-positive-axis", "d2-positive-axis"};

    int failures = 0;
    auto line = [&failures](int idx, bool ok, const std::string& text,
                            const std::string& bad) {
        std::printf("%s: criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", idx,
                    text.c_str(), bad.empty() ? "" : " -- first failure: ",
                    bad.c_str());
        if (!ok) ++failures;
    };

    try {
        bool c1 = criterion1();
        line(1, c1,
             "space dimensions for k <= 30 match floor(k/2)+1 (graded piece), "
             "max(0, floor(k/2)-1) (cusp), and the eigenspace split (exact)",
             "");

        bool c2 = criterion2();
        line(2, c2,
             "both constructions of the weight-4 generator agree on coefficients "
             "0..500 (exact)",
             "");

        auto id_base = verify::verify_identities(base.prec, base.bits);
        Outcome o3 = subset(id_base, crit3_ids);
        line(3, all_ok(o3) && o3.size() == crit3_ids.size(),
             "involution algebra: exact double-application and generator images, "
             "axis transformation laws at t in {3/5, 1, 17/10} (rel tol 1e-25)",
             first_bad(o3));

        Outcome o4 = subset(id_base, crit4_ids);
        line(4, all_ok(o4) && o4.size() == crit4_ids.size(),
             "special values at t = 1/2 (abs tol 1e-25) and positivity on the "
             "axis grids (200 log-spaced points each, certified margins)",
             first_bad(o4));

        Outcome o5 = criterion5(base);
        line(5, all_ok(o5),
             "T(9), T(25) commute exactly and preserve each space for k = 4..12; "
             "eigenforms satisfy the three-term rule for n <= 100 (exact, or "
             "residual < 1e-20 for embedded eigenvalues)",
             first_bad(o5));

        Outcome o6 = criterion6(base);
        line(6, all_ok(o6),
             "completed-L functional equation residual < 1e-20 at 5 fixed "
             "pseudo-random strip points for each k = 4..10",
             first_bad(o6));

        Outcome o7 = criterion7(base);
        line(7, all_ok(o7),
             "gamma-series and quadrature evaluations agree to 1e-15 relative "
             "(or within certified budgets at the forced zero) for the k=4 and "
             "k=6 witnesses at s in {0, 1, center, k, 2+3i}",
             first_bad(o7));

        Outcome o8 = criterion8(base);
        line(8, all_ok(o8),
             "plus-space nonvanishing suite: L* > 0 with certified margin on "
             "[-2, k+3] step 1/4 with per-point eigenform witnesses, k = 4..10",
             first_bad(o8));

        Outcome o9 = criterion9(base);
        line(9, all_ok(o9),
             "minus-space sign pattern matches sign(sigma - center) with "
             "certified margin, forced central zero, |L*(f2, 13/4)| < 1e-20, "
             "k = 6..10",
             first_bad(o9));

        std::string why;
        bool stable = true;
        auto id_dbl = verify::verify_identities(doubled.prec, doubled.bits);
        Outcome o4d = subset(id_dbl, crit4_ids);
        if (!same_outcomes(o4, o4d, why)) stable = false;
        if (stable && !same_outcomes(o5, criterion5(doubled), why)) stable = false;
        if (stable && !same_outcomes(o6, criterion6(doubled), why)) stable = false;
        if (stable && !same_outcomes(o7, criterion7(doubled), why)) stable = false;
        if (stable && !same_outcomes(o8, criterion8(doubled), why)) stable = false;
        if (stable && !same_outcomes(o9, criterion9(doubled), why)) stable = false;
        line(10, stable,
             "criteria 4-9 outcomes are unchanged at doubled series precision "
             "(600 coefficients, Hecke 5066) and 192-bit arithmetic",
             why);
    } catch (const std::exception& e) {
        std::printf("FAIL: acceptance run aborted: %s\n", e.what());
        return 99;
    }

    std::printf("acceptance: %d of 10 criteria passed\n", 10 - failures);
    return failures;
}
