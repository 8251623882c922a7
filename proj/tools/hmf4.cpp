// Command-line front end: exact q-expansions, space bases, Hecke
// matrices and eigenforms, completed L-values with certified error
// bounds, sign scans, and the full verification report.
//
// Exit codes: 0 success, 1 check/consistency failure, 2 usage or domain
// error. Output goes to stdout (or --out FILE); diagnostics and the
// effective precision echo go to stderr.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hmf4/apfloat.hpp"
#include "hmf4/forms.hpp"
#include "hmf4/hecke.hpp"
#include "hmf4/lfunction.hpp"
#include "hmf4/verify.hpp"

namespace {

using hmf4::APComplex;
using hmf4::APReal;
using hmf4::ConsistencyError;
using hmf4::DomainError;
using hmf4::Eigenform;
using hmf4::FormSpace;
using hmf4::InsufficientPrecision;
using hmf4::LValue;
using hmf4::Rat;
using hmf4::RingElement;
using hmf4::Series;
using hmf4::Weight;
using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

struct Ctx {
    long bits = 128;
    long prec = 0;  // 0 = auto
    bool prec_fixed = false;
    std::string format = "text";
    std::string out_file;

    long digits() const { return std::max(2L, (bits * 301) / 1000); }
};

int emit(const Ctx& ctx, const std::string& payload) {
    if (ctx.out_file.empty()) {
        std::cout << payload;
        return 0;
    }
    std::ofstream f(ctx.out_file, std::ios::binary);
    if (!f) {
        std::cerr << "hmf4: cannot open '" << ctx.out_file << "' for writing\n";
        return 2;
    }
    f << payload;
    return 0;
}

void echo(const Ctx& ctx, const std::string& cmd, long eff_prec, bool autop) {
    std::cerr << "hmf4: " << cmd << " bits=" << ctx.bits << " prec=" << eff_prec
              << (autop ? " (auto)" : "") << " format=" << ctx.format << "\n";
}

// ------------------------------------------------------------- parsing

Rat parse_rat(const std::string& tok) {
    std::string s = tok;
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    if (s.empty()) throw DomainError("empty number");
    auto dot = s.find('.');
    try {
        if (dot == std::string::npos) {
            // base 10 must be explicit: the default base 0 would read a
            // leading zero as octal
            Rat r(s, 10);  // handles "p/q" and plain integers
            if (r.get_den() == 0) throw DomainError("zero denominator in '" + tok + "'");
            r.canonicalize();
            return r;
        }
        std::string ip = s.substr(0, dot);
        std::string fp = s.substr(dot + 1);
        if (fp.find_first_not_of("0123456789") != std::string::npos || fp.empty())
            throw DomainError("cannot parse number '" + tok + "'");
        bool neg = !ip.empty() && ip[0] == '-';
        if (neg) ip.erase(0, 1);
        if (ip.empty()) ip = "0";
        mpz_class num(ip + fp, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
        Rat r(num, den);
        r.canonicalize();
        return neg ? Rat(-r) : r;
    } catch (const std::invalid_argument&) {
        throw DomainError("cannot parse number '" + tok + "'");
    }
}

APReal parse_real(const std::string& tok, long bits) {
    if (tok.find('/') != std::string::npos) return APReal(bits, parse_rat(tok));
    return APReal(bits, tok);  // throws DomainError on junk
}

// "a+bi": decimal, rational, or exponent-notation parts; pure-real and
// pure-imaginary forms accepted.
APComplex parse_complex(const std::string& tok, long bits) {
    std::string s;
    for (char c : tok)
        if (c != ' ') s.push_back(c);
    if (s.empty()) throw DomainError("empty value for s");
    if (s.find('i') == std::string::npos) return APComplex(parse_real(s, bits));

    if (s.back() != 'i')
        throw DomainError("cannot parse complex value '" + tok + "' (use a+bi)");
    s.pop_back();
    // split point: last sign that is not a leading sign and not part of
    // an exponent
    size_t split = std::string::npos;
    for (size_t p = 1; p < s.size(); ++p) {
        if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E')
            split = p;
    }
    std::string re_part, im_part;
    if (split == std::string::npos) {
        re_part = "0";
        im_part = s;
    } else {
        re_part = s.substr(0, split);
        im_part = s.substr(split);
    }
    if (im_part.empty() || im_part == "+") im_part = "1";
    if (im_part == "-") im_part = "-1";
    if (!im_part.empty() && im_part.front() == '+') im_part.erase(0, 1);
    return APComplex(parse_real(re_part, bits), parse_real(im_part, bits));
}

long parse_long(const std::string& tok, const std::string& what) {
    try {
        size_t used = 0;
        long v = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw DomainError("cannot parse " + what + " '" + tok + "'");
    }
}

int parse_sign(const std::string& tok) {
    if (tok == "+" || tok == "plus") return +1;
    if (tok == "-" || tok == "minus") return -1;
    throw DomainError("sign must be '+' or '-', got '" + tok + "'");
}

// ---------------------------------------------------------- formatting

std::string rat_decimal(const Rat& r) {
    // exact plain decimal when the denominator divides a power of ten,
    // else the exact fraction
    mpz_class den = r.get_den();
    long twos = 0, fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 2);
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), 5);
        ++fives;
    }
    if (den != 1 || twos > 64 || fives > 64) return hmf4::rat_str(r);
    long e = std::max(twos, fives);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(e));
    mpz_class scaled = r.get_num() * (scale / r.get_den());
    bool neg = scaled < 0;
    if (neg) scaled = -scaled;
    std::string digits = scaled.get_str();
    if (e == 0) return (neg ? "-" : "") + digits;
    while (static_cast<long>(digits.size()) <= e) digits.insert(digits.begin(), '0');
    digits.insert(digits.size() - static_cast<size_t>(e), ".");
    return (neg ? "-" : "") + digits;
}

std::string ring_str(const RingElement& e) {
    if (e.is_zero()) return "0";
    std::string out;
    for (const auto& [key, c] : e.terms()) {
        auto [a, b] = key;
        bool neg = c < 0;
        Rat ac = neg ? Rat(-c) : c;
        std::string mono;
        if (a > 0) mono += "theta" + (a == 1 ? std::string() : "^" + std::to_string(a));
        if (b > 0) {
            if (!mono.empty()) mono += " ";
            mono += "F2" + (b == 1 ? std::string() : "^" + std::to_string(b));
        }
        std::string coef = (ac == 1 && !mono.empty()) ? std::string() : hmf4::rat_str(ac);
        std::string term = coef;
        if (!coef.empty() && !mono.empty()) term += " ";
        term += mono;
        if (out.empty())
            out = (neg ? "-" : "") + term;
        else
            out += (neg ? " - " : " + ") + term;
    }
    return out;
}

std::string poly_str(const std::vector<Rat>& p) {
    if (p.empty()) return "0";
    std::string out;
    for (long d = static_cast<long>(p.size()) - 1; d >= 0; --d) {
        const Rat& c = p[static_cast<size_t>(d)];
        if (c == 0) continue;
        bool neg = c < 0;
        Rat ac = neg ? Rat(-c) : c;
        std::string term;
        if (d == 0 || ac != 1) term += hmf4::rat_str(ac);
        if (d > 0) {
            if (!term.empty()) term += " ";
            term += "x";
            if (d > 1) term += "^" + std::to_string(d);
        }
        if (out.empty())
            out = (neg ? "-" : "") + term;
        else
            out += (neg ? " - " : " + ") + term;
    }
    return out.empty() ? "0" : out;
}

std::string series_prefix(const Series& s, long terms, bool exact_strings) {
    std::ostringstream os;
    long m = std::min(terms, s.prec());
    for (long n = 0; n < m; ++n) {
        if (n) os << ",";
        os << (exact_strings ? hmf4::rat_str(s.coeff(n)) : rat_decimal(s.coeff(n)));
    }
    return os.str();
}

json lvalue_json(const LValue& v, long digits) {
    json o;
    o["s"] = v.s.str(digits);
    o["value"] = v.value.str(digits);
    o["tail_bound"] = v.tail_bound.str(8);
    o["round_bound"] = v.round_bound.str(8);
    o["error_budget"] = hmf4::lvalue_budget(v).str(8);
    o["terms_used"] = v.terms_used;
    o["method"] = v.method;
    o["form_id"] = v.form_id;
    return o;
}

// --------------------------------------------------------- form lookup

struct NamedForm {
    std::string name;
    Series series;
    Weight weight;
};

// form_spec tokens: theta | P | F2 | Delta4 | Delta4_product | D2 |
// plus_form(k) | minus_form(k) | monomial(a,b)
NamedForm resolve_form(const std::string& spec, long prec) {
    auto open = spec.find('(');
    std::string name = spec.substr(0, open);
    std::vector<long> args;
    if (open != std::string::npos) {
        if (spec.back() != ')')
            throw DomainError("malformed form spec '" + spec + "'");
        std::string inner = spec.substr(open + 1, spec.size() - open - 2);
        std::stringstream ss(inner);
        std::string tok;
        while (std::getline(ss, tok, ','))
            args.push_back(parse_long(tok, "form argument"));
    }
    auto need_args = [&](size_t n) {
        if (args.size() != n)
            throw DomainError("form '" + name + "' takes " + std::to_string(n) +
                              " argument(s)");
    };
    if (name == "theta") {
        need_args(0);
        return {name, hmf4::theta(prec), Weight::half_integral(0)};
    }
    if (name == "P") {
        need_args(0);
        return {name, hmf4::quasi_eisenstein_p(prec), Weight::integral(2)};
    }
    if (name == "F2") {
        need_args(0);
        return {name, hmf4::f2(prec), Weight::integral(2)};
    }
    if (name == "Delta4") {
        need_args(0);
        return {name, hmf4::delta4(prec), Weight::integral(4)};
    }
    if (name == "Delta4_product") {
        need_args(0);
        return {name, hmf4::delta4_product(prec), Weight::integral(4)};
    }
    if (name == "D2") {
        need_args(0);
        return {name, hmf4::d2(prec), Weight::integral(2)};
    }
    if (name == "plus_form") {
        need_args(1);
        RingElement e = hmf4::plus_witness(args[0]);  // throws for k < 4
        return {spec, e.expand(prec), e.weight()};
    }
    if (name == "minus_form") {
        need_args(1);
        RingElement e = hmf4::minus_witness(args[0]);  // throws for k < 6
        return {spec, e.expand(prec), e.weight()};
    }
    if (name == "monomial") {
        need_args(2);
        if (args[0] < 0 || args[1] < 0)
            throw DomainError("monomial(a,b) needs a, b >= 0");
        RingElement e = RingElement::monomial(args[0], args[1]);
        return {spec, e.expand(prec), e.weight()};
    }
    throw DomainError("unknown form '" + spec +
                      "' (expected theta, P, F2, Delta4, Delta4_product, D2, "
                      "plus_form(k), minus_form(k), monomial(a,b))");
}

hmf4::SpaceKind parse_kind(const std::string& tok) {
    if (tok == "full") return hmf4::SpaceKind::full;
    if (tok == "cusp") return hmf4::SpaceKind::cusp;
    if (tok == "plus") return hmf4::SpaceKind::plus;
    if (tok == "minus") return hmf4::SpaceKind::minus;
    throw DomainError("kind must be full|cusp|plus|minus, got '" + tok + "'");
}

FormSpace build_space(long k, hmf4::SpaceKind kind, long prec) {
    switch (kind) {
        case hmf4::SpaceKind::full:
            return hmf4::monomial_space(Weight::half_integral(k), prec);
        case hmf4::SpaceKind::cusp:
            return hmf4::cusp_space(k, prec);
        case hmf4::SpaceKind::plus:
            return hmf4::eigen_space(k, +1, prec);
        case hmf4::SpaceKind::minus:
            return hmf4::eigen_space(k, -1, prec);
    }
    throw DomainError("unreachable kind");
}

void require_argc(const std::vector<std::string>& args, size_t n,
                  const std::string& usage) {
    if (args.size() != n) throw DomainError("usage: " + usage);
}

// ------------------------------------------------------------ commands

int cmd_expand(Ctx& ctx, const std::vector<std::string>& args) {
    require_argc(args, 2, "hmf4 expand <form> <n_terms>");
    long n = parse_long(args[1], "n_terms");
    if (n < 1 || n > 200000) throw DomainError("n_terms must be in [1, 200000]");
    long prec = std::max(ctx.prec, n);
    NamedForm f = resolve_form(args[0], prec);
    echo(ctx, "expand", prec, !ctx.prec_fixed);

    std::ostringstream os;
    if (ctx.format == "json") {
        json o;
        o["schema_version"] = kSchemaVersion;
        o["command"] = "expand";
        o["form"] = args[0];
        o["weight"] = f.weight.str();
        o["n_terms"] = n;
        o["bits"] = ctx.bits;
        o["prec"] = prec;
        json arr = json::array();
        for (long i = 0; i < n; ++i) arr.push_back(hmf4::rat_str(f.series.coeff(i)));
        o["coefficients"] = arr;
        os << o.dump(2) << "\n";
    } else if (ctx.format == "csv") {
        os << "n,coefficient\n";
        for (long i = 0; i < n; ++i)
            os << i << "," << hmf4::rat_str(f.series.coeff(i)) << "\n";
    } else {
        os << series_prefix(f.series, n, true) << "\n";
    }
    return emit(ctx, os.str());
}

int cmd_basis(Ctx& ctx, const std::vector<std::string>& args) {
    require_argc(args, 2, "hmf4 basis <k> <kind>");
    long k = parse_long(args[0], "k");
    if (k < 0) throw DomainError("k must be >= 0");
    hmf4::SpaceKind kind = parse_kind(args[1]);
    long prec = ctx.prec > 0 ? ctx.prec : 4 * (k / 2 + 2) + 8;
    FormSpace sp = build_space(k, kind, prec);
    echo(ctx, "basis", prec, !ctx.prec_fixed);

    long show = std::min<long>(prec, 16);
    std::ostringstream os;
    if (ctx.format == "json") {
        json o;
        o["schema_version"] = kSchemaVersion;
        o["command"] = "basis";
        o["k"] = k;
        o["weight"] = sp.weight.str();
        o["kind"] = hmf4::kind_str(kind);
        o["bits"] = ctx.bits;
        o["prec"] = prec;
        o["dim"] = sp.dim();
        json basis = json::array();
        for (long i = 0; i < sp.dim(); ++i) {
            json b;
            b["element"] = ring_str(sp.basis_elems[static_cast<size_t>(i)]);
            json monos = json::array();
            for (const auto& [key, c] : sp.basis_elems[static_cast<size_t>(i)].terms())
                monos.push_back({{"theta_exp", key.first},
                                 {"f2_exp", key.second},
                                 {"coefficient", hmf4::rat_str(c)}});
            b["monomials"] = monos;
            json coeffs = json::array();
            for (long nidx = 0; nidx < show; ++nidx)
                coeffs.push_back(
                    hmf4::rat_str(sp.basis_series[static_cast<size_t>(i)].coeff(nidx)));
            b["coefficients"] = coeffs;
            b["pivot"] = sp.pivots[static_cast<size_t>(i)];
            basis.push_back(b);
        }
        o["basis"] = basis;
        os << o.dump(2) << "\n";
    } else if (ctx.format == "csv") {
        os << "element,theta_exp,f2_exp,coefficient\n";
        for (long i = 0; i < sp.dim(); ++i)
            for (const auto& [key, c] : sp.basis_elems[static_cast<size_t>(i)].terms())
                os << i << "," << key.first << "," << key.second << ","
                   << hmf4::rat_str(c) << "\n";
    } else {
        os << "weight " << sp.weight.str() << " " << hmf4::kind_str(kind) << " dim "
           << sp.dim() << " (bits=" << ctx.bits << " prec=" << prec << ")\n";
        for (long i = 0; i < sp.dim(); ++i) {
            os << "[" << i << "] " << ring_str(sp.basis_elems[static_cast<size_t>(i)])
               << "\n    q-expansion: "
               << series_prefix(sp.basis_series[static_cast<size_t>(i)], show, true)
               << ",...\n";
        }
    }
    return emit(ctx, os.str());
}

int cmd_hecke(Ctx& ctx, const std::vector<std::string>& args) {
    require_argc(args, 3, "hmf4 hecke <k> <sign> <primes>");
    long k = parse_long(args[0], "k");
    if (k < 0) throw DomainError("k must be >= 0");
    int sign = parse_sign(args[1]);
    std::vector<long> primes;
    {
        std::stringstream ss(args[2]);
        std::string tok;
        while (std::getline(ss, tok, ',')) primes.push_back(parse_long(tok, "prime"));
        if (primes.empty()) throw DomainError("need at least one prime");
    }
    long pmax = *std::max_element(primes.begin(), primes.end());
    long prec = ctx.prec > 0 ? ctx.prec : pmax * pmax * (k / 2 + 2) + 8;
    FormSpace sp = hmf4::eigen_space(k, sign, prec);
    echo(ctx, "hecke", prec, !ctx.prec_fixed);

    std::vector<hmf4::HeckeMatrix> mats;
    std::vector<std::vector<Rat>> cps;
    std::vector<Eigenform> eigens;
    if (sp.dim() > 0) {
        for (long p : primes) {
            mats.push_back(hmf4::t_p2_matrix(sp, p));
            cps.push_back(hmf4::characteristic_polynomial(mats.back()));
        }
        eigens = hmf4::eigen_decompose(sp, primes, ctx.bits);
    }

    long show = std::min<long>(prec - 1, 10);
    std::ostringstream os;
    if (ctx.format == "json") {
        json o;
        o["schema_version"] = kSchemaVersion;
        o["command"] = "hecke";
        o["k"] = k;
        o["sign"] = sign > 0 ? "+" : "-";
        o["bits"] = ctx.bits;
        o["prec"] = prec;
        o["dim"] = sp.dim();
        json jmats = json::array();
        for (size_t m = 0; m < mats.size(); ++m) {
            json jm;
            jm["p"] = mats[m].p;
            json rows = json::array();
            for (const auto& row : mats[m].entries) {
                json r = json::array();
                for (const Rat& e : row) r.push_back(hmf4::rat_str(e));
                rows.push_back(r);
            }
            jm["matrix"] = rows;
            json cp = json::array();
            for (const Rat& c : cps[m]) cp.push_back(hmf4::rat_str(c));
            jm["char_poly"] = cp;
            jmats.push_back(jm);
        }
        o["operators"] = jmats;
        json jeig = json::array();
        for (const Eigenform& e : eigens) {
            json je;
            je["label"] = e.label;
            je["exact"] = e.exact;
            json ev;
            for (const auto& [p, lam] : e.eigenvalues) {
                if (e.exact)
                    ev[std::to_string(p)] = hmf4::rat_str(e.eigenvalues_exact.at(p));
                else
                    ev[std::to_string(p)] = lam.str(ctx.digits());
            }
            je["eigenvalues"] = ev;
            json co = json::array();
            for (long nidx = 1; nidx <= show; ++nidx) {
                if (e.exact)
                    co.push_back(hmf4::rat_str(e.series().coeff(nidx)));
                else
                    co.push_back(e.coeffs[static_cast<size_t>(nidx)].str(ctx.digits()));
            }
            je["coefficients_from_n1"] = co;
            jeig.push_back(je);
        }
        o["eigenforms"] = jeig;
        os << o.dump(2) << "\n";
    } else if (ctx.format == "csv") {
        os << "label,prime,eigenvalue\n";
        for (const Eigenform& e : eigens)
            for (const auto& [p, lam] : e.eigenvalues)
                os << e.label << "," << p << ","
                   << (e.exact ? hmf4::rat_str(e.eigenvalues_exact.at(p))
                               : lam.str(ctx.digits()))
                   << "\n";
    } else {
        os << "weight " << sp.weight.str() << " sign " << (sign > 0 ? "+" : "-")
           << " dim " << sp.dim() << " (bits=" << ctx.bits << " prec=" << prec
           << ")\n";
        for (size_t m = 0; m < mats.size(); ++m) {
            os << "T(" << mats[m].p << "^2) matrix:\n";
            for (const auto& row : mats[m].entries) {
                os << "  [";
                for (size_t j = 0; j < row.size(); ++j)
                    os << (j ? ", " : " ") << hmf4::rat_str(row[j]);
                os << " ]\n";
            }
            os << "  char poly: " << poly_str(cps[m]) << "\n";
        }
        for (const Eigenform& e : eigens) {
            os << e.label << (e.exact ? " (exact)" : " (embedded)") << ":";
            for (const auto& [p, lam] : e.eigenvalues) {
                os << " lambda_" << p << "=";
                if (e.exact)
                    os << hmf4::rat_str(e.eigenvalues_exact.at(p));
                else
                    os << lam.str(ctx.digits());
            }
            os << "\n  a(1.." << show << ") = ";
            for (long nidx = 1; nidx <= show; ++nidx) {
                if (nidx > 1) os << ", ";
                if (e.exact)
                    os << hmf4::rat_str(e.series().coeff(nidx));
                else
                    os << e.coeffs[static_cast<size_t>(nidx)].str(12);
            }
            os << "\n";
        }
    }
    return emit(ctx, os.str());
}

// Eigenform / witness selection shared by lstar: "+", "-", "+N", "-N".
struct SelectedForm {
    std::string label;
    Weight w;
    int sign;
    bool direct;          // evaluate from the exact series below
    Series series;        // when direct
    FormSpace space;      // when !direct: combine over the basis
    std::vector<APReal> coords;
};

SelectedForm select_form(long k, const std::string& sel, long prec, long bits) {
    if (sel.empty()) throw DomainError("empty form selector");
    int sign = sel[0] == '+' ? +1 : sel[0] == '-' ? -1 : 0;
    if (sign == 0)
        throw DomainError("form selector must be '+', '-', '+N' or '-N', got '" + sel +
                          "'");
    Weight w = Weight::half_integral(k);
    if (sel.size() == 1) {
        RingElement g = sign > 0 ? hmf4::plus_witness(k) : hmf4::minus_witness(k);
        std::string label =
            std::string(sign > 0 ? "plus" : "minus") + "_form(" + std::to_string(k) + ")";
        return {label, w, sign, true, g.expand(prec), FormSpace{}, {}};
    }
    long index = parse_long(sel.substr(1), "eigenform index");
    FormSpace sp = hmf4::eigen_space(k, sign, prec);
    if (index < 1 || index > sp.dim())
        throw DomainError("eigenform index " + std::to_string(index) +
                          " out of range: dim is " + std::to_string(sp.dim()));
    std::vector<Eigenform> eigens = hmf4::eigen_decompose(sp, {3, 5, 7}, bits);
    Eigenform& e = eigens[static_cast<size_t>(index - 1)];
    if (e.exact)
        return {e.label, w, sign, true, e.series(), FormSpace{}, {}};
    SelectedForm out{e.label, w, sign, false, Series(1), std::move(sp), e.coords};
    return out;
}

// L* of the selected form by the stated route, combining basis values
// when the eigenform is not exact over the rationals.
LValue lstar_of(const SelectedForm& f, const APComplex& s, long bits, bool quadrature) {
    auto one = [&](const Series& ser) {
        if (quadrature)
            return hmf4::lstar_quadrature(ser, hmf4::scale(Rat(f.sign), ser), f.w, s,
                                          bits);
        return hmf4::lstar_eigen(ser, f.w, f.sign, s, bits);
    };
    if (f.direct) {
        LValue v = one(f.series);
        v.form_id = f.label + "|" + v.form_id;
        return v;
    }
    long wb = bits;
    LValue total;
    total.s = s;
    total.value = APComplex(wb);
    total.tail_bound = APReal(wb);
    total.round_bound = APReal(wb);
    APReal scale_max(wb);
    for (long j = 0; j < f.space.dim(); ++j) {
        const APReal& c = f.coords[static_cast<size_t>(j)];
        if (c.is_zero()) continue;
        LValue part = one(f.space.basis_series[static_cast<size_t>(j)]);
        total.value = total.value + c * part.value;
        total.tail_bound += abs(c) * part.tail_bound;
        total.round_bound += abs(c) * part.round_bound;
        scale_max = max(scale_max, abs(c) * abs(part.value));
        total.terms_used = std::max(total.terms_used, part.terms_used);
        total.method = part.method;
    }
    total.round_bound += (f.space.dim() + 2) * scale_max * hmf4::epsilon_at(bits, 8);
    total.method += "(combined)";
    total.form_id = f.label;
    return total;
}

int cmd_lstar(Ctx& ctx, const std::vector<std::string>& args, bool cross_check) {
    require_argc(args, 3, "hmf4 lstar <k> <+|-|+N|-N> <s> [--cross-check]");
    long k = parse_long(args[0], "k");
    long prec = ctx.prec > 0 ? ctx.prec : std::max((3 * ctx.bits) / 10 + 96,
                                                   49 * (k / 2 + 2));
    APComplex s = parse_complex(args[2], ctx.bits + 48);
    SelectedForm f = select_form(k, args[1], prec, ctx.bits);
    echo(ctx, "lstar", prec, !ctx.prec_fixed);

    LValue v = lstar_of(f, s, ctx.bits, false);
    APReal budget = hmf4::lvalue_budget(v);
    LValue q;
    APReal diff;
    bool cross_ok = true;
    if (cross_check) {
        q = lstar_of(f, s, ctx.bits, true);
        diff = abs(v.value - q.value);
        cross_ok = diff <= budget + hmf4::lvalue_budget(q);
    }

    long digits = ctx.digits();
    std::ostringstream os;
    if (ctx.format == "json") {
        json o;
        o["schema_version"] = kSchemaVersion;
        o["command"] = "lstar";
        o["k"] = k;
        o["form"] = f.label;
        o["bits"] = ctx.bits;
        o["prec"] = prec;
        o["lstar"] = lvalue_json(v, digits);
        if (cross_check) {
            json c;
            c["quadrature"] = lvalue_json(q, digits);
            c["discrepancy"] = diff.str(8);
            c["within_budget"] = cross_ok;
            o["cross_check"] = c;
        }
        os << o.dump(2) << "\n";
    } else if (ctx.format == "csv") {
        os << "s,lstar,tail_bound,method\n";
        os << v.s.str(digits) << "," << v.value.str(digits) << ","
           << hmf4::lvalue_budget(v).str(8) << "," << v.method << "\n";
        if (cross_check)
            os << q.s.str(digits) << "," << q.value.str(digits) << ","
               << hmf4::lvalue_budget(q).str(8) << "," << q.method << "\n";
    } else {
        os << "form      = " << f.label << "  (weight " << f.w.str() << ", sign "
           << (f.sign > 0 ? "+" : "-") << ", bits=" << ctx.bits << ", prec=" << prec
           << ")\n";
        os << "s         = " << v.s.str(digits) << "\n";
        os << "L*(f,s)   = " << v.value.str(digits) << "\n";
        os << "tail      = " << v.tail_bound.str(8) << "\n";
        os << "rounding  = " << v.round_bound.str(8) << "\n";
        os << "budget    = " << budget.str(8) << "\n";
        os << "terms     = " << v.terms_used << "  method = " << v.method << "\n";
        if (cross_check) {
            os << "quadrature = " << q.value.str(digits) << "  (terms " << q.terms_used
               << ")\n";
            os << "discrepancy = " << diff.str(8) << "  combined budget = "
               << (budget + hmf4::lvalue_budget(q)).str(8)
               << (cross_ok ? "  [within budget]" : "  [EXCEEDS BUDGET]") << "\n";
        }
    }
    int rc = emit(ctx, os.str());
    if (rc != 0) return rc;
    return cross_ok ? 0 : 1;
}

int cmd_scan(Ctx& ctx, const std::vector<std::string>& args) {
    require_argc(args, 5, "hmf4 scan <k> <sign> <lo> <hi> <step>");
    long k = parse_long(args[0], "k");
    int sign = parse_sign(args[1]);
    Rat lo = parse_rat(args[2]);
    Rat hi = parse_rat(args[3]);
    Rat step = parse_rat(args[4]);
    long prec = ctx.prec > 0 ? ctx.prec : (3 * ctx.bits) / 10 + 96;
    RingElement g = sign > 0 ? hmf4::plus_witness(k) : hmf4::minus_witness(k);
    Series gs = g.expand(prec);
    Weight w = Weight::half_integral(k);
    echo(ctx, "scan", prec, !ctx.prec_fixed);

    std::vector<hmf4::ScanPoint> pts =
        hmf4::scan_real(gs, w, sign, lo, hi, step, ctx.bits);

    // sign-change intervals between certified-sign points; grid points
    // whose value sits inside the error budget (sign 0) are skipped, so
    // a -,0,+ run is one change bracketing the zero
    std::vector<std::pair<Rat, Rat>> changes;
    {
        int last = 0;
        Rat last_sigma;
        for (const auto& p : pts) {
            if (p.sign == 0) continue;
            if (last != 0 && p.sign != last) changes.emplace_back(last_sigma, p.sigma);
            last = p.sign;
            last_sigma = p.sigma;
        }
    }

    long digits = ctx.digits();
    std::ostringstream os;
    if (ctx.format == "json") {
        json o;
        o["schema_version"] = kSchemaVersion;
        o["command"] = "scan";
        o["k"] = k;
        o["sign"] = sign > 0 ? "+" : "-";
        o["form"] = std::string(sign > 0 ? "plus" : "minus") + "_form(" +
                    std::to_string(k) + ")";
        o["bits"] = ctx.bits;
        o["prec"] = prec;
        json rows = json::array();
        for (const auto& p : pts) {
            json r;
            r["sigma"] = rat_decimal(p.sigma);
            r["lstar"] = p.lvalue.value.real().str(digits);
            r["sign"] = p.sign;
            r["tail_bound"] = hmf4::lvalue_budget(p.lvalue).str(8);
            rows.push_back(r);
        }
        o["rows"] = rows;
        json ch = json::array();
        for (const auto& [a, b] : changes)
            ch.push_back({{"from", rat_decimal(a)}, {"to", rat_decimal(b)}});
        json summary;
        summary["sign_changes"] = ch;
        o["summary"] = summary;
        os << o.dump(2) << "\n";
    } else {
        os << "sigma,lstar,sign,tail_bound\n";
        for (const auto& p : pts)
            os << rat_decimal(p.sigma) << "," << p.lvalue.value.real().str(digits)
               << "," << p.sign << "," << hmf4::lvalue_budget(p.lvalue).str(8) << "\n";
        if (ctx.format == "text") {
            os << "# bits=" << ctx.bits << " prec=" << prec << " sign_changes=";
            os << changes.size();
            for (const auto& [a, b] : changes)
                os << " (" << rat_decimal(a) << "," << rat_decimal(b) << ")";
            os << "\n";
        }
    }
    return emit(ctx, os.str());
}

int cmd_verify(Ctx& ctx, long kmax) {
    long prec = ctx.prec > 0 ? ctx.prec : 300;
    echo(ctx, "verify", prec, !ctx.prec_fixed);
    json report = hmf4::verify::full_report(kmax, ctx.bits, prec);
    // the CLI envelope carries the schema version up front
    json wrapped;
    wrapped["schema_version"] = kSchemaVersion;
    for (auto& [key, val] : report.items()) wrapped[key] = val;

    long fails = report["summary"]["fail"].get<long>();
    std::ostringstream os;
    if (ctx.format == "text") {
        os << "verification report (k_max=" << kmax << " bits=" << ctx.bits
           << " prec=" << prec << ")\n";
        for (const auto& c : report["checks"]) {
            std::string st = c["status"].get<std::string>();
            for (auto& ch : st) ch = static_cast<char>(std::toupper(ch));
            os << "  " << st << "  " << c["check_id"].get<std::string>() << "  ["
               << c["paper_anchor"].get<std::string>() << "]";
            if (c.contains("measured"))
                os << "  measured=" << c["measured"].dump()
                   << " tolerance=" << c["tolerance"].dump();
            os << "\n";
        }
        os << "summary: pass=" << report["summary"]["pass"].get<long>()
           << " fail=" << fails
           << " skipped=" << report["summary"]["skipped"].get<long>() << "\n";
    } else if (ctx.format == "csv") {
        os << "check_id,status,paper_anchor,measured,tolerance,seconds\n";
        for (const auto& c : report["checks"]) {
            os << c["check_id"].get<std::string>() << ","
               << c["status"].get<std::string>() << ","
               << c["paper_anchor"].get<std::string>() << ","
               << (c.contains("measured") ? c["measured"].dump() : "") << ","
               << c["tolerance"].dump() << "," << c["seconds"].dump() << "\n";
        }
    } else {
        os << wrapped.dump(2) << "\n";
    }
    int rc = emit(ctx, os.str());
    if (rc != 0) return rc;
    return fails == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"half-integral weight forms on level 4: exact q-expansions, Hecke "
                 "eigenforms, completed L-values with certified bounds, and the "
                 "verification suite"};
    Ctx ctx;
    // the global options are registered on the app and again on every
    // subcommand, so they are accepted on either side of the subcommand
    // name; positionals (which may look like options, e.g. a grid bound
    // of -2) are collected via allow_extras and validated by hand
    auto add_globals = [&ctx](CLI::App* c) {
        c->add_option("--bits", ctx.bits, "working precision in bits (default 128)")
            ->check(CLI::Range(48L, 1L << 20));
        c->add_option("--prec", ctx.prec,
                      "series precision = number of q-expansion coefficients "
                      "(default: per-command automatic)");
        c->add_option("--format", ctx.format, "output format (default text)")
            ->check(CLI::IsMember({"json", "csv", "text"}));
        c->add_option("--out", ctx.out_file, "write output to FILE instead of stdout");
    };
    add_globals(&app);

    CLI::App* c_expand =
        app.add_subcommand("expand", "exact coefficients of a named form");
    CLI::App* c_basis = app.add_subcommand("basis", "echelonized basis of a space");
    CLI::App* c_hecke =
        app.add_subcommand("hecke", "Hecke operator matrices and eigenforms");
    CLI::App* c_lstar = app.add_subcommand("lstar", "completed L-value at a point");
    CLI::App* c_scan = app.add_subcommand("scan", "L-values on a real grid (CSV)");
    CLI::App* c_verify =
        app.add_subcommand("verify", "run the verification suites and report");
    bool cross_check = false;
    c_lstar->add_flag("--cross-check", cross_check,
                      "also evaluate via quadrature and compare");
    long kmax = 10;
    c_verify->add_option("--kmax", kmax, "largest k for the theorem suites")
        ->check(CLI::Range(0L, 64L));
    for (CLI::App* c : {c_expand, c_basis, c_hecke, c_lstar, c_scan, c_verify}) {
        add_globals(c);
        c->allow_extras();
    }
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    ctx.prec_fixed = ctx.prec > 0;

    try {
        if (c_expand->parsed()) return cmd_expand(ctx, c_expand->remaining());
        if (c_basis->parsed()) return cmd_basis(ctx, c_basis->remaining());
        if (c_hecke->parsed()) return cmd_hecke(ctx, c_hecke->remaining());
        if (c_lstar->parsed()) return cmd_lstar(ctx, c_lstar->remaining(), cross_check);
        if (c_scan->parsed()) return cmd_scan(ctx, c_scan->remaining());
        if (c_verify->parsed()) return cmd_verify(ctx, kmax);
        std::cerr << app.help();
        return 2;
    } catch (const InsufficientPrecision& e) {
        std::cerr << "hmf4: " << e.what() << "\n";
        std::cerr << "hmf4: rerun with --prec " << e.required_prec << " or higher\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "hmf4: " << e.what() << "\n";
        return 2;
    } catch (const ConsistencyError& e) {
        std::cerr << "hmf4: internal consistency check failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "hmf4: " << e.what() << "\n";
        return 1;
    }
}
