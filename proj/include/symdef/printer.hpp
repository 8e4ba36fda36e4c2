#ifndef SYMDEF_PRINTER_HPP
#define SYMDEF_PRINTER_HPP

#include "symdef/forms.hpp"
#include "symdef/polydiff.hpp"

#include <sstream>
#include <string>

namespace symdef {

// Canonical text forms. Deterministic: terms appear in storage order
// (parameter key, then x-monomial, odd word outermost), coefficients print as
// reduced rationals, unit exponents are omitted, a coefficient of 1 is
// dropped when other factors are present.

namespace printer_detail {

inline void append_factor(std::string& out, const std::string& f) {
    if (!out.empty()) out += " * ";
    out += f;
}

inline std::string power(const std::string& base, int e) {
    if (e == 1) return base;
    return base + "^" + std::to_string(e);
}

inline std::string mono_factors(const TruncationContext& tc, const ParamKey& pk, const XMono& xe) {
    std::string out;
    if (pk.k0 != 0) append_factor(out, power("eps", pk.k0));
    for (int a = 0; a < tc.g; ++a)
        if (pk.kp[static_cast<size_t>(a)] != 0)
            append_factor(out, power("e" + std::to_string(a + 1), pk.kp[static_cast<size_t>(a)]));
    for (int i = 0; i < tc.m; ++i)
        if (xe[static_cast<size_t>(i)] != 0)
            append_factor(out, power("x" + std::to_string(i + 1), xe[static_cast<size_t>(i)]));
    return out;
}

inline void append_term(std::string& out, const Rat& c, const std::string& factors) {
    if (!out.empty()) out += " + ";
    if (factors.empty()) {
        out += to_string(c);
    } else if (c == Rat(1)) {
        out += factors;
    } else {
        out += to_string(c) + " * " + factors;
    }
}

} // namespace printer_detail

inline std::string to_text(const BaseSeries& s) {
    if (s.is_zero()) return "0";
    const TruncationContext& tc = *s.ctx();
    std::string out;
    for (const auto& [pk, poly] : s.terms())
        for (const auto& [xe, c] : poly.terms())
            printer_detail::append_term(out, c, printer_detail::mono_factors(tc, pk, xe));
    return out;
}

namespace printer_detail {

template <class Tag>
inline std::string odd_poly_text(const OddPoly<Tag>& v, const char* gen) {
    if (v.is_zero()) return "0";
    const TruncationContext& tc = *v.ctx();
    std::string out;
    for (const auto& [key, coeff] : v.terms()) {
        std::string word;
        for (size_t i = 0; i < key.size(); ++i) {
            if (i) word += "^";
            word += gen + std::to_string(key[i]);
        }
        for (const auto& [pk, poly] : coeff.terms())
            for (const auto& [xe, c] : poly.terms()) {
                std::string factors = mono_factors(tc, pk, xe);
                if (!word.empty()) append_factor(factors, word);
                append_term(out, c, factors);
            }
    }
    return out;
}

} // namespace printer_detail

inline std::string to_text(const Polyvector& v) { return printer_detail::odd_poly_text(v, "th"); }
inline std::string to_text(const ExteriorForm& v) { return printer_detail::odd_poly_text(v, "dx"); }

inline std::string to_text(const SuspendedForm& v) {
    if (v.is_zero()) return "0";
    return "s^-1( " + to_text(v.body) + " )";
}

inline std::string to_text(const PolyDiffOp& p) {
    if (p.is_zero()) return "0";
    const TruncationContext& tc = *p.ctx();
    std::string out;
    for (const auto& [sym, coeff] : p.terms()) {
        std::string word;
        if (sym.empty()) {
            word = "D0";
        } else {
            for (size_t j = 0; j < sym.size(); ++j) {
                if (j) word += "⊗";
                word += "D[";
                for (size_t t = 0; t < sym[j].size(); ++t) {
                    if (t) word += ",";
                    word += std::to_string(sym[j][t]);
                }
                word += "]";
            }
        }
        for (const auto& [pk, poly] : coeff.terms())
            for (const auto& [xe, c] : poly.terms()) {
                std::string factors = printer_detail::mono_factors(tc, pk, xe);
                printer_detail::append_factor(factors, word);
                printer_detail::append_term(out, c, factors);
            }
    }
    return out;
}

// Lowest-order monomial of a value, for failure keys in reports.
inline std::string lowest_order_term(const BaseSeries& s) {
    if (s.is_zero()) return "0";
    const ParamKey* best_pk = nullptr;
    const Poly* best_poly = nullptr;
    for (const auto& [pk, poly] : s.terms())
        if (!best_pk || pk.order() < best_pk->order()) {
            best_pk = &pk;
            best_poly = &poly;
        }
    BaseSeries one(s.ctx());
    one.add_term(*best_pk, *best_poly);
    return to_text(one);
}

template <class Tag>
inline std::string lowest_order_term(const OddPoly<Tag>& v) {
    if (v.is_zero()) return "0";
    int best = kInfiniteOrder;
    const OddKey* bk = nullptr;
    const ParamKey* bpk = nullptr;
    const Poly* bp = nullptr;
    for (const auto& [key, c] : v.terms())
        for (const auto& [pk, poly] : c.terms())
            if (pk.order() < best) {
                best = pk.order();
                bk = &key;
                bpk = &pk;
                bp = &poly;
            }
    OddPoly<Tag> one(v.ctx());
    one.add_term(*bk, BaseSeries::monomial(v.ctx(), *bpk, *bp));
    return printer_detail::odd_poly_text(one, std::is_same_v<Tag, ThetaTag> ? "th" : "dx");
}

inline std::string lowest_order_term(const SuspendedForm& v) {
    if (v.is_zero()) return "0";
    return "s^-1( " + lowest_order_term(v.body) + " )";
}

inline std::string lowest_order_term(const PolyDiffOp& p) {
    if (p.is_zero()) return "0";
    int best = kInfiniteOrder;
    const OpSymbol* bs = nullptr;
    const ParamKey* bpk = nullptr;
    const Poly* bp = nullptr;
    for (const auto& [sym, c] : p.terms())
        for (const auto& [pk, poly] : c.terms())
            if (pk.order() < best) {
                best = pk.order();
                bs = &sym;
                bpk = &pk;
                bp = &poly;
            }
    PolyDiffOp one(p.ctx());
    one.add_term(*bs, BaseSeries::monomial(p.ctx(), *bpk, *bp));
    return to_text(one);
}

} // namespace symdef

#endif
