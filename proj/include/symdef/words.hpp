#ifndef SYMDEF_WORDS_HPP
#define SYMDEF_WORDS_HPP

#include "symdef/deformation.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace symdef {

// Monomial keys of the three carriers, totally ordered so words have one
// canonical spelling.
template <class V>
struct CarrierTraits;

template <>
struct CarrierTraits<SuspendedForm> {
    using Key = std::tuple<OddKey, ParamKey, XMono>;
    static std::vector<std::pair<Key, Rat>> split(const SuspendedForm& v) {
        std::vector<std::pair<Key, Rat>> out;
        for (const auto& [key, c] : v.body.terms())
            for (const auto& [pk, poly] : c.terms())
                for (const auto& [xe, r] : poly.terms())
                    out.push_back({{key, pk, xe}, r});
        return out;
    }
    static SuspendedForm lift(const Ctx& ctx, const Key& k) {
        return SuspendedForm(ExteriorForm::monomial(
            ctx, std::get<0>(k),
            BaseSeries::monomial(ctx, std::get<1>(k), Poly::monomial(ctx->m, std::get<2>(k), Rat(1)))));
    }
    static int dgla_degree(const Ctx& ctx, const Key& k) {
        return static_cast<int>(std::get<0>(k).size()) - 1 + std::get<1>(k).degree(*ctx);
    }
    static int order(const Key& k) { return std::get<1>(k).order(); }
};

template <>
struct CarrierTraits<Polyvector> {
    using Key = std::tuple<OddKey, ParamKey, XMono>;
    static std::vector<std::pair<Key, Rat>> split(const Polyvector& v) {
        std::vector<std::pair<Key, Rat>> out;
        for (const auto& [key, c] : v.terms())
            for (const auto& [pk, poly] : c.terms())
                for (const auto& [xe, r] : poly.terms())
                    out.push_back({{key, pk, xe}, r});
        return out;
    }
    static Polyvector lift(const Ctx& ctx, const Key& k) {
        return Polyvector::monomial(
            ctx, std::get<0>(k),
            BaseSeries::monomial(ctx, std::get<1>(k), Poly::monomial(ctx->m, std::get<2>(k), Rat(1))));
    }
    static int dgla_degree(const Ctx& ctx, const Key& k) {
        return static_cast<int>(std::get<0>(k).size()) - 1 + std::get<1>(k).degree(*ctx);
    }
    static int order(const Key& k) { return std::get<1>(k).order(); }
};

template <>
struct CarrierTraits<PolyDiffOp> {
    using Key = std::tuple<OpSymbol, ParamKey, XMono>;
    static std::vector<std::pair<Key, Rat>> split(const PolyDiffOp& v) {
        std::vector<std::pair<Key, Rat>> out;
        for (const auto& [sym, c] : v.terms())
            for (const auto& [pk, poly] : c.terms())
                for (const auto& [xe, r] : poly.terms())
                    out.push_back({{sym, pk, xe}, r});
        return out;
    }
    static PolyDiffOp lift(const Ctx& ctx, const Key& k) {
        return PolyDiffOp::term(
            ctx, std::get<0>(k),
            BaseSeries::monomial(ctx, std::get<1>(k), Poly::monomial(ctx->m, std::get<2>(k), Rat(1))));
    }
    static int dgla_degree(const Ctx& ctx, const Key& k) {
        return static_cast<int>(std::get<0>(k).size()) - 1 + std::get<1>(k).degree(*ctx);
    }
    static int order(const Key& k) { return std::get<1>(k).order(); }
};

// A word is a canonically sorted list of monomial factors; a WordSum is a
// rational combination of words. Factors carry suspended degrees
// (dgla degree - 1); equal odd factors square to zero.
template <class V>
struct WordAlgebra {
    using Traits = CarrierTraits<V>;
    using Key = typename Traits::Key;
    using Word = std::vector<Key>;
    using Sum = std::map<Word, Rat>;

    Ctx ctx;

    explicit WordAlgebra(Ctx c) : ctx(std::move(c)) {}

    int factor_degree(const Key& k) const { return Traits::dgla_degree(ctx, k) - 1; }

    // Sorts the word; returns the Koszul sign or 0 when an odd factor repeats.
    int canonicalize(Word& w) const {
        std::vector<int> degs(w.size());
        for (size_t i = 0; i < w.size(); ++i) degs[i] = factor_degree(w[i]);
        int sign = sort_sign(w, degs);
        for (size_t i = 0; i + 1 < w.size(); ++i)
            if (w[i] == w[i + 1] && (factor_degree(w[i]) & 1)) return 0;
        return sign;
    }

    void add(Sum& s, Word w, const Rat& c) const {
        if (symdef::is_zero(c)) return;
        int sign = canonicalize(w);
        if (sign == 0) return;
        Rat v = c * Rat(sign);
        auto it = s.find(w);
        if (it == s.end()) {
            s.emplace(std::move(w), v);
        } else {
            it->second += v;
            if (symdef::is_zero(it->second)) s.erase(it);
        }
    }

    Sum from_value(const V& v) const {
        Sum s;
        for (const auto& [k, r] : Traits::split(v)) add(s, Word{k}, r);
        return s;
    }

    // Multiply every word by one more factor drawn from a value.
    Sum mul_value(const Sum& s, const V& v) const {
        Sum out;
        auto factors = Traits::split(v);
        for (const auto& [w, c] : s)
            for (const auto& [k, r] : factors) {
                Word grown = w;
                grown.push_back(k);
                add(out, std::move(grown), c * r);
            }
        return out;
    }

    // The n-fold word of a value.
    Sum power(const V& v, int n) const {
        Sum s = from_value(v);
        for (int i = 1; i < n; ++i) s = mul_value(s, v);
        return s;
    }

    // Value carried by the length-one words.
    V length_one_value(const Sum& s) const {
        V out = V::zero(ctx);
        for (const auto& [w, c] : s) {
            if (w.size() != 1) continue;
            out += Traits::lift(ctx, w[0]) * c;
        }
        return out;
    }

    // All (p, n-p) shuffle splits with Koszul signs.
    std::vector<std::tuple<Word, Word, int>> comult(const Word& w) const {
        std::vector<std::tuple<Word, Word, int>> out;
        const size_t n = w.size();
        if (n < 2) return out;
        std::vector<int> degs(n);
        for (size_t i = 0; i < n; ++i) degs[i] = factor_degree(w[i]);
        for (size_t mask = 1; mask + 1 < (size_t{1} << n); ++mask) {
            Word left, right;
            int sign = 1;
            int odd_left_tail = 0; // odd count of chosen factors after position i
            // extracting the chosen factors to the front preserving order:
            // each unchosen odd factor passed by a later chosen odd factor flips
            for (size_t i = n; i-- > 0;) {
                if (mask & (size_t{1} << i)) {
                    left.push_back(w[i]);
                } else {
                    right.push_back(w[i]);
                    if ((degs[i] & 1) && (odd_left_tail & 1)) sign = -sign;
                }
                if ((mask & (size_t{1} << i)) && (degs[i] & 1)) ++odd_left_tail;
            }
            std::reverse(left.begin(), left.end());
            std::reverse(right.begin(), right.end());
            out.push_back({std::move(left), std::move(right), sign});
        }
        return out;
    }
};

} // namespace symdef

#endif
