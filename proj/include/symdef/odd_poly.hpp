#ifndef SYMDEF_ODD_POLY_HPP
#define SYMDEF_ODD_POLY_HPP

#include "symdef/base_series.hpp"
#include "symdef/koszul.hpp"

#include <map>
#include <optional>
#include <vector>

namespace symdef {

// Strictly increasing generator indices (1-based).
using OddKey = std::vector<int>;

// Sign of merging two sorted odd words by concatenation-then-sort; nullopt if
// they share a generator (odd square).
inline std::optional<int> odd_merge(const OddKey& a, const OddKey& b, OddKey& out) {
    out.clear();
    out.reserve(a.size() + b.size());
    int inversions = 0;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return std::nullopt;
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else {
            // b[j] crosses the remaining a-generators
            inversions += static_cast<int>(a.size() - i);
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return (inversions & 1) ? -1 : 1;
}

// Polynomials in m anticommuting degree-1 generators over BaseSeries.
// A stored monomial means (parameter part) * (x-polynomial) * g_{i_1}...g_{i_k}
// with i_1 < ... < i_k; the scalar coefficient sits to the left of the odd word.
// Tag distinguishes the generator alphabet (tangent vs cotangent frame).
template <class Tag>
class OddPoly {
public:
    using Terms = std::map<OddKey, BaseSeries>;

    OddPoly() = default;
    explicit OddPoly(Ctx ctx) : ctx_(std::move(ctx)) {}

    static OddPoly zero(const Ctx& ctx) { return OddPoly(ctx); }

    static OddPoly scalar(const Ctx& ctx, BaseSeries c) {
        OddPoly p(ctx);
        p.add_term({}, std::move(c));
        return p;
    }

    static OddPoly generator(const Ctx& ctx, int i) {
        if (i < 1 || i > ctx->m) throw argument_error("OddPoly::generator: index out of range");
        OddPoly p(ctx);
        p.add_term({i}, BaseSeries::constant(ctx, Rat(1)));
        return p;
    }

    static OddPoly monomial(const Ctx& ctx, OddKey key, BaseSeries c) {
        for (size_t i = 0; i + 1 < key.size(); ++i)
            if (key[i] >= key[i + 1]) throw argument_error("OddPoly::monomial: key not strictly increasing");
        if (!key.empty() && (key.front() < 1 || key.back() > ctx->m))
            throw argument_error("OddPoly::monomial: index out of range");
        OddPoly p(ctx);
        p.add_term(std::move(key), std::move(c));
        return p;
    }

    const Ctx& ctx() const { return ctx_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const OddKey& key, const BaseSeries& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(key, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    OddPoly& operator+=(const OddPoly& o) {
        require_same_ctx(ctx_, o.ctx_, "OddPoly::+");
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    OddPoly& operator-=(const OddPoly& o) {
        require_same_ctx(ctx_, o.ctx_, "OddPoly::-");
        for (const auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }
    friend OddPoly operator+(OddPoly a, const OddPoly& b) { a += b; return a; }
    friend OddPoly operator-(OddPoly a, const OddPoly& b) { a -= b; return a; }
    friend OddPoly operator-(const OddPoly& a) {
        OddPoly r(a.ctx_);
        for (const auto& [k, c] : a.terms_) r.terms_[k] = -c;
        return r;
    }

    OddPoly& operator*=(const Rat& c) {
        if (symdef::is_zero(c)) { terms_.clear(); return *this; }
        for (auto& [k, v] : terms_) v *= c;
        return *this;
    }
    friend OddPoly operator*(OddPoly a, const Rat& c) { a *= c; return a; }
    friend OddPoly operator*(const Rat& c, OddPoly a) { a *= c; return a; }

    // Left multiplication by a scalar series; nothing crosses the odd word.
    OddPoly left_mul(const BaseSeries& c) const {
        OddPoly r(ctx_);
        for (const auto& [k, v] : terms_) r.add_term(k, c * v);
        return r;
    }

    // Graded-commutative product. The left factor's odd word crosses each
    // parameter monomial of the right factor's coefficient.
    friend OddPoly operator*(const OddPoly& a, const OddPoly& b) {
        require_same_ctx(a.ctx_, b.ctx_, "OddPoly::*");
        const TruncationContext& tc = *a.ctx_;
        OddPoly r(a.ctx_);
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                OddKey merged;
                auto msign = odd_merge(ka, kb, merged);
                if (!msign) continue;
                const int word_len = static_cast<int>(ka.size());
                BaseSeries coeff(a.ctx_);
                for (const auto& [pka, pa] : ca.terms())
                    for (const auto& [pkb, pb] : cb.terms()) {
                        ParamKey key;
                        int psign = 1;
                        if (!mul_param_keys(tc, pka, pkb, key, psign)) continue;
                        int sign = *msign * psign;
                        if ((word_len & 1) && (pkb.degree(tc) & 1)) sign = -sign;
                        Poly prod = pa * pb;
                        if (sign < 0) prod *= Rat(-1);
                        coeff.add_term(key, prod);
                    }
                r.add_term(merged, coeff);
            }
        return r;
    }

    // Left partial derivative with respect to generator i: an odd operator of
    // degree -1, so it crosses the parameter part of each coefficient monomial.
    OddPoly partial_generator(int i) const {
        if (i < 1 || i > ctx_->m) throw argument_error("OddPoly::partial_generator: index out of range");
        const TruncationContext& tc = *ctx_;
        OddPoly r(ctx_);
        for (const auto& [k, c] : terms_) {
            int pos = -1;
            for (size_t t = 0; t < k.size(); ++t)
                if (k[t] == i) { pos = static_cast<int>(t); break; }
            if (pos < 0) continue;
            OddKey rest;
            rest.reserve(k.size() - 1);
            for (size_t t = 0; t < k.size(); ++t)
                if (static_cast<int>(t) != pos) rest.push_back(k[t]);
            const int slot_sign = (pos & 1) ? -1 : 1;
            BaseSeries coeff(ctx_);
            for (const auto& [pk, p] : c.terms()) {
                int sign = slot_sign;
                if (pk.degree(tc) & 1) sign = -sign;
                coeff.add_term(pk, sign < 0 ? -p : p);
            }
            r.add_term(rest, coeff);
        }
        return r;
    }

    // Right partial derivative with respect to generator i; no coefficient
    // crossing, slot sign counted from the right end of the word.
    OddPoly partial_generator_right(int i) const {
        if (i < 1 || i > ctx_->m) throw argument_error("OddPoly::partial_generator_right: index out of range");
        OddPoly r(ctx_);
        for (const auto& [k, c] : terms_) {
            int pos = -1;
            for (size_t t = 0; t < k.size(); ++t)
                if (k[t] == i) { pos = static_cast<int>(t); break; }
            if (pos < 0) continue;
            OddKey rest;
            rest.reserve(k.size() - 1);
            for (size_t t = 0; t < k.size(); ++t)
                if (static_cast<int>(t) != pos) rest.push_back(k[t]);
            const int from_right = static_cast<int>(k.size()) - 1 - pos;
            BaseSeries coeff = c;
            if (from_right & 1) coeff *= Rat(-1);
            r.add_term(rest, coeff);
        }
        return r;
    }

    // Coefficient-wise d/dx_i (even, no signs).
    OddPoly derivative_x(int i) const {
        OddPoly r(ctx_);
        for (const auto& [k, c] : terms_) r.add_term(k, c.derivative(i));
        return r;
    }

    OddPoly shift_eps(int k) const {
        OddPoly r(ctx_);
        for (const auto& [key, c] : terms_) r.add_term(key, c.shift_eps(k));
        return r;
    }

    // Intrinsic degree: odd-word length plus parameter degree, when homogeneous.
    std::optional<int> homogeneous_degree() const {
        std::optional<int> deg;
        for (const auto& [k, c] : terms_)
            for (const auto& [pk, p] : c.terms()) {
                int d = static_cast<int>(k.size()) + pk.degree(*ctx_);
                if (!deg) deg = d;
                else if (*deg != d) return std::nullopt;
            }
        if (!deg) deg = 0;
        return deg;
    }

    int m_order() const {
        int best = kInfiniteOrder;
        for (const auto& [k, c] : terms_) {
            int o = c.m_order();
            if (o < best) best = o;
        }
        return best;
    }

    bool laurent_free() const {
        for (const auto& [k, c] : terms_)
            if (!c.laurent_free()) return false;
        return true;
    }

    BaseSeries coefficient(const OddKey& key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? BaseSeries::zero(ctx_) : it->second;
    }

    bool operator==(const OddPoly& o) const { return terms_ == o.terms_; }
    bool operator!=(const OddPoly& o) const { return !(*this == o); }

private:
    Ctx ctx_;
    Terms terms_;
};

} // namespace symdef

#endif
