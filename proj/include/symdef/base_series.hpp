#ifndef SYMDEF_BASE_SERIES_HPP
#define SYMDEF_BASE_SERIES_HPP

#include "symdef/poly.hpp"

#include <compare>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace symdef {

// Exponents of one monomial in the deformation parameters:
// eps^k0 * e1^kp[0] * ... * eg^kp[g-1]. k0 may be negative (Laurent window),
// the kp are non-negative, and exponents of odd-degree parameters are 0 or 1.
struct ParamKey {
    int k0 = 0;
    std::vector<int> kp;

    ParamKey() = default;
    ParamKey(int k0_, std::vector<int> kp_) : k0(k0_), kp(std::move(kp_)) {}
    static ParamKey unit(int g) { return ParamKey(0, std::vector<int>(static_cast<size_t>(g), 0)); }

    int param_weight() const {
        int s = 0;
        for (int k : kp) s += k;
        return s;
    }
    // Total order in the parameter ideal; negative eps powers count zero.
    int order() const { return (k0 > 0 ? k0 : 0) + param_weight(); }

    int degree(const TruncationContext& ctx) const {
        int d = 0;
        for (size_t a = 0; a < kp.size(); ++a) d += kp[a] * ctx.param_degree[a];
        return d;
    }

    auto operator<=>(const ParamKey&) const = default;
};

// Composes two parameter monomials. Returns false when the product vanishes
// (an odd parameter squared); otherwise fills `out` and the Koszul sign from
// commuting the right factor's generators into canonical position.
inline bool mul_param_keys(const TruncationContext& ctx, const ParamKey& a, const ParamKey& b,
                           ParamKey& out, int& sign) {
    sign = 1;
    out.k0 = a.k0 + b.k0;
    const size_t g = a.kp.size();
    out.kp.assign(g, 0);
    for (size_t i = 0; i < g; ++i) {
        out.kp[i] = a.kp[i] + b.kp[i];
        if (ctx.param_odd(static_cast<int>(i)) && out.kp[i] > 1) return false;
    }
    // e_b from the right factor crosses e_c from the left factor for c > b.
    int crossings = 0;
    for (size_t bidx = 0; bidx < g; ++bidx) {
        if (!b.kp[bidx] || !ctx.param_odd(static_cast<int>(bidx))) continue;
        for (size_t c = bidx + 1; c < g; ++c)
            if (a.kp[c] && ctx.param_odd(static_cast<int>(c))) crossings += b.kp[bidx] * a.kp[c];
    }
    if (crossings & 1) sign = -sign;
    return true;
}

constexpr int kInfiniteOrder = std::numeric_limits<int>::max();

// The universal scalar: a truncated Laurent-in-eps series over the graded
// parameter ring, with polynomial coefficients in x1..xm.
class BaseSeries {
public:
    using Terms = std::map<ParamKey, Poly>;

    BaseSeries() = default;
    explicit BaseSeries(Ctx ctx) : ctx_(std::move(ctx)) {}

    static BaseSeries zero(const Ctx& ctx) { return BaseSeries(ctx); }

    static BaseSeries constant(const Ctx& ctx, const Rat& c) {
        BaseSeries s(ctx);
        s.add_term(ParamKey::unit(ctx->g), Poly(ctx->m, c));
        return s;
    }

    static BaseSeries from_poly(const Ctx& ctx, Poly p) {
        BaseSeries s(ctx);
        s.add_term(ParamKey::unit(ctx->g), std::move(p));
        return s;
    }

    static BaseSeries variable(const Ctx& ctx, int i) {
        return from_poly(ctx, Poly::variable(ctx->m, i));
    }

    // eps^k
    static BaseSeries eps(const Ctx& ctx, int k = 1) {
        BaseSeries s(ctx);
        ParamKey key = ParamKey::unit(ctx->g);
        key.k0 = k;
        s.add_term(key, Poly(ctx->m, Rat(1)));
        return s;
    }

    // e_a, 1-based
    static BaseSeries param(const Ctx& ctx, int a) {
        if (a < 1 || a > ctx->g) throw argument_error("BaseSeries::param: index out of range");
        BaseSeries s(ctx);
        ParamKey key = ParamKey::unit(ctx->g);
        key.kp[static_cast<size_t>(a - 1)] = 1;
        s.add_term(key, Poly(ctx->m, Rat(1)));
        return s;
    }

    static BaseSeries monomial(const Ctx& ctx, const ParamKey& key, Poly p) {
        BaseSeries s(ctx);
        s.add_term(key, std::move(p));
        return s;
    }

    const Ctx& ctx() const { return ctx_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool retained(const ParamKey& key) const {
        return key.order() <= ctx_->max_order && key.k0 >= ctx_->eps_floor;
    }

    void add_term(const ParamKey& key, const Poly& p) {
        if (p.is_zero() || !retained(key)) return;
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(key, p);
        } else {
            it->second += p;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    BaseSeries& operator+=(const BaseSeries& o) {
        require_same_ctx(ctx_, o.ctx_, "BaseSeries::+");
        for (const auto& [k, p] : o.terms_) add_term(k, p);
        return *this;
    }
    BaseSeries& operator-=(const BaseSeries& o) {
        require_same_ctx(ctx_, o.ctx_, "BaseSeries::-");
        for (const auto& [k, p] : o.terms_) add_term(k, -p);
        return *this;
    }
    friend BaseSeries operator+(BaseSeries a, const BaseSeries& b) { a += b; return a; }
    friend BaseSeries operator-(BaseSeries a, const BaseSeries& b) { a -= b; return a; }
    friend BaseSeries operator-(const BaseSeries& a) {
        BaseSeries r(a.ctx_);
        for (const auto& [k, p] : a.terms_) r.terms_[k] = -p;
        return r;
    }

    friend BaseSeries operator*(const BaseSeries& a, const BaseSeries& b) {
        require_same_ctx(a.ctx_, b.ctx_, "BaseSeries::*");
        BaseSeries r(a.ctx_);
        for (const auto& [ka, pa] : a.terms_)
            for (const auto& [kb, pb] : b.terms_) {
                ParamKey key;
                int sign = 1;
                if (!mul_param_keys(*a.ctx_, ka, kb, key, sign)) continue;
                if (!r.retained(key)) continue;
                Poly prod = pa * pb;
                if (sign < 0) prod *= Rat(-1);
                r.add_term(key, prod);
            }
        return r;
    }

    BaseSeries& operator*=(const Rat& c) {
        if (symdef::is_zero(c)) { terms_.clear(); return *this; }
        for (auto& [k, p] : terms_) p *= c;
        return *this;
    }
    friend BaseSeries operator*(BaseSeries a, const Rat& c) { a *= c; return a; }
    friend BaseSeries operator*(const Rat& c, BaseSeries a) { a *= c; return a; }

    // Coefficient-wise d/dx_i.
    BaseSeries derivative(int i) const {
        BaseSeries r(ctx_);
        for (const auto& [k, p] : terms_) r.add_term(k, p.derivative(i));
        return r;
    }

    // Multiplication by eps^k as an exponent shift.
    BaseSeries shift_eps(int k) const {
        BaseSeries r(ctx_);
        for (const auto& [key, p] : terms_) {
            ParamKey s = key;
            s.k0 += k;
            r.add_term(s, p);
        }
        return r;
    }

    // Restriction eps -> 0. Terms with negative eps exponent make the
    // restriction undefined; the caller must check laurent_free() first.
    BaseSeries at_eps_zero() const {
        BaseSeries r(ctx_);
        for (const auto& [key, p] : terms_)
            if (key.k0 == 0) r.add_term(key, p);
        return r;
    }

    bool laurent_free() const {
        for (const auto& [key, p] : terms_)
            if (key.k0 < 0) return false;
        return true;
    }

    // Minimal order over retained monomials; infinite for the zero series.
    int m_order() const {
        int best = kInfiniteOrder;
        for (const auto& [key, p] : terms_)
            if (key.order() < best) best = key.order();
        return best;
    }

    // Degree if the series is homogeneous as a graded scalar.
    std::optional<int> homogeneous_degree() const {
        std::optional<int> deg;
        for (const auto& [key, p] : terms_) {
            int d = key.degree(*ctx_);
            if (!deg) deg = d;
            else if (*deg != d) return std::nullopt;
        }
        if (!deg) deg = 0; // zero is homogeneous of any degree; report 0
        return deg;
    }

    // Reduction into a context with different cutoffs (same m, g, degrees).
    // Ordinary arithmetic reduces on the fly; this is the explicit quotient map.
    BaseSeries reduce_into(const Ctx& target) const {
        if (target->m != ctx_->m || target->g != ctx_->g || target->param_degree != ctx_->param_degree)
            throw context_error("BaseSeries::reduce_into: incompatible contexts");
        BaseSeries r(target);
        for (const auto& [key, p] : terms_) r.add_term(key, p);
        return r;
    }

    bool operator==(const BaseSeries& o) const { return terms_ == o.terms_; }
    bool operator!=(const BaseSeries& o) const { return !(*this == o); }

private:
    Ctx ctx_;
    Terms terms_;
};

} // namespace symdef

#endif
