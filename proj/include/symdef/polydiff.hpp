#ifndef SYMDEF_POLYDIFF_HPP
#define SYMDEF_POLYDIFF_HPP

#include "symdef/polyvectors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

namespace symdef {

// Multiset of x-indices, stored sorted. Empty means "no derivative".
using MultiIndex = std::vector<int>;

// Tuple of derivative multi-indices, one per argument slot. The tuple length
// is the arity of the operator term.
using OpSymbol = std::vector<MultiIndex>;

inline MultiIndex multi_union(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r;
    r.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

// Polydifferential operators on R^m: finite sums of
//   coefficient(x; eps, e_a) * d_{alpha_0} x ... x d_{alpha_k}
// acting on k+1 arguments. Terms of different arity may coexist; a term of
// arity k+1 and parameter degree s has degree k + s.
class PolyDiffOp {
public:
    using Terms = std::map<OpSymbol, BaseSeries>;

    PolyDiffOp() = default;
    explicit PolyDiffOp(Ctx ctx) : ctx_(std::move(ctx)) {}

    static PolyDiffOp zero(const Ctx& ctx) { return PolyDiffOp(ctx); }

    // the commutative multiplication, as the arity-2 term with empty indices
    static PolyDiffOp product(const Ctx& ctx) {
        PolyDiffOp p(ctx);
        p.add_term(OpSymbol{{}, {}}, BaseSeries::constant(ctx, Rat(1)));
        return p;
    }

    // a single coordinate derivation d_i as an arity-1 operator
    static PolyDiffOp derivation(const Ctx& ctx, int i) {
        if (i < 1 || i > ctx->m) throw argument_error("PolyDiffOp::derivation: index out of range");
        PolyDiffOp p(ctx);
        p.add_term(OpSymbol{{i}}, BaseSeries::constant(ctx, Rat(1)));
        return p;
    }

    // a function as a 0-ary operator
    static PolyDiffOp function(const Ctx& ctx, BaseSeries f) {
        PolyDiffOp p(ctx);
        p.add_term(OpSymbol{}, std::move(f));
        return p;
    }

    static PolyDiffOp term(const Ctx& ctx, OpSymbol sym, BaseSeries c) {
        for (auto& mi : sym) {
            std::sort(mi.begin(), mi.end());
            for (int v : mi)
                if (v < 1 || v > ctx->m) throw argument_error("PolyDiffOp::term: index out of range");
        }
        PolyDiffOp p(ctx);
        p.add_term(std::move(sym), std::move(c));
        return p;
    }

    const Ctx& ctx() const { return ctx_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const OpSymbol& sym, const BaseSeries& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(sym);
        if (it == terms_.end()) {
            terms_.emplace(sym, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    PolyDiffOp& operator+=(const PolyDiffOp& o) {
        require_same_ctx(ctx_, o.ctx_, "PolyDiffOp::+");
        for (const auto& [s, c] : o.terms_) add_term(s, c);
        return *this;
    }
    PolyDiffOp& operator-=(const PolyDiffOp& o) {
        require_same_ctx(ctx_, o.ctx_, "PolyDiffOp::-");
        for (const auto& [s, c] : o.terms_) add_term(s, -c);
        return *this;
    }
    friend PolyDiffOp operator+(PolyDiffOp a, const PolyDiffOp& b) { a += b; return a; }
    friend PolyDiffOp operator-(PolyDiffOp a, const PolyDiffOp& b) { a -= b; return a; }
    friend PolyDiffOp operator-(const PolyDiffOp& a) {
        PolyDiffOp r(a.ctx_);
        for (const auto& [s, c] : a.terms_) r.terms_[s] = -c;
        return r;
    }
    PolyDiffOp& operator*=(const Rat& c) {
        if (symdef::is_zero(c)) { terms_.clear(); return *this; }
        for (auto& [s, v] : terms_) v *= c;
        return *this;
    }
    friend PolyDiffOp operator*(PolyDiffOp a, const Rat& c) { a *= c; return a; }
    friend PolyDiffOp operator*(const Rat& c, PolyDiffOp a) { a *= c; return a; }

    PolyDiffOp left_mul(const BaseSeries& c) const {
        PolyDiffOp r(ctx_);
        for (const auto& [s, v] : terms_) r.add_term(s, c * v);
        return r;
    }

    // Total degree when homogeneous: (arity - 1) + parameter degree.
    std::optional<int> homogeneous_degree() const {
        std::optional<int> deg;
        for (const auto& [s, c] : terms_)
            for (const auto& [pk, p] : c.terms()) {
                int d = static_cast<int>(s.size()) - 1 + pk.degree(*ctx_);
                if (!deg) deg = d;
                else if (*deg != d) return std::nullopt;
            }
        if (!deg) deg = 0;
        return deg;
    }

    int m_order() const {
        int best = kInfiniteOrder;
        for (const auto& [s, c] : terms_) best = std::min(best, c.m_order());
        return best;
    }

    bool laurent_free() const {
        for (const auto& [s, c] : terms_)
            if (!c.laurent_free()) return false;
        return true;
    }

    PolyDiffOp at_eps_zero() const {
        PolyDiffOp r(ctx_);
        for (const auto& [s, c] : terms_) r.add_term(s, c.at_eps_zero());
        return r;
    }

    // Restriction to terms of one arity.
    PolyDiffOp arity_part(int arity) const {
        PolyDiffOp r(ctx_);
        for (const auto& [s, c] : terms_)
            if (static_cast<int>(s.size()) == arity) r.add_term(s, c);
        return r;
    }

    std::vector<int> arities() const {
        std::vector<int> r;
        for (const auto& [s, c] : terms_) {
            int a = static_cast<int>(s.size());
            if (r.empty() || r.back() != a) r.push_back(a);
        }
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        return r;
    }

    bool operator==(const PolyDiffOp& o) const { return terms_ == o.terms_; }
    bool operator!=(const PolyDiffOp& o) const { return !(*this == o); }

private:
    Ctx ctx_;
    Terms terms_;
};

namespace detail {

// Distributions of a derivative multiset over `targets` labeled slots; each
// element is assigned independently, which realizes the multinomial
// multiplicities exactly.
inline void for_each_distribution(const MultiIndex& alpha, int targets,
                                  const std::function<void(const std::vector<MultiIndex>&)>& fn) {
    std::vector<MultiIndex> parts(static_cast<size_t>(targets));
    std::function<void(size_t)> rec = [&](size_t pos) {
        if (pos == alpha.size()) {
            fn(parts);
            return;
        }
        for (int t = 0; t < targets; ++t) {
            parts[static_cast<size_t>(t)].push_back(alpha[pos]);
            rec(pos + 1);
            parts[static_cast<size_t>(t)].pop_back();
        }
    };
    rec(0);
}

} // namespace detail

namespace detail {

// One term pair of the insertion sum sum_i (-1)^{i k2} P1 (.., P2(..), ..),
// computed on symbols with the Leibniz distribution of the outer slot's
// derivatives over the inner coefficient and inner slots. The inner term's
// parameter part crosses the outer operator, picking up (-1)^{deg(pk2) k1}.
inline void flat_insertion(PolyDiffOp& out, const Ctx& ctx,
                           const OpSymbol& sym1, const ParamKey& pk1, const Poly& poly1,
                           const OpSymbol& sym2, const ParamKey& pk2, const Poly& poly2,
                           int extra_sign) {
    const TruncationContext& tc = *ctx;
    const int k1 = static_cast<int>(sym1.size()) - 1;
    const int k2 = static_cast<int>(sym2.size()) - 1;
    ParamKey pk;
    int param_sign = 1;
    if (!mul_param_keys(tc, pk1, pk2, pk, param_sign)) return;
    int psign = extra_sign * param_sign;
    if ((pk2.degree(tc) & 1) && (k1 & 1)) psign = -psign;
    for (int i = 0; i <= k1; ++i) {
        const int slot_sign = ((i * k2) & 1) ? -1 : 1;
        const int total_sign = slot_sign * psign;
        detail::for_each_distribution(
            sym1[static_cast<size_t>(i)], k2 + 2,
            [&](const std::vector<MultiIndex>& parts) {
                Poly coeff = poly1 * poly2.derivative(parts[0]);
                if (coeff.is_zero()) return;
                if (total_sign < 0) coeff *= Rat(-1);
                OpSymbol sym;
                sym.reserve(sym1.size() + sym2.size());
                for (int a = 0; a < i; ++a) sym.push_back(sym1[static_cast<size_t>(a)]);
                for (int b = 0; b <= k2; ++b)
                    sym.push_back(multi_union(sym2[static_cast<size_t>(b)],
                                              parts[static_cast<size_t>(b) + 1]));
                for (int a = i + 1; a <= k1; ++a) sym.push_back(sym1[static_cast<size_t>(a)]);
                out.add_term(sym, BaseSeries::monomial(ctx, pk, coeff));
            });
    }
}

} // namespace detail

// Insertion sum of whole operators (the braces-style one-sided composition).
inline PolyDiffOp insertion_sum(const PolyDiffOp& p1, const PolyDiffOp& p2) {
    require_same_ctx(p1.ctx(), p2.ctx(), "insertion_sum");
    const Ctx& ctx = p1.ctx();
    PolyDiffOp out(ctx);
    for (const auto& [sym1, c1] : p1.terms())
        for (const auto& [pk1, poly1] : c1.terms())
            for (const auto& [sym2, c2] : p2.terms())
                for (const auto& [pk2, poly2] : c2.terms())
                    detail::flat_insertion(out, ctx, sym1, pk1, poly1, sym2, pk2, poly2, 1);
    return out;
}

// The Gerstenhaber bracket over the graded parameter ring. Per term pair,
//   [t1, t2] = ins(t1, t2) - (-1)^{|t1| |t2|} ins(t2, t1)
// with total degrees |t| = (arity - 1) + parameter degree; this is the scalar
// extension of the complex-coefficient bracket and satisfies graded
// antisymmetry and Jacobi in the total grading.
inline PolyDiffOp gerstenhaber(const PolyDiffOp& p1, const PolyDiffOp& p2) {
    require_same_ctx(p1.ctx(), p2.ctx(), "gerstenhaber");
    const Ctx& ctx = p1.ctx();
    const TruncationContext& tc = *ctx;
    PolyDiffOp out(ctx);
    for (const auto& [sym1, c1] : p1.terms()) {
        const int k1 = static_cast<int>(sym1.size()) - 1;
        for (const auto& [pk1, poly1] : c1.terms()) {
            const int d1 = k1 + pk1.degree(tc);
            for (const auto& [sym2, c2] : p2.terms()) {
                const int k2 = static_cast<int>(sym2.size()) - 1;
                for (const auto& [pk2, poly2] : c2.terms()) {
                    const int d2 = k2 + pk2.degree(tc);
                    detail::flat_insertion(out, ctx, sym1, pk1, poly1, sym2, pk2, poly2, 1);
                    const int swap_sign = ((d1 * d2) & 1) ? 1 : -1;
                    detail::flat_insertion(out, ctx, sym2, pk2, poly2, sym1, pk1, poly1, swap_sign);
                }
            }
        }
    }
    return out;
}

inline PolyDiffOp hochschild_d(const PolyDiffOp& p) {
    return gerstenhaber(PolyDiffOp::product(p.ctx()), p);
}

// Concatenation (cup) product: (P u Q)(a_0..) = P(a_0..a_{k1}) Q(a_{k1+1}..).
inline PolyDiffOp cup(const PolyDiffOp& p, const PolyDiffOp& q) {
    require_same_ctx(p.ctx(), q.ctx(), "cup");
    const Ctx& ctx = p.ctx();
    const TruncationContext& tc = *ctx;
    PolyDiffOp out(ctx);
    for (const auto& [s1, c1] : p.terms())
        for (const auto& [s2, c2] : q.terms()) {
            OpSymbol sym = s1;
            sym.insert(sym.end(), s2.begin(), s2.end());
            for (const auto& [pk1, poly1] : c1.terms())
                for (const auto& [pk2, poly2] : c2.terms()) {
                    ParamKey pk;
                    int sign = 1;
                    if (!mul_param_keys(tc, pk1, pk2, pk, sign)) continue;
                    Poly coeff = poly1 * poly2;
                    if (sign < 0) coeff *= Rat(-1);
                    out.add_term(sym, BaseSeries::monomial(ctx, pk, coeff));
                }
        }
    return out;
}

// Graded evaluation on scalar arguments. Argument parameter monomials cross
// the operator part of each term: for a term of operator degree k and
// arguments with parameter parts e_j,
//   P(e_0 q_0, .., e_k q_k) = (-1)^{k * sum_j deg e_j} e_c e_0..e_k
//                              * p(x) prod_j d_{alpha_j} q_j.
inline BaseSeries eval_op(const PolyDiffOp& p, const std::vector<BaseSeries>& args) {
    const Ctx& ctx = p.ctx();
    const TruncationContext& tc = *ctx;
    BaseSeries out(ctx);
    for (const auto& [sym, c] : p.terms()) {
        if (sym.size() != args.size()) continue; // other arities vanish on this tuple
        const int k_op = static_cast<int>(sym.size()) - 1;
        // differentiate each argument first
        std::vector<BaseSeries> dargs;
        dargs.reserve(args.size());
        bool dead = false;
        for (size_t j = 0; j < args.size(); ++j) {
            require_same_ctx(ctx, args[j].ctx(), "eval_op");
            BaseSeries d = args[j];
            for (int v : sym[j]) d = d.derivative(v);
            if (d.is_zero()) { dead = true; break; }
            dargs.push_back(std::move(d));
        }
        if (dead) continue;
        BaseSeries acc = c;
        for (const auto& d : dargs) {
            BaseSeries shifted(ctx);
            for (const auto& [pk, poly] : d.terms()) {
                int sign = ((pk.degree(tc) & 1) && (k_op & 1)) ? -1 : 1;
                shifted.add_term(pk, sign < 0 ? -poly : poly);
            }
            acc = acc * shifted;
        }
        out += acc;
    }
    return out;
}

// Requires the tuple length to match some arity present in p; 0 on arity
// mismatch is often wrong in calling code, so offer a checked variant.
inline BaseSeries eval_op_checked(const PolyDiffOp& p, const std::vector<BaseSeries>& args) {
    for (int a : p.arities())
        if (a == static_cast<int>(args.size())) return eval_op(p, args);
    throw argument_error("eval_op_checked: no term of matching arity");
}

// Polyvector -> closed polydifferential operator, with the reversed index
// order: a_0 .. a_k pick up d_{i_k} .. d_{i_0}.
inline PolyDiffOp hkr_embed(const Polyvector& v) {
    const Ctx& ctx = v.ctx();
    PolyDiffOp out(ctx);
    for (const auto& [key, c] : v.terms()) {
        const int k1 = static_cast<int>(key.size()); // number of generators
        if (k1 == 0) {
            out.add_term(OpSymbol{}, c);
            continue;
        }
        std::vector<int> tuple(key.begin(), key.end());
        std::sort(tuple.begin(), tuple.end());
        do {
            // sign of the permutation sorted -> tuple
            int sign = 1;
            {
                std::vector<int> tmp = tuple;
                for (size_t i = 0; i < tmp.size(); ++i)
                    for (size_t j = i + 1; j < tmp.size(); ++j)
                        if (tmp[i] > tmp[j]) { std::swap(tmp[i], tmp[j]); sign = -sign; }
            }
            OpSymbol sym(static_cast<size_t>(k1));
            for (int j = 0; j < k1; ++j)
                sym[static_cast<size_t>(j)] = {tuple[static_cast<size_t>(k1 - 1 - j)]};
            out.add_term(sym, sign < 0 ? -c : c);
        } while (std::next_permutation(tuple.begin(), tuple.end()));
    }
    return out;
}

// First-order antisymmetrization: restrict to all-length-one symbols,
// antisymmetrize over the slots with the inverse of the embedding's
// conventions. A chain-level retraction: project(embed(v)) = v and
// project(hochschild_d(P)) = 0.
inline Polyvector hkr_project(const PolyDiffOp& p) {
    const Ctx& ctx = p.ctx();
    Polyvector out(ctx);
    for (const auto& [sym, c] : p.terms()) {
        const int n = static_cast<int>(sym.size());
        if (n == 0) {
            out.add_term({}, c);
            continue;
        }
        bool first_order = true;
        for (const auto& mi : sym)
            if (mi.size() != 1) { first_order = false; break; }
        if (!first_order) continue;
        std::vector<int> tuple(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) tuple[static_cast<size_t>(j)] = sym[static_cast<size_t>(n - 1 - j)][0];
        // duplicates cannot reach an antisymmetric component
        {
            std::vector<int> s = tuple;
            std::sort(s.begin(), s.end());
            if (std::adjacent_find(s.begin(), s.end()) != s.end()) continue;
        }
        int sign = 1;
        std::vector<int> tmp = tuple;
        for (size_t i = 0; i < tmp.size(); ++i)
            for (size_t j = i + 1; j < tmp.size(); ++j)
                if (tmp[i] > tmp[j]) { std::swap(tmp[i], tmp[j]); sign = -sign; }
        BaseSeries coeff = c * (Rat(sign) / factorial(static_cast<unsigned>(n)));
        out.add_term(OddKey(tmp.begin(), tmp.end()), coeff);
    }
    return out;
}

// Bidifferential exponential series for a constant inverse structure:
//   mu = sum_{n>=1} (eps^n / n!) beta^{i1 j1}..beta^{in jn}
//            d_{i1..in} (x) d_{j1..jn},  beta := -alpha,
// normalized so that hkr_project of the eps-coefficient equals alpha. Each
// partial sum up to the truncation order is a Maurer-Cartan element.
inline PolyDiffOp moyal_star(const SymplecticPair& pair) {
    const Ctx& ctx = pair.ctx();
    if (!pair.alpha_constant())
        throw unsupported_error("moyal_star: only constant inverse structures are supported");
    const int m = ctx->m;
    std::vector<std::pair<std::pair<int, int>, Rat>> entries;
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) {
            Rat beta = -pair.alpha_at(i, j).constant_term();
            if (!symdef::is_zero(beta)) entries.push_back({{i, j}, beta});
        }
    PolyDiffOp out(ctx);
    const int N = ctx->max_order;
    std::vector<size_t> pick;
    std::function<void(int, Rat, MultiIndex, MultiIndex)> rec =
        [&](int level, Rat coeff, MultiIndex left, MultiIndex right) {
            if (level > 0) {
                MultiIndex ls = left, rs = right;
                std::sort(ls.begin(), ls.end());
                std::sort(rs.begin(), rs.end());
                BaseSeries c = BaseSeries::eps(ctx, level) * (coeff / factorial(static_cast<unsigned>(level)));
                out.add_term(OpSymbol{ls, rs}, c);
            }
            if (level == N) return;
            for (const auto& [ij, b] : entries) {
                MultiIndex l2 = left, r2 = right;
                l2.push_back(ij.first);
                r2.push_back(ij.second);
                rec(level + 1, coeff * b, std::move(l2), std::move(r2));
            }
        };
    rec(0, Rat(1), {}, {});
    return out;
}

// Exponential intertwiner T_xi(a) = a + sum 1/k! xi^k(a) for an arity-1 series
// of positive order.
inline BaseSeries t_xi(const PolyDiffOp& xi, const BaseSeries& a) {
    require_same_ctx(xi.ctx(), a.ctx(), "t_xi");
    for (int ar : xi.arities())
        if (ar != 1) throw argument_error("t_xi: operator must have arity 1");
    if (!xi.is_zero() && xi.m_order() < 1)
        throw argument_error("t_xi: operator must have positive order");
    BaseSeries total = a;
    BaseSeries term = a;
    const int guard = xi.ctx()->max_order + 2;
    for (int k = 1; k <= guard; ++k) {
        term = eval_op(xi, {term}) * (Rat(1) / Rat(k));
        if (term.is_zero()) return total;
        total += term;
    }
    if (!eval_op(xi, {term}).is_zero())
        throw contract_error("t_xi: series failed to terminate under truncation");
    return total;
}

} // namespace symdef

#endif
