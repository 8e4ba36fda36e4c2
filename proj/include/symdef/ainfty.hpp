#ifndef SYMDEF_AINFTY_HPP
#define SYMDEF_AINFTY_HPP

#include "symdef/polydiff.hpp"
#include "symdef/report.hpp"

#include <map>
#include <string>

namespace symdef {

// Family of multiplications {m_n}_{n>=2} extracted from a degree-1 operator
// series; m_2 contains the undeformed product.
struct AInftyStructure {
    Ctx ctx;
    std::map<int, PolyDiffOp> mult; // arity -> operator
    int max_arity = 2;

    PolyDiffOp total() const {
        PolyDiffOp t(ctx);
        for (const auto& [a, op] : mult) t += op;
        return t;
    }
};

// Largest arity a degree-1 series can populate under the truncation: arity n
// needs parameter degree 2 - n at order <= max_order.
inline int ainfty_arity_cutoff(const TruncationContext& tc) {
    int steep = 0;
    for (int d : tc.param_degree) steep = std::max(steep, -d);
    return 2 + tc.max_order * steep;
}

// Splits a degree-1 operator series into its multiplication family. Each term
// must act on 2 - (parameter degree) arguments.
inline AInftyStructure ainfty_from_mc(const PolyDiffOp& mu) {
    const Ctx& ctx = mu.ctx();
    const TruncationContext& tc = *ctx;
    AInftyStructure a;
    a.ctx = ctx;
    a.max_arity = ainfty_arity_cutoff(tc);
    for (const auto& [sym, c] : mu.terms())
        for (const auto& [pk, p] : c.terms()) {
            const int arity = static_cast<int>(sym.size());
            if (arity != 2 - pk.degree(tc))
                throw degree_error("ainfty_from_mc: term arity disagrees with its degree bookkeeping");
        }
    for (int n = 2; n <= a.max_arity; ++n) {
        PolyDiffOp part = mu.arity_part(n);
        if (n == 2) part += PolyDiffOp::product(ctx);
        if (!part.is_zero()) a.mult.emplace(n, std::move(part));
    }
    return a;
}

inline std::vector<Poly> monomial_basis(int m, int max_deg) {
    std::vector<Poly> out;
    std::vector<XMono> level{XMono(static_cast<size_t>(m), 0)};
    for (const auto& e : level) out.push_back(Poly::monomial(m, e, Rat(1)));
    for (int d = 1; d <= max_deg; ++d) {
        std::vector<XMono> next;
        for (const auto& e : level)
            for (int i = 0; i < m; ++i) {
                bool top = true;
                for (int j = i + 1; j < m; ++j)
                    if (e[static_cast<size_t>(j)] != 0) { top = false; break; }
                if (!top) continue; // grow only the trailing variable block for uniqueness
                XMono f = e;
                f[static_cast<size_t>(i)] += 1;
                next.push_back(f);
            }
        for (const auto& e : next) out.push_back(Poly::monomial(m, e, Rat(1)));
        level = std::move(next);
    }
    return out;
}

// Split into pieces that are homogeneous in both arity and parameter degree.
inline std::vector<PolyDiffOp> degree_homogeneous_parts(const PolyDiffOp& p) {
    const TruncationContext& tc = *p.ctx();
    std::map<std::pair<int, int>, PolyDiffOp> parts;
    for (const auto& [sym, c] : p.terms())
        for (const auto& [pk, poly] : c.terms()) {
            auto key = std::make_pair(static_cast<int>(sym.size()), pk.degree(tc));
            auto it = parts.find(key);
            if (it == parts.end()) it = parts.emplace(key, PolyDiffOp(p.ctx())).first;
            it->second.add_term(sym, BaseSeries::monomial(p.ctx(), pk, poly));
        }
    std::vector<PolyDiffOp> out;
    out.reserve(parts.size());
    for (auto& [k, v] : parts) out.push_back(std::move(v));
    return out;
}

// Direct evaluation of the bracket formula on a fixed argument tuple,
// independent of the symbolic insertion calculus:
//   sum_i (-1)^{i k2} P1(.., P2(a_i..), ..) - (-1)^{|P1||P2|} (1 <-> 2)
// applied per total-degree-homogeneous piece; graded evaluation supplies the
// coefficient crossings.
inline BaseSeries gerstenhaber_eval_oracle(const PolyDiffOp& p1, const PolyDiffOp& p2,
                                           const std::vector<BaseSeries>& args) {
    const Ctx& ctx = p1.ctx();
    BaseSeries out(ctx);
    auto insert_eval = [&](const PolyDiffOp& outer_op, const PolyDiffOp& inner_op, int block) {
        const int ao = static_cast<int>(outer_op.terms().begin()->first.size());
        const int ai = static_cast<int>(inner_op.terms().begin()->first.size());
        if (ao + ai - 1 != static_cast<int>(args.size())) return;
        const int k_out = ao - 1, k_in = ai - 1;
        for (int i = 0; i <= k_out; ++i) {
            std::vector<BaseSeries> inner(args.begin() + i, args.begin() + i + ai);
            BaseSeries val = eval_op(inner_op, inner);
            std::vector<BaseSeries> outer;
            outer.reserve(static_cast<size_t>(ao));
            for (int t = 0; t < i; ++t) outer.push_back(args[static_cast<size_t>(t)]);
            outer.push_back(val);
            for (size_t t = static_cast<size_t>(i) + static_cast<size_t>(ai); t < args.size(); ++t)
                outer.push_back(args[t]);
            BaseSeries piece = eval_op(outer_op, outer);
            int sign = (((i * k_in) & 1) ? -1 : 1) * block;
            if (sign < 0) piece *= Rat(-1);
            out += piece;
        }
    };
    for (const PolyDiffOp& x : degree_homogeneous_parts(p1))
        for (const PolyDiffOp& y : degree_homogeneous_parts(p2)) {
            const int dx_ = *x.homogeneous_degree();
            const int dy_ = *y.homogeneous_degree();
            insert_eval(x, y, 1);
            insert_eval(y, x, ((dx_ * dy_) & 1) ? 1 : -1);
        }
    return out;
}

enum class RelationsMode { Symbolic, Evaluation, Both };

// Stasheff relations as the vanishing of [m_total, m_total] arity by arity.
// Symbolic mode checks the canonical form; evaluation mode re-derives each
// arity on a spanning tuple set of per-slot monomials of degree <= eval_deg
// (sound when eval_deg bounds every derivative order in the relation).
inline CheckReport ainfty_relations_check(const AInftyStructure& a, int max_arity,
                                          RelationsMode mode = RelationsMode::Symbolic,
                                          int eval_deg = 2) {
    if (max_arity > 2 * a.max_arity - 1)
        throw argument_error("ainfty_relations_check: arity beyond what the cutoff determines");
    const Ctx& ctx = a.ctx;
    PolyDiffOp m_tot = a.total();
    if (mode == RelationsMode::Symbolic || mode == RelationsMode::Both) {
        PolyDiffOp b = gerstenhaber(m_tot, m_tot);
        for (int r = 1; r <= max_arity; ++r)
            if (!b.arity_part(r).is_zero())
                return failing("stasheff-relations", "arity " + std::to_string(r), "pd");
    }
    if (mode == RelationsMode::Evaluation || mode == RelationsMode::Both) {
        auto basis = monomial_basis(ctx->m, eval_deg);
        for (int r = 1; r <= max_arity; ++r) {
            std::vector<size_t> idx(static_cast<size_t>(r), 0);
            bool carry = false;
            while (!carry) {
                std::vector<BaseSeries> args;
                args.reserve(static_cast<size_t>(r));
                for (size_t t = 0; t < idx.size(); ++t)
                    args.push_back(BaseSeries::from_poly(ctx, basis[idx[t]]));
                if (!gerstenhaber_eval_oracle(m_tot, m_tot, args).is_zero())
                    return failing("stasheff-relations", "arity " + std::to_string(r), "pd");
                carry = true;
                for (size_t t = 0; t < idx.size() && carry; ++t) {
                    idx[t] += 1;
                    if (idx[t] < basis.size()) carry = false;
                    else idx[t] = 0;
                }
            }
        }
    }
    return passing("stasheff-relations", "pd");
}

} // namespace symdef

#endif
