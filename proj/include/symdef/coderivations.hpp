#ifndef SYMDEF_CODERIVATIONS_HPP
#define SYMDEF_CODERIVATIONS_HPP

#include "symdef/words.hpp"

#include <functional>
#include <random>

namespace symdef {

// A coderivation of the word coalgebra, presented by its corestrictions: for
// each populated arity n, a rule on n canonical monomial factors returning a
// carrier value. Cofreeness determines the action on longer words.
template <class V>
struct Coderivation {
    using WA = WordAlgebra<V>;
    using Key = typename WA::Key;
    using Word = typename WA::Word;
    using Sum = typename WA::Sum;
    using Taylor = std::function<V(const std::vector<Key>&)>;

    Ctx ctx;
    int degree = 0;
    std::map<int, Taylor> taylor;

    Coderivation(Ctx c, int deg) : ctx(std::move(c)), degree(deg) {}

    // Corestriction on one word: the rule consuming the whole word, or zero.
    V corestriction(const Word& w) const {
        auto it = taylor.find(static_cast<int>(w.size()));
        if (it == taylor.end()) return V::zero(ctx);
        return it->second(w);
    }

    // Cofree extension: sum over sub-multisets, with the Koszul sign of
    // extracting the chosen factors to the front; the produced value becomes a
    // new factor joined to the remainder.
    Sum apply(const Sum& s) const {
        WA wa(ctx);
        Sum out;
        for (const auto& [w, c] : s) {
            const size_t n = w.size();
            std::vector<int> degs(n);
            for (size_t i = 0; i < n; ++i) degs[i] = wa.factor_degree(w[i]);
            for (const auto& [arity, rule] : taylor) {
                if (arity <= 0 || static_cast<size_t>(arity) > n) continue;
                // iterate over position subsets of the given size
                std::vector<size_t> idx(static_cast<size_t>(arity));
                for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                bool more = true;
                while (more) {
                    // extraction sign: chosen factor at position i crosses
                    // every unchosen odd factor at position j < i
                    int sign = 1;
                    {
                        std::vector<bool> chosen(n, false);
                        for (size_t i : idx) chosen[i] = true;
                        int odd_chosen_after = 0;
                        for (size_t i = n; i-- > 0;) {
                            if (chosen[i]) {
                                if (degs[i] & 1) ++odd_chosen_after;
                            } else if ((degs[i] & 1) && (odd_chosen_after & 1)) {
                                sign = -sign;
                            }
                        }
                    }
                    std::vector<Key> picked;
                    picked.reserve(idx.size());
                    for (size_t i : idx) picked.push_back(w[i]);
                    V val = rule(picked);
                    if (!val.is_zero()) {
                        Word rest;
                        rest.reserve(n - idx.size());
                        {
                            std::vector<bool> chosen(n, false);
                            for (size_t i : idx) chosen[i] = true;
                            for (size_t i = 0; i < n; ++i)
                                if (!chosen[i]) rest.push_back(w[i]);
                        }
                        for (const auto& [k, r] : CarrierTraits<V>::split(val)) {
                            Word grown;
                            grown.reserve(rest.size() + 1);
                            grown.push_back(k);
                            grown.insert(grown.end(), rest.begin(), rest.end());
                            wa.add(out, std::move(grown), c * r * Rat(sign));
                        }
                    }
                    // next combination
                    more = false;
                    for (size_t t = idx.size(); t-- > 0;) {
                        if (idx[t] < n - idx.size() + t) {
                            ++idx[t];
                            for (size_t u = t + 1; u < idx.size(); ++u) idx[u] = idx[u - 1] + 1;
                            more = true;
                            break;
                        }
                    }
                }
            }
        }
        return out;
    }

    V apply_project(const Sum& s) const {
        V out = V::zero(ctx);
        for (const auto& [w, c] : s) out += corestriction(w) * c;
        return out;
    }
};

// Chevalley-Eilenberg coderivation of a dgla: degree 1,
//   n = 1: d v,   n = 2: (-1)^{|v1| - 1} [v1, v2],   n >= 3: zero.
template <class V>
Coderivation<V> ce_coderivation(const Dgla<V>& L, const Ctx& ctx) {
    Coderivation<V> q(ctx, 1);
    auto diff = L.differential;
    auto br = L.bracket;
    q.taylor[1] = [ctx, diff](const std::vector<typename CarrierTraits<V>::Key>& keys) {
        return diff(CarrierTraits<V>::lift(ctx, keys[0]));
    };
    q.taylor[2] = [ctx, br](const std::vector<typename CarrierTraits<V>::Key>& keys) {
        V a = CarrierTraits<V>::lift(ctx, keys[0]);
        V b = CarrierTraits<V>::lift(ctx, keys[1]);
        int da = *dgla_degree(a);
        V out = br(a, b);
        if (((da - 1) & 1)) out *= Rat(-1);
        return out;
    };
    return q;
}

// The contraction coderivation: degree 0, only the binary rule
//   (eta1, eta2) -> (-1)^{|eta1|} eps alpha^{ij} (d eta1/d dx^i)(d eta2/d dx^j),
// with |eta1| the degree of the desuspended form. Defined when at least one
// argument lies in the tilde span; the value stays in the full span.
inline Coderivation<SuspendedForm> pi_coderivation(const SymplecticPair& pair) {
    const Ctx& ctx = pair.ctx();
    Coderivation<SuspendedForm> pi(ctx, 0);
    pi.taylor[2] = [ctx, pair](const std::vector<CarrierTraits<SuspendedForm>::Key>& keys) {
        SuspendedForm a = CarrierTraits<SuspendedForm>::lift(ctx, keys[0]);
        SuspendedForm b = CarrierTraits<SuspendedForm>::lift(ctx, keys[1]);
        if (!in_space(a, FormSpace::Tilde) && !in_space(b, FormSpace::Tilde))
            throw membership_error("pi_coderivation: both arguments outside the tilde span");
        const int m = ctx->m;
        const int deg_a = *a.body.homogeneous_degree();
        ExteriorForm out(ctx);
        const BaseSeries eps1 = BaseSeries::eps(ctx, 1);
        for (int i = 1; i <= m; ++i) {
            ExteriorForm ca = contract_dx(i, a.body);
            if (ca.is_zero()) continue;
            for (int j = 1; j <= m; ++j) {
                const Poly& al = pair.alpha_at(i, j);
                if (al.is_zero()) continue;
                ExteriorForm cb = contract_dx(j, b.body);
                if (cb.is_zero()) continue;
                out += (ca * cb).left_mul(eps1 * BaseSeries::from_poly(ctx, al));
            }
        }
        if (deg_a & 1) out *= Rat(-1);
        SuspendedForm r(std::move(out));
        if (!in_space(r, FormSpace::Full))
            throw membership_error("pi_coderivation: value escapes the full span");
        return r;
    };
    return pi;
}

// Graded commutator of coderivations, presented again by corestrictions.
template <class V>
Coderivation<V> coder_commutator(const Coderivation<V>& d1, const Coderivation<V>& d2) {
    require_same_ctx(d1.ctx, d2.ctx, "coder_commutator");
    Coderivation<V> out(d1.ctx, d1.degree + d2.degree);
    const int sign = ((d1.degree * d2.degree) & 1) ? 1 : -1;
    int max_arity = 0;
    for (const auto& [n, fn] : d1.taylor)
        for (const auto& [k, gn] : d2.taylor) max_arity = std::max(max_arity, n + k - 1);
    for (int n = 1; n <= max_arity; ++n) {
        out.taylor[n] = [n, d1, d2, sign](const std::vector<typename CarrierTraits<V>::Key>& keys) {
            WordAlgebra<V> wa(d1.ctx);
            typename WordAlgebra<V>::Sum w;
            typename WordAlgebra<V>::Word word(keys.begin(), keys.end());
            wa.add(w, word, Rat(1));
            V first = d1.apply_project(d2.apply(w));
            V second = d2.apply_project(d1.apply(w));
            return first + second * Rat(sign);
        };
    }
    return out;
}

// exp(sign * Pi) applied to a word sum; the contraction strictly shortens
// words, so the series is a finite sum.
template <class V>
typename WordAlgebra<V>::Sum exp_apply(const Coderivation<V>& pi,
                                       const typename WordAlgebra<V>::Sum& s, int sign) {
    typename WordAlgebra<V>::Sum total = s;
    typename WordAlgebra<V>::Sum cur = s;
    for (int mth = 1; !cur.empty(); ++mth) {
        cur = pi.apply(cur);
        if (cur.empty()) break;
        Rat scale = Rat(sign) / Rat(mth);
        for (auto& [w, c] : cur) c *= scale;
        for (const auto& [w, c] : cur) {
            auto it = total.find(w);
            if (it == total.end()) {
                total.emplace(w, c);
            } else {
                it->second += c;
                if (symdef::is_zero(it->second)) total.erase(it);
            }
        }
        if (mth > 4 * pi.ctx->max_word_len + 8)
            throw contract_error("exp_apply: series failed to terminate");
    }
    return total;
}

// A coalgebra morphism of the suspended-form coalgebra, presented as a
// word-sum transform. Taylor coefficients are the length-one projections of
// the transform on single words; the filtration flag certifies that the n-ary
// coefficient raises the order by at least the sum of the input orders, which
// is what makes pushforwards converge under truncation.
struct FormMorphism {
    using Sum = WordAlgebra<SuspendedForm>::Sum;
    Ctx ctx;
    std::function<Sum(const Sum&)> map;
    bool filtration_compatible = true;

    SuspendedForm taylor(const std::vector<CarrierTraits<SuspendedForm>::Key>& keys) const {
        WordAlgebra<SuspendedForm> wa(ctx);
        Sum w;
        wa.add(w, {keys.begin(), keys.end()}, Rat(1));
        if (w.empty()) return SuspendedForm::zero(ctx);
        return wa.length_one_value(map(w));
    }
};

inline FormMorphism identity_morphism(const Ctx& ctx) {
    return FormMorphism{ctx, [](const FormMorphism::Sum& s) { return s; }, true};
}

// The exponential of the contraction and its strict inverse. The contraction
// strictly shortens words, so both series are finite sums on every word.
inline std::pair<FormMorphism, FormMorphism> exp_pi(const Coderivation<SuspendedForm>& pi) {
    auto fwd = FormMorphism{
        pi.ctx, [pi](const FormMorphism::Sum& s) { return exp_apply(pi, s, +1); }, true};
    auto inv = FormMorphism{
        pi.ctx, [pi](const FormMorphism::Sum& s) { return exp_apply(pi, s, -1); }, true};
    return {std::move(fwd), std::move(inv)};
}

// Pushforward of a flat element:
//   F_*(mu) = sum_n 1/n! (projection of F applied to the n-fold word).
// Orders grow with n for filtration-compatible morphisms, so the loop stops
// at the truncation bound.
inline SuspendedForm pushforward_mc(const FormMorphism& f, const SuspendedForm& mu) {
    const Ctx& ctx = f.ctx;
    if (!f.filtration_compatible)
        throw contract_error("pushforward_mc: morphism is not filtration compatible");
    if (!mu.is_zero() && mu.m_order() < 1)
        throw contract_error("pushforward_mc: element must have positive order");
    WordAlgebra<SuspendedForm> wa(ctx);
    SuspendedForm total = SuspendedForm::zero(ctx);
    Rat inv_fact(1);
    for (int n = 1; n <= ctx->max_order + 1; ++n) {
        inv_fact /= Rat(n == 1 ? 1 : n);
        auto wn = wa.power(mu, n);
        if (wn.empty()) break;
        total += wa.length_one_value(f.map(wn)) * inv_fact;
    }
    return total;
}

// Convenience wrapper for the common exp(sign * Pi) pushforward.
inline SuspendedForm pushforward_exp_pi(const Coderivation<SuspendedForm>& pi,
                                        const SuspendedForm& mu, int sign) {
    auto pair = exp_pi(pi);
    return pushforward_mc(sign > 0 ? pair.first : pair.second, mu);
}

// Pushforward of a one-simplex path eta = a(t) + b(t) dt through exp(sign*Pi).
// The t-part maps pointwise in t; the dt-part collects the words with exactly
// one dt-factor,
//   b'(t) = sum_k 1/k! (projection of F on a(t)-words of length k times b(t)).
// The a-coefficients have degree 1 (word-even) and the single b-factor is
// word-odd, so carrying dt to the right costs no sign.
inline PathElem<SuspendedForm> pushforward_exp_pi_path(const Coderivation<SuspendedForm>& pi,
                                                       const PathElem<SuspendedForm>& path,
                                                       int sign) {
    const Ctx& ctx = pi.ctx;
    WordAlgebra<SuspendedForm> wa(ctx);
    using Sum = WordAlgebra<SuspendedForm>::Sum;
    const auto& A = path.t_part;
    const auto& B = path.dt_part;

    std::vector<SuspendedForm> out_t, out_dt;
    auto bump = [&](std::vector<SuspendedForm>& vec, int p, const SuspendedForm& v) {
        if (v.is_zero()) return;
        while (static_cast<int>(vec.size()) <= p) vec.push_back(SuspendedForm::zero(ctx));
        vec[static_cast<size_t>(p)] += v;
    };
    auto extend = [&](const std::map<int, Sum>& words,
                      const std::vector<SuspendedForm>& factors) {
        std::map<int, Sum> next;
        for (const auto& [p, s] : words)
            for (size_t k = 0; k < factors.size(); ++k) {
                if (factors[k].is_zero()) continue;
                Sum grown = wa.mul_value(s, factors[k]);
                for (const auto& [w, c] : grown) wa.add(next[p + static_cast<int>(k)], w, c);
            }
        return next;
    };

    // k = 0 block of the dt-part: bare b-words
    for (size_t j = 0; j < B.size(); ++j) {
        if (B[j].is_zero()) continue;
        Sum s;
        for (const auto& [key, r] : CarrierTraits<SuspendedForm>::split(B[j])) wa.add(s, {key}, r);
        auto img = exp_apply(pi, s, sign);
        bump(out_dt, static_cast<int>(j), wa.length_one_value(img));
    }

    std::map<int, Sum> words; // k-factor a-words by t-power
    Rat inv_fact(1);
    for (int k = 1; k <= ctx->max_order + 1; ++k) {
        if (k == 1) {
            for (size_t t = 0; t < A.size(); ++t) {
                if (A[t].is_zero()) continue;
                for (const auto& [key, r] : CarrierTraits<SuspendedForm>::split(A[t]))
                    wa.add(words[static_cast<int>(t)], {key}, r);
            }
        } else {
            words = extend(words, A);
        }
        inv_fact /= Rat(k == 1 ? 1 : k);
        bool any = false;
        for (const auto& [p, s] : words) {
            if (s.empty()) continue;
            any = true;
            auto img = exp_apply(pi, s, sign);
            bump(out_t, p, wa.length_one_value(img) * inv_fact);
        }
        // dt-part: the same words with one extra b-factor, weight 1/k!
        auto with_b = extend(words, B);
        for (const auto& [p, s] : with_b) {
            if (s.empty()) continue;
            any = true;
            auto img = exp_apply(pi, s, sign);
            bump(out_dt, p, wa.length_one_value(img) * inv_fact);
        }
        if (!any) break;
    }

    if (out_t.empty()) out_t.push_back(SuspendedForm::zero(ctx));
    return PathElem<SuspendedForm>{std::move(out_t), std::move(out_dt)};
}

// Membership in the eps-rescaled polyvector span: every monomial carries at
// least one eps and one more parameter factor.
inline bool in_tilde_pv(const Polyvector& v) {
    for (const auto& [key, c] : v.terms())
        for (const auto& [pk, p] : c.terms()) {
            if (pk.k0 < 1) return false;
            if ((pk.k0 - 1) + pk.param_weight() < 1) return false;
        }
    return true;
}

// Closed tilde-span input -> exp(Pi)-pushforward, checked flat for the
// bracketed structure -> inverse transport, checked flat among polyvectors.
struct PipelineResult {
    MCElement<SuspendedForm> omega_level;
    MCElement<Polyvector> pv_level;
};

inline PipelineResult theta_pi_pipeline(const SuspendedForm& eta, const SymplecticPair& pair) {
    const Ctx& ctx = pair.ctx();
    require_same_ctx(eta.ctx(), ctx, "theta_pi_pipeline");
    auto deg = eta.degree();
    if (!deg || (*deg != 1 && !eta.is_zero()))
        throw degree_error("theta_pi_pipeline: input must have degree 1");
    if (!in_space(eta, FormSpace::Tilde))
        throw membership_error("theta_pi_pipeline: input must lie in the tilde span");
    if (!de_rham(eta.body).is_zero())
        throw argument_error("theta_pi_pipeline: input must be closed");

    auto pi = pi_coderivation(pair);
    SuspendedForm nu = pushforward_exp_pi(pi, eta, +1);
    auto omega_cert = mc_check(omega_context(pair), nu);

    Polyvector beta = transport_to_polyvectors(nu, pair);
    if (!in_tilde_pv(beta))
        throw membership_error("theta_pi_pipeline: transported element escapes the rescaled span");
    auto pv_cert = mc_check(pv_context(pair), beta);
    return PipelineResult{std::move(omega_cert), std::move(pv_cert)};
}

// Randomized exact verification of the two contraction identities:
//   [Pi, Q_d] = Q_bracket on binary words,
//   Pi Q_bracket = Q_bracket Pi on ternary words.
// The second identity consumes the Jacobi identity of alpha; the first does
// not, which the non-Poisson control in the tests exploits.
struct PiIdentityReport {
    int binary_checked = 0;
    int binary_failed = 0;
    int ternary_checked = 0;
    int ternary_failed = 0;
    bool pass() const { return binary_failed == 0 && ternary_failed == 0; }
};

namespace detail {

// deterministic tilde-span monomial: q dx-factors, eps window respecting the
// tilde floor, small polynomial coefficient
inline SuspendedForm random_tilde_monomial(std::mt19937_64& eng, const Ctx& ctx, int max_poly_deg) {
    auto draw = [&](int lo, int hi) {
        return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    const int m = ctx->m;
    for (int attempt = 0; attempt < 200; ++attempt) {
        int q = draw(0, std::min(m, 2));
        OddKey key;
        for (int i = 1; i <= m && static_cast<int>(key.size()) < q; ++i)
            if (draw(0, 1)) key.push_back(i);
        if (static_cast<int>(key.size()) != q) continue;
        ParamKey pk = ParamKey::unit(ctx->g);
        int weight = 0;
        for (int a = 0; a < ctx->g; ++a) {
            int cap = ctx->param_odd(a) ? 1 : 2;
            pk.kp[static_cast<size_t>(a)] = draw(0, cap);
            weight += pk.kp[static_cast<size_t>(a)];
        }
        int lo = std::max(ctx->eps_floor, std::max(1 - q, 2 - q - weight));
        int hi = lo + 1;
        pk.k0 = draw(lo, hi);
        if (pk.order() > ctx->max_order) continue;
        XMono xe(static_cast<size_t>(m), 0);
        int deg = draw(0, max_poly_deg);
        for (int d = 0; d < deg; ++d) xe[static_cast<size_t>(draw(0, m - 1))] += 1;
        auto v = SuspendedForm(ExteriorForm::monomial(
            ctx, key, BaseSeries::monomial(ctx, pk, Poly::monomial(m, xe, Rat(1)))));
        if (in_space(v, FormSpace::Tilde)) return v;
    }
    throw argument_error("random_tilde_monomial: exhausted attempts");
}

} // namespace detail

inline PiIdentityReport verify_pi_identities(const SymplecticPair& pair, int binary_samples,
                                             int ternary_samples, std::uint64_t seed,
                                             bool check_ternary = true) {
    const Ctx& ctx = pair.ctx();
    std::mt19937_64 eng(seed);
    WordAlgebra<SuspendedForm> wa(ctx);
    auto pi = pi_coderivation(pair);
    auto q_d = ce_coderivation(omega_zero_context(ctx), ctx);
    auto q_br = ce_coderivation(omega_bracket_only_context(pair), ctx);
    auto bracket_like = coder_commutator(pi, q_d);

    PiIdentityReport rep;
    int guard = 20 * (binary_samples + ternary_samples) + 200;
    while (rep.binary_checked < binary_samples && guard-- > 0) {
        auto a = detail::random_tilde_monomial(eng, ctx, 2);
        auto b = detail::random_tilde_monomial(eng, ctx, 2);
        typename WordAlgebra<SuspendedForm>::Sum w;
        auto ka = CarrierTraits<SuspendedForm>::split(a)[0].first;
        auto kb = CarrierTraits<SuspendedForm>::split(b)[0].first;
        wa.add(w, {ka, kb}, Rat(1));
        if (w.empty()) continue; // repeated odd factor, redraw
        auto lhs = bracket_like.apply(w);
        auto rhs = q_br.apply(w);
        ++rep.binary_checked;
        if (lhs != rhs) ++rep.binary_failed;
    }
    if (check_ternary)
        while (rep.ternary_checked < ternary_samples && guard-- > 0) {
            auto a = detail::random_tilde_monomial(eng, ctx, 2);
            auto b = detail::random_tilde_monomial(eng, ctx, 2);
            auto c = detail::random_tilde_monomial(eng, ctx, 2);
            typename WordAlgebra<SuspendedForm>::Sum w;
            auto ka = CarrierTraits<SuspendedForm>::split(a)[0].first;
            auto kb = CarrierTraits<SuspendedForm>::split(b)[0].first;
            auto kc = CarrierTraits<SuspendedForm>::split(c)[0].first;
            wa.add(w, {ka, kb, kc}, Rat(1));
            if (w.empty()) continue;
            auto lhs = pi.apply(q_br.apply(w));
            auto rhs = q_br.apply(pi.apply(w));
            ++rep.ternary_checked;
            if (lhs != rhs) ++rep.ternary_failed;
        }
    return rep;
}

} // namespace symdef

#endif
