#ifndef SYMDEF_DEFORMATION_HPP
#define SYMDEF_DEFORMATION_HPP

#include "symdef/ainfty.hpp"
#include "symdef/forms.hpp"
#include "symdef/printer.hpp"
#include "symdef/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace symdef {

// Uniform view of the carrier gradings.
inline std::optional<int> dgla_degree(const Polyvector& v) { return shifted_degree(v); }
inline std::optional<int> dgla_degree(const PolyDiffOp& p) { return p.homogeneous_degree(); }
inline std::optional<int> dgla_degree(const SuspendedForm& a) { return a.degree(); }

// A differential graded Lie algebra structure on carrier V. The filtration is
// the carrier's own order function; values are assumed reduced by the shared
// truncation context.
template <class V>
struct Dgla {
    std::string tag;
    std::function<V(const V&)> differential;
    std::function<V(const V&, const V&)> bracket;
};

inline Dgla<Polyvector> pv_context(const SymplecticPair& pair) {
    auto eps_alpha = pair.alpha_bivector().left_mul(BaseSeries::eps(pair.ctx()));
    return Dgla<Polyvector>{
        "pv",
        [eps_alpha](const Polyvector& v) { return schouten(eps_alpha, v); },
        [](const Polyvector& a, const Polyvector& b) { return schouten(a, b); }};
}

inline Dgla<PolyDiffOp> pd_context(const Ctx& ctx) {
    (void)ctx;
    return Dgla<PolyDiffOp>{
        "pd",
        [](const PolyDiffOp& p) { return hochschild_d(p); },
        [](const PolyDiffOp& a, const PolyDiffOp& b) { return gerstenhaber(a, b); }};
}

// Differential twisted by a flat degree-1 element: d + [mu_alpha, .].
inline Dgla<PolyDiffOp> pd_twisted_context(const PolyDiffOp& mu_alpha) {
    return Dgla<PolyDiffOp>{
        "pd-twisted",
        [mu_alpha](const PolyDiffOp& p) { return hochschild_d(p) + gerstenhaber(mu_alpha, p); },
        [](const PolyDiffOp& a, const PolyDiffOp& b) { return gerstenhaber(a, b); }};
}

inline Dgla<SuspendedForm> omega_zero_context(const Ctx& ctx) {
    (void)ctx;
    return Dgla<SuspendedForm>{
        "omega-zero",
        [](const SuspendedForm& a) { return SuspendedForm(-de_rham(a.body)); },
        [](const SuspendedForm& a, const SuspendedForm&) {
            return SuspendedForm::zero(a.ctx());
        }};
}

inline Dgla<SuspendedForm> omega_context(const SymplecticPair& pair) {
    return Dgla<SuspendedForm>{
        "omega",
        [](const SuspendedForm& a) { return SuspendedForm(-de_rham(a.body)); },
        [pair](const SuspendedForm& a, const SuspendedForm& b) {
            return omega_bracket(a, b, pair);
        }};
}

// Bracket-only structure (zero differential); the coalgebra layer uses it to
// split the two halves of the transported structure.
inline Dgla<SuspendedForm> omega_bracket_only_context(const SymplecticPair& pair) {
    return Dgla<SuspendedForm>{
        "omega-bracket-only",
        [](const SuspendedForm& a) { return SuspendedForm::zero(a.ctx()); },
        [pair](const SuspendedForm& a, const SuspendedForm& b) {
            return omega_bracket(a, b, pair);
        }};
}

// A degree-1 filtered element together with its check status.
template <class V>
struct MCElement {
    V value;
    CheckReport certificate;
    bool checked() const { return certificate.pass; }
};

template <class V>
V mc_residual(const Dgla<V>& L, const V& mu) {
    V half = L.bracket(mu, mu) * Rat(1, 2);
    return L.differential(mu) + half;
}

// Maurer-Cartan test: degree 1, order >= 1, residual exactly zero after
// truncation. The report carries the lowest-order failing monomial. A
// homogeneous element of the wrong degree fails the check; an inhomogeneous
// one is a malformed argument.
template <class V>
MCElement<V> mc_check(const Dgla<V>& L, const V& mu) {
    auto deg = dgla_degree(mu);
    if (!deg) throw degree_error("mc_check: element must be homogeneous");
    if (!mu.is_zero() && mu.m_order() < 1)
        throw membership_error("mc_check: element must have positive order");
    if (*deg != 1 && !mu.is_zero())
        return MCElement<V>{mu, failing("mc", "degree " + std::to_string(*deg), L.tag)};
    V res = mc_residual(L, mu);
    if (res.is_zero()) return MCElement<V>{mu, passing("mc", L.tag)};
    return MCElement<V>{mu, failing("mc", lowest_order_term(res), L.tag)};
}

// Gauge action of a degree-0, order >= 1 element:
//   e^xi(mu) = e^{[xi,.]} mu - sum_{k>=0} [xi,.]^k (d xi) / (k+1)!.
template <class V>
V gauge_act(const Dgla<V>& L, const V& xi, const V& mu) {
    auto dxi = dgla_degree(xi);
    if (!dxi || (*dxi != 0 && !xi.is_zero()))
        throw degree_error("gauge_act: gauge parameter must have degree 0");
    if (!xi.is_zero() && xi.m_order() < 1)
        throw membership_error("gauge_act: gauge parameter must have positive order");
    const int guard = 64;
    V total = mu;
    V term = mu;
    for (int k = 1; k <= guard && !term.is_zero(); ++k) {
        term = L.bracket(xi, term) * (Rat(1) / Rat(k));
        total += term;
    }
    if (!term.is_zero()) throw contract_error("gauge_act: adjoint series failed to terminate");

    V dterm = L.differential(xi);
    V correction = dterm;
    V t = dterm;
    for (int k = 1; k <= guard && !t.is_zero(); ++k) {
        t = L.bracket(xi, t) * (Rat(1) / Rat(k + 1));
        correction += t;
    }
    if (!t.is_zero()) throw contract_error("gauge_act: differential series failed to terminate");
    return total - correction;
}

// Order-one coset of a degree-1 operator series, projected to polyvectors.
// Restricted to Laurent-free series; checks that the coset is closed.
inline Polyvector ks_class(const PolyDiffOp& mu) {
    const Ctx& ctx = mu.ctx();
    if (!mu.laurent_free())
        throw unsupported_error("ks_class: only Laurent-free operator series carry a class here");
    PolyDiffOp coset(ctx);
    for (const auto& [sym, c] : mu.terms())
        for (const auto& [pk, p] : c.terms())
            if (pk.order() == 1) coset.add_term(sym, BaseSeries::monomial(ctx, pk, p));
    if (!hochschild_d(coset).is_zero())
        throw contract_error("ks_class: order-one coset is not closed");
    return hkr_project(coset);
}

inline CheckReport ks_integrability(const Polyvector& kappa) {
    auto deg = dgla_degree(kappa);
    if (!deg || (*deg != 1 && !kappa.is_zero()))
        throw degree_error("ks_integrability: class must have degree 1");
    Polyvector sq = schouten(kappa, kappa);
    if (sq.is_zero()) return passing("ks-integrability", "pv");
    return failing("ks-integrability", lowest_order_term(sq), "pv");
}

enum class ShiftDirection { Forward, Inverse };

// Addition/subtraction of a background flat element, verified in the target
// structure.
inline MCElement<PolyDiffOp> shift(const PolyDiffOp& mu, const PolyDiffOp& mu_alpha,
                                   ShiftDirection dir) {
    require_same_ctx(mu.ctx(), mu_alpha.ctx(), "shift");
    if (dir == ShiftDirection::Forward) {
        PolyDiffOp total = mu_alpha + mu;
        return mc_check(pd_context(mu.ctx()), total);
    }
    PolyDiffOp diff = mu - mu_alpha;
    return mc_check(pd_twisted_context(mu_alpha), diff);
}

inline Dgla<PolyDiffOp> twist(const Ctx& ctx, const MCElement<PolyDiffOp>& mu_alpha) {
    if (!mu_alpha.checked())
        throw contract_error("twist: background element must carry a passing certificate");
    require_same_ctx(ctx, mu_alpha.value.ctx(), "twist");
    return pd_twisted_context(mu_alpha.value);
}

struct ConditionsReport {
    bool ks_is_eps_alpha = false;
    bool vanishes_at_eps_zero = false;
    bool multiplications_reduce = false; // m_2 -> product, m_{n>2} -> 0 at eps = 0
};

inline ConditionsReport conditions_check(const PolyDiffOp& mu, const SymplecticPair& pair) {
    const Ctx& ctx = mu.ctx();
    require_same_ctx(ctx, pair.ctx(), "conditions_check");
    ConditionsReport rep;
    auto eps_alpha = pair.alpha_bivector().left_mul(BaseSeries::eps(ctx));
    rep.ks_is_eps_alpha = (ks_class(mu) == eps_alpha);
    rep.vanishes_at_eps_zero = mu.laurent_free() && mu.at_eps_zero().is_zero();
    rep.multiplications_reduce = true;
    AInftyStructure a = ainfty_from_mc(mu);
    for (const auto& [n, op] : a.mult) {
        PolyDiffOp at0 = op.at_eps_zero();
        if (n == 2) {
            if (at0 != PolyDiffOp::product(ctx)) rep.multiplications_reduce = false;
        } else if (!at0.is_zero()) {
            rep.multiplications_reduce = false;
        }
    }
    return rep;
}

// Polynomial path in the one-simplex coordinates: eta = eta_t(t) + eta_dt(t) dt
// with eta_t of carrier degree 1 and eta_dt of degree 0. Stored densely by
// powers of t.
template <class V>
struct PathElem {
    std::vector<V> t_part;  // coefficients of t^k, degree 1
    std::vector<V> dt_part; // coefficients of t^k dt, degree 0

    V at_zero() const { return t_part.at(0); }
    V at_one() const {
        V s = t_part.at(0);
        for (size_t k = 1; k < t_part.size(); ++k) s += t_part[k];
        return s;
    }
};

// Maurer-Cartan test on the path carrier with total differential d + d_t:
//   (i)  d a(t) + (1/2)[a(t), a(t)] = 0 for all t,
//   (ii) d b(t) + [a(t), b(t)] - a'(t) = 0,
// where a = eta_t and b = eta_dt. Returns the two endpoint elements.
template <class V>
std::pair<CheckReport, std::pair<MCElement<V>, MCElement<V>>>
mc_path_check(const Dgla<V>& L, const PathElem<V>& path) {
    if (path.t_part.empty()) throw argument_error("mc_path_check: empty path");
    for (const V& v : path.t_part) {
        auto d = dgla_degree(v);
        if (!d || (*d != 1 && !v.is_zero()))
            throw degree_error("mc_path_check: t-part must have degree 1");
        if (!v.is_zero() && v.m_order() < 1)
            throw membership_error("mc_path_check: coefficients must have positive order");
    }
    for (const V& v : path.dt_part) {
        auto d = dgla_degree(v);
        if (!d || (*d != 0 && !v.is_zero()))
            throw degree_error("mc_path_check: dt-part must have degree 0");
        if (!v.is_zero() && v.m_order() < 1)
            throw membership_error("mc_path_check: coefficients must have positive order");
    }
    const size_t nt = path.t_part.size();
    const size_t nb = path.dt_part.size();
    auto a = [&](size_t k) -> const V& { return path.t_part.at(k); };

    std::string tag = L.tag + "-path";
    // (i) t-component
    for (size_t n = 0; n < 2 * nt - 1; ++n) {
        V res = a(0) * Rat(0);
        if (n < nt) res += L.differential(a(n));
        for (size_t i = 0; i < nt; ++i) {
            if (n < i) break;
            size_t j = n - i;
            if (j >= nt) continue;
            res += L.bracket(a(i), a(j)) * Rat(1, 2);
        }
        if (!res.is_zero())
            return {failing("mc-path", "t^" + std::to_string(n) + ": " + lowest_order_term(res), tag),
                    {mc_check(L, path.at_zero()), mc_check(L, path.at_one())}};
    }
    // (ii) dt-component; the bracket convolution reaches degree nt + nb - 2
    const size_t top = nt + nb;
    for (size_t n = 0; n < top; ++n) {
        V res = a(0) * Rat(0);
        if (n < nb) res += L.differential(path.dt_part[n]);
        for (size_t i = 0; i < nt; ++i) {
            if (n < i) break;
            size_t j = n - i;
            if (j >= nb) continue;
            res += L.bracket(a(i), path.dt_part[j]);
        }
        if (n + 1 < nt) res -= a(n + 1) * Rat(static_cast<int>(n + 1));
        if (!res.is_zero())
            return {failing("mc-path", "t^" + std::to_string(n) + " dt: " + lowest_order_term(res), tag),
                    {mc_check(L, path.at_zero()), mc_check(L, path.at_one())}};
    }
    return {passing("mc-path", tag), {mc_check(L, path.at_zero()), mc_check(L, path.at_one())}};
}

} // namespace symdef

#endif
