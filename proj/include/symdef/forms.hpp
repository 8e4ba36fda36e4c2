#ifndef SYMDEF_FORMS_HPP
#define SYMDEF_FORMS_HPP

#include "symdef/polyvectors.hpp"

namespace symdef {

struct DxTag {};

// Exterior forms on R^m: polynomials in the odd cotangent-frame generators
// dx^1..dx^m over BaseSeries.
using ExteriorForm = OddPoly<DxTag>;

inline ExteriorForm dx(const Ctx& ctx, int i) { return ExteriorForm::generator(ctx, i); }

// Exterior derivative d = sum_i dx^i d/dx^i; the engine handles the crossing
// of dx^i past graded coefficients.
inline ExteriorForm de_rham(const ExteriorForm& eta) {
    ExteriorForm r(eta.ctx());
    for (int i = 1; i <= eta.ctx()->m; ++i)
        r += dx(eta.ctx(), i) * eta.derivative_x(i);
    return r;
}

// Left partial derivative with respect to dx^i; equals contraction with the
// coordinate vector field d/dx^i.
inline ExteriorForm contract_dx(int i, const ExteriorForm& eta) {
    return eta.partial_generator(i);
}

// A form-valued series with one explicit desuspension marker. Degree of a
// summand of form degree q with parameter key k is q - 1 + sum k_a d_a.
struct SuspendedForm {
    ExteriorForm body;

    SuspendedForm() = default;
    explicit SuspendedForm(ExteriorForm b) : body(std::move(b)) {}
    static SuspendedForm zero(const Ctx& ctx) { return SuspendedForm(ExteriorForm::zero(ctx)); }

    const Ctx& ctx() const { return body.ctx(); }
    bool is_zero() const { return body.is_zero(); }

    std::optional<int> degree() const { // dgla degree
        auto d = body.homogeneous_degree();
        if (!d) return std::nullopt;
        return *d - 1;
    }

    int m_order() const { return body.m_order(); }

    SuspendedForm& operator+=(const SuspendedForm& o) { body += o.body; return *this; }
    SuspendedForm& operator-=(const SuspendedForm& o) { body -= o.body; return *this; }
    friend SuspendedForm operator+(SuspendedForm a, const SuspendedForm& b) { a += b; return a; }
    friend SuspendedForm operator-(SuspendedForm a, const SuspendedForm& b) { a -= b; return a; }
    friend SuspendedForm operator-(const SuspendedForm& a) { return SuspendedForm(-a.body); }
    SuspendedForm& operator*=(const Rat& c) { body *= c; return *this; }
    friend SuspendedForm operator*(SuspendedForm a, const Rat& c) { a *= c; return a; }
    friend SuspendedForm operator*(const Rat& c, SuspendedForm a) { a *= c; return a; }

    bool operator==(const SuspendedForm& o) const { return body == o.body; }
    bool operator!=(const SuspendedForm& o) const { return !(*this == o); }
};

// The two filtered spans of suspended forms: Full allows eps exponents down to
// -q on a form-degree-q summand, Tilde only down to -(q-1).
enum class FormSpace { Full, Tilde };

namespace detail {

// Per-summand thresholds. For a monomial of form degree q with parameter key
// pk the Full-space conditions are k0 + q >= 0 and (k0 + q) + |kp| >= k; the
// Tilde space shifts the eps window by one.
inline bool summand_in(const ParamKey& pk, int q, FormSpace space, int k) {
    const int qeff = (space == FormSpace::Tilde) ? q - 1 : q;
    if (pk.k0 + qeff < 0) return false;
    return (pk.k0 + qeff) + pk.param_weight() >= k;
}

} // namespace detail

// F_k membership; k = 1 is the space itself. F_k of the Tilde space is
// computed as Tilde intersect F_k(Full).
inline bool in_filtration(const SuspendedForm& a, FormSpace space, int k) {
    if (k < 1) throw argument_error("in_filtration: level must be >= 1");
    for (const auto& [key, c] : a.body.terms()) {
        const int q = static_cast<int>(key.size());
        for (const auto& [pk, p] : c.terms()) {
            if (space == FormSpace::Tilde) {
                if (!detail::summand_in(pk, q, FormSpace::Tilde, 1)) return false;
                if (!detail::summand_in(pk, q, FormSpace::Full, k)) return false;
            } else {
                if (!detail::summand_in(pk, q, FormSpace::Full, k)) return false;
            }
        }
    }
    return true;
}

inline bool in_space(const SuspendedForm& a, FormSpace space) { return in_filtration(a, space, 1); }

// Transport of polyvector series to suspended forms: the algebra map fixing
// functions and sending th_i to (1/eps) omega_{ij}(x) dx^j. The input must lie
// in the parameter-ideal span of polyvectors.
inline SuspendedForm transport_to_forms(const Polyvector& v, const SymplecticPair& pair) {
    require_same_ctx(v.ctx(), pair.ctx(), "transport_to_forms");
    if (!v.is_zero() && v.m_order() < 1)
        throw membership_error("transport_to_forms: input must lie in the parameter ideal");
    const Ctx& ctx = v.ctx();
    const int m = ctx->m;
    std::vector<ExteriorForm> theta_image;
    theta_image.reserve(static_cast<size_t>(m));
    for (int i = 1; i <= m; ++i) {
        ExteriorForm f(ctx);
        for (int j = 1; j <= m; ++j) {
            const Poly& w = pair.omega_at(i, j);
            if (w.is_zero()) continue;
            ParamKey pk = ParamKey::unit(ctx->g);
            pk.k0 = -1;
            f.add_term({j}, BaseSeries::monomial(ctx, pk, w));
        }
        theta_image.push_back(std::move(f));
    }
    ExteriorForm out(ctx);
    for (const auto& [key, c] : v.terms()) {
        ExteriorForm acc = ExteriorForm::scalar(ctx, c);
        for (int i : key) acc = acc * theta_image[static_cast<size_t>(i - 1)];
        out += acc;
    }
    SuspendedForm r(std::move(out));
    if (!in_space(r, FormSpace::Full))
        throw membership_error("transport_to_forms: image escapes the full span");
    return r;
}

// Inverse transport: dx^i maps to eps alpha^{ij}(x) th_j. The input must lie
// in the full span.
inline Polyvector transport_to_polyvectors(const SuspendedForm& a, const SymplecticPair& pair) {
    require_same_ctx(a.ctx(), pair.ctx(), "transport_to_polyvectors");
    if (!in_space(a, FormSpace::Full))
        throw membership_error("transport_to_polyvectors: input outside the full span");
    const Ctx& ctx = a.ctx();
    const int m = ctx->m;
    std::vector<Polyvector> dx_image;
    dx_image.reserve(static_cast<size_t>(m));
    for (int i = 1; i <= m; ++i) {
        Polyvector v(ctx);
        for (int j = 1; j <= m; ++j) {
            const Poly& al = pair.alpha_at(i, j);
            if (al.is_zero()) continue;
            ParamKey pk = ParamKey::unit(ctx->g);
            pk.k0 = 1;
            v.add_term({j}, BaseSeries::monomial(ctx, pk, al));
        }
        dx_image.push_back(std::move(v));
    }
    Polyvector out(ctx);
    for (const auto& [key, c] : a.body.terms()) {
        Polyvector acc = Polyvector::scalar(ctx, c);
        for (int i : key) acc = acc * dx_image[static_cast<size_t>(i - 1)];
        out += acc;
    }
    return out;
}

// The transported Lie bracket on suspended forms, in the three-term local
// form. Requires homogeneous inputs; closure is guarded on the output, which
// must stay inside the full span's eps window.
inline SuspendedForm omega_bracket(const SuspendedForm& a, const SuspendedForm& b,
                                   const SymplecticPair& pair) {
    require_same_ctx(a.ctx(), b.ctx(), "omega_bracket");
    require_same_ctx(a.ctx(), pair.ctx(), "omega_bracket");
    auto da = a.body.homogeneous_degree();
    auto db = b.body.homogeneous_degree();
    if (!da || !db) throw degree_error("omega_bracket: inputs must be homogeneous");
    const Ctx& ctx = a.ctx();
    const int m = ctx->m;
    const int deg_a = *da; // degree of the desuspended element

    ExteriorForm out(ctx);
    const BaseSeries eps1 = BaseSeries::eps(ctx, 1);
    for (int i = 1; i <= m; ++i) {
        ExteriorForm ca = contract_dx(i, a.body);
        ExteriorForm da_x = a.body.derivative_x(i);
        for (int j = 1; j <= m; ++j) {
            const Poly& al = pair.alpha_at(i, j);
            if (al.is_zero()) continue;
            const BaseSeries al_s = BaseSeries::from_poly(ctx, al);
            ExteriorForm cb = contract_dx(j, b.body);

            // eps dx^k (d alpha^{ij}/dx^k) (da/ddx^i)(db/ddx^j)
            for (int k = 1; k <= m; ++k) {
                Poly dal = al.derivative(k);
                if (dal.is_zero()) continue;
                ExteriorForm piece = dx(ctx, k) * (ca * cb);
                out += piece.left_mul(eps1 * BaseSeries::from_poly(ctx, dal));
            }
            // -(-1)^{|a|} eps alpha^{ij} (da/ddx^i)(d b/dx^j)
            ExteriorForm t2 = (ca * b.body.derivative_x(j)).left_mul(eps1 * al_s);
            if ((deg_a & 1) == 0) t2 *= Rat(-1);
            out += t2;
            // + eps alpha^{ij} (d a/dx^i)(db/ddx^j)
            out += (da_x * cb).left_mul(eps1 * al_s);
        }
    }
    SuspendedForm r(std::move(out));
    if (!in_space(r, FormSpace::Full))
        throw membership_error("omega_bracket: output escapes the full span");
    return r;
}

} // namespace symdef

#endif
