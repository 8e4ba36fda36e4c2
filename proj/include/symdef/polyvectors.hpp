#ifndef SYMDEF_POLYVECTORS_HPP
#define SYMDEF_POLYVECTORS_HPP

#include "symdef/odd_poly.hpp"

#include <optional>
#include <vector>

namespace symdef {

struct ThetaTag {};

// Polyvector fields on R^m: polynomials in the odd tangent-frame generators
// th_1..th_m over BaseSeries. A monomial with k+1 generators and scalar
// degree s has shifted degree k + s.
using Polyvector = OddPoly<ThetaTag>;

inline Polyvector theta(const Ctx& ctx, int i) { return Polyvector::generator(ctx, i); }

inline std::optional<int> shifted_degree(const Polyvector& v) {
    auto d = v.homogeneous_degree();
    if (!d) return std::nullopt;
    return *d - 1;
}

// Graded-commutative product of polyvectors.
inline Polyvector wedge(const Polyvector& u, const Polyvector& v) { return u * v; }

// Schouten bracket, by bi-derivation expansion from the generator relations
//   [th_i, x^j] = -[x^j, th_i] = delta_i^j,   [x,x] = [th,th] = 0:
//
//   [u, v] = sum_i (d^R u / d th_i)(d v / d x^i) - (d u / d x^i)(d^L v / d th_i).
//
// Inputs must be homogeneous; the output is homogeneous of shifted degree
// |u| + |v|.
inline Polyvector schouten(const Polyvector& u, const Polyvector& v) {
    require_same_ctx(u.ctx(), v.ctx(), "schouten");
    if (!u.homogeneous_degree() || !v.homogeneous_degree())
        throw degree_error("schouten: inputs must be homogeneous");
    const int m = u.ctx()->m;
    Polyvector r(u.ctx());
    for (int i = 1; i <= m; ++i) {
        r += u.partial_generator_right(i) * v.derivative_x(i);
        r -= u.derivative_x(i) * v.partial_generator(i);
    }
    return r;
}

// Antisymmetric matrices of polynomial components.
using PolyMatrix = std::vector<std::vector<Poly>>;

inline PolyMatrix zero_matrix(int m) {
    return PolyMatrix(static_cast<size_t>(m), std::vector<Poly>(static_cast<size_t>(m), Poly(m)));
}

inline bool is_antisymmetric(const PolyMatrix& a) {
    const size_t m = a.size();
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j)
            if (a[i][j] != -a[j][i]) return false;
    return true;
}

// The bivector (1/2) a^{ij} th_i th_j; component extraction of the result
// returns the matrix entries back.
inline Polyvector bivector_from_matrix(const Ctx& ctx, const PolyMatrix& a) {
    Polyvector v(ctx);
    for (int i = 1; i <= ctx->m; ++i)
        for (int j = i + 1; j <= ctx->m; ++j)
            v.add_term({i, j}, BaseSeries::from_poly(ctx, a[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)]));
    return v;
}

// A symplectic form and its inverse Poisson structure, both with polynomial
// components. Construction verifies alpha.omega = id and the Jacobi identity
// of alpha.
class SymplecticPair {
public:
    SymplecticPair(Ctx ctx, PolyMatrix omega, PolyMatrix alpha, bool check = true)
        : ctx_(std::move(ctx)), omega_(std::move(omega)), alpha_(std::move(alpha)) {
        const size_t m = static_cast<size_t>(ctx_->m);
        if (omega_.size() != m || alpha_.size() != m)
            throw argument_error("SymplecticPair: matrix dimension mismatch");
        if (check) validate();
    }

    // Bypasses the invariants; only for deliberately broken fixtures in tests.
    static SymplecticPair unchecked(Ctx ctx, PolyMatrix omega, PolyMatrix alpha) {
        return SymplecticPair(std::move(ctx), std::move(omega), std::move(alpha), false);
    }

    const Ctx& ctx() const { return ctx_; }
    const PolyMatrix& omega() const { return omega_; }
    const PolyMatrix& alpha() const { return alpha_; }
    const Poly& omega_at(int i, int j) const { return omega_[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)]; }
    const Poly& alpha_at(int i, int j) const { return alpha_[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)]; }

    Polyvector alpha_bivector() const { return bivector_from_matrix(ctx_, alpha_); }

    bool alpha_constant() const {
        for (const auto& row : alpha_)
            for (const auto& p : row)
                if (!p.is_constant()) return false;
        return true;
    }

    void validate() const {
        const int m = ctx_->m;
        if (!is_antisymmetric(omega_) || !is_antisymmetric(alpha_))
            throw argument_error("SymplecticPair: matrices must be antisymmetric");
        for (int i = 1; i <= m; ++i)
            for (int k = 1; k <= m; ++k) {
                Poly s(m);
                for (int j = 1; j <= m; ++j) s += alpha_at(i, j) * omega_at(j, k);
                Poly expect(m, Rat(i == k ? 1 : 0));
                if (s != expect) throw argument_error("SymplecticPair: alpha is not inverse to omega");
            }
        Polyvector a = alpha_bivector();
        if (!schouten(a, a).is_zero())
            throw argument_error("SymplecticPair: alpha violates the Jacobi identity");
    }

private:
    Ctx ctx_;
    PolyMatrix omega_;
    PolyMatrix alpha_;
};

// Standard constant pair: alpha^{2i-1,2i} = 1 and omega its inverse.
inline SymplecticPair standard_pair(const Ctx& ctx) {
    const int m = ctx->m;
    if (m % 2 != 0) throw argument_error("standard_pair: dimension must be even");
    PolyMatrix alpha = zero_matrix(m), omega = zero_matrix(m);
    for (int i = 1; i <= m; i += 2) {
        alpha[static_cast<size_t>(i - 1)][static_cast<size_t>(i)] = Poly(m, Rat(1));
        alpha[static_cast<size_t>(i)][static_cast<size_t>(i - 1)] = Poly(m, Rat(-1));
        omega[static_cast<size_t>(i - 1)][static_cast<size_t>(i)] = Poly(m, Rat(-1));
        omega[static_cast<size_t>(i)][static_cast<size_t>(i - 1)] = Poly(m, Rat(1));
    }
    return SymplecticPair(ctx, std::move(omega), std::move(alpha));
}

namespace detail {

// Inverse of a unipotent polynomial matrix by the terminating Neumann series.
inline PolyMatrix unipotent_inverse(int m, const PolyMatrix& a) {
    PolyMatrix u = zero_matrix(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            u[static_cast<size_t>(i)][static_cast<size_t>(j)] = a[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (i == j) u[static_cast<size_t>(i)][static_cast<size_t>(j)] -= Poly(m, Rat(1));
        }
    PolyMatrix inv = zero_matrix(m), pw = zero_matrix(m);
    for (int i = 0; i < m; ++i) {
        inv[static_cast<size_t>(i)][static_cast<size_t>(i)] = Poly(m, Rat(1));
        pw[static_cast<size_t>(i)][static_cast<size_t>(i)] = Poly(m, Rat(1));
    }
    for (int k = 1; k <= m + 1; ++k) {
        PolyMatrix next = zero_matrix(m);
        bool nonzero = false;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                Poly s(m);
                for (int l = 0; l < m; ++l)
                    s += pw[static_cast<size_t>(i)][static_cast<size_t>(l)] * u[static_cast<size_t>(l)][static_cast<size_t>(j)];
                if (!s.is_zero()) nonzero = true;
                next[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::move(s);
            }
        if (!nonzero) return inv;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                Poly t = next[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (k & 1) t *= Rat(-1);
                inv[static_cast<size_t>(i)][static_cast<size_t>(j)] += t;
            }
        pw = std::move(next);
    }
    throw unsupported_error("unipotent_inverse: matrix is not unipotent");
}

} // namespace detail

// Pullback of the standard pair by a polynomial diffeomorphism phi with
// unipotent Jacobian (so the inverse Jacobian is again polynomial):
//   omega' = J^T omega J,  alpha' = J^{-1} alpha J^{-T},  J = D(phi).
inline SymplecticPair pulled_back_pair(const Ctx& ctx, const std::vector<Poly>& phi) {
    const int m = ctx->m;
    if (static_cast<int>(phi.size()) != m) throw argument_error("pulled_back_pair: need m component maps");
    SymplecticPair std_pair = standard_pair(ctx);
    PolyMatrix jac = zero_matrix(m);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            jac[static_cast<size_t>(k)][static_cast<size_t>(i)] = phi[static_cast<size_t>(k)].derivative(i + 1);
    PolyMatrix jinv = detail::unipotent_inverse(m, jac);

    PolyMatrix omega = zero_matrix(m), alpha = zero_matrix(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Poly so(m), sa(m);
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    const Poly& w = std_pair.omega()[static_cast<size_t>(k)][static_cast<size_t>(l)];
                    const Poly& av = std_pair.alpha()[static_cast<size_t>(k)][static_cast<size_t>(l)];
                    if (!w.is_zero())
                        so += jac[static_cast<size_t>(k)][static_cast<size_t>(i)] * w * jac[static_cast<size_t>(l)][static_cast<size_t>(j)];
                    if (!av.is_zero())
                        sa += jinv[static_cast<size_t>(i)][static_cast<size_t>(k)] * av * jinv[static_cast<size_t>(j)][static_cast<size_t>(l)];
                }
            omega[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::move(so);
            alpha[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::move(sa);
        }
    return SymplecticPair(ctx, std::move(omega), std::move(alpha));
}

// Non-constant polynomial fixture: the standard pair pulled back by the shear
// x^2 -> x^2 + (x^1)^2, x^4 -> x^4 + (x^1 + x^3)^2. In dimension two every
// unipotent shear preserves the standard area form (a polynomial pair with
// polynomial inverse has constant determinant), so this fixture needs m = 4.
inline SymplecticPair shear_pair(const Ctx& ctx) {
    const int m = ctx->m;
    if (m != 4) throw unsupported_error("shear_pair: non-constant pairs need m = 4");
    std::vector<Poly> phi;
    phi.reserve(static_cast<size_t>(m));
    for (int i = 1; i <= m; ++i) phi.push_back(Poly::variable(m, i));
    phi[1] += Poly::variable(m, 1) * Poly::variable(m, 1);
    Poly s = Poly::variable(m, 1) + Poly::variable(m, 3);
    phi[3] += s * s;
    return pulled_back_pair(ctx, phi);
}

} // namespace symdef

#endif
