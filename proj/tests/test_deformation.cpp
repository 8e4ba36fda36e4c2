#include "test_support.hpp"

#include "symdef/deformation.hpp"

#include <gtest/gtest.h>

using namespace symdef;
using symdef::testing::Rng;
using symdef::testing::SeriesProfile;

namespace {

Ctx ps_ctx() { return make_ctx(3, 1, {-1}, 3, -2, 4); } // three variables, one odd parameter
Ctx moyal_ctx(int m, int N = 4) { return make_ctx(m, 0, {}, N, -2, 4); }

PolyDiffOp ps_mu(const Ctx& c) {
    return PolyDiffOp::term(c, {{1}, {2}, {3}}, BaseSeries::param(c, 1));
}

TEST(McCheck, ZeroPassesEverywhere) {
    auto c = moyal_ctx(2);
    EXPECT_TRUE(mc_check(pd_context(c), PolyDiffOp::zero(c)).checked());
    EXPECT_TRUE(mc_check(omega_zero_context(c), SuspendedForm::zero(c)).checked());
    auto pair = standard_pair(c);
    EXPECT_TRUE(mc_check(pv_context(pair), Polyvector::zero(c)).checked());
}

TEST(McCheck, ThreeDerivationExample) {
    auto c = ps_ctx();
    auto rep = mc_check(pd_context(c), ps_mu(c));
    EXPECT_TRUE(rep.checked());
}

TEST(McCheck, ClosednessInFormContext) {
    auto c = moyal_ctx(2);
    auto L = omega_zero_context(c);
    auto good = SuspendedForm(ExteriorForm::monomial(c, {1, 2}, BaseSeries::eps(c)));
    EXPECT_TRUE(mc_check(L, good).checked());

    auto bad = SuspendedForm(ExteriorForm::monomial(c, {2}, BaseSeries::eps(c) * BaseSeries::variable(c, 1)));
    auto rep = mc_check(L, bad);
    EXPECT_FALSE(rep.checked());
    EXPECT_FALSE(rep.certificate.first_failure.empty());
}

TEST(McCheck, MoyalIsFlatAtEveryTruncation) {
    for (int N = 1; N <= 4; ++N) {
        for (int m : {2, 4}) {
            auto c = make_ctx(m, 0, {}, N, -2, 4);
            auto pair = standard_pair(c);
            auto mu = moyal_star(pair);
            EXPECT_TRUE(mc_check(pd_context(c), mu).checked());
        }
    }
}

TEST(Contexts, DifferentialIsBracketDerivation) {
    auto c = ps_ctx();
    auto L = pd_context(c);
    Rng rng(7);
    SeriesProfile pr;
    pr.max_deg = 1;
    pr.max_eps = 1;
    int done = 0;
    for (int it = 0; it < 300 && done < 40; ++it) {
        PolyDiffOp a(c), b(c);
        try {
            OpSymbol s1(static_cast<size_t>(rng.range(1, 2)));
            for (auto& mi : s1)
                for (int l = rng.range(0, 1); l > 0; --l) mi.push_back(rng.range(1, c->m));
            for (auto& mi : s1) std::sort(mi.begin(), mi.end());
            OpSymbol s2(static_cast<size_t>(rng.range(1, 2)));
            for (auto& mi : s2)
                for (int l = rng.range(0, 1); l > 0; --l) mi.push_back(rng.range(1, c->m));
            for (auto& mi : s2) std::sort(mi.begin(), mi.end());
            a = PolyDiffOp::term(c, s1, BaseSeries::monomial(c, ParamKey::unit(c->g), random_poly(rng, c->m, 1, 2)));
            b = PolyDiffOp::term(c, s2, BaseSeries::monomial(c, ParamKey::unit(c->g), random_poly(rng, c->m, 1, 2)));
        } catch (const argument_error&) {
            continue;
        }
        if (a.is_zero() || b.is_zero()) continue;
        int da = *dgla_degree(a);
        auto lhs = L.differential(L.bracket(a, b));
        auto rhs = L.bracket(L.differential(a), b);
        auto tail = L.bracket(a, L.differential(b));
        if (da & 1) tail *= Rat(-1);
        EXPECT_EQ(lhs, rhs + tail);
        ++done;
    }
    ASSERT_GE(done, 40);
}

TEST(Gauge, TrivialParameterFixesElement) {
    auto c = moyal_ctx(2);
    auto pair = standard_pair(c);
    auto mu = moyal_star(pair);
    auto L = pd_context(c);
    // constant-coefficient derivation: closed, and commutes with constant mu
    auto xi = PolyDiffOp::derivation(c, 1).left_mul(BaseSeries::eps(c));
    EXPECT_TRUE(L.differential(xi).is_zero());
    EXPECT_TRUE(L.bracket(xi, mu).is_zero());
    EXPECT_EQ(gauge_act(L, xi, mu), mu);
}

TEST(Gauge, PreservesMcAndInverts) {
    auto c = ps_ctx();
    auto L = pd_context(c);
    auto mu = ps_mu(c);
    Rng rng(21);
    SeriesProfile pr;
    pr.max_deg = 1;
    pr.min_eps = 1;
    pr.max_eps = 1;
    pr.use_params = false;
    for (int it = 0; it < 25; ++it) {
        // random degree-0 gauge parameter: arity 1 with eps coefficient
        MultiIndex mi;
        for (int l = rng.range(0, 1); l > 0; --l) mi.push_back(rng.range(1, c->m));
        std::sort(mi.begin(), mi.end());
        auto xi = PolyDiffOp::term(c, {mi}, random_series(rng, c, pr));
        if (xi.is_zero()) continue;
        ASSERT_EQ(dgla_degree(xi), std::optional<int>(0));
        auto moved = gauge_act(L, xi, mu);
        EXPECT_TRUE(mc_check(L, moved).checked());
        EXPECT_EQ(gauge_act(L, -xi, moved), mu);
    }
}

TEST(Gauge, PreservesFlatnessInEveryCarrier) {
    // polyvector carrier
    {
        auto c = make_ctx(2, 1, {-1}, 4, -3, 4);
        auto pair = standard_pair(c);
        auto L = pv_context(pair);
        auto mu = pair.alpha_bivector().left_mul(BaseSeries::eps(c, 2)); // degree 1, order 2
        ASSERT_TRUE(mc_check(L, mu).checked());
        Rng rng(141);
        SeriesProfile pr;
        pr.max_deg = 1;
        pr.min_eps = 1;
        pr.max_eps = 1;
        pr.use_params = false;
        for (int it = 0; it < 10; ++it) {
            Polyvector xi(c);
            xi.add_term({rng.range(1, 2)}, random_series(rng, c, pr));
            if (xi.is_zero()) continue;
            ASSERT_EQ(dgla_degree(xi), std::optional<int>(0));
            auto moved = gauge_act(L, xi, mu);
            EXPECT_TRUE(mc_check(L, moved).checked());
            EXPECT_EQ(gauge_act(L, -xi, moved), mu);
        }
    }
    // suspended-form carrier with the transported bracket
    {
        auto c = make_ctx(2, 0, {}, 4, -3, 4);
        auto pair = standard_pair(c);
        auto L = omega_context(pair);
        auto mu = SuspendedForm(ExteriorForm::monomial(c, {1, 2}, BaseSeries::eps(c)));
        ASSERT_TRUE(mc_check(L, mu).checked());
        Rng rng(143);
        for (int it = 0; it < 10; ++it) {
            auto xi = SuspendedForm(ExteriorForm::monomial(
                c, {rng.range(1, 2)},
                BaseSeries::eps(c) * BaseSeries::from_poly(c, random_poly(rng, 2, 2, 1))));
            if (xi.is_zero()) continue;
            ASSERT_EQ(dgla_degree(xi), std::optional<int>(0));
            auto moved = gauge_act(L, xi, mu);
            EXPECT_TRUE(mc_check(L, moved).checked());
            EXPECT_EQ(gauge_act(L, -xi, moved), mu);
        }
    }
}

TEST(Gauge, BreaksEpsVanishingCondition) {
    // an odd-parameter gauge with non-closed body moves the element off the
    // eps = 0 locus
    auto c = ps_ctx();
    auto L = pd_context(c);
    auto mu = ps_mu(c); // vanishes at eps = 0? no eps factor at all -> need care
    auto p = PolyDiffOp::term(c, {{1, 1}, {2}}, BaseSeries::constant(c, Rat(1))); // degree 1+0, d P != 0
    EXPECT_FALSE(hochschild_d(p).is_zero());
    auto xi = p.left_mul(BaseSeries::param(c, 1)); // degree 0
    ASSERT_EQ(dgla_degree(xi), std::optional<int>(0));
    auto mu_eps = mu.left_mul(BaseSeries::eps(c)); // now vanishes at eps = 0
    ASSERT_TRUE(mu_eps.at_eps_zero().is_zero());
    auto moved = gauge_act(L, xi, mu_eps);
    EXPECT_TRUE(mc_check(L, moved).checked());
    EXPECT_FALSE(moved.at_eps_zero().is_zero());
}

TEST(KsClass, ThreeDerivationClassIsOddDirected) {
    auto c = ps_ctx();
    auto kappa = ks_class(ps_mu(c));
    // frozen under the embedding's reversed-index and 1/(k+1)! conventions
    auto expected = Polyvector::monomial(c, {1, 2, 3}, BaseSeries::param(c, 1) * Rat(-1, 6));
    EXPECT_EQ(kappa, expected);
    EXPECT_FALSE(kappa.is_zero());
    // directed along e1 * th1 th2 th3: exactly one odd word, one parameter key
    ASSERT_EQ(kappa.terms().size(), 1u);
    EXPECT_EQ(kappa.terms().begin()->first, (OddKey{1, 2, 3}));
    EXPECT_TRUE(ks_integrability(kappa).pass);
}

TEST(KsClass, MoyalCalibration) {
    for (int m : {2, 4}) {
        auto c = moyal_ctx(m);
        auto pair = standard_pair(c);
        auto mu = moyal_star(pair);
        auto eps_alpha = pair.alpha_bivector().left_mul(BaseSeries::eps(c));
        EXPECT_EQ(ks_class(mu), eps_alpha);
        EXPECT_TRUE(ks_integrability(eps_alpha).pass);
    }
}

TEST(KsClass, GaugeInvariance) {
    auto c = ps_ctx();
    auto L = pd_context(c);
    auto mu = ps_mu(c);
    auto kappa = ks_class(mu);
    Rng rng(33);
    SeriesProfile pr;
    pr.max_deg = 1;
    pr.min_eps = 1;
    pr.max_eps = 2;
    pr.use_params = false;
    int done = 0;
    for (int it = 0; it < 60 && done < 25; ++it) {
        MultiIndex mi;
        for (int l = rng.range(0, 2); l > 0; --l) mi.push_back(rng.range(1, c->m));
        std::sort(mi.begin(), mi.end());
        auto xi = PolyDiffOp::term(c, {mi}, random_series(rng, c, pr));
        if (xi.is_zero()) continue;
        auto moved = gauge_act(L, xi, mu);
        EXPECT_EQ(ks_class(moved), kappa);
        ++done;
    }
    ASSERT_GE(done, 25);
}

TEST(KsClass, RejectsMalformedInput) {
    auto c = moyal_ctx(2, 3);
    // non-closed order-one coset signals a malformed element
    auto bad = PolyDiffOp::term(c, {{1, 1}}, BaseSeries::eps(c));
    ASSERT_FALSE(hochschild_d(bad).is_zero());
    EXPECT_THROW(ks_class(bad), contract_error);
    // the class extraction is reserved for Laurent-free series
    auto laurent = PolyDiffOp::term(c, {{1}, {2}}, BaseSeries::eps(c, -1) * BaseSeries::eps(c, 2));
    EXPECT_NO_THROW(ks_class(laurent)); // eps^{-1} eps^2 reduces to eps, fine
    auto genuine = PolyDiffOp::term(c, {{1}, {2}}, BaseSeries::eps(c, -1));
    EXPECT_THROW(ks_class(genuine), unsupported_error);
}

TEST(Shift, ForwardInverseRoundTrip) {
    auto c = moyal_ctx(2, 3);
    auto pair = standard_pair(c);
    auto mu_alpha = moyal_star(pair);
    auto L = pd_context(c);
    // a flat element gauge-equivalent to the background
    auto xi = PolyDiffOp::derivation(c, 1).left_mul(BaseSeries::eps(c) * BaseSeries::variable(c, 2));
    auto mu = gauge_act(L, xi, mu_alpha);
    ASSERT_TRUE(mc_check(L, mu).checked());
    auto inv = shift(mu, mu_alpha, ShiftDirection::Inverse);
    ASSERT_TRUE(inv.checked());
    auto fwd = shift(inv.value, mu_alpha, ShiftDirection::Forward);
    ASSERT_TRUE(fwd.checked());
    EXPECT_EQ(fwd.value, mu);
}

TEST(Paths, TopDegreeBracketResidualIsCaught) {
    // all residuals vanish except the bracket convolution at t^3 dt, which
    // sits above both the dt-part degree and the t-part degree
    auto c = moyal_ctx(2);
    auto pair = standard_pair(c);
    auto L = omega_context(pair);
    auto lambda = SuspendedForm(ExteriorForm::monomial(
        c, {2}, BaseSeries::eps(c) * BaseSeries::variable(c, 1)));
    auto a2 = L.differential(lambda) * Rat(1, 2); // constant closed two-form
    ASSERT_FALSE(a2.is_zero());
    auto zero1 = SuspendedForm::zero(c);
    PathElem<SuspendedForm> path{{zero1, zero1, a2}, {zero1, lambda}};
    ASSERT_FALSE(omega_bracket(a2, lambda, pair).is_zero());
    auto [rep, ends] = mc_path_check(L, path);
    EXPECT_FALSE(rep.pass);
    EXPECT_EQ(rep.first_failure.substr(0, 6), "t^3 dt");
    (void)ends;
}

TEST(Paths, MalformedDataIsRejected) {
    auto c = moyal_ctx(2);
    auto L = omega_zero_context(c);
    // degree-0 coefficient in the t-part
    auto gauge_like = SuspendedForm(ExteriorForm::monomial(c, {2}, BaseSeries::eps(c)));
    PathElem<SuspendedForm> bad{{gauge_like}, {}};
    EXPECT_THROW(mc_path_check(L, bad), degree_error);
    PathElem<SuspendedForm> empty{{}, {}};
    EXPECT_THROW(mc_path_check(L, empty), argument_error);
}

TEST(KsIntegrability, DetectsNonPoissonBivector) {
    auto c = ps_ctx();
    // the contact plane field th1 th2 - x2 th2 th3 violates the Jacobi identity
    Polyvector v(c);
    v.add_term({1, 2}, BaseSeries::eps(c));
    v.add_term({2, 3}, BaseSeries::eps(c) * BaseSeries::variable(c, 2) * Rat(-1));
    ASSERT_FALSE(schouten(v, v).is_zero());
    EXPECT_FALSE(ks_integrability(v).pass);

    // the odd-parameter top class squares to zero
    auto top = Polyvector::monomial(c, {1, 2, 3}, BaseSeries::param(c, 1));
    EXPECT_TRUE(ks_integrability(top).pass);
}

TEST(ShiftAndTwist, RoundTripAndFlatness) {
    auto c = moyal_ctx(2, 3);
    auto pair = standard_pair(c);
    auto mu_alpha = moyal_star(pair);

    auto fwd = shift(PolyDiffOp::zero(c), mu_alpha, ShiftDirection::Forward);
    EXPECT_TRUE(fwd.checked());
    EXPECT_EQ(fwd.value, mu_alpha);

    auto inv = shift(mu_alpha, mu_alpha, ShiftDirection::Inverse);
    EXPECT_TRUE(inv.checked());
    EXPECT_TRUE(inv.value.is_zero());

    // twisted differential squares to zero on random operators
    auto cert = mc_check(pd_context(c), mu_alpha);
    auto Lt = twist(c, cert);
    Rng rng(41);
    SeriesProfile pr;
    pr.max_deg = 1;
    pr.max_eps = 1;
    for (int it = 0; it < 30; ++it) {
        OpSymbol sym(static_cast<size_t>(rng.range(0, 2)));
        for (auto& mi : sym) {
            for (int l = rng.range(0, 2); l > 0; --l) mi.push_back(rng.range(1, c->m));
            std::sort(mi.begin(), mi.end());
        }
        PolyDiffOp p(c);
        p.add_term(sym, random_series(rng, c, pr));
        if (p.is_zero()) continue;
        EXPECT_TRUE(Lt.differential(Lt.differential(p)).is_zero());
    }

    // twisting by zero restores the plain differential
    auto zero_cert = mc_check(pd_context(c), PolyDiffOp::zero(c));
    auto Lz = twist(c, zero_cert);
    auto probe = PolyDiffOp::term(c, {{1, 1}}, BaseSeries::constant(c, Rat(1)));
    EXPECT_EQ(Lz.differential(probe), pd_context(c).differential(probe));

    // the twisted differential of a function is the star-commutator cochain
    auto f = BaseSeries::variable(c, 1) * BaseSeries::variable(c, 2);
    auto df = Lt.differential(PolyDiffOp::function(c, f));
    auto m_tot = PolyDiffOp::product(c) + mu_alpha;
    auto star = [&](const BaseSeries& x, const BaseSeries& y) { return eval_op(m_tot, {x, y}); };
    Rng rng2(43);
    for (int it = 0; it < 20; ++it) {
        auto a = BaseSeries::from_poly(c, random_poly(rng2, c->m, 3, 2));
        EXPECT_EQ(eval_op(df, {a}), star(f, a) - star(a, f));
    }

    // unchecked background is rejected
    MCElement<PolyDiffOp> fake{mu_alpha, failing("mc", "x", "pd")};
    EXPECT_THROW(twist(c, fake), contract_error);
}

TEST(Shift, ConjugatesGaugeOrbits) {
    auto c = moyal_ctx(2, 3);
    auto pair = standard_pair(c);
    auto mu_alpha = moyal_star(pair);
    auto L = pd_context(c);
    auto Lt = pd_twisted_context(mu_alpha);
    Rng rng(47);
    SeriesProfile pr;
    pr.max_deg = 1;
    pr.min_eps = 1;
    pr.max_eps = 1;
    for (int it = 0; it < 15; ++it) {
        MultiIndex mi;
        for (int l = rng.range(0, 1); l > 0; --l) mi.push_back(rng.range(1, c->m));
        std::sort(mi.begin(), mi.end());
        auto xi = PolyDiffOp::term(c, {mi}, random_series(rng, c, pr));
        if (xi.is_zero()) continue;
        // a flat element of the twisted structure, from a gauge move of zero
        auto mu_tilde = gauge_act(Lt, xi, PolyDiffOp::zero(c));
        auto lhs = gauge_act(L, xi, mu_alpha + mu_tilde);
        auto rhs = mu_alpha + gauge_act(Lt, xi, mu_tilde);
        EXPECT_EQ(lhs, rhs);
    }
}

TEST(Conditions, MoyalSatisfiesBoth) {
    auto c = moyal_ctx(2);
    auto pair = standard_pair(c);
    auto rep = conditions_check(moyal_star(pair), pair);
    EXPECT_TRUE(rep.ks_is_eps_alpha);
    EXPECT_TRUE(rep.vanishes_at_eps_zero);
    EXPECT_TRUE(rep.multiplications_reduce);
}

TEST(Conditions, OddDirectedClassFailsFirstCondition) {
    // the three-derivation element embedded on R^4 against the standard pair
    auto c = make_ctx(4, 1, {-1}, 3, -2, 4);
    auto pair = standard_pair(c);
    auto mu = PolyDiffOp::term(c, {{1}, {2}, {3}}, BaseSeries::param(c, 1));
    ASSERT_TRUE(mc_check(pd_context(c), mu).checked());
    auto rep = conditions_check(mu, pair);
    EXPECT_FALSE(rep.ks_is_eps_alpha);
    EXPECT_FALSE(rep.vanishes_at_eps_zero);

    // order-one odd padding bends the class away from eps alpha and also
    // breaks the eps = 0 vanishing; padding at order two leaves both intact
    auto mu_a = moyal_star(pair);
    auto w = hkr_embed(Polyvector::monomial(c, {1, 2, 3}, BaseSeries::constant(c, Rat(1))));
    auto padded1 = mu_a + w.left_mul(BaseSeries::param(c, 1));
    auto rep1 = conditions_check(padded1, pair);
    EXPECT_FALSE(rep1.ks_is_eps_alpha);
    EXPECT_FALSE(rep1.vanishes_at_eps_zero);

    auto padded2 = mu_a + w.left_mul(BaseSeries::eps(c) * BaseSeries::param(c, 1));
    auto rep2 = conditions_check(padded2, pair);
    EXPECT_TRUE(rep2.ks_is_eps_alpha);
    EXPECT_TRUE(rep2.vanishes_at_eps_zero);
}

TEST(Paths, ConstantAndExactFormPaths) {
    auto c = moyal_ctx(2);
    auto L = omega_zero_context(c);
    auto mu = SuspendedForm(ExteriorForm::monomial(c, {1, 2}, BaseSeries::eps(c)));

    // constant path
    PathElem<SuspendedForm> constant{{mu}, {}};
    auto [rep, ends] = mc_path_check(L, constant);
    EXPECT_TRUE(rep.pass);
    EXPECT_TRUE(ends.first.checked());
    EXPECT_EQ(ends.first.value, mu);
    EXPECT_EQ(ends.second.value, mu);

    // eta_t = mu + t * d(lambda), eta_dt = lambda, lambda = s(eps x1 dx2)
    auto lambda = SuspendedForm(ExteriorForm::monomial(c, {2}, BaseSeries::eps(c) * BaseSeries::variable(c, 1)));
    auto dlambda = L.differential(lambda);
    ASSERT_FALSE(dlambda.is_zero());
    PathElem<SuspendedForm> path{{mu, dlambda}, {lambda}};
    auto [rep2, ends2] = mc_path_check(L, path);
    EXPECT_TRUE(rep2.pass);
    EXPECT_TRUE(ends2.first.checked());
    EXPECT_TRUE(ends2.second.checked());
    EXPECT_EQ(ends2.second.value, mu + dlambda);

    // dropping the dt component breaks the check
    PathElem<SuspendedForm> broken{{mu, dlambda}, {}};
    auto [rep3, ends3] = mc_path_check(L, broken);
    EXPECT_FALSE(rep3.pass);
    (void)ends3;
}

TEST(TXi, IntertwinesDeformedProducts) {
    auto c = moyal_ctx(2, 3);
    auto pair = standard_pair(c);
    auto mu = moyal_star(pair);
    auto L = pd_context(c);
    auto xi = PolyDiffOp::derivation(c, 1).left_mul(BaseSeries::eps(c) * BaseSeries::variable(c, 1));
    ASSERT_EQ(dgla_degree(xi), std::optional<int>(0));
    auto mu_t = gauge_act(L, xi, mu);
    ASSERT_TRUE(mc_check(L, mu_t).checked());

    auto m1 = PolyDiffOp::product(c) + mu;
    auto m2 = PolyDiffOp::product(c) + mu_t;
    auto basis = monomial_basis(c->m, 3);
    for (const Poly& pa : basis)
        for (const Poly& pb : basis) {
            auto a = BaseSeries::from_poly(c, pa);
            auto b = BaseSeries::from_poly(c, pb);
            auto lhs = t_xi(xi, eval_op(m1, {a, b}));
            auto rhs = eval_op(m2, {t_xi(xi, a), t_xi(xi, b)});
            ASSERT_EQ(lhs, rhs);
        }
}

TEST(Filtration, BracketsAddOrders) {
    auto c = ps_ctx();
    auto L = pd_context(c);
    Rng rng(53);
    SeriesProfile pr;
    pr.max_deg = 1;
    pr.min_eps = 0;
    pr.max_eps = 2;
    for (int it = 0; it < 60; ++it) {
        OpSymbol s1(static_cast<size_t>(rng.range(0, 2)));
        OpSymbol s2(static_cast<size_t>(rng.range(0, 2)));
        for (auto* s : {&s1, &s2})
            for (auto& mi : *s) {
                for (int l = rng.range(0, 1); l > 0; --l) mi.push_back(rng.range(1, c->m));
                std::sort(mi.begin(), mi.end());
            }
        PolyDiffOp a(c), b(c);
        a.add_term(s1, random_series(rng, c, pr));
        b.add_term(s2, random_series(rng, c, pr));
        if (a.is_zero() || b.is_zero()) continue;
        auto br = L.bracket(a, b);
        if (br.is_zero()) continue;
        EXPECT_GE(br.m_order(), a.m_order() + b.m_order());
    }
}

} // namespace
