#include "test_support.hpp"

#include "symdef/coderivations.hpp"

#include <gtest/gtest.h>

using namespace symdef;
using symdef::testing::Rng;

namespace {

using WA = WordAlgebra<SuspendedForm>;
using Key = CarrierTraits<SuspendedForm>::Key;
using Sum = WA::Sum;

Ctx ctx2() { return make_ctx(2, 0, {}, 4, -3, 4); }
Ctx ctx4() { return make_ctx(4, 1, {-1}, 4, -5, 4); }

Key key_of(const SuspendedForm& v) {
    auto s = CarrierTraits<SuspendedForm>::split(v);
    if (s.size() != 1 || s[0].second != Rat(1))
        throw argument_error("key_of: expected a unit monomial");
    return s[0].first;
}

SuspendedForm mono(const Ctx& c, OddKey dxs, BaseSeries coeff) {
    return SuspendedForm(ExteriorForm::monomial(c, std::move(dxs), std::move(coeff)));
}

// non-Poisson control pair on R^4: alpha^{12} = 1, alpha^{34} = 1 + x^1
SymplecticPair non_poisson_pair(const Ctx& c) {
    auto al = zero_matrix(4);
    al[0][1] = Poly(4, Rat(1));
    al[1][0] = Poly(4, Rat(-1));
    al[2][3] = Poly(4, Rat(1)) + Poly::variable(4, 1);
    al[3][2] = -al[2][3];
    auto pair = SymplecticPair::unchecked(c, zero_matrix(4), al);
    auto biv = pair.alpha_bivector();
    EXPECT_FALSE(schouten(biv, biv).is_zero());
    return pair;
}

TEST(Words, ComultExamples) {
    auto c = ctx4();
    WA wa(c);
    // two degree-0 factors (word-odd): the swapped summand carries -1
    auto f1 = mono(c, {1}, BaseSeries::eps(c));
    auto f2 = mono(c, {2}, BaseSeries::eps(c) * BaseSeries::variable(c, 1));
    WA::Word w{key_of(f1), key_of(f2)};
    ASSERT_EQ(wa.canonicalize(w), 1);
    auto splits = wa.comult(w);
    ASSERT_EQ(splits.size(), 2u);
    int plus = 0, minus = 0;
    for (const auto& [l, r, s] : splits) (s > 0 ? plus : minus)++;
    EXPECT_EQ(plus, 1);
    EXPECT_EQ(minus, 1);

    // length-3 word: 3 + 3 shuffle splits
    auto f3 = mono(c, {1, 2}, BaseSeries::eps(c)); // dgla 1 -> word-even
    WA::Word w3{key_of(f1), key_of(f2), key_of(f3)};
    ASSERT_NE(wa.canonicalize(w3), 0);
    EXPECT_EQ(wa.comult(w3).size(), 6u);
}

TEST(Words, OddFactorSquaresToZero) {
    auto c = ctx4();
    WA wa(c);
    auto f = mono(c, {1}, BaseSeries::eps(c)); // word-odd
    WA::Word w{key_of(f), key_of(f)};
    EXPECT_EQ(wa.canonicalize(w), 0);
    auto g = mono(c, {1, 2}, BaseSeries::eps(c)); // word-even
    WA::Word w2{key_of(g), key_of(g)};
    EXPECT_NE(wa.canonicalize(w2), 0);
}

TEST(CeCoderivation, MatchesPrintedBinaryExpansion) {
    auto c = ctx2();
    WA wa(c);
    auto L = omega_zero_context(c);
    auto q = ce_coderivation(L, c);

    auto eta1 = mono(c, {2}, BaseSeries::eps(c) * BaseSeries::variable(c, 1)); // |eta1| = 1
    auto eta2 = mono(c, {1}, BaseSeries::eps(c) * BaseSeries::variable(c, 2));
    Sum w;
    wa.add(w, {key_of(eta1), key_of(eta2)}, Rat(1));
    auto got = q.apply(w);

    // expected: (D eta1) eta2 + (-1)^{|eta1|} eta1 (D eta2), D = -d
    Sum expect;
    for (const auto& [k, r] : CarrierTraits<SuspendedForm>::split(L.differential(eta1)))
        wa.add(expect, {k, key_of(eta2)}, r);
    for (const auto& [k, r] : CarrierTraits<SuspendedForm>::split(L.differential(eta2)))
        wa.add(expect, {key_of(eta1), k}, -r); // (-1)^{|eta1|} with |eta1| = 1
    EXPECT_EQ(got, expect);
}

TEST(CeCoderivation, SquaresToZeroInEveryContext) {
    // forms with zero bracket and with the transported bracket
    auto c4 = ctx4();
    auto sh = shear_pair(c4);
    WA wa(c4);
    std::mt19937_64 eng(99);
    auto q_zero = ce_coderivation(omega_zero_context(c4), c4);
    auto q_full = ce_coderivation(omega_context(sh), c4);
    auto q_br = ce_coderivation(omega_bracket_only_context(sh), c4);
    for (int len = 1; len <= 4; ++len) {
        for (int it = 0; it < 6; ++it) {
            Sum w;
            WA::Word word;
            for (int t = 0; t < len; ++t)
                word.push_back(key_of(symdef::detail::random_tilde_monomial(eng, c4, 1)));
            wa.add(w, word, Rat(1));
            if (w.empty()) continue;
            EXPECT_TRUE(q_zero.apply(q_zero.apply(w)).empty());
            EXPECT_TRUE(q_full.apply(q_full.apply(w)).empty());
            EXPECT_TRUE(q_br.apply(q_br.apply(w)).empty());
        }
    }

    // operator carrier
    auto c3 = make_ctx(3, 1, {-1}, 3, -2, 4);
    auto q_pd = ce_coderivation(pd_context(c3), c3);
    WordAlgebra<PolyDiffOp> wpd(c3);
    Rng rng(17);
    for (int len = 1; len <= 3; ++len)
        for (int it = 0; it < 5; ++it) {
            WordAlgebra<PolyDiffOp>::Sum w;
            WordAlgebra<PolyDiffOp>::Word word;
            for (int t = 0; t < len; ++t) {
                OpSymbol sym(static_cast<size_t>(rng.range(1, 2)));
                for (auto& mi : sym) {
                    for (int l = rng.range(0, 1); l > 0; --l) mi.push_back(rng.range(1, 3));
                    std::sort(mi.begin(), mi.end());
                }
                ParamKey pk = ParamKey::unit(1);
                pk.k0 = rng.range(0, 1);
                pk.kp[0] = rng.range(0, 1);
                XMono xe(3, 0);
                xe[static_cast<size_t>(rng.range(0, 2))] = rng.range(0, 2);
                word.push_back({sym, pk, xe});
            }
            wpd.add(w, word, Rat(1));
            if (w.empty()) continue;
            EXPECT_TRUE(q_pd.apply(q_pd.apply(w)).empty());
        }
}

TEST(CeCoderivation, BracketHalfMatchesThreeTermExpansion) {
    // the binary corestriction of the bracket coderivation reproduces the
    // printed three-term expression with its leading sign
    auto c = ctx4();
    auto sh = shear_pair(c);
    auto q_br = ce_coderivation(omega_bracket_only_context(sh), c);
    std::mt19937_64 eng(7);
    WA wa(c);
    for (int it = 0; it < 40; ++it) {
        auto eta1 = symdef::detail::random_tilde_monomial(eng, c, 2);
        auto eta2 = symdef::detail::random_tilde_monomial(eng, c, 2);
        Sum w;
        wa.add(w, {key_of(eta1), key_of(eta2)}, Rat(1));
        if (w.empty()) continue;
        auto got = q_br.apply(w);

        const int d1 = *eta1.body.homogeneous_degree();
        SuspendedForm expect = omega_bracket(eta1, eta2, sh);
        if (d1 & 1) expect *= Rat(-1); // (-1)^{|v1|-1} with |v1| = d1 - 1
        Sum es;
        for (const auto& [k, r] : CarrierTraits<SuspendedForm>::split(expect))
            wa.add(es, {k}, r);
        EXPECT_EQ(got, es);
    }
}

TEST(Pi, CorestrictionExamples) {
    auto c = ctx2();
    auto pair = standard_pair(c);
    auto pi = pi_coderivation(pair);
    WA wa(c);

    // only the binary rule is populated
    EXPECT_EQ(pi.taylor.size(), 1u);
    EXPECT_EQ(pi.taylor.count(2), 1u);

    // 0-forms contract to zero
    auto f = mono(c, {}, BaseSeries::eps(c, 2) * BaseSeries::variable(c, 1));
    auto g = mono(c, {}, BaseSeries::eps(c, 2) * BaseSeries::variable(c, 2));
    Sum w;
    wa.add(w, {key_of(f), key_of(g)}, Rat(1));
    EXPECT_TRUE(pi.apply(w).empty());

    // p Pi(s eps dx1, s eps dx2) = -s eps^3 for alpha^{12} = 1
    auto a = mono(c, {1}, BaseSeries::eps(c));
    auto b = mono(c, {2}, BaseSeries::eps(c));
    Sum w2;
    wa.add(w2, {key_of(a), key_of(b)}, Rat(1));
    auto img = pi.apply(w2);
    auto val = wa.length_one_value(img);
    EXPECT_EQ(val, mono(c, {}, BaseSeries::eps(c, 3)) * Rat(-1));

    // membership guard: both factors outside the tilde span
    auto low = mono(c, {1, 2}, BaseSeries::eps(c, -2));
    Sum w3;
    wa.add(w3, {key_of(low), key_of(low)}, Rat(1));
    ASSERT_FALSE(w3.empty()); // word-even factors may repeat
    EXPECT_THROW(pi.apply(w3), membership_error);
}

TEST(Pi, FiltrationCompatibility) {
    // the binary rule raises the order by at least the sum of input orders
    auto c = ctx4();
    auto sh = shear_pair(c);
    auto pi = pi_coderivation(sh);
    WA wa(c);
    std::mt19937_64 eng(42);
    for (int it = 0; it < 60; ++it) {
        auto a = symdef::detail::random_tilde_monomial(eng, c, 1);
        auto b = symdef::detail::random_tilde_monomial(eng, c, 1);
        Sum w;
        wa.add(w, {key_of(a), key_of(b)}, Rat(1));
        if (w.empty()) continue;
        auto out = wa.length_one_value(pi.apply(w));
        if (out.is_zero()) continue;
        EXPECT_GE(out.m_order(), a.m_order() + b.m_order());
    }
}

TEST(ExpPi, TaylorCoefficientsRespectFiltration) {
    // order of the projected n-ary coefficient is at least the sum of the
    // factor orders
    auto c = ctx4();
    auto sh = shear_pair(c);
    auto pi = pi_coderivation(sh);
    WA wa(c);
    std::mt19937_64 eng(606);
    for (int len = 2; len <= 4; ++len)
        for (int it = 0; it < 10; ++it) {
            WA::Word word;
            int order_sum = 0;
            for (int t = 0; t < len; ++t) {
                auto v = symdef::detail::random_tilde_monomial(eng, c, 1);
                word.push_back(key_of(v));
                order_sum += v.m_order();
            }
            Sum w;
            wa.add(w, word, Rat(1));
            if (w.empty()) continue;
            auto val = wa.length_one_value(exp_apply(pi, w, +1));
            if (val.is_zero()) continue;
            EXPECT_GE(val.m_order(), order_sum);
        }
}

TEST(CeCoderivation, ClosedSingletonsVanish) {
    auto c = ctx2();
    auto q = ce_coderivation(omega_zero_context(c), c);
    WA wa(c);
    auto closed = mono(c, {1, 2}, BaseSeries::eps(c)); // top form on the plane
    Sum w;
    wa.add(w, {key_of(closed)}, Rat(1));
    EXPECT_TRUE(q.apply(w).empty());
}

TEST(Pi, IdentitiesOnBothFixtures) {
    auto c2 = ctx2();
    auto rep2 = verify_pi_identities(standard_pair(c2), 60, 25, 12345);
    EXPECT_TRUE(rep2.pass());
    EXPECT_GE(rep2.binary_checked, 60);
    EXPECT_GE(rep2.ternary_checked, 25);

    auto c4 = ctx4();
    auto rep4 = verify_pi_identities(shear_pair(c4), 40, 15, 999);
    EXPECT_TRUE(rep4.pass());
}

TEST(Pi, JacobiSensitivityControl) {
    // a non-Poisson inverse satisfies the commutator identity but breaks the
    // ternary one
    auto c = make_ctx(4, 0, {}, 4, -4, 4);
    auto pair = non_poisson_pair(c);
    auto rep = verify_pi_identities(pair, 50, 30, 4242);
    EXPECT_EQ(rep.binary_failed, 0);
    EXPECT_GT(rep.ternary_failed, 0);
}

TEST(Pi, CommutatorCorestrictionMatchesBracketHalf) {
    auto c = ctx4();
    auto sh = shear_pair(c);
    auto pi = pi_coderivation(sh);
    auto q_d = ce_coderivation(omega_zero_context(c), c);
    auto q_br = ce_coderivation(omega_bracket_only_context(sh), c);
    auto comm = coder_commutator(pi, q_d);
    std::mt19937_64 eng(55);
    WA wa(c);
    for (int it = 0; it < 25; ++it) {
        auto a = symdef::detail::random_tilde_monomial(eng, c, 1);
        auto b = symdef::detail::random_tilde_monomial(eng, c, 1);
        std::vector<Key> keys{key_of(a), key_of(b)};
        WA::Word w(keys.begin(), keys.end());
        if (wa.canonicalize(w) == 0) continue;
        EXPECT_EQ(comm.corestriction(w), q_br.corestriction(w));
    }
}

TEST(ExpPi, InverseAndConjugation) {
    for (bool shear : {false, true}) {
        auto c = shear ? ctx4() : ctx2();
        auto pair = shear ? shear_pair(c) : standard_pair(c);
        auto pi = pi_coderivation(pair);
        auto q_d = ce_coderivation(omega_zero_context(c), c);
        auto q_full = ce_coderivation(omega_context(pair), c);
        std::mt19937_64 eng(shear ? 31337 : 1729);
        WA wa(c);
        for (int len = 1; len <= 4; ++len)
            for (int it = 0; it < 6; ++it) {
                Sum w;
                WA::Word word;
                for (int t = 0; t < len; ++t)
                    word.push_back(key_of(symdef::detail::random_tilde_monomial(eng, c, 1)));
                wa.add(w, word, Rat(1));
                if (w.empty()) continue;

                // exp(Pi) exp(-Pi) = id
                EXPECT_EQ(exp_apply(pi, exp_apply(pi, w, -1), +1), w);
                // exp(Pi) is the identity on singletons
                if (len == 1) EXPECT_EQ(exp_apply(pi, w, +1), w);
                // exp(Pi) Q_{-d} exp(-Pi) = Q_{-d} + Q_bracket
                auto lhs = exp_apply(pi, q_d.apply(exp_apply(pi, w, -1)), +1);
                auto rhs = q_full.apply(w);
                EXPECT_EQ(lhs, rhs);
            }
    }
}

TEST(ExpPi, CoalgebraMorphism) {
    auto c = ctx2();
    auto pair = standard_pair(c);
    auto pi = pi_coderivation(pair);
    WA wa(c);
    std::mt19937_64 eng(2024);
    using Tensor = std::map<std::pair<WA::Word, WA::Word>, Rat>;
    auto tensor_add = [](Tensor& t, const WA::Word& l, const WA::Word& r, const Rat& c_) {
        if (symdef::is_zero(c_)) return;
        auto key = std::make_pair(l, r);
        auto it = t.find(key);
        if (it == t.end()) {
            t.emplace(key, c_);
        } else {
            it->second += c_;
            if (symdef::is_zero(it->second)) t.erase(it);
        }
    };
    for (int len = 2; len <= 4; ++len)
        for (int it = 0; it < 8; ++it) {
            Sum w;
            WA::Word word;
            for (int t = 0; t < len; ++t)
                word.push_back(key_of(symdef::detail::random_tilde_monomial(eng, c, 1)));
            wa.add(w, word, Rat(1));
            if (w.empty()) continue;

            // Delta(exp(Pi) w)
            Tensor lhs;
            for (const auto& [wd, cf] : exp_apply(pi, w, +1))
                for (const auto& [l, r, s] : wa.comult(wd)) tensor_add(lhs, l, r, cf * Rat(s));
            // (exp(Pi) x exp(Pi))(Delta w): Pi is even, no crossing signs
            Tensor rhs;
            for (const auto& [wd, cf] : w)
                for (const auto& [l, r, s] : wa.comult(wd)) {
                    Sum ls, rs;
                    wa.add(ls, l, Rat(1));
                    wa.add(rs, r, Rat(1));
                    for (const auto& [lw, lc] : exp_apply(pi, ls, +1))
                        for (const auto& [rw, rc] : exp_apply(pi, rs, +1))
                            tensor_add(rhs, lw, rw, cf * Rat(s) * lc * rc);
                }
            EXPECT_EQ(lhs, rhs);
        }
}

TEST(Pushforward, FlatElementThroughExpPi) {
    auto c = ctx2();
    auto pair = standard_pair(c);
    auto pi = pi_coderivation(pair);

    auto mu = mono(c, {1, 2}, BaseSeries::eps(c));
    EXPECT_EQ(pushforward_mc(identity_morphism(c), mu), mu);
    // a morphism without the filtration certificate is refused
    auto broken = identity_morphism(c);
    broken.filtration_compatible = false;
    EXPECT_THROW(pushforward_mc(broken, mu), contract_error);
    auto nu = pushforward_exp_pi(pi, mu, +1);
    // frozen: mu + eps^3 dx1 dx2; the cubic term is (1/2) p Pi(mu mu)
    auto expect = mu + mono(c, {1, 2}, BaseSeries::eps(c, 3));
    EXPECT_EQ(nu, expect);

    EXPECT_TRUE(mc_check(omega_context(pair), nu).checked());
    // inverse morphism undoes the move
    EXPECT_EQ(pushforward_exp_pi(pi, nu, -1), mu);
}

TEST(Pushforward, RespectsOneCells) {
    auto c = ctx2();
    auto pair = standard_pair(c);
    auto pi = pi_coderivation(pair);
    auto L0 = omega_zero_context(c);
    auto L1 = omega_context(pair);

    auto mu = mono(c, {1, 2}, BaseSeries::eps(c));
    auto lambda = mono(c, {2}, BaseSeries::eps(c) * BaseSeries::variable(c, 1));
    auto dl = L0.differential(lambda);
    PathElem<SuspendedForm> path{{mu, dl}, {lambda}};
    auto [rep, ends] = mc_path_check(L0, path);
    ASSERT_TRUE(rep.pass);

    auto pushed = pushforward_exp_pi_path(pi, path, +1);
    auto [rep2, ends2] = mc_path_check(L1, pushed);
    EXPECT_TRUE(rep2.pass);
    EXPECT_EQ(ends2.first.value, pushforward_exp_pi(pi, ends.first.value, +1));
    EXPECT_EQ(ends2.second.value, pushforward_exp_pi(pi, ends.second.value, +1));
}

TEST(Pipeline, TwoFormOnThePlane) {
    auto c = ctx2();
    auto pair = standard_pair(c);
    auto eta = mono(c, {1, 2}, BaseSeries::eps(c));
    auto res = theta_pi_pipeline(eta, pair);
    EXPECT_TRUE(res.omega_level.checked());
    EXPECT_TRUE(res.pv_level.checked());
    EXPECT_TRUE(in_tilde_pv(res.pv_level.value));

    // zero maps to zero
    auto z = theta_pi_pipeline(SuspendedForm::zero(c), pair);
    EXPECT_TRUE(z.omega_level.value.is_zero());
    EXPECT_TRUE(z.pv_level.value.is_zero());

    // wrong degree is rejected up front
    auto one_form = mono(c, {2}, BaseSeries::eps(c) * BaseSeries::variable(c, 1));
    EXPECT_THROW(theta_pi_pipeline(one_form, pair), degree_error);
}

TEST(Pipeline, MixedInputOnShearFixture) {
    auto c = ctx4();
    auto pair = shear_pair(c);
    // eps dx1 dx2 + eps^{-2} e1 dx1 dx2 dx3: degree 1 throughout, closed,
    // inside the tilde span
    auto eta = mono(c, {1, 2}, BaseSeries::eps(c)) +
               mono(c, {1, 2, 3}, BaseSeries::eps(c, -2) * BaseSeries::param(c, 1));
    ASSERT_EQ(eta.degree(), std::optional<int>(1));
    ASSERT_TRUE(in_space(eta, FormSpace::Tilde));
    ASSERT_TRUE(de_rham(eta.body).is_zero());

    auto res = theta_pi_pipeline(eta, pair);
    EXPECT_TRUE(res.omega_level.checked());
    EXPECT_TRUE(res.pv_level.checked());

    // the polyvector level acquires a genuine three-generator component
    bool has_top = false;
    for (const auto& [key, coeff] : res.pv_level.value.terms())
        if (key.size() == 3 && !coeff.is_zero()) has_top = true;
    EXPECT_TRUE(has_top);

    // a degree-1 but non-closed input is rejected
    auto bad = mono(c, {1, 2}, BaseSeries::eps(c) * BaseSeries::variable(c, 3));
    ASSERT_EQ(bad.degree(), std::optional<int>(1));
    EXPECT_THROW(theta_pi_pipeline(bad, pair), argument_error);
}

} // namespace
