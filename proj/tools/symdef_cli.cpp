// Command-line front end: parse expressions in the small algebra DSL, run the
// named checks, print deterministic JSON reports. Exit status: 0 pass, 1 check
// failure, 2 usage or malformed input.

#include "symdef/session.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace symdef;
using json = nlohmann::ordered_json;

namespace {

#ifndef SYMDEF_DATA_DIR
#define SYMDEF_DATA_DIR "data"
#endif

struct CliState {
    SessionConfig cfg;
    std::string expr;
    std::string file;
    std::string example;
    std::string data_dir = SYMDEF_DATA_DIR;
    std::string degrees_csv;
};

json truncation_json(const SessionConfig& cfg) {
    return json{{"N", cfg.N}, {"eps_floor", cfg.eps_floor}, {"W", cfg.W}};
}

json report_json(const CheckReport& rep) {
    return json{{"check", rep.check},
                {"status", rep.pass ? "pass" : "fail"},
                {"first_failure_key", rep.pass ? json(nullptr) : json(rep.first_failure)},
                {"context_tag", rep.context_tag}};
}

template <class V>
json certificate_json(const SessionConfig& cfg, const MCElement<V>& elem) {
    return json{{"context_tag", elem.certificate.context_tag},
                {"truncation", truncation_json(cfg)},
                {"residual", elem.certificate.pass ? "0" : elem.certificate.first_failure},
                {"status", elem.certificate.pass ? "pass" : "fail"}};
}

// Resolve the active source text: --expr wins, then --file, then --example
// (declaration files may override the session config).
std::string resolve_source(CliState& st, const std::string& binding) {
    if (!st.expr.empty()) return st.expr;
    std::string path;
    if (!st.file.empty()) {
        path = st.file;
    } else if (!st.example.empty()) {
        path = st.data_dir + "/" + st.example + ".sdf";
    } else {
        throw argument_error("provide --expr, --file or --example");
    }
    Declarations decls = load_declarations(path);
    if (decls.has_config) {
        std::uint64_t seed = st.cfg.seed;
        st.cfg = decls.config;
        st.cfg.seed = seed;
    }
    return decls.need(binding);
}

Value eval_source(const CliState& st, const EvalEnv& env, const std::string& src) {
    (void)st;
    return evaluate(parse_expr(src), env);
}

int finish(const json& body, bool pass) {
    std::cout << body.dump(2) << "\n";
    return pass ? 0 : 1;
}

int run_check_mc(CliState st, const std::string& context) {
    std::string src = resolve_source(st, "mu");
    EvalEnv env = make_env(st.cfg);
    Value v = eval_source(st, env, src);
    CheckReport rep;
    if (context == "pd") {
        rep = mc_check(pd_context(env.ctx), dsl_detail::as_op(v, env.ctx, SrcPos{})).certificate;
    } else if (context == "pd-twisted") {
        auto pair = env.need_pair(SrcPos{});
        auto mu_alpha = mc_check(pd_context(env.ctx), moyal_star(pair));
        rep = mc_check(twist(env.ctx, mu_alpha), dsl_detail::as_op(v, env.ctx, SrcPos{})).certificate;
    } else if (context == "pv") {
        rep = mc_check(pv_context(env.need_pair(SrcPos{})), dsl_detail::as_pv(v, env.ctx, SrcPos{}))
                  .certificate;
    } else if (context == "omega") {
        rep = mc_check(omega_context(env.need_pair(SrcPos{})), dsl_detail::as_susp(v, SrcPos{}))
                  .certificate;
    } else if (context == "omega-zero") {
        rep = mc_check(omega_zero_context(env.ctx), dsl_detail::as_susp(v, SrcPos{})).certificate;
    } else {
        throw argument_error("unknown context '" + context + "'");
    }
    json out = report_json(rep);
    out["truncation"] = truncation_json(st.cfg);
    return finish(out, rep.pass);
}

int run_gauge(CliState st, const std::string& xi_src, const std::string& mu_src,
              const std::string& context) {
    EvalEnv env = make_env(st.cfg);
    if (context != "pd") throw argument_error("gauge supports the operator context only");
    auto xi = dsl_detail::as_op(eval_source(st, env, xi_src), env.ctx, SrcPos{});
    auto mu = dsl_detail::as_op(eval_source(st, env, mu_src), env.ctx, SrcPos{});
    auto L = pd_context(env.ctx);
    auto moved = gauge_act(L, xi, mu);
    auto rep = mc_check(L, moved);
    json out;
    out["result"] = to_text(moved);
    out["mc"] = report_json(rep.certificate);
    return finish(out, rep.checked());
}

int run_ks(CliState st) {
    std::string src = resolve_source(st, "mu");
    EvalEnv env = make_env(st.cfg);
    auto mu = dsl_detail::as_op(eval_source(st, env, src), env.ctx, SrcPos{});
    auto kappa = ks_class(mu);
    auto rep = ks_integrability(kappa);
    json out;
    out["class"] = to_text(kappa);
    out["integrability"] = report_json(rep);
    return finish(out, rep.pass);
}

int run_integrable(CliState st) {
    std::string src = resolve_source(st, "kappa");
    EvalEnv env = make_env(st.cfg);
    auto kappa = dsl_detail::as_pv(eval_source(st, env, src), env.ctx, SrcPos{});
    auto rep = ks_integrability(kappa);
    return finish(report_json(rep), rep.pass);
}

int run_ainfty(CliState st) {
    std::string src = resolve_source(st, "mu");
    EvalEnv env = make_env(st.cfg);
    auto mu = dsl_detail::as_op(eval_source(st, env, src), env.ctx, SrcPos{});
    auto a = ainfty_from_mc(mu);
    json table = json::array();
    for (const auto& [n, op] : a.mult)
        for (const auto& [sym, coeff] : op.terms()) {
            PolyDiffOp one(env.ctx);
            one.add_term(sym, coeff);
            json row;
            row["arity"] = n;
            row["term"] = to_text(one);
            table.push_back(row);
        }
    json out;
    out["max_arity"] = a.max_arity;
    out["table"] = table;
    return finish(out, true);
}

int run_stasheff(CliState st, int max_arity, const std::string& mode, int eval_deg) {
    std::string src = resolve_source(st, "mu");
    EvalEnv env = make_env(st.cfg);
    auto mu = dsl_detail::as_op(eval_source(st, env, src), env.ctx, SrcPos{});
    auto a = ainfty_from_mc(mu);
    RelationsMode rm = RelationsMode::Symbolic;
    if (mode == "evaluation") rm = RelationsMode::Evaluation;
    else if (mode == "both") rm = RelationsMode::Both;
    else if (mode != "symbolic") throw argument_error("mode is symbolic|evaluation|both");
    auto rep = ainfty_relations_check(a, max_arity, rm, eval_deg);
    return finish(report_json(rep), rep.pass);
}

int run_pi_verify(CliState st, int binary, int ternary) {
    EvalEnv env = make_env(st.cfg);
    auto pair = env.need_pair(SrcPos{});
    auto rep = verify_pi_identities(pair, binary, ternary, st.cfg.seed);
    json out;
    out["check"] = "contraction-identities";
    out["status"] = rep.pass() ? "pass" : "fail";
    out["binary"] = json{{"checked", rep.binary_checked}, {"failed", rep.binary_failed}};
    out["ternary"] = json{{"checked", rep.ternary_checked}, {"failed", rep.ternary_failed}};
    out["seed"] = st.cfg.seed;
    return finish(out, rep.pass());
}

int run_exp_pi(CliState st, int words_per_length) {
    EvalEnv env = make_env(st.cfg);
    auto pair = env.need_pair(SrcPos{});
    const Ctx& ctx = env.ctx;
    auto pi = pi_coderivation(pair);
    auto q_d = ce_coderivation(omega_zero_context(ctx), ctx);
    auto q_full = ce_coderivation(omega_context(pair), ctx);
    WordAlgebra<SuspendedForm> wa(ctx);
    std::mt19937_64 eng(st.cfg.seed);
    int checked = 0, failed_inverse = 0, failed_conj = 0;
    for (int len = 1; len <= ctx->max_word_len; ++len)
        for (int it = 0; it < words_per_length; ++it) {
            WordAlgebra<SuspendedForm>::Sum w;
            WordAlgebra<SuspendedForm>::Word word;
            for (int t = 0; t < len; ++t) {
                auto v = symdef::detail::random_tilde_monomial(eng, ctx, 1);
                word.push_back(CarrierTraits<SuspendedForm>::split(v)[0].first);
            }
            wa.add(w, word, Rat(1));
            if (w.empty()) continue;
            ++checked;
            if (exp_apply(pi, exp_apply(pi, w, -1), +1) != w) ++failed_inverse;
            auto lhs = exp_apply(pi, q_d.apply(exp_apply(pi, w, -1)), +1);
            if (lhs != q_full.apply(w)) ++failed_conj;
        }
    bool pass = failed_inverse == 0 && failed_conj == 0 && checked > 0;
    json out;
    out["check"] = "exp-contraction";
    out["status"] = pass ? "pass" : "fail";
    out["words_checked"] = checked;
    out["inverse_failures"] = failed_inverse;
    out["conjugation_failures"] = failed_conj;
    out["seed"] = st.cfg.seed;
    return finish(out, pass);
}

int run_theta_pi(CliState st) {
    std::string src = resolve_source(st, "eta");
    EvalEnv env = make_env(st.cfg);
    auto pair = env.need_pair(SrcPos{});
    auto eta = dsl_detail::as_susp(eval_source(st, env, src), SrcPos{});
    auto res = theta_pi_pipeline(eta, pair);
    json out;
    out["omega_level"] = certificate_json(st.cfg, res.omega_level);
    out["omega_level"]["value"] = to_text(res.omega_level.value);
    out["pv_level"] = certificate_json(st.cfg, res.pv_level);
    out["pv_level"]["value"] = to_text(res.pv_level.value);
    bool pass = res.omega_level.checked() && res.pv_level.checked();
    return finish(out, pass);
}

int run_path_check(CliState st, const std::string& context) {
    std::string src = resolve_source(st, "eta");
    EvalEnv env = make_env(st.cfg);
    Value v = eval_source(st, env, src);
    PathValue path = dsl_detail::as_path(v, env.ctx, SrcPos{});
    PathElem<SuspendedForm> pe{path.t_part, path.dt_part};
    if (context != "omega" && context != "omega-zero")
        throw argument_error("path contexts: omega | omega-zero");
    Dgla<SuspendedForm> L = (context == "omega") ? omega_context(env.need_pair(SrcPos{}))
                                                 : omega_zero_context(env.ctx);
    auto [rep, ends] = mc_path_check(L, pe);
    json out;
    out["path"] = report_json(rep);
    out["endpoint_at_0"] = to_text(ends.first.value);
    out["endpoint_at_1"] = to_text(ends.second.value);
    out["endpoints_mc"] = json{{"at_0", ends.first.checked()}, {"at_1", ends.second.checked()}};
    return finish(out, rep.pass && ends.first.checked() && ends.second.checked());
}

int run_membership(CliState st) {
    std::string src = resolve_source(st, "eta");
    EvalEnv env = make_env(st.cfg);
    auto eta = dsl_detail::as_susp(eval_source(st, env, src), SrcPos{});
    json table = json::array();
    auto row = [&](const std::string& name, bool val) {
        table.push_back(json{{"space", name}, {"member", val}});
    };
    row("L", in_space(eta, FormSpace::Full));
    row("Ltilde", in_space(eta, FormSpace::Tilde));
    for (int k = 1; k <= st.cfg.N; ++k) {
        row("F" + std::to_string(k) + "(L)", in_filtration(eta, FormSpace::Full, k));
        row("F" + std::to_string(k) + "(Ltilde)", in_filtration(eta, FormSpace::Tilde, k));
    }
    json out;
    out["value"] = to_text(eta);
    out["table"] = table;
    return finish(out, true);
}

int run_print(CliState st) {
    std::string src = resolve_source(st, "value");
    EvalEnv env = make_env(st.cfg);
    Value v = eval_source(st, env, src);
    std::cout << print_canonical(v) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact deformation calculus on symplectic coordinate space"};
    app.require_subcommand(1);
    app.fallthrough(); // session flags may follow the subcommand

    CliState st;
    app.add_option("--m", st.cfg.m, "dimension of the coordinate space");
    app.add_option("--g", st.cfg.g, "number of extra parameters");
    app.add_option("--degrees", st.degrees_csv, "comma list of parameter degrees");
    app.add_option("--N", st.cfg.N, "truncation order");
    app.add_option("--eps-floor", st.cfg.eps_floor, "most negative eps exponent");
    app.add_option("--W", st.cfg.W, "word length bound");
    app.add_option("--seed", st.cfg.seed, "random seed");
    app.add_option("--fixture", st.cfg.fixture, "standard | shear4 | none | matrices:<path>");
    app.add_option("--expr", st.expr, "expression source");
    app.add_option("--file", st.file, "declaration file");
    app.add_option("--example", st.example, "named example from the data directory");
    app.add_option("--data-dir", st.data_dir, "directory of named examples");

    std::string context = "pd";
    std::string xi_src, mu_src;
    int max_arity = 4;
    std::string mode = "symbolic";
    int eval_deg = 2;
    int binary = 100, ternary = 50;
    int words_per_length = 5;

    auto* c_mc = app.add_subcommand("check-mc", "Maurer-Cartan test of an element");
    c_mc->add_option("--context", context, "pv | pd | pd-twisted | omega | omega-zero");
    auto* c_gauge = app.add_subcommand("gauge", "apply a gauge transformation");
    c_gauge->add_option("--xi", xi_src, "gauge parameter expression")->required();
    c_gauge->add_option("--mu", mu_src, "element expression")->required();
    c_gauge->add_option("--context", context, "pd");
    auto* c_ks = app.add_subcommand("ks", "order-one class of an operator series");
    auto* c_int = app.add_subcommand("integrable", "square-bracket test of a class");
    auto* c_ainfty = app.add_subcommand("ainfty", "multiplication table of an element");
    auto* c_st = app.add_subcommand("stasheff", "relations of the induced multiplications");
    c_st->add_option("--max-arity", max_arity, "largest arity to verify");
    c_st->add_option("--mode", mode, "symbolic | evaluation | both");
    c_st->add_option("--eval-deg", eval_deg, "per-slot monomial degree bound");
    auto* c_pi = app.add_subcommand("pi-verify", "contraction identities on random words");
    c_pi->add_option("--binary", binary, "binary word samples");
    c_pi->add_option("--ternary", ternary, "ternary word samples");
    auto* c_exp = app.add_subcommand("exp-pi", "inverse and conjugation checks");
    c_exp->add_option("--words", words_per_length, "samples per word length");
    auto* c_tp = app.add_subcommand("theta-pi", "closed form to flat polyvector pipeline");
    auto* c_path = app.add_subcommand("path-check", "one-simplex Maurer-Cartan test");
    c_path->add_option("--context", context, "omega | omega-zero");
    auto* c_mem = app.add_subcommand("membership", "span membership table");
    auto* c_pr = app.add_subcommand("print", "canonical form of an expression");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!st.degrees_csv.empty()) st.cfg.degrees = session_detail::parse_int_list(st.degrees_csv);
        if (static_cast<int>(st.cfg.degrees.size()) != st.cfg.g)
            st.cfg.degrees.resize(static_cast<size_t>(st.cfg.g), 0);

        if (c_mc->parsed()) return run_check_mc(st, context);
        if (c_gauge->parsed()) return run_gauge(st, xi_src, mu_src, context);
        if (c_ks->parsed()) return run_ks(st);
        if (c_int->parsed()) return run_integrable(st);
        if (c_ainfty->parsed()) return run_ainfty(st);
        if (c_st->parsed()) return run_stasheff(st, max_arity, mode, eval_deg);
        if (c_pi->parsed()) return run_pi_verify(st, binary, ternary);
        if (c_exp->parsed()) return run_exp_pi(st, words_per_length);
        if (c_tp->parsed()) return run_theta_pi(st);
        if (c_path->parsed()) return run_path_check(st, context);
        if (c_mem->parsed()) return run_membership(st);
        if (c_pr->parsed()) return run_print(st);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const parse_error& e) {
        std::cerr << "parse error at " << e.what() << "\n";
        return 2;
    } catch (const kernel_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
