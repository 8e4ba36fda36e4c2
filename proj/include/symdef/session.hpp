#ifndef SYMDEF_SESSION_HPP
#define SYMDEF_SESSION_HPP

#include "symdef/dsl.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace symdef {

// Session-wide settings mirrored by the CLI flags.
struct SessionConfig {
    int m = 2;
    int g = 0;
    std::vector<int> degrees;
    int N = 4;
    int eps_floor = -4;
    int W = 4;
    std::uint64_t seed = 1;
    std::string fixture = "standard"; // standard | shear4 | none | matrices:<path>

    Ctx make_ctx_checked() const { return symdef::make_ctx(m, g, degrees, N, eps_floor, W); }
};

// One declaration file: an optional @config pragma plus named expressions,
// one per line, '#' comments.
struct Declarations {
    SessionConfig config;
    bool has_config = false;
    std::map<std::string, std::string> bindings; // name -> source text

    const std::string& need(const std::string& name) const {
        auto it = bindings.find(name);
        if (it == bindings.end())
            throw argument_error("declaration file does not define '" + name + "'");
        return it->second;
    }
};

namespace session_detail {

inline std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(std::stoi(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::stoi(cur));
    return out;
}

inline void apply_config_token(SessionConfig& cfg, const std::string& key, const std::string& val) {
    if (key == "m") cfg.m = std::stoi(val);
    else if (key == "g") cfg.g = std::stoi(val);
    else if (key == "degrees") cfg.degrees = parse_int_list(val);
    else if (key == "N") cfg.N = std::stoi(val);
    else if (key == "eps_floor") cfg.eps_floor = std::stoi(val);
    else if (key == "W") cfg.W = std::stoi(val);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "fixture") cfg.fixture = val;
    else throw argument_error("unknown @config key '" + key + "'");
}

} // namespace session_detail

inline Declarations parse_declarations(const std::string& text) {
    Declarations decls;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        // strip comment and whitespace
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line.empty()) continue;

        if (line[0] == '@') {
            std::istringstream ls(line.substr(1));
            std::string word;
            ls >> word;
            if (word != "config") throw argument_error("unknown pragma '" + word + "'");
            while (ls >> word) {
                auto eq = word.find('=');
                if (eq == std::string::npos)
                    throw argument_error("@config entries look like key=value");
                session_detail::apply_config_token(decls.config, word.substr(0, eq),
                                                   word.substr(eq + 1));
            }
            decls.has_config = true;
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw argument_error("declaration lines look like name = expression");
        std::string name = line.substr(0, eq);
        auto nend = name.find_last_not_of(" \t");
        name = name.substr(0, nend + 1);
        decls.bindings[name] = line.substr(eq + 1);
    }
    return decls;
}

inline Declarations load_declarations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open declaration file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_declarations(buf.str());
}

// Explicit-matrix fixture file: lines "omega I J = <poly>" / "alpha I J = <poly>";
// unset entries stay zero, antisymmetry is filled in automatically.
inline SymplecticPair load_pair_file(const Ctx& ctx, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open fixture file '" + path + "'");
    PolyMatrix omega = zero_matrix(ctx->m), alpha = zero_matrix(ctx->m);
    EvalEnv env{ctx, std::nullopt, ""};
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string which;
        int i = 0, j = 0;
        char eq = 0;
        if (!(ls >> which)) continue;
        if (!(ls >> i >> j >> eq) || eq != '=')
            throw argument_error("fixture lines look like: omega I J = <poly>");
        std::string rest;
        std::getline(ls, rest);
        Value v = evaluate(parse_expr(rest), env);
        const auto* s = std::get_if<BaseSeries>(&v);
        if (!s) throw argument_error("fixture entries must be scalar polynomials");
        Poly p(ctx->m);
        for (const auto& [pk, poly] : s->terms()) {
            if (pk != ParamKey::unit(ctx->g))
                throw argument_error("fixture entries must not contain deformation parameters");
            p += poly;
        }
        if (i < 1 || i > ctx->m || j < 1 || j > ctx->m)
            throw argument_error("fixture index out of range");
        PolyMatrix& target = (which == "omega") ? omega : alpha;
        if (which != "omega" && which != "alpha")
            throw argument_error("fixture entries are 'omega' or 'alpha'");
        target[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] = p;
        target[static_cast<size_t>(j - 1)][static_cast<size_t>(i - 1)] = -p;
    }
    return SymplecticPair(ctx, std::move(omega), std::move(alpha));
}

inline std::optional<SymplecticPair> make_fixture(const Ctx& ctx, const std::string& name) {
    if (name == "none" || name.empty()) return std::nullopt;
    if (name == "standard") return standard_pair(ctx);
    if (name == "shear4") return shear_pair(ctx);
    if (name.rfind("matrices:", 0) == 0) return load_pair_file(ctx, name.substr(9));
    throw argument_error("unknown fixture '" + name + "'");
}

// Fixture construction is deferred: commands that never touch the symplectic
// structure must work in contexts where the requested fixture cannot exist
// (odd dimension, say).
inline EvalEnv make_env(const SessionConfig& cfg) {
    Ctx ctx = cfg.make_ctx_checked();
    EvalEnv env{ctx, std::nullopt, ""};
    try {
        env.pair = make_fixture(ctx, cfg.fixture);
    } catch (const kernel_error& e) {
        env.fixture_error = e.what();
    }
    return env;
}

} // namespace symdef

#endif
