#ifndef SYMDEF_DSL_HPP
#define SYMDEF_DSL_HPP

#include "symdef/coderivations.hpp"
#include "symdef/printer.hpp"

#include <cctype>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace symdef {

// ---------------------------------------------------------------------------
// source positions and parse errors
// ---------------------------------------------------------------------------

struct SrcPos {
    int line = 1;
    int col = 1;
};

struct parse_error : kernel_error {
    SrcPos pos;
    parse_error(const SrcPos& p, const std::string& what)
        : kernel_error(std::to_string(p.line) + ":" + std::to_string(p.col) + ": " + what), pos(p) {}
};

// ---------------------------------------------------------------------------
// tokens
// ---------------------------------------------------------------------------

namespace dsl_detail {

enum class Tok {
    Num, Ident, Plus, Minus, Star, Caret, Slash, LParen, RParen,
    LBracket, RBracket, Comma, Semicolon, Tensor, End
};

struct Token {
    Tok kind;
    std::string text;
    SrcPos pos;
};

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    SrcPos pos{1, 1};
    size_t i = 0;
    auto push = [&](Tok k, std::string t, SrcPos p) { out.push_back({k, std::move(t), p}); };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++pos.line;
            pos.col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos.col;
            ++i;
            continue;
        }
        if (c == '#') { // comment to end of line
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        SrcPos here = pos;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            push(Tok::Num, src.substr(i, j - i), here);
            pos.col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            push(Tok::Ident, src.substr(i, j - i), here);
            pos.col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        // UTF-8 tensor sign
        if (static_cast<unsigned char>(c) == 0xE2 && i + 2 < src.size() &&
            static_cast<unsigned char>(src[i + 1]) == 0x8A &&
            static_cast<unsigned char>(src[i + 2]) == 0x97) {
            push(Tok::Tensor, "⊗", here);
            i += 3;
            pos.col += 1;
            continue;
        }
        Tok k;
        switch (c) {
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '^': k = Tok::Caret; break;
            case '/': k = Tok::Slash; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case '[': k = Tok::LBracket; break;
            case ']': k = Tok::RBracket; break;
            case ',': k = Tok::Comma; break;
            case ';': k = Tok::Semicolon; break;
            default:
                throw parse_error(here, std::string("unexpected character '") + c + "'");
        }
        push(k, std::string(1, c), here);
        ++pos.col;
        ++i;
    }
    out.push_back({Tok::End, "", pos});
    return out;
}

} // namespace dsl_detail

// ---------------------------------------------------------------------------
// abstract syntax
// ---------------------------------------------------------------------------

struct Ast;
using AstPtr = std::shared_ptr<const Ast>;

struct Ast {
    enum class Kind {
        Rational,  // value
        Generator, // gen + index
        Neg, Add, Sub, Mul,
        Power,     // child ^ exponent
        Suspend,   // s(...)
        Call,      // head(args)
        OpLiteral  // tensor of derivative slots
    };
    enum class Gen { X, Theta, Dx, Eps, Param, T, Dt };

    Kind kind;
    SrcPos pos;
    Rat rational;
    Gen gen = Gen::X;
    int index = 0; // generator index or exponent
    std::string head;
    std::vector<AstPtr> children;
    std::vector<MultiIndex> slots; // OpLiteral
};

inline AstPtr make_ast(Ast a) { return std::make_shared<const Ast>(std::move(a)); }

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

namespace dsl_detail {

class Parser {
public:
    explicit Parser(const std::string& src) : toks_(lex(src)) {}

    AstPtr parse() {
        AstPtr e = expr();
        expect(Tok::End, "end of input");
        return e;
    }

private:
    const Token& peek(size_t ahead = 0) const {
        size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool at(Tok k) const { return peek().kind == k; }
    Token expect(Tok k, const char* what) {
        if (!at(k)) throw parse_error(peek().pos, std::string("expected ") + what);
        return take();
    }

    AstPtr expr() {
        AstPtr left = term();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            Token op = take();
            AstPtr right = term();
            Ast node;
            node.kind = op.kind == Tok::Plus ? Ast::Kind::Add : Ast::Kind::Sub;
            node.pos = op.pos;
            node.children = {left, right};
            left = make_ast(std::move(node));
        }
        return left;
    }

    // '*' and generator-product '^' share one precedence tier; '^' followed by
    // a (possibly negated) number is an exponent and binds to the atom
    AstPtr term() {
        AstPtr left = unary();
        while (true) {
            if (at(Tok::Star)) {
                Token op = take();
                AstPtr right = unary();
                Ast node;
                node.kind = Ast::Kind::Mul;
                node.pos = op.pos;
                node.children = {left, right};
                left = make_ast(std::move(node));
            } else if (at(Tok::Caret) && !exponent_follows()) {
                Token op = take();
                AstPtr right = unary();
                Ast node;
                node.kind = Ast::Kind::Mul;
                node.pos = op.pos;
                node.children = {left, right};
                left = make_ast(std::move(node));
            } else {
                break;
            }
        }
        return left;
    }

    bool exponent_follows() const {
        const Token& nxt = peek(1);
        if (nxt.kind == Tok::Num) return true;
        if (nxt.kind == Tok::Minus && peek(2).kind == Tok::Num) return true;
        return false;
    }

    AstPtr unary() {
        if (at(Tok::Minus)) {
            Token op = take();
            AstPtr inner = unary();
            Ast node;
            node.kind = Ast::Kind::Neg;
            node.pos = op.pos;
            node.children = {inner};
            return make_ast(std::move(node));
        }
        return postfix();
    }

    AstPtr postfix() {
        AstPtr base = atom();
        while (at(Tok::Caret) && exponent_follows()) {
            Token op = take();
            int sign = 1;
            if (at(Tok::Minus)) {
                take();
                sign = -1;
            }
            Token num = expect(Tok::Num, "exponent");
            Ast node;
            node.kind = Ast::Kind::Power;
            node.pos = op.pos;
            node.index = sign * std::stoi(num.text);
            node.children = {base};
            base = make_ast(std::move(node));
        }
        return base;
    }

    MultiIndex bracket_list() {
        expect(Tok::LBracket, "'['");
        MultiIndex mi;
        while (!at(Tok::RBracket)) {
            Token num = expect(Tok::Num, "derivative index");
            mi.push_back(std::stoi(num.text));
            if (at(Tok::Comma)) take();
        }
        take(); // ']'
        std::sort(mi.begin(), mi.end());
        return mi;
    }

    AstPtr atom() {
        const Token& t = peek();
        if (t.kind == Tok::Num) {
            Token num = take();
            Rat value(Int(num.text));
            if (at(Tok::Slash)) {
                take();
                Token den = expect(Tok::Num, "denominator");
                Int d(den.text);
                if (d.is_zero()) throw parse_error(den.pos, "zero denominator");
                value /= Rat(d);
            }
            Ast node;
            node.kind = Ast::Kind::Rational;
            node.pos = num.pos;
            node.rational = value;
            return make_ast(std::move(node));
        }
        if (t.kind == Tok::LParen) {
            take();
            AstPtr inner = expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (t.kind == Tok::Ident) return ident_atom();
        throw parse_error(t.pos, "expected an expression");
    }

    AstPtr ident_atom() {
        Token id = take();
        const std::string& s = id.text;

        // operator literals
        if (s == "D" || s == "Dop" || s == "D0") {
            Ast node;
            node.kind = Ast::Kind::OpLiteral;
            node.pos = id.pos;
            if (s == "D0") return make_ast(std::move(node)); // arity 0
            if (s == "D") {
                node.slots.push_back(bracket_list());
                while (at(Tok::Tensor)) {
                    take();
                    Token d2 = expect(Tok::Ident, "'D'");
                    if (d2.text != "D") throw parse_error(d2.pos, "expected 'D' after tensor sign");
                    node.slots.push_back(bracket_list());
                }
                return make_ast(std::move(node));
            }
            // Dop[a,b;c;...]
            expect(Tok::LBracket, "'['");
            MultiIndex cur;
            while (!at(Tok::RBracket)) {
                if (at(Tok::Semicolon)) {
                    take();
                    std::sort(cur.begin(), cur.end());
                    node.slots.push_back(cur);
                    cur.clear();
                    continue;
                }
                Token num = expect(Tok::Num, "derivative index");
                cur.push_back(std::stoi(num.text));
                if (at(Tok::Comma)) take();
            }
            take();
            std::sort(cur.begin(), cur.end());
            node.slots.push_back(cur);
            return make_ast(std::move(node));
        }

        // suspension: s(...) or s^-1(...)
        if (s == "s") {
            if (at(Tok::Caret)) {
                take();
                expect(Tok::Minus, "'-1' after 's^'");
                Token one = expect(Tok::Num, "'1'");
                if (one.text != "1") throw parse_error(one.pos, "only s^-1 is meaningful");
            }
            expect(Tok::LParen, "'('");
            AstPtr inner = expr();
            expect(Tok::RParen, "')'");
            Ast node;
            node.kind = Ast::Kind::Suspend;
            node.pos = id.pos;
            node.children = {inner};
            return make_ast(std::move(node));
        }

        // function heads
        static const char* heads[] = {"d", "sbr", "gbr", "hoch", "cup", "hkr", "jw", "jwinv", "obr", "pi"};
        for (const char* h : heads)
            if (s == h) return call_atom(id, s);
        if (s.size() > 3 && s.rfind("ddx", 0) == 0) {
            bool digits = true;
            for (size_t i = 3; i < s.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) digits = false;
            if (digits) {
                AstPtr call = call_atom(id, "ddx");
                Ast node = *call;
                node.index = std::stoi(s.substr(3));
                return make_ast(std::move(node));
            }
        }

        // generators
        Ast node;
        node.kind = Ast::Kind::Generator;
        node.pos = id.pos;
        auto tail_index = [&](size_t off) -> int {
            if (s.size() <= off) return -1;
            for (size_t i = off; i < s.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) return -1;
            return std::stoi(s.substr(off));
        };
        if (s == "eps") {
            node.gen = Ast::Gen::Eps;
        } else if (s == "t") {
            node.gen = Ast::Gen::T;
        } else if (s == "dt") {
            node.gen = Ast::Gen::Dt;
        } else if (s.rfind("th", 0) == 0 && tail_index(2) > 0) {
            node.gen = Ast::Gen::Theta;
            node.index = tail_index(2);
        } else if (s.rfind("dx", 0) == 0 && tail_index(2) > 0) {
            node.gen = Ast::Gen::Dx;
            node.index = tail_index(2);
        } else if (s[0] == 'x' && tail_index(1) > 0) {
            node.gen = Ast::Gen::X;
            node.index = tail_index(1);
        } else if (s[0] == 'e' && tail_index(1) > 0) {
            node.gen = Ast::Gen::Param;
            node.index = tail_index(1);
        } else {
            throw parse_error(id.pos, "unknown identifier '" + s + "'");
        }
        return make_ast(std::move(node));
    }

    AstPtr call_atom(const Token& id, const std::string& head) {
        expect(Tok::LParen, "'('");
        Ast node;
        node.kind = Ast::Kind::Call;
        node.pos = id.pos;
        node.head = head;
        if (!at(Tok::RParen)) {
            node.children.push_back(expr());
            while (at(Tok::Comma)) {
                take();
                node.children.push_back(expr());
            }
        }
        expect(Tok::RParen, "')'");
        return make_ast(std::move(node));
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
};

} // namespace dsl_detail

inline AstPtr parse_expr(const std::string& src) { return dsl_detail::Parser(src).parse(); }

// ---------------------------------------------------------------------------
// values and evaluation
// ---------------------------------------------------------------------------

// scalar polynomial in the simplex coordinates t, dt
struct TPoly {
    std::map<std::pair<int, bool>, Rat> terms; // (t power, has dt) -> coeff
};

// suspended-form-valued polynomial in t, dt
struct PathValue {
    std::vector<SuspendedForm> t_part;
    std::vector<SuspendedForm> dt_part;
};

using Value = std::variant<BaseSeries, Polyvector, ExteriorForm, SuspendedForm, PolyDiffOp, TPoly, PathValue>;

struct EvalEnv {
    Ctx ctx;
    std::optional<SymplecticPair> pair;
    std::string fixture_error; // why `pair` is empty, when construction failed

    const SymplecticPair& need_pair(const SrcPos& pos) const {
        if (!pair)
            throw parse_error(pos, fixture_error.empty()
                                       ? "this operation needs a symplectic fixture"
                                       : "fixture unavailable: " + fixture_error);
        return *pair;
    }
};

namespace dsl_detail {

inline BaseSeries as_scalar(const Value& v, const SrcPos& pos) {
    if (const auto* s = std::get_if<BaseSeries>(&v)) return *s;
    throw parse_error(pos, "expected a scalar value");
}

inline Polyvector as_pv(const Value& v, const Ctx& ctx, const SrcPos& pos) {
    if (const auto* p = std::get_if<Polyvector>(&v)) return *p;
    if (const auto* s = std::get_if<BaseSeries>(&v)) return Polyvector::scalar(ctx, *s);
    throw parse_error(pos, "expected a polyvector value");
}

inline ExteriorForm as_form(const Value& v, const Ctx& ctx, const SrcPos& pos) {
    if (const auto* f = std::get_if<ExteriorForm>(&v)) return *f;
    if (const auto* s = std::get_if<BaseSeries>(&v)) return ExteriorForm::scalar(ctx, *s);
    throw parse_error(pos, "expected an exterior form value");
}

inline SuspendedForm as_susp(const Value& v, const SrcPos& pos) {
    if (const auto* f = std::get_if<SuspendedForm>(&v)) return *f;
    throw parse_error(pos, "expected a suspended value; wrap it with s(...)");
}

inline PolyDiffOp as_op(const Value& v, const Ctx& ctx, const SrcPos& pos) {
    if (const auto* p = std::get_if<PolyDiffOp>(&v)) return *p;
    if (const auto* s = std::get_if<BaseSeries>(&v)) return PolyDiffOp::function(ctx, *s);
    throw parse_error(pos, "expected an operator value");
}

inline PathValue as_path(const Value& v, const Ctx& ctx, const SrcPos& pos) {
    if (const auto* p = std::get_if<PathValue>(&v)) return *p;
    if (const auto* s = std::get_if<SuspendedForm>(&v)) return PathValue{{*s}, {}};
    (void)ctx;
    throw parse_error(pos, "expected a path value");
}

inline Value add_values(const Value& a, const Value& b, const Ctx& ctx, const SrcPos& pos,
                        int sign) {
    auto scale = Rat(sign);
    if (std::holds_alternative<BaseSeries>(a) && std::holds_alternative<BaseSeries>(b))
        return std::get<BaseSeries>(a) + std::get<BaseSeries>(b) * scale;
    if (std::holds_alternative<TPoly>(a) || std::holds_alternative<TPoly>(b)) {
        if (std::holds_alternative<TPoly>(a) && std::holds_alternative<TPoly>(b)) {
            TPoly out = std::get<TPoly>(a);
            for (const auto& [k, c] : std::get<TPoly>(b).terms) {
                out.terms[k] += c * scale;
                if (symdef::is_zero(out.terms[k])) out.terms.erase(k);
            }
            return out;
        }
        throw parse_error(pos, "cannot add simplex coordinates to this value");
    }
    if (std::holds_alternative<PathValue>(a) || std::holds_alternative<PathValue>(b)) {
        PathValue pa = as_path(a, ctx, pos);
        PathValue pb = as_path(b, ctx, pos);
        PathValue out = pa;
        auto bump = [&](std::vector<SuspendedForm>& vec, size_t i, const SuspendedForm& v) {
            while (vec.size() <= i) vec.push_back(SuspendedForm::zero(ctx));
            vec[i] += v;
        };
        for (size_t i = 0; i < pb.t_part.size(); ++i) bump(out.t_part, i, pb.t_part[i] * scale);
        for (size_t i = 0; i < pb.dt_part.size(); ++i) bump(out.dt_part, i, pb.dt_part[i] * scale);
        return out;
    }
    if (std::holds_alternative<SuspendedForm>(a) || std::holds_alternative<SuspendedForm>(b))
        return as_susp(a, pos) + as_susp(b, pos) * scale;
    if (std::holds_alternative<PolyDiffOp>(a) || std::holds_alternative<PolyDiffOp>(b))
        return as_op(a, ctx, pos) + as_op(b, ctx, pos) * scale;
    if (std::holds_alternative<Polyvector>(a) || std::holds_alternative<Polyvector>(b))
        return as_pv(a, ctx, pos) + as_pv(b, ctx, pos) * scale;
    if (std::holds_alternative<ExteriorForm>(a) || std::holds_alternative<ExteriorForm>(b))
        return as_form(a, ctx, pos) + as_form(b, ctx, pos) * scale;
    throw parse_error(pos, "incompatible operands of +/-");
}

inline Value mul_values(const Value& a, const Value& b, const Ctx& ctx, const SrcPos& pos);

inline PathValue path_from_tpoly_times_susp(const TPoly& tp, const SuspendedForm& v,
                                            bool tpoly_on_left, const Ctx& ctx,
                                            const SrcPos& pos) {
    PathValue out;
    auto bump = [&](std::vector<SuspendedForm>& vec, size_t i, const SuspendedForm& w) {
        while (vec.size() <= i) vec.push_back(SuspendedForm::zero(ctx));
        vec[i] += w;
    };
    for (const auto& [key, c] : tp.terms) {
        SuspendedForm scaled = v * c;
        if (!key.second) {
            bump(out.t_part, static_cast<size_t>(key.first), scaled);
        } else {
            // dt crosses the value when written on the left
            if (tpoly_on_left) {
                auto deg = scaled.degree();
                if (!deg && !scaled.is_zero())
                    throw parse_error(pos, "dt needs a homogeneous right factor");
                if (deg && ((*deg) & 1)) scaled *= Rat(-1);
            }
            bump(out.dt_part, static_cast<size_t>(key.first), scaled);
        }
    }
    if (out.t_part.empty()) out.t_part.push_back(SuspendedForm::zero(ctx));
    return out;
}

inline Value mul_values(const Value& a, const Value& b, const Ctx& ctx, const SrcPos& pos) {
    // simplex coordinates
    if (std::holds_alternative<TPoly>(a) && std::holds_alternative<TPoly>(b)) {
        TPoly out;
        for (const auto& [ka, ca] : std::get<TPoly>(a).terms)
            for (const auto& [kb, cb] : std::get<TPoly>(b).terms) {
                if (ka.second && kb.second) continue; // dt dt = 0
                auto key = std::make_pair(ka.first + kb.first, ka.second || kb.second);
                out.terms[key] += ca * cb;
                if (symdef::is_zero(out.terms[key])) out.terms.erase(key);
            }
        return out;
    }
    if (std::holds_alternative<TPoly>(a))
        return path_from_tpoly_times_susp(std::get<TPoly>(a), as_susp(b, pos), true, ctx, pos);
    if (std::holds_alternative<TPoly>(b))
        return path_from_tpoly_times_susp(std::get<TPoly>(b), as_susp(a, pos), false, ctx, pos);
    if (std::holds_alternative<PathValue>(a) || std::holds_alternative<PathValue>(b))
        throw parse_error(pos, "paths can only be scaled by rationals");

    if (std::holds_alternative<BaseSeries>(a) && std::holds_alternative<BaseSeries>(b))
        return std::get<BaseSeries>(a) * std::get<BaseSeries>(b);
    if (std::holds_alternative<SuspendedForm>(a) || std::holds_alternative<SuspendedForm>(b)) {
        // only scalar scaling is defined on suspended values
        if (std::holds_alternative<BaseSeries>(a))
            return SuspendedForm(ExteriorForm::scalar(ctx, std::get<BaseSeries>(a)) *
                                 as_susp(b, pos).body);
        if (std::holds_alternative<BaseSeries>(b))
            return SuspendedForm(as_susp(a, pos).body *
                                 ExteriorForm::scalar(ctx, std::get<BaseSeries>(b)));
        throw parse_error(pos, "suspended values cannot be multiplied");
    }
    if (std::holds_alternative<PolyDiffOp>(a) || std::holds_alternative<PolyDiffOp>(b)) {
        if (std::holds_alternative<BaseSeries>(a))
            return as_op(b, ctx, pos).left_mul(std::get<BaseSeries>(a));
        throw parse_error(pos, "operators multiply through cup(...) or gbr(...)");
    }
    if (std::holds_alternative<Polyvector>(a) || std::holds_alternative<Polyvector>(b)) {
        if (std::holds_alternative<ExteriorForm>(a) || std::holds_alternative<ExteriorForm>(b))
            throw parse_error(pos, "tangent and cotangent generators cannot be mixed");
        return as_pv(a, ctx, pos) * as_pv(b, ctx, pos);
    }
    if (std::holds_alternative<ExteriorForm>(a) || std::holds_alternative<ExteriorForm>(b))
        return as_form(a, ctx, pos) * as_form(b, ctx, pos);
    throw parse_error(pos, "incompatible operands of *");
}

} // namespace dsl_detail

inline Value evaluate(const AstPtr& ast, const EvalEnv& env) {
    using dsl_detail::as_form;
    using dsl_detail::as_op;
    using dsl_detail::as_pv;
    using dsl_detail::as_scalar;
    using dsl_detail::as_susp;
    const Ctx& ctx = env.ctx;
    switch (ast->kind) {
        case Ast::Kind::Rational:
            return BaseSeries::constant(ctx, ast->rational);
        case Ast::Kind::Generator:
            switch (ast->gen) {
                case Ast::Gen::X:
                    if (ast->index > ctx->m) throw parse_error(ast->pos, "coordinate index out of range");
                    return BaseSeries::variable(ctx, ast->index);
                case Ast::Gen::Theta:
                    if (ast->index > ctx->m) throw parse_error(ast->pos, "generator index out of range");
                    return theta(ctx, ast->index);
                case Ast::Gen::Dx:
                    if (ast->index > ctx->m) throw parse_error(ast->pos, "generator index out of range");
                    return dx(ctx, ast->index);
                case Ast::Gen::Eps:
                    return BaseSeries::eps(ctx);
                case Ast::Gen::Param:
                    if (ast->index > ctx->g) throw parse_error(ast->pos, "parameter index out of range");
                    return BaseSeries::param(ctx, ast->index);
                case Ast::Gen::T: {
                    TPoly tp;
                    tp.terms[{1, false}] = Rat(1);
                    return tp;
                }
                case Ast::Gen::Dt: {
                    TPoly tp;
                    tp.terms[{0, true}] = Rat(1);
                    return tp;
                }
            }
            throw parse_error(ast->pos, "bad generator");
        case Ast::Kind::Neg: {
            Value v = evaluate(ast->children[0], env);
            return dsl_detail::mul_values(BaseSeries::constant(ctx, Rat(-1)), v, ctx, ast->pos);
        }
        case Ast::Kind::Add:
            return dsl_detail::add_values(evaluate(ast->children[0], env),
                                          evaluate(ast->children[1], env), ctx, ast->pos, 1);
        case Ast::Kind::Sub:
            return dsl_detail::add_values(evaluate(ast->children[0], env),
                                          evaluate(ast->children[1], env), ctx, ast->pos, -1);
        case Ast::Kind::Mul:
            return dsl_detail::mul_values(evaluate(ast->children[0], env),
                                          evaluate(ast->children[1], env), ctx, ast->pos);
        case Ast::Kind::Power: {
            // negative exponents only for the distinguished parameter
            if (ast->children[0]->kind == Ast::Kind::Generator &&
                ast->children[0]->gen == Ast::Gen::Eps)
                return BaseSeries::eps(ctx, ast->index);
            if (ast->index < 0)
                throw parse_error(ast->pos, "negative powers are reserved for eps");
            Value base = evaluate(ast->children[0], env);
            Value out = BaseSeries::constant(ctx, Rat(1));
            for (int i = 0; i < ast->index; ++i)
                out = dsl_detail::mul_values(out, base, ctx, ast->pos);
            return out;
        }
        case Ast::Kind::Suspend: {
            Value inner = evaluate(ast->children[0], env);
            return SuspendedForm(as_form(inner, ctx, ast->pos));
        }
        case Ast::Kind::OpLiteral: {
            OpSymbol sym(ast->slots.begin(), ast->slots.end());
            for (const auto& mi : sym)
                for (int v : mi)
                    if (v < 1 || v > ctx->m) throw parse_error(ast->pos, "derivative index out of range");
            return PolyDiffOp::term(ctx, sym, BaseSeries::constant(ctx, Rat(1)));
        }
        case Ast::Kind::Call: {
            auto arg = [&](size_t i) { return evaluate(ast->children.at(i), env); };
            auto need = [&](size_t n) {
                if (ast->children.size() != n)
                    throw parse_error(ast->pos, "'" + ast->head + "' takes " + std::to_string(n) +
                                                    " argument(s)");
            };
            if (ast->head == "d") {
                need(1);
                Value v = arg(0);
                if (std::holds_alternative<SuspendedForm>(v))
                    return SuspendedForm(de_rham(std::get<SuspendedForm>(v).body));
                return de_rham(as_form(v, ctx, ast->pos));
            }
            if (ast->head == "ddx") {
                need(1);
                Value v = arg(0);
                if (ast->index < 1 || ast->index > ctx->m)
                    throw parse_error(ast->pos, "contraction index out of range");
                if (std::holds_alternative<SuspendedForm>(v))
                    return SuspendedForm(contract_dx(ast->index, std::get<SuspendedForm>(v).body));
                return contract_dx(ast->index, as_form(v, ctx, ast->pos));
            }
            if (ast->head == "sbr") {
                need(2);
                return schouten(as_pv(arg(0), ctx, ast->pos), as_pv(arg(1), ctx, ast->pos));
            }
            if (ast->head == "gbr") {
                need(2);
                return gerstenhaber(as_op(arg(0), ctx, ast->pos), as_op(arg(1), ctx, ast->pos));
            }
            if (ast->head == "hoch") {
                need(1);
                return hochschild_d(as_op(arg(0), ctx, ast->pos));
            }
            if (ast->head == "cup") {
                need(2);
                return cup(as_op(arg(0), ctx, ast->pos), as_op(arg(1), ctx, ast->pos));
            }
            if (ast->head == "hkr") {
                need(1);
                return hkr_embed(as_pv(arg(0), ctx, ast->pos));
            }
            if (ast->head == "jw") {
                need(1);
                return transport_to_forms(as_pv(arg(0), ctx, ast->pos), env.need_pair(ast->pos));
            }
            if (ast->head == "jwinv") {
                need(1);
                return transport_to_polyvectors(as_susp(arg(0), ast->pos), env.need_pair(ast->pos));
            }
            if (ast->head == "obr") {
                need(2);
                return omega_bracket(as_susp(arg(0), ast->pos), as_susp(arg(1), ast->pos),
                                     env.need_pair(ast->pos));
            }
            if (ast->head == "pi") {
                need(2);
                auto pi = pi_coderivation(env.need_pair(ast->pos));
                WordAlgebra<SuspendedForm> wa(ctx);
                auto w = wa.mul_value(wa.from_value(as_susp(arg(0), ast->pos)),
                                      as_susp(arg(1), ast->pos));
                return wa.length_one_value(pi.apply(w));
            }
            throw parse_error(ast->pos, "unknown head '" + ast->head + "'");
        }
    }
    throw parse_error(ast->pos, "unreachable");
}

// ---------------------------------------------------------------------------
// canonical printing of values
// ---------------------------------------------------------------------------

inline std::string print_canonical(const Value& v) {
    if (const auto* s = std::get_if<BaseSeries>(&v)) return to_text(*s);
    if (const auto* p = std::get_if<Polyvector>(&v)) return to_text(*p);
    if (const auto* f = std::get_if<ExteriorForm>(&v)) return to_text(*f);
    if (const auto* u = std::get_if<SuspendedForm>(&v)) return to_text(*u);
    if (const auto* o = std::get_if<PolyDiffOp>(&v)) return to_text(*o);
    if (const auto* tp = std::get_if<TPoly>(&v)) {
        if (tp->terms.empty()) return "0";
        std::string out;
        for (const auto& [key, c] : tp->terms) {
            std::string factors;
            if (key.first > 0)
                factors = key.first == 1 ? "t" : ("t^" + std::to_string(key.first));
            if (key.second) {
                if (!factors.empty()) factors += " * ";
                factors += "dt";
            }
            printer_detail::append_term(out, c, factors);
        }
        return out;
    }
    const auto& path = std::get<PathValue>(v);
    std::string out;
    auto add_piece = [&](const std::string& piece) {
        if (piece.empty()) return;
        if (!out.empty()) out += " + ";
        out += piece;
    };
    for (size_t k = 0; k < path.t_part.size(); ++k) {
        if (path.t_part[k].is_zero()) continue;
        std::string piece;
        if (k > 0) piece += (k == 1 ? std::string("t") : "t^" + std::to_string(k)) + " * ";
        piece += to_text(path.t_part[k]);
        add_piece(piece);
    }
    for (size_t k = 0; k < path.dt_part.size(); ++k) {
        if (path.dt_part[k].is_zero()) continue;
        std::string piece;
        if (k > 0) piece += (k == 1 ? std::string("t") : "t^" + std::to_string(k)) + " * ";
        piece += to_text(path.dt_part[k]) + " * dt";
        add_piece(piece);
    }
    return out.empty() ? "0" : out;
}

} // namespace symdef

#endif
