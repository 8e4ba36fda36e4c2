#ifndef SYMDEF_POLY_HPP
#define SYMDEF_POLY_HPP

#include "symdef/rational.hpp"
#include "symdef/truncation.hpp"

#include <map>
#include <string>
#include <vector>

namespace symdef {

// Exponent vector of a monomial in x1..xm.
using XMono = std::vector<int>;

// Sparse polynomial over the rationals in the coordinate functions x1..xm.
// Keys are exponent vectors of fixed length m; zero coefficients are never
// stored.
class Poly {
public:
    using Terms = std::map<XMono, Rat>;

    Poly() = default;
    explicit Poly(int m) : m_(m) {}
    Poly(int m, const Rat& c) : m_(m) {
        if (!symdef::is_zero(c)) terms_[XMono(static_cast<size_t>(m), 0)] = c;
    }

    static Poly variable(int m, int i) { // x_i, 1-based
        if (i < 1 || i > m) throw argument_error("Poly::variable: index out of range");
        Poly p(m);
        XMono e(static_cast<size_t>(m), 0);
        e[static_cast<size_t>(i - 1)] = 1;
        p.terms_[e] = Rat(1);
        return p;
    }

    static Poly monomial(int m, XMono e, const Rat& c) {
        Poly p(m);
        if (static_cast<int>(e.size()) != m) throw argument_error("Poly::monomial: bad exponent length");
        if (!symdef::is_zero(c)) p.terms_[std::move(e)] = c;
        return p;
    }

    int vars() const { return m_; }
    bool is_zero() const { return terms_.empty(); }
    const Terms& terms() const { return terms_; }

    bool is_constant() const {
        if (terms_.empty()) return true;
        if (terms_.size() > 1) return false;
        for (int e : terms_.begin()->first)
            if (e != 0) return false;
        return true;
    }

    Rat constant_term() const {
        XMono zero(static_cast<size_t>(m_), 0);
        auto it = terms_.find(zero);
        return it == terms_.end() ? Rat(0) : it->second;
    }

    int total_degree() const { // -1 for the zero polynomial
        int d = -1;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int k : e) s += k;
            if (s > d) d = s;
        }
        return d;
    }

    void add_term(const XMono& e, const Rat& c) {
        if (symdef::is_zero(c)) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second += c;
            if (symdef::is_zero(it->second)) terms_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o) {
        check(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { a += b; return a; }
    friend Poly operator-(Poly a, const Poly& b) { a -= b; return a; }
    friend Poly operator-(const Poly& a) {
        Poly r(a.m_);
        for (const auto& [e, c] : a.terms_) r.terms_[e] = -c;
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check(b);
        Poly r(a.m_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                XMono e = ea;
                for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }

    Poly& operator*=(const Rat& c) {
        if (symdef::is_zero(c)) { terms_.clear(); return *this; }
        for (auto& [e, v] : terms_) v *= c;
        return *this;
    }
    friend Poly operator*(Poly a, const Rat& c) { a *= c; return a; }
    friend Poly operator*(const Rat& c, Poly a) { a *= c; return a; }

    // d/dx_i, 1-based.
    Poly derivative(int i) const {
        if (i < 1 || i > m_) throw argument_error("Poly::derivative: index out of range");
        Poly r(m_);
        const size_t k = static_cast<size_t>(i - 1);
        for (const auto& [e, c] : terms_) {
            if (e[k] == 0) continue;
            XMono f = e;
            f[k] -= 1;
            r.add_term(f, c * Rat(e[k]));
        }
        return r;
    }

    // Derivative along a multiset of indices.
    Poly derivative(const std::vector<int>& idx) const {
        Poly r = *this;
        for (int i : idx) r = r.derivative(i);
        return r;
    }

    bool operator==(const Poly& o) const { return m_ == o.m_ && terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }
    bool operator<(const Poly& o) const {
        if (m_ != o.m_) return m_ < o.m_;
        return terms_ < o.terms_;
    }

private:
    void check(const Poly& o) const {
        if (m_ != o.m_) throw context_error("Poly: operand variable counts differ");
    }

    int m_ = 0;
    Terms terms_;
};

} // namespace symdef

#endif
