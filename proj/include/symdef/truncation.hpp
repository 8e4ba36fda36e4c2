#ifndef SYMDEF_TRUNCATION_HPP
#define SYMDEF_TRUNCATION_HPP

#include "symdef/errors.hpp"

#include <memory>
#include <string>
#include <vector>

namespace symdef {

// Shared truncation data for one computation session.
//
//   m            dimension of the coordinate space
//   g            number of extra deformation parameters e1..eg
//   param_degree degrees d1..dg (non-positive); the distinguished parameter
//                eps always has degree 0
//   max_order    maximal retained total order in the parameter ideal
//   eps_floor    most negative retained eps exponent (<= 0)
//   max_word_len word-length bound used by the coalgebra layer (>= 2)
//
// Monomials whose order exceeds max_order, or whose eps exponent lies below
// eps_floor, are dropped by every arithmetic operation.
struct TruncationContext {
    int m = 1;
    int g = 0;
    std::vector<int> param_degree;
    int max_order = 1;
    int eps_floor = 0;
    int max_word_len = 2;

    TruncationContext() = default;
    TruncationContext(int m_, int g_, std::vector<int> degrees, int N, int floor, int W = 2)
        : m(m_), g(g_), param_degree(std::move(degrees)),
          max_order(N), eps_floor(floor), max_word_len(W) {
        validate();
    }

    void validate() const {
        if (m < 1) throw argument_error("truncation context: m must be positive");
        if (g < 0 || static_cast<int>(param_degree.size()) != g)
            throw argument_error("truncation context: need exactly g parameter degrees");
        for (int d : param_degree)
            if (d > 0) throw argument_error("truncation context: parameter degrees must be non-positive");
        if (max_order < 1) throw argument_error("truncation context: max_order must be >= 1");
        if (eps_floor > 0) throw argument_error("truncation context: eps_floor must be <= 0");
        if (max_word_len < 2) throw argument_error("truncation context: max_word_len must be >= 2");
    }

    bool param_odd(int a) const { return (param_degree.at(static_cast<size_t>(a)) & 1) != 0; }

    bool operator==(const TruncationContext& o) const {
        return m == o.m && g == o.g && param_degree == o.param_degree &&
               max_order == o.max_order && eps_floor == o.eps_floor &&
               max_word_len == o.max_word_len;
    }
};

using Ctx = std::shared_ptr<const TruncationContext>;

inline Ctx make_ctx(int m, int g, std::vector<int> degrees, int N, int eps_floor, int W = 2) {
    return std::make_shared<const TruncationContext>(m, g, std::move(degrees), N, eps_floor, W);
}

inline void require_same_ctx(const Ctx& a, const Ctx& b, const char* where) {
    if (a == b) return;
    if (a && b && *a == *b) return;
    throw context_error(std::string(where) + ": mismatched truncation contexts");
}

} // namespace symdef

#endif
