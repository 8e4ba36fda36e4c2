#ifndef SYMDEF_RATIONAL_HPP
#define SYMDEF_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <sstream>
#include <string>

namespace symdef {

// Exact rational scalar. Arbitrary precision so no identity test can be
// corrupted by overflow.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(std::int64_t p, std::int64_t q = 1) { return Rat(Int(p), Int(q)); }

inline bool is_zero(const Rat& r) { return r.is_zero(); }

inline Rat factorial(unsigned n) {
    Int f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return Rat(f);
}

inline Int binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    Int b = 1;
    for (unsigned i = 0; i < k; ++i) {
        b *= (n - i);
        b /= (i + 1);
    }
    return b;
}

// Canonical text: "p" or "p/q", q > 0, gcd-reduced (cpp_rational invariant).
inline std::string to_string(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

} // namespace symdef

#endif
