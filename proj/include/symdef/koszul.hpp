#ifndef SYMDEF_KOSZUL_HPP
#define SYMDEF_KOSZUL_HPP

#include "symdef/errors.hpp"

#include <vector>

namespace symdef {

// Sign picked up when reordering a tensor of graded slots.
//
// perm describes the reordering (v_1,...,v_n) -> (v_{perm[0]+1},...,v_{perm[n-1]+1}),
// 0-based, and degs[i] is the degree of v_{i+1} in source position. The result
// is the product over all inversions of perm of (-1)^{d_i d_j}, where d_i, d_j
// are the degrees of the two slots being transposed.
inline int koszul_sign(const std::vector<int>& perm, const std::vector<int>& degs) {
    const size_t n = perm.size();
    if (degs.size() != n) throw argument_error("koszul_sign: permutation/degree length mismatch");
    std::vector<bool> seen(n, false);
    for (int p : perm) {
        if (p < 0 || static_cast<size_t>(p) >= n || seen[static_cast<size_t>(p)])
            throw argument_error("koszul_sign: not a permutation");
        seen[static_cast<size_t>(p)] = true;
    }
    int sign = 1;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (perm[i] > perm[j] && (degs[static_cast<size_t>(perm[i])] & 1) && (degs[static_cast<size_t>(perm[j])] & 1))
                sign = -sign;
    return sign;
}

// Sign of sorting `keys` ascending when slot i carries degree degs[i].
// Stable bubble sort; each adjacent swap of odd-odd slots flips the sign.
// Used to canonicalize words and odd-generator monomials.
template <class Key>
inline int sort_sign(std::vector<Key>& keys, std::vector<int>& degs) {
    int sign = 1;
    const size_t n = keys.size();
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = 0; j + 1 < n - i; ++j)
            if (keys[j + 1] < keys[j]) {
                std::swap(keys[j], keys[j + 1]);
                std::swap(degs[j], degs[j + 1]);
                if ((degs[j] & 1) && (degs[j + 1] & 1)) sign = -sign;
            }
    return sign;
}

} // namespace symdef

#endif
