#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "eden/cell.hpp"

namespace eden {

/// Signed axis permutation: y[a] = sign[a] * x[perm[a]].  The 2^d * d! of
/// these form the hyperoctahedral group (all lattice rotations/reflections).
struct SignedPerm {
    std::array<std::uint8_t, kMaxDim> perm{};
    std::uint32_t sign_mask = 0;
    int d = 0;

    CellCoord apply(const CellCoord& c) const {
        CellCoord out;
        out.d = d;
        for (int a = 0; a < d; ++a) {
            const std::int32_t v = c.x[perm[static_cast<std::size_t>(a)]];
            out.x[a] = (sign_mask >> a) & 1u ? -v : v;
        }
        return out;
    }
};

inline std::vector<SignedPerm> hyperoctahedral_group(int d) {
    check_dim(d);
    std::array<std::uint8_t, kMaxDim> p{};
    for (int a = 0; a < d; ++a) p[static_cast<std::size_t>(a)] = static_cast<std::uint8_t>(a);
    std::vector<SignedPerm> out;
    do {
        for (std::uint32_t s = 0; s < (1u << d); ++s) {
            SignedPerm t;
            t.perm = p;
            t.sign_mask = s;
            t.d = d;
            out.push_back(t);
        }
    } while (std::next_permutation(p.begin(), p.begin() + d));
    return out;
}

}  // namespace eden
