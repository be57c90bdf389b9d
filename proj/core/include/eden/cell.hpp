#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "eden/errors.hpp"

namespace eden {

// Lattice cells are identified by their integer corner coordinate.  The
// working representation is a single 64-bit key with d bias-shifted fields
// (axis 0 in the most significant bits, so unsigned comparison of keys is
// lexicographic comparison of coordinate vectors).  Dimensions 2..8 are
// supported; the per-axis range shrinks as d grows but comfortably covers
// cluster diameters reachable at feasible step counts.
using CellKey = std::uint64_t;

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 8;
inline constexpr CellKey kNoCell = ~CellKey{0};

struct CellCoord {
    std::array<std::int32_t, kMaxDim> x{};
    int d = 0;

    std::int32_t& operator[](int a) { return x[static_cast<std::size_t>(a)]; }
    std::int32_t operator[](int a) const { return x[static_cast<std::size_t>(a)]; }
    bool operator==(const CellCoord& o) const {
        if (d != o.d) return false;
        for (int a = 0; a < d; ++a)
            if (x[a] != o.x[a]) return false;
        return true;
    }
    bool operator<(const CellCoord& o) const {
        for (int a = 0; a < d && a < o.d; ++a)
            if (x[a] != o.x[a]) return x[a] < o.x[a];
        return d < o.d;
    }
};

inline CellCoord make_cell(std::initializer_list<std::int32_t> xs) {
    CellCoord c;
    c.d = static_cast<int>(xs.size());
    int a = 0;
    for (auto v : xs) c.x[a++] = v;
    return c;
}

// Bits per coordinate field for each dimension.
inline constexpr int cell_bits(int d) {
    constexpr int table[kMaxDim + 1] = {0, 0, 32, 21, 16, 12, 10, 9, 8};
    return table[d];
}

inline constexpr std::int64_t cell_coord_max(int d) {
    return (std::int64_t{1} << (cell_bits(d) - 1)) - 2;
}

inline void check_dim(int d) {
    if (d < kMinDim || d > kMaxDim)
        throw ConfigError("dimension must be in [2,8], got " + std::to_string(d));
}

inline CellKey pack_cell(const CellCoord& c) {
    const int b = cell_bits(c.d);
    const std::int64_t bias = std::int64_t{1} << (b - 1);
    const std::int64_t cmax = cell_coord_max(c.d);
    CellKey key = 0;
    for (int a = 0; a < c.d; ++a) {
        const std::int64_t v = c.x[a];
        if (v < -cmax || v > cmax)
            throw ConfigError("coordinate " + std::to_string(v) +
                              " outside packable range for d=" + std::to_string(c.d));
        key = (key << b) | static_cast<CellKey>(v + bias);
    }
    return key;
}

inline CellCoord unpack_cell(CellKey key, int d) {
    const int b = cell_bits(d);
    const std::int64_t bias = std::int64_t{1} << (b - 1);
    const CellKey mask = (CellKey{1} << b) - 1;
    CellCoord c;
    c.d = d;
    for (int a = d - 1; a >= 0; --a) {
        c.x[a] = static_cast<std::int32_t>(static_cast<std::int64_t>(key & mask) - bias);
        key >>= b;
    }
    return c;
}

// Offset one axis by +/-1 directly on the packed key.
inline CellKey key_step(CellKey key, int d, int axis, int dir) {
    const int b = cell_bits(d);
    const int shift = b * (d - 1 - axis);
    return dir > 0 ? key + (CellKey{1} << shift) : key - (CellKey{1} << shift);
}

// The 2d face-neighbors, axis ascending, minus direction before plus.
inline void face_neighbor_keys(CellKey key, int d, CellKey out[2 * kMaxDim]) {
    const int b = cell_bits(d);
    int n = 0;
    for (int a = 0; a < d; ++a) {
        const CellKey unit = CellKey{1} << (b * (d - 1 - a));
        out[n++] = key - unit;
        out[n++] = key + unit;
    }
}

inline std::vector<CellCoord> neighbors_face(const CellCoord& c) {
    check_dim(c.d);
    std::vector<CellCoord> out;
    out.reserve(static_cast<std::size_t>(2 * c.d));
    for (int a = 0; a < c.d; ++a) {
        for (int dir = -1; dir <= 1; dir += 2) {
            CellCoord n = c;
            n.x[a] += dir;
            out.push_back(n);
        }
    }
    return out;
}

inline std::string cell_to_string(const CellCoord& c, char sep = ' ') {
    std::string s;
    for (int a = 0; a < c.d; ++a) {
        if (a) s += sep;
        s += std::to_string(c.x[a]);
    }
    return s;
}

}  // namespace eden
