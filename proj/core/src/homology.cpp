#include "eden/homology.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "eden/errors.hpp"

namespace eden {
namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// XOR-merge of two ascending index lists (mod-2 column addition).
void xor_merge(std::vector<std::uint32_t>& col, const std::uint32_t* b, const std::uint32_t* e,
               std::vector<std::uint32_t>& scratch) {
    scratch.clear();
    auto a = col.cbegin();
    while (a != col.cend() && b != e) {
        if (*a == *b) {
            ++a;
            ++b;
        } else if (*a < *b) {
            scratch.push_back(*a++);
        } else {
            scratch.push_back(*b++);
        }
    }
    scratch.insert(scratch.end(), a, col.cend());
    scratch.insert(scratch.end(), b, e);
    col.swap(scratch);
}

}  // namespace

CellKey cube_to_doubled(CellKey cube, int d) {
    CellCoord c = unpack_cell(cube, d);
    for (int a = 0; a < d; ++a) c.x[a] = 2 * c.x[a] + 1;
    return pack_cell(c);
}

int doubled_dim(CellKey key, int d) {
    const int b = cell_bits(d);
    const CellKey mask = (CellKey{1} << b) - 1;
    int q = 0;
    for (int a = 0; a < d; ++a) {
        q += static_cast<int>((key >> (b * a)) & 1);
        (void)mask;
    }
    return q;
}

FilteredComplex build_filtration(int d,
                                 const std::vector<std::pair<CellKey, std::int64_t>>& cubes) {
    check_dim(d);
    if (cubes.empty()) throw ConfigError("build_filtration: empty trajectory");

    const int b = cell_bits(d);
    std::size_t pow3 = 1;
    for (int a = 0; a < d; ++a) pow3 *= 3;

    // Every cube contributes its 3^d subcells; keep the minimal birth per key.
    std::vector<std::pair<CellKey, std::int32_t>> raw;
    raw.reserve(cubes.size() * pow3);
    for (const auto& [cube, t] : cubes) {
        if (t <= 0 || t > std::numeric_limits<std::int32_t>::max())
            throw ConfigError("build_filtration: birth step out of range");
        const CellKey center = cube_to_doubled(cube, d);
        for (std::size_t m = 0; m < pow3; ++m) {
            CellKey key = center;
            std::size_t rem = m;
            for (int a = 0; a < d; ++a) {
                const int delta = static_cast<int>(rem % 3) - 1;
                rem /= 3;
                if (delta != 0) key = key_step(key, d, a, delta);
            }
            raw.emplace_back(key, static_cast<std::int32_t>(t));
        }
    }
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end(),
                          [](const auto& x, const auto& y) { return x.first == y.first; }),
              raw.end());

    FilteredComplex fc;
    fc.d_ = d;
    const std::size_t n = raw.size();
    fc.keys_.resize(n);
    fc.births_.resize(n);
    fc.dims_.resize(n);

    // Filtration order: (birth, dim, doubled-coordinate lexicographic).
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    auto dim_of = [&](std::size_t i) {
        int q = 0;
        for (int a = 0; a < d; ++a) q += static_cast<int>((raw[i].first >> (b * a)) & 1);
        return q;
    };
    std::vector<std::uint8_t> rawdim(n);
    for (std::size_t i = 0; i < n; ++i) rawdim[i] = static_cast<std::uint8_t>(dim_of(i));
    std::sort(order.begin(), order.end(), [&](std::uint32_t i, std::uint32_t j) {
        if (raw[i].second != raw[j].second) return raw[i].second < raw[j].second;
        if (rawdim[i] != rawdim[j]) return rawdim[i] < rawdim[j];
        return raw[i].first < raw[j].first;
    });

    for (std::size_t i = 0; i < n; ++i) {
        const auto r = order[i];
        fc.keys_[i] = raw[r].first;
        fc.births_[i] = raw[r].second;
        fc.dims_[i] = rawdim[r];
        if (raw[r].second > fc.t_max_) fc.t_max_ = raw[r].second;
    }

    // key -> filtration index, via binary search over a key-sorted view.
    std::vector<std::uint32_t> by_key(n);
    for (std::size_t i = 0; i < n; ++i) by_key[i] = static_cast<std::uint32_t>(i);
    std::sort(by_key.begin(), by_key.end(),
              [&](std::uint32_t i, std::uint32_t j) { return fc.keys_[i] < fc.keys_[j]; });
    auto index_of = [&](CellKey key) -> std::uint32_t {
        auto it = std::lower_bound(by_key.begin(), by_key.end(), key,
                                   [&](std::uint32_t i, CellKey k) { return fc.keys_[i] < k; });
        return *it;
    };

    fc.offsets_.resize(n + 1, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        fc.offsets_[i] = static_cast<std::uint32_t>(total);
        total += 2u * fc.dims_[i];
    }
    fc.offsets_[n] = static_cast<std::uint32_t>(total);
    fc.faces_.resize(total);

    std::uint32_t face_buf[2 * kMaxDim];
    for (std::size_t i = 0; i < n; ++i) {
        const CellKey key = fc.keys_[i];
        int nf = 0;
        for (int a = 0; a < d; ++a) {
            if ((key >> (b * (d - 1 - a))) & 1) {
                face_buf[nf++] = index_of(key_step(key, d, a, -1));
                face_buf[nf++] = index_of(key_step(key, d, a, +1));
            }
        }
        std::sort(face_buf, face_buf + nf);
        std::copy(face_buf, face_buf + nf, fc.faces_.begin() + fc.offsets_[i]);
    }
    return fc;
}

std::vector<std::int64_t> betti(const Polyomino& p) {
    const int d = p.dim();
    check_dim(d);
    std::vector<std::int64_t> out(static_cast<std::size_t>(d), 0);
    if (p.empty()) return out;

    std::vector<std::pair<CellKey, std::int64_t>> cubes;
    cubes.reserve(p.size());
    for (CellKey k : p.cells()) cubes.emplace_back(k, 1);
    const FilteredComplex fc = build_filtration(d, cubes);
    const std::size_t n = fc.size();

    std::vector<std::int64_t> ncells(static_cast<std::size_t>(d) + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ++ncells[fc.cell_dim(i)];

    // rank(boundary_q) by plain column elimination, one dimension at a time.
    std::vector<std::int64_t> rank(static_cast<std::size_t>(d) + 2, 0);
    std::vector<std::uint32_t> owner(n, kNone);
    std::vector<std::vector<std::uint32_t>> cols(n);
    std::vector<std::uint32_t> scratch_col;
    std::vector<std::uint32_t> scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const int q = fc.cell_dim(i);
        if (q == 0) continue;
        auto [fb, fe] = fc.boundary(i);
        std::vector<std::uint32_t> col(fb, fe);
        while (!col.empty()) {
            const std::uint32_t piv = col.back();
            if (owner[piv] == kNone) {
                owner[piv] = static_cast<std::uint32_t>(i);
                cols[i] = std::move(col);
                ++rank[static_cast<std::size_t>(q)];
                break;
            }
            const auto& other = cols[owner[piv]];
            xor_merge(col, other.data(), other.data() + other.size(), scratch);
        }
    }

    for (int q = 0; q < d; ++q)
        out[static_cast<std::size_t>(q)] =
            ncells[static_cast<std::size_t>(q)] - rank[static_cast<std::size_t>(q)] -
            rank[static_cast<std::size_t>(q) + 1];
    return out;
}

std::vector<PersistenceInterval> persistence(const FilteredComplex& fc) {
    const std::size_t n = fc.size();
    const int d = fc.dim();
    std::vector<PersistenceInterval> out;

    std::vector<std::uint32_t> owner(n, kNone);      // pivot row -> owning column
    std::vector<std::uint8_t> cleared(n, 0);         // paired as creator by a higher column
    std::vector<std::vector<std::uint32_t>> cols(n); // reduced columns of owners
    std::vector<std::uint32_t> scratch;

    std::vector<std::vector<std::uint32_t>> by_dim(static_cast<std::size_t>(d) + 1);
    for (std::size_t i = 0; i < n; ++i)
        by_dim[fc.cell_dim(i)].push_back(static_cast<std::uint32_t>(i));

    for (int q = d; q >= 1; --q) {
        for (std::uint32_t j : by_dim[static_cast<std::size_t>(q)]) {
            if (cleared[j]) continue;  // creator already paired by a (q+1)-column
            auto [fb, fe] = fc.boundary(j);
            std::vector<std::uint32_t> col(fb, fe);
            for (;;) {
                if (col.empty()) {
                    // Creator never killed (dimension q+1 was already swept).
                    out.push_back({q, fc.birth(j), -1});
                    break;
                }
                const std::uint32_t piv = col.back();
                if (owner[piv] == kNone) {
                    owner[piv] = j;
                    cleared[piv] = 1;
                    if (fc.birth(piv) < fc.birth(j))
                        out.push_back({q - 1, fc.birth(piv), fc.birth(j)});
                    cols[j] = std::move(col);
                    break;
                }
                const auto& other = cols[owner[piv]];
                xor_merge(col, other.data(), other.data() + other.size(), scratch);
            }
        }
    }
    for (std::uint32_t j : by_dim[0])
        if (!cleared[j]) out.push_back({0, fc.birth(j), -1});

    return out;
}

std::vector<std::int64_t> betti_series_from_intervals(
    const std::vector<PersistenceInterval>& intervals, int hdim, std::int64_t t_max) {
    // delta[t] accumulates +1 at births, -1 at deaths; prefix sums give the
    // number of intervals containing t.
    std::vector<std::int64_t> delta(static_cast<std::size_t>(t_max) + 2, 0);
    for (const auto& iv : intervals) {
        if (iv.hdim != hdim) continue;
        if (iv.birth > t_max) continue;
        delta[static_cast<std::size_t>(iv.birth)] += 1;
        if (iv.closed() && iv.death <= t_max) delta[static_cast<std::size_t>(iv.death)] -= 1;
    }
    std::vector<std::int64_t> series(static_cast<std::size_t>(t_max) + 1, 0);
    std::int64_t acc = 0;
    for (std::int64_t t = 1; t <= t_max; ++t) {
        acc += delta[static_cast<std::size_t>(t)];
        series[static_cast<std::size_t>(t)] = acc;
    }
    return series;
}

void write_barcode_csv(std::ostream& os, std::vector<PersistenceInterval> intervals) {
    std::sort(intervals.begin(), intervals.end());
    os << "hdim,birth,death\n";
    for (const auto& iv : intervals)
        os << iv.hdim << "," << iv.birth << "," << iv.death << "\n";
}

void write_barcode_csv_file(const std::string& path,
                            const std::vector<PersistenceInterval>& intervals) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_barcode_csv(os, intervals);
    if (!os) throw IoError("write failed: " + path);
}

std::vector<PersistenceInterval> read_barcode_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::string line;
    long lineno = 0;
    std::vector<PersistenceInterval> out;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || lineno == 1) continue;  // header
        PersistenceInterval iv;
        if (std::sscanf(line.c_str(), "%d,%ld,%ld", &iv.hdim, &iv.birth, &iv.death) != 3)
            throw ParseError(path, lineno, "bad barcode row");
        out.push_back(iv);
    }
    return out;
}

void write_cubical_snapshot(std::ostream& os, int d, std::int64_t t,
                            const std::vector<std::pair<CellKey, std::int64_t>>& cubes) {
    std::vector<std::pair<CellKey, std::int64_t>> sorted = cubes;
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second < y.second;
        return x.first < y.first;
    });
    os << d << "\n" << t << "\n";
    for (const auto& [key, birth] : sorted)
        os << cell_to_string(unpack_cell(key, d)) << " " << birth << "\n";
}

void write_cubical_snapshot_file(const std::string& path, int d, std::int64_t t,
                                 const std::vector<std::pair<CellKey, std::int64_t>>& cubes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_cubical_snapshot(os, d, t, cubes);
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace eden
