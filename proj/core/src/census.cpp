#include "eden/census.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "eden/errors.hpp"
#include "eden/flat_hash.hpp"
#include "eden/homology.hpp"
#include "eden/symmetry.hpp"

namespace eden {

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

std::int64_t face_count(int d, int i) {
    if (d < 1 || d > kMaxDim || i < 0 || i > d)
        throw ConfigError("face_count: need 1 <= d <= 8 and 0 <= i <= d");
    return (std::int64_t{1} << (d - i)) * binomial(d, i);
}

JumpBounds jump_bounds(int d, int i) {
    check_dim(d);
    if (i < 1 || i > d - 1) throw ConfigError("jump_bounds: need 1 <= i <= d-1");
    JumpBounds b;
    b.d = d;
    b.i = i;
    b.lo = -((std::int64_t{1} << (d - 1 - i)) * binomial(d - 1, i));
    b.hi = (std::int64_t{1} << (d - i)) * binomial(d - 1, i - 1);
    return b;
}

namespace {

// Faces of the unit cube at the origin in doubled coordinates: entry 1 is
// the free interval, 0/2 pin the axis to the lower/upper side.
CellKey face_key(const std::array<int, kMaxDim>& sigma, int d) {
    CellCoord f;
    f.d = d;
    for (int a = 0; a < d; ++a) f.x[a] = 1 + sigma[static_cast<std::size_t>(a)];
    return pack_cell(f);
}

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

// All doubled vectors in {0,1,2}^d with w[up]=fixed_up and exactly
// `odd_rest` odd entries among the other axes, in lexicographic order.
std::vector<CellKey> enumerate_faces(int d, int up, int fixed_up, int odd_rest) {
    std::vector<CellKey> out;
    CellCoord w;
    w.d = d;
    const std::int64_t total = ipow(3, d - 1);
    for (std::int64_t m = 0; m < total; ++m) {
        std::int64_t rem = m;
        int odd = 0;
        for (int a = d - 1; a >= 0; --a) {
            if (a == up) continue;
            const int v = static_cast<int>(rem % 3);
            rem /= 3;
            w.x[a] = v;
            if (v == 1) ++odd;
        }
        w.x[up] = fixed_up;
        if (odd == odd_rest) out.push_back(pack_cell(w));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<std::pair<int, int>> jump_config_domain(int d, JumpPart part) {
    check_dim(d);
    std::vector<std::pair<int, int>> out;
    if (part == JumpPart::B) {
        for (int k = 1; k <= (1 << (d - 1)); ++k) out.emplace_back(1, k);
        return out;
    }
    for (int i = 1; i <= d - 2; ++i)
        for (int k = 0; k <= face_count(d - 1, i); ++k) out.emplace_back(i, k);
    out.emplace_back(d - 1, 1);
    return out;
}

JumpConfig jump_config(int d, int i, int k, JumpPart part) {
    check_dim(d);
    const int up = d - 1;

    FlatSet64 in_r;
    FlatSet64 in_s;
    std::vector<int> claimed(static_cast<std::size_t>(d), 0);

    if (part == JumpPart::A) {
        if (i < 1 || i > d - 1) throw ConfigError("jump_config: need 1 <= i <= d-1");
        const std::int64_t J = face_count(d - 1, i);
        const bool top_dim = i == d - 1;
        if (top_dim ? k != 1 : (k < 0 || k > J))
            throw ConfigError("jump_config: k out of lemma range");

        // R = base subfaces plus the full i-skeleton of the cube.
        std::array<int, kMaxDim> sigma{};
        const auto total = ipow(3, d);
        for (std::int64_t m = 0; m < total; ++m) {
            std::int64_t rem = m;
            bool all_zero = true;
            int zeros = 0;
            for (int a = 0; a < d; ++a) {
                sigma[static_cast<std::size_t>(a)] = static_cast<int>(rem % 3) - 1;
                rem /= 3;
                if (sigma[static_cast<std::size_t>(a)] != 0) all_zero = false;
                if (sigma[static_cast<std::size_t>(a)] == 0) ++zeros;
            }
            if (all_zero) continue;  // the cube itself, not a proper face
            if (sigma[static_cast<std::size_t>(up)] == -1 || zeros <= i)
                in_r.insert(face_key(sigma, d));
        }
        in_r.for_each([&](CellKey key) { in_s.insert(key); });

        // The extra (i+1)-cells are the vertical prisms over the i-cells of
        // the base; S keeps J - k of them.
        const std::vector<CellKey> prisms = enumerate_faces(d, up, 1, i);
        if (static_cast<std::int64_t>(prisms.size()) != J)
            throw InternalError("prism enumeration does not match face_count");
        const std::int64_t keep = J - k;
        for (std::int64_t j = 0; j < keep; ++j)
            in_s.insert(prisms[static_cast<std::size_t>(j)]);

        claimed[static_cast<std::size_t>(i)] = -k;
        if (i + 1 <= d - 1) claimed[static_cast<std::size_t>(i + 1)] = static_cast<int>(J - k);
    } else {
        if (i != 1) throw ConfigError("jump_config part b: i is fixed to 1");
        if (k < 1 || k > (1 << (d - 1)))
            throw ConfigError("jump_config part b: need 1 <= k <= 2^{d-1}");

        // R = base subfaces plus k vertices of the top face; S adds the
        // vertical edges connecting those vertices to the base.
        std::array<int, kMaxDim> sigma{};
        const auto total = ipow(3, d);
        for (std::int64_t m = 0; m < total; ++m) {
            std::int64_t rem = m;
            bool all_zero = true;
            for (int a = 0; a < d; ++a) {
                sigma[static_cast<std::size_t>(a)] = static_cast<int>(rem % 3) - 1;
                rem /= 3;
                if (sigma[static_cast<std::size_t>(a)] != 0) all_zero = false;
            }
            if (all_zero) continue;
            if (sigma[static_cast<std::size_t>(up)] == -1) in_r.insert(face_key(sigma, d));
        }
        const std::vector<CellKey> top_vertices = enumerate_faces(d, up, 2, 0);
        for (int j = 0; j < k; ++j) {
            const CellKey v = top_vertices[static_cast<std::size_t>(j)];
            in_r.insert(v);
            in_s.insert(key_step(v, d, up, -1));  // doubled 2 -> 1: vertical edge
        }
        in_r.for_each([&](CellKey key) { in_s.insert(key); });

        claimed[1] = k;
    }

    // Tile inclusion over the 5^d grid: tiles adjacent to the center are
    // included iff their contact face lies in R; other tiles (off by 2
    // somewhere) iff their region's face lies in S, except the top layer.
    JumpConfig cfg;
    cfg.tiles = Polyomino(d);
    cfg.center = CellCoord{};
    cfg.center.d = d;
    cfg.claimed_delta = claimed;

    CellCoord delta;
    delta.d = d;
    std::array<int, kMaxDim> sigma{};
    const auto grid = ipow(5, d);
    for (std::int64_t m = 0; m < grid; ++m) {
        std::int64_t rem = m;
        bool all_zero = true;
        int maxabs = 0;
        for (int a = 0; a < d; ++a) {
            const int v = static_cast<int>(rem % 5) - 2;
            rem /= 5;
            delta.x[a] = v;
            sigma[static_cast<std::size_t>(a)] = v > 0 ? 1 : v < 0 ? -1 : 0;
            if (v != 0) all_zero = false;
            maxabs = std::max(maxabs, std::abs(v));
        }
        if (all_zero) continue;
        const CellKey f = face_key(sigma, d);
        bool include = false;
        if (maxabs == 1) {
            include = in_r.contains(f);
        } else if (delta.x[up] == 2) {
            include = false;  // top layer stays open
        } else {
            include = in_s.contains(f);
        }
        if (include) cfg.tiles.insert(delta);
    }

    // Oracle certification: the construction is a heuristic, betti() is the
    // source of truth.
    cfg.betti_before = betti(cfg.tiles);
    Polyomino with_center = cfg.tiles;
    with_center.insert(cfg.center);
    cfg.betti_after = betti(with_center);
    if (cfg.betti_before[0] != 1 || cfg.betti_after[0] != 1)
        throw InternalError("jump_config: configuration is not connected");
    for (int q = 1; q < d; ++q) {
        const std::int64_t got =
            cfg.betti_after[static_cast<std::size_t>(q)] -
            cfg.betti_before[static_cast<std::size_t>(q)];
        if (got != cfg.claimed_delta[static_cast<std::size_t>(q)])
            throw InternalError("jump_config: oracle delta mismatch in dimension " +
                                std::to_string(q) + " (got " + std::to_string(got) +
                                ", claimed " +
                                std::to_string(cfg.claimed_delta[static_cast<std::size_t>(q)]) +
                                ")");
    }
    return cfg;
}

void LocalPattern::validate() const {
    check_dim(d);
    if (R < 1) throw ConfigError("pattern: R must be >= 1");
    FlatSet64 seen;
    for (CellKey k : occupied) {
        const CellCoord c = unpack_cell(k, d);
        for (int a = 0; a < d; ++a)
            if (c.x[a] < 0 || c.x[a] >= R)
                throw ConfigError("pattern: cell outside the [0,R)^d window");
        if (!seen.insert(k)) throw ConfigError("pattern: duplicate cell");
    }
    if (marked) {
        if (marked->d != d) throw ConfigError("pattern: marked tile dimension mismatch");
        for (int a = 0; a < d; ++a)
            if (marked->x[a] < 0 || marked->x[a] >= R)
                throw ConfigError("pattern: marked tile outside the window");
        if (seen.contains(pack_cell(*marked)))
            throw ConfigError("pattern: marked tile must be unoccupied");
    }
    if (require_base) {
        // Base layer: every cell with last coordinate 0.
        std::int64_t base = 1;
        for (int a = 0; a < d - 1; ++a) base *= R;
        std::int64_t found = 0;
        for (CellKey k : occupied)
            if (unpack_cell(k, d).x[d - 1] == 0) ++found;
        if (found != base)
            throw ConfigError("pattern: require_base set but the base layer is not full");
    }
}

LocalPattern LocalPattern::from_cells(int R, const std::vector<CellCoord>& cells,
                                      bool require_base) {
    if (cells.empty()) throw ConfigError("pattern: empty cell list");
    LocalPattern p;
    p.R = R;
    p.d = cells[0].d;
    p.require_base = require_base;
    for (const CellCoord& c : cells) p.occupied.push_back(pack_cell(c));
    std::sort(p.occupied.begin(), p.occupied.end());
    p.validate();
    return p;
}

LocalPattern read_pattern(std::istream& is, const std::string& name) {
    std::stringstream body;
    std::string line;
    long lineno = 0;
    LocalPattern p;
    bool saw_r = false;
    while (std::getline(is, line)) {
        ++lineno;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            body << line << "\n";
            continue;
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "R") {
                p.R = std::stoi(value);
                saw_r = true;
            } else if (key == "require_base") {
                p.require_base = std::stoi(value) != 0;
            } else if (key == "x0") {
                CellCoord c;
                std::istringstream vs(value);
                std::string tok;
                while (std::getline(vs, tok, ';')) c.x[c.d++] = std::stoi(tok);
                p.marked = c;
            } else {
                throw ParseError(name, lineno, "unknown pattern flag: " + key);
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(name, lineno, "bad value for flag " + key);
        }
    }
    if (!saw_r) throw ParseError(name, lineno, "pattern file is missing the R flag");
    Polyomino poly = read_polyomino(body, name);
    p.d = poly.dim();
    p.occupied = poly.cells();
    std::sort(p.occupied.begin(), p.occupied.end());
    if (p.marked) p.marked->d = p.d;
    p.validate();
    return p;
}

LocalPattern read_pattern_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    return read_pattern(is, path);
}

void write_pattern(std::ostream& os, const LocalPattern& p) {
    os << "R=" << p.R << "\n";
    os << "require_base=" << (p.require_base ? 1 : 0) << "\n";
    if (p.marked) os << "x0=" << cell_to_string(*p.marked, ';') << "\n";
    Polyomino poly(p.d);
    for (CellKey k : p.occupied) poly.insert(k);
    write_polyomino(os, poly);
}

void write_pattern_file(const std::string& path, const LocalPattern& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_pattern(os, p);
    if (!os) throw IoError("write failed: " + path);
}

namespace {

// Window-preserving image of in-window cells under a signed permutation.
std::vector<CellKey> transform_window(const std::vector<CellCoord>& cells, const SignedPerm& g,
                                      int R) {
    std::vector<CellKey> out;
    out.reserve(cells.size());
    for (const CellCoord& c : cells) {
        CellCoord y;
        y.d = c.d;
        for (int a = 0; a < c.d; ++a) {
            const std::int32_t v = c.x[g.perm[static_cast<std::size_t>(a)]];
            y.x[a] = (g.sign_mask >> a) & 1u ? R - 1 - v : v;
        }
        out.push_back(pack_cell(y));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::int64_t pattern_census(const Polyomino& state, const LocalPattern& p, bool rotations) {
    p.validate();
    if (state.dim() != p.d)
        throw ConfigError("pattern_census: pattern and state dimension mismatch");
    if (state.empty()) throw ConfigError("pattern_census: empty state");
    const int d = p.d;
    const int R = p.R;

    std::vector<CellCoord> base_cells;
    for (CellKey k : p.occupied) base_cells.push_back(unpack_cell(k, d));

    // Occupancy bitmaps over window positions in lexicographic order, one
    // per distinct rotated image.
    std::int64_t wsize = 1;
    for (int a = 0; a < d; ++a) wsize *= R;
    auto pos_index = [&](const CellCoord& c) {
        std::int64_t idx = 0;
        for (int a = 0; a < d; ++a) idx = idx * R + c.x[a];
        return idx;
    };
    std::vector<std::vector<bool>> variants;
    std::vector<std::vector<CellKey>> seen;
    auto add_variant = [&](const std::vector<CellKey>& cells) {
        for (const auto& s : seen)
            if (s == cells) return;
        seen.push_back(cells);
        std::vector<bool> bitmap(static_cast<std::size_t>(wsize), false);
        for (CellKey k : cells)
            bitmap[static_cast<std::size_t>(pos_index(unpack_cell(k, d)))] = true;
        variants.push_back(std::move(bitmap));
    };
    if (rotations) {
        for (const SignedPerm& g : hyperoctahedral_group(d))
            add_variant(transform_window(base_cells, g, R));
    } else {
        std::vector<CellKey> sorted = p.occupied;
        std::sort(sorted.begin(), sorted.end());
        add_variant(sorted);
    }

    // Window anchors over the bounding box inflated by R.
    BoundingBox bb;
    bool first = true;
    for (const CellCoord& c : state.coords()) {
        if (first) {
            bb.init(c);
            first = false;
        } else {
            bb.include(c);
        }
    }
    CellCoord anchor;
    anchor.d = d;
    std::array<std::int64_t, kMaxDim> span{};
    std::int64_t total_anchors = 1;
    for (int a = 0; a < d; ++a) {
        span[static_cast<std::size_t>(a)] = (bb.hi[a] + R) - (bb.lo[a] - R) + 1;
        total_anchors *= span[static_cast<std::size_t>(a)];
    }

    std::int64_t count = 0;
    CellCoord probe;
    probe.d = d;
    for (std::int64_t m = 0; m < total_anchors; ++m) {
        std::int64_t rem = m;
        for (int a = d - 1; a >= 0; --a) {
            anchor.x[a] =
                bb.lo[a] - R + static_cast<std::int32_t>(rem % span[static_cast<std::size_t>(a)]);
            rem /= span[static_cast<std::size_t>(a)];
        }
        for (const auto& bitmap : variants) {
            bool match = true;
            std::int64_t idx = 0;
            // Odometer over window offsets in lexicographic order.
            for (int a = 0; a < d; ++a) probe.x[a] = anchor.x[a];
            for (;;) {
                const bool occ = state.contains(probe);
                if (occ != static_cast<bool>(bitmap[static_cast<std::size_t>(idx)])) {
                    match = false;
                    break;
                }
                ++idx;
                if (idx >= wsize) break;
                int a = d - 1;
                while (true) {
                    if (++probe.x[a] < anchor.x[a] + R) break;
                    probe.x[a] = anchor.x[a];
                    --a;
                }
            }
            if (match) {
                ++count;
                break;
            }
        }
    }
    return count;
}

std::int64_t JumpHistogram::total(int i, int delta) const {
    auto it = counts.find({i, delta});
    if (it == counts.end()) return 0;
    std::int64_t sum = 0;
    for (std::int64_t c : it->second) sum += c;
    return sum;
}

std::int64_t JumpHistogram::delta_sum(int i) const {
    std::int64_t sum = 0;
    for (const auto& [key, bins] : counts) {
        if (key.first != i) continue;
        for (std::int64_t c : bins) sum += key.second * c;
    }
    return sum;
}

JumpHistogram jump_histogram_from_events(const std::vector<GrowthEvent>& events, int d,
                                         std::int64_t bin_width) {
    if (bin_width < 1) throw ConfigError("jump histogram: bin width must be >= 1");
    JumpHistogram h;
    h.d = d;
    h.bin_width = bin_width;
    for (const GrowthEvent& e : events) h.t_max = std::max(h.t_max, e.step);
    const auto nbins = static_cast<std::size_t>((h.t_max + bin_width - 1) / bin_width);
    for (const GrowthEvent& e : events) {
        const auto bin = static_cast<std::size_t>((e.step - 1) / bin_width);
        for (int i = 1; i <= d - 1; ++i) {
            if (!e.has_dbeta(i)) continue;
            auto& bins = h.counts[{i, e.get_dbeta(i)}];
            if (bins.size() != nbins) bins.resize(nbins, 0);
            ++bins[bin];
        }
    }
    return h;
}

void write_jump_histogram_csv(std::ostream& os, const JumpHistogram& h) {
    os << "i,delta,bin_lo,bin_hi,count\n";
    for (const auto& [key, bins] : h.counts) {
        for (std::size_t b = 0; b < bins.size(); ++b) {
            os << key.first << "," << key.second << "," << b * h.bin_width << ","
               << (b + 1) * h.bin_width << "," << bins[b] << "\n";
        }
    }
}

void write_jump_histogram_csv_file(const std::string& path, const JumpHistogram& h) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_jump_histogram_csv(os, h);
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace eden
