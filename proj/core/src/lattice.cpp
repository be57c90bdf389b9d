#include "eden/lattice.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

#include "eden/errors.hpp"

namespace eden {

bool Polyomino::insert(CellKey k) {
    if (!set_.insert(k)) return false;
    cells_.push_back(k);
    return true;
}

std::vector<CellCoord> Polyomino::coords() const {
    std::vector<CellCoord> out;
    out.reserve(cells_.size());
    for (CellKey k : cells_) out.push_back(unpack_cell(k, d_));
    return out;
}

std::vector<CellCoord> Polyomino::sorted_coords() const {
    std::vector<CellKey> keys = cells_;
    std::sort(keys.begin(), keys.end());
    std::vector<CellCoord> out;
    out.reserve(keys.size());
    for (CellKey k : keys) out.push_back(unpack_cell(k, d_));
    return out;
}

bool Polyomino::is_face_connected() const {
    if (cells_.empty()) return true;
    FlatSet64 seen;
    std::deque<CellKey> queue;
    queue.push_back(cells_[0]);
    seen.insert(cells_[0]);
    CellKey nbrs[2 * kMaxDim];
    std::size_t found = 1;
    while (!queue.empty()) {
        const CellKey k = queue.front();
        queue.pop_front();
        face_neighbor_keys(k, d_, nbrs);
        for (int i = 0; i < 2 * d_; ++i) {
            if (set_.contains(nbrs[i]) && seen.insert(nbrs[i])) {
                queue.push_back(nbrs[i]);
                ++found;
            }
        }
    }
    return found == cells_.size();
}

Polyomino Polyomino::from_cells(int d, const std::vector<CellCoord>& cells) {
    Polyomino p(d);
    for (const CellCoord& c : cells) {
        if (c.d != d) throw ConfigError("mixed dimensions in cell list");
        p.insert(c);
    }
    return p;
}

GrowthState::GrowthState(int d) : d_(d), occupied_(d) {
    check_dim(d);
    CellCoord origin;
    origin.d = d;
    const CellKey k = pack_cell(origin);
    occupied_.insert(k);
    bbox_.init(origin);
    step_ = 1;
    CellKey nbrs[2 * kMaxDim];
    face_neighbor_keys(k, d_, nbrs);
    for (int i = 0; i < 2 * d_; ++i) perimeter_.insert(nbrs[i]);
}

void GrowthState::add_tile(CellKey c) {
    if (!perimeter_.contains(c))
        throw ConfigError("add_tile: cell is not in the site perimeter");
    perimeter_.erase(c);
    occupied_.insert(c);
    bbox_.include(unpack_cell(c, d_));
    ++step_;
    new_perimeter_.clear();
    CellKey nbrs[2 * kMaxDim];
    face_neighbor_keys(c, d_, nbrs);
    for (int i = 0; i < 2 * d_; ++i) {
        if (!occupied_.contains(nbrs[i]) && perimeter_.insert(nbrs[i]))
            new_perimeter_.push_back(nbrs[i]);
    }
}

std::vector<CellKey> GrowthState::recompute_perimeter() const {
    FlatSet64 peri;
    CellKey nbrs[2 * kMaxDim];
    for (CellKey k : occupied_.cells()) {
        face_neighbor_keys(k, d_, nbrs);
        for (int i = 0; i < 2 * d_; ++i)
            if (!occupied_.contains(nbrs[i])) peri.insert(nbrs[i]);
    }
    std::vector<CellKey> out;
    out.reserve(peri.size());
    peri.for_each([&](CellKey k) { out.push_back(k); });
    std::sort(out.begin(), out.end());
    return out;
}

std::int64_t boundary_area(const Polyomino& p) {
    if (p.empty()) throw ConfigError("boundary_area: empty polyomino");
    const int d = p.dim();
    std::int64_t faces = 0;
    CellKey nbrs[2 * kMaxDim];
    for (CellKey k : p.cells()) {
        face_neighbor_keys(k, d, nbrs);
        for (int i = 0; i < 2 * d; ++i)
            if (!p.contains(nbrs[i])) ++faces;
    }
    return faces;
}

std::vector<std::int64_t> projection_volumes(const Polyomino& p) {
    if (p.empty()) throw ConfigError("projection_volumes: empty polyomino");
    const int d = p.dim();
    std::vector<std::int64_t> out(static_cast<std::size_t>(d), 0);
    for (int axis = 0; axis < d; ++axis) {
        FlatSet64 shadow;
        for (CellKey k : p.cells()) {
            CellCoord c = unpack_cell(k, d);
            c.x[axis] = 0;
            shadow.insert(pack_cell(c));
        }
        out[static_cast<std::size_t>(axis)] = static_cast<std::int64_t>(shadow.size());
    }
    return out;
}

Polyomino shake(const Polyomino& p, int axis) {
    if (p.empty()) return p;
    const int d = p.dim();
    if (axis < 0 || axis >= d) throw ConfigError("shake: axis out of range");

    std::int32_t base = 0;
    bool first = true;
    // Count cells per line (coordinates with `axis` zeroed out).
    FlatMap64<std::int32_t> columns;
    for (CellKey k : p.cells()) {
        CellCoord c = unpack_cell(k, d);
        if (first || c.x[axis] < base) base = c.x[axis];
        first = false;
        c.x[axis] = 0;
        const CellKey line = pack_cell(c);
        std::int32_t* n = columns.find(line);
        if (n)
            ++*n;
        else
            columns.insert(line, 1);
    }

    Polyomino out(d);
    columns.for_each([&](CellKey line, std::int32_t count) {
        CellCoord c = unpack_cell(line, d);
        for (std::int32_t i = 0; i < count; ++i) {
            c.x[axis] = base + i;
            out.insert(c);
        }
    });
    return out;
}

void write_polyomino(std::ostream& os, const Polyomino& p) {
    os << p.dim() << "\n";
    for (const CellCoord& c : p.sorted_coords()) os << cell_to_string(c) << "\n";
}

void write_polyomino_file(const std::string& path, const Polyomino& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_polyomino(os, p);
    if (!os) throw IoError("write failed: " + path);
}

Polyomino read_polyomino(std::istream& is, const std::string& name) {
    std::string line;
    long lineno = 0;
    int d = 0;
    // Header: optional key=value flag lines (used by pattern files), then d.
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.find('=') != std::string::npos) continue;  // flag line, callers reparse
        std::istringstream ls(line);
        if (!(ls >> d)) throw ParseError(name, lineno, "expected dimension");
        std::string rest;
        if (ls >> rest) throw ParseError(name, lineno, "junk after dimension");
        break;
    }
    if (d == 0) throw ParseError(name, lineno, "missing dimension line");
    check_dim(d);

    Polyomino p(d);
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        CellCoord c;
        c.d = d;
        for (int a = 0; a < d; ++a) {
            long long v;
            if (!(ls >> v)) throw ParseError(name, lineno, "expected " + std::to_string(d) + " coordinates");
            c.x[a] = static_cast<std::int32_t>(v);
        }
        std::string rest;
        if (ls >> rest) throw ParseError(name, lineno, "junk after coordinates");
        if (!p.insert(c)) throw ParseError(name, lineno, "duplicate cell");
    }
    if (p.empty()) throw ParseError(name, lineno, "polyomino has no cells");
    return p;
}

Polyomino read_polyomino_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    return read_polyomino(is, path);
}

}  // namespace eden
