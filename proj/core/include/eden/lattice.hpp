#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eden/cell.hpp"
#include "eden/flat_hash.hpp"
#include "eden/rng.hpp"

namespace eden {

/// Finite set of d-cells on the integer lattice.  Growth only ever produces
/// face-connected sets, so connectivity is asserted (and tested) in the
/// face-adjacency graph.
class Polyomino {
public:
    Polyomino() = default;
    explicit Polyomino(int d) : d_(d) { check_dim(d); }

    int dim() const { return d_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }

    bool contains(CellKey k) const { return set_.contains(k); }
    bool contains(const CellCoord& c) const { return set_.contains(pack_cell(c)); }

    /// Insert; returns false if already present.
    bool insert(CellKey k);
    bool insert(const CellCoord& c) { return insert(pack_cell(c)); }

    /// Insertion-ordered packed cells.
    const std::vector<CellKey>& cells() const { return cells_; }
    std::vector<CellCoord> coords() const;
    /// Cells sorted lexicographically by coordinate vector.
    std::vector<CellCoord> sorted_coords() const;

    bool is_face_connected() const;

    static Polyomino from_cells(int d, const std::vector<CellCoord>& cells);

private:
    int d_ = 0;
    std::vector<CellKey> cells_;
    FlatSet64 set_;
};

/// Dense array + hash index with swap-remove: O(1) membership, insert,
/// delete, and uniform sampling.  This is the site-perimeter container,
/// the hot data structure of the whole simulator.
class IndexedCellSet {
public:
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }
    bool contains(CellKey k) const { return index_.contains(k); }

    bool insert(CellKey k) {
        if (!index_.emplace(k, static_cast<std::uint32_t>(cells_.size()))) return false;
        cells_.push_back(k);
        return true;
    }

    bool erase(CellKey k) {
        const std::uint32_t* slot = index_.find(k);
        if (!slot) return false;
        const std::uint32_t i = *slot;
        const CellKey last = cells_.back();
        cells_[i] = last;
        cells_.pop_back();
        if (last != k) index_.insert(last, i);
        index_.erase(k);
        return true;
    }

    CellKey at(std::size_t i) const { return cells_[i]; }
    CellKey sample(SplitMix64& rng) const { return cells_[rng.bounded(cells_.size())]; }
    const std::vector<CellKey>& cells() const { return cells_; }

private:
    std::vector<CellKey> cells_;
    FlatMap64<std::uint32_t> index_;
};

struct BoundingBox {
    std::array<std::int32_t, kMaxDim> lo{};
    std::array<std::int32_t, kMaxDim> hi{};

    void init(const CellCoord& c) {
        for (int a = 0; a < c.d; ++a) lo[a] = hi[a] = c.x[a];
    }
    void include(const CellCoord& c) {
        for (int a = 0; a < c.d; ++a) {
            if (c.x[a] < lo[a]) lo[a] = c.x[a];
            if (c.x[a] > hi[a]) hi[a] = c.x[a];
        }
    }
    bool contains(const CellCoord& c) const {
        for (int a = 0; a < c.d; ++a)
            if (c.x[a] < lo[a] || c.x[a] > hi[a]) return false;
        return true;
    }
    std::int32_t side(int a) const { return hi[a] - lo[a] + 1; }
};

/// Mutable simulation core: occupied polyomino + indexed site perimeter +
/// bounding box + step counter.  Single-threaded by design; snapshot the
/// polyomino for anything concurrent.
class GrowthState {
public:
    explicit GrowthState(int d);

    int dim() const { return d_; }
    /// Eden time t: number of occupied cells.
    std::int64_t step() const { return step_; }
    const Polyomino& occupied() const { return occupied_; }
    const IndexedCellSet& perimeter() const { return perimeter_; }
    const BoundingBox& bbox() const { return bbox_; }

    /// Moves c from the perimeter into the occupied set, inserting any fresh
    /// perimeter cells.  Cells newly inserted into the perimeter by the last
    /// add_tile are exposed for the tracking hooks.
    void add_tile(CellKey c);
    void add_tile(const CellCoord& c) { add_tile(pack_cell(c)); }

    const std::vector<CellKey>& last_new_perimeter() const { return new_perimeter_; }

    /// Brute-force perimeter recomputation, for consistency oracles.
    std::vector<CellKey> recompute_perimeter() const;

private:
    int d_;
    Polyomino occupied_;
    IndexedCellSet perimeter_;
    BoundingBox bbox_;
    std::int64_t step_ = 0;
    std::vector<CellKey> new_perimeter_;
};

/// Number of (d-1)-faces with exactly one incident occupied cell.
std::int64_t boundary_area(const Polyomino& p);

/// Entry i = volume of the projection of p to the hyperplane orthogonal to
/// axis i (number of distinct coordinate tuples with axis i removed).
std::vector<std::int64_t> projection_volumes(const Polyomino& p);

/// Gravity-compaction along `axis`: every line of cells parallel to the axis
/// is restacked contiguously from the global minimum coordinate of p along
/// that axis.  Volume is preserved and no projection grows.
Polyomino shake(const Polyomino& p, int axis);

// Polyomino text format: line 1 = d, then one cell per line as d
// space-separated integers; output is sorted lexicographically.
void write_polyomino(std::ostream& os, const Polyomino& p);
void write_polyomino_file(const std::string& path, const Polyomino& p);
Polyomino read_polyomino(std::istream& is, const std::string& name = "<stream>");
Polyomino read_polyomino_file(const std::string& path);

}  // namespace eden
