#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "eden/lattice.hpp"

namespace eden {

// Cells of the ambient cubical complex are encoded in doubled coordinates:
// even entry 2k is the degenerate interval {k}, odd entry 2k+1 is [k,k+1].
// The dimension of a cell is its number of odd entries; each face replaces
// one odd entry 2k+1 by 2k or 2k+2.  Doubled coordinate vectors are packed
// into the same 64-bit keys as lattice cells.

/// Doubled-coordinate key of the top cell of a d-cube at lattice coord c.
CellKey cube_to_doubled(CellKey cube, int d);
int doubled_dim(CellKey key, int d);

struct PersistenceInterval {
    int hdim = 0;
    std::int64_t birth = 0;
    std::int64_t death = -1;  // -1 = open (class alive at the end)

    bool closed() const { return death >= 0; }
    bool operator==(const PersistenceInterval& o) const {
        return hdim == o.hdim && birth == o.birth && death == o.death;
    }
    bool operator<(const PersistenceInterval& o) const {
        if (hdim != o.hdim) return hdim < o.hdim;
        if (birth != o.birth) return birth < o.birth;
        return death < o.death;
    }
};

/// Every cell of every cube added along a trajectory, with birth = the step
/// of the earliest cube containing it.  Cells are sorted by (birth, dim,
/// doubled-coordinate lexicographic), so faces precede cofaces.
class FilteredComplex {
public:
    int dim() const { return d_; }
    std::int64_t max_birth() const { return t_max_; }
    std::size_t size() const { return keys_.size(); }

    CellKey key(std::size_t i) const { return keys_[i]; }
    std::int32_t birth(std::size_t i) const { return births_[i]; }
    int cell_dim(std::size_t i) const { return dims_[i]; }

    /// Row indices of the boundary of cell i, ascending.
    std::pair<const std::uint32_t*, const std::uint32_t*> boundary(std::size_t i) const {
        return {faces_.data() + offsets_[i], faces_.data() + offsets_[i + 1]};
    }

    friend FilteredComplex build_filtration(int d,
                                            const std::vector<std::pair<CellKey, std::int64_t>>& cubes);

private:
    int d_ = 0;
    std::int64_t t_max_ = 0;
    std::vector<CellKey> keys_;
    std::vector<std::int32_t> births_;
    std::vector<std::uint8_t> dims_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> faces_;
};

/// Builds the filtration of the growth sequence `cubes` (lattice cell key,
/// birth step).  Birth steps need not be contiguous but must be positive.
FilteredComplex build_filtration(int d,
                                 const std::vector<std::pair<CellKey, std::int64_t>>& cubes);

/// Mod-2 Betti numbers [beta_0, ..., beta_{d-1}] by rank computation of the
/// boundary maps.  Independent of the persistence reduction path.
std::vector<std::int64_t> betti(const Polyomino& p);

/// Persistent homology of the filtration: column reduction over F2 with the
/// clearing optimization, dimensions processed top-down.  Zero-length
/// intervals are discarded; open intervals carry death = -1.
std::vector<PersistenceInterval> persistence(const FilteredComplex& fc);

/// beta_i(t) for t = 1..t_max from a barcode, by interval counting.
std::vector<std::int64_t> betti_series_from_intervals(
    const std::vector<PersistenceInterval>& intervals, int hdim, std::int64_t t_max);

// Barcode CSV: header hdim,birth,death with death = -1 for open intervals,
// sorted by (hdim, birth, death).
void write_barcode_csv(std::ostream& os, std::vector<PersistenceInterval> intervals);
void write_barcode_csv_file(const std::string& path,
                            const std::vector<PersistenceInterval>& intervals);
std::vector<PersistenceInterval> read_barcode_csv_file(const std::string& path);

// Cubical snapshot export: line 1 = d, line 2 = t, then one line per cube:
// d coordinates + birth step, sorted by (birth, coordinate lexicographic).
void write_cubical_snapshot(std::ostream& os, int d, std::int64_t t,
                            const std::vector<std::pair<CellKey, std::int64_t>>& cubes);
void write_cubical_snapshot_file(const std::string& path, int d, std::int64_t t,
                                 const std::vector<std::pair<CellKey, std::int64_t>>& cubes);

}  // namespace eden
