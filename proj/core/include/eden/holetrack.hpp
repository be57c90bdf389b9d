#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "eden/growth.hpp"
#include "eden/homology.hpp"
#include "eden/lattice.hpp"

namespace eden {

/// Identity and lifetime of one bounded complement component.  A record is
/// created at every interval birth: holes separated from the outer region
/// and split fragments that do not keep the parent identity (the largest
/// fragment keeps the parent id; ties go to the fragment with the
/// lexicographically smallest minimal cell).
struct HoleRecord {
    std::int64_t id = -1;
    std::int64_t parent = -1;  // -1 when born from the outer perimeter
    std::int64_t birth = 0;
    std::int64_t death = -1;  // -1 while alive
    std::int64_t volume_at_birth = 0;
    std::vector<CellKey> cells_at_birth;  // sorted; empty if not recorded
    std::string shape_fixed;
    std::string shape_free;
    // (step, volume) samples: at birth/split/death events plus periodic.
    std::vector<std::pair<std::int64_t, std::int64_t>> volume_history;
};

/// Genealogy of the holes: one node per segment of a hole's life between
/// events.  A node ends either by death, by a split (>= 2 children, the
/// child keeping the display id listed first), or not at all (alive at the
/// end of the run).  Every node is a hole birth in the counting sense of
/// the area/shape census: a split ends the parent and starts one node per
/// fragment, the identity keeper included.
struct SplitTreeNode {
    std::int64_t record_id = -1;
    std::int64_t birth = 0;
    std::int64_t end = -1;
    std::int32_t parent = -1;
    bool ends_in_split = false;
    std::vector<std::int32_t> children;
    std::int64_t volume_at_start = 0;
    std::string shape_fixed;
    std::string shape_free;
};

struct SplitTree {
    std::vector<SplitTreeNode> nodes;
    std::vector<std::int32_t> roots;
};

/// One row of the over-all-time hole census (one per tree node).
struct HoleBirth {
    std::int64_t step = 0;
    std::int64_t volume = 0;
    std::string shape_fixed;
    std::string shape_free;
};

/// Incremental tracker of the bounded components of the complement during
/// growth.  Attach as a growth hook from the very first step; per addition
/// it classifies the tile's former component and detects birth, split, and
/// death events with a lockstep multi-source BFS whose work is bounded by
/// the smaller pieces.  Cells in bounded components carry labels; the
/// unbounded component is implicit (unoccupied and unlabeled), and a BFS
/// group is certified outer as soon as it leaves the occupied bounding box.
class HoleTracker {
public:
    struct Options {
        std::int64_t volume_sample_every = 1000;
        bool record_birth_cells = true;
        bool shape_keys = true;
    };

    explicit HoleTracker(const GrowthState& initial);
    HoleTracker(const GrowthState& initial, Options options);
    ~HoleTracker();
    HoleTracker(const HoleTracker&) = delete;
    HoleTracker& operator=(const HoleTracker&) = delete;

    /// Process the addition recorded in `event`; sets the top-dimension
    /// Betti delta and the hole_event annotation.
    void on_tile_added(const GrowthState& state, GrowthEvent& event);

    GrowthHook hook() {
        return [this](const GrowthState& s, GrowthEvent& e) { on_tile_added(s, e); };
    }

    /// Number of live bounded complement components (= beta_{d-1} by
    /// Alexander duality; the acceptance suite checks that equality).
    std::int64_t hole_count() const { return live_; }
    std::int64_t outer_perimeter() const { return outp_; }
    std::int64_t inner_perimeter() const { return innp_; }

    const std::vector<HoleRecord>& records() const { return records_; }
    const SplitTree& tree() const { return tree_; }

    /// Every hole created at any time, split fragments included (what the
    /// over-all-time area/shape tables count): one entry per tree node, in
    /// birth order.
    std::vector<HoleBirth> birth_census() const;

    struct LiveHole {
        std::int64_t record_id;
        std::int64_t volume;
        std::vector<CellKey> cells;
    };
    /// Snapshot of the live holes (exact current volumes and cell sets),
    /// sorted by record id.
    std::vector<LiveHole> live_holes() const;

    /// O(P) recount of (outer, inner) perimeter, for consistency checks.
    std::pair<std::int64_t, std::int64_t> recount_perimeter_split(const GrowthState& state) const;

private:
    struct Impl;
    Impl* impl_;
    std::vector<HoleRecord> records_;
    SplitTree tree_;
    std::int64_t live_ = 0;
    std::int64_t outp_ = 0;
    std::int64_t innp_ = 0;
};

/// (OutP, InnP): site-perimeter cells in the unbounded component vs. inside
/// holes.  OutP + InnP = P at every step.
inline std::pair<std::int64_t, std::int64_t> perimeter_split(const GrowthState&,
                                                             const HoleTracker& tracker) {
    return {tracker.outer_perimeter(), tracker.inner_perimeter()};
}

/// Persistence intervals of dimension d-1 derived from the splitting
/// forest: at a split the longest-surviving subtree continues the elder
/// interval and every other child opens one at the split step.
std::vector<PersistenceInterval> barcode_dminus1(const SplitTree& tree, int d);

/// Translation-normalized canonical key of a cell set.
std::string canonical_fixed(const std::vector<CellKey>& cells, int d);
std::string canonical_fixed(const std::vector<CellCoord>& cells);
/// Minimum fixed key over the hyperoctahedral group (d <= 5).
std::string canonical_free(const std::vector<CellKey>& cells, int d);
std::string canonical_free(const std::vector<CellCoord>& cells);
/// Number of distinct fixed forms in the free class of the set.
int fixed_multiplicity(const std::vector<CellKey>& cells, int d);

// holes CSV: id,parent,birth,death,volume_at_birth,shape_fixed,shape_free.
void write_holes_csv(std::ostream& os, const std::vector<HoleRecord>& records);
void write_holes_csv_file(const std::string& path, const std::vector<HoleRecord>& records);
std::vector<HoleRecord> read_holes_csv_file(const std::string& path);

// End-of-run snapshot of the live holes: id,volume,shape_fixed,shape_free.
void write_live_holes_csv(std::ostream& os, const std::vector<HoleTracker::LiveHole>& live,
                          int d);
void write_live_holes_csv_file(const std::string& path,
                               const std::vector<HoleTracker::LiveHole>& live, int d);
struct LiveHoleRow {
    std::int64_t id;
    std::int64_t volume;
    std::string shape_fixed;
    std::string shape_free;
};
std::vector<LiveHoleRow> read_live_holes_csv_file(const std::string& path);

// Splitting forest as JSON: {"roots":[{id,birth,death,children:[...]}]}.
void write_splittree_json(std::ostream& os, const SplitTree& tree);
void write_splittree_json_file(const std::string& path, const SplitTree& tree);

// OBJ mesh of the boundary quads of a 3-dimensional cell set.
void write_hole_cast_obj(std::ostream& os, const std::vector<CellKey>& cells, int d);
void write_hole_cast_obj_file(const std::string& path, const std::vector<CellKey>& cells, int d);

}  // namespace eden
