#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eden/growth.hpp"
#include "eden/lattice.hpp"

namespace eden {

std::int64_t binomial(int n, int k);

/// Number of i-dimensional faces of the d-cube: 2^{d-i} * C(d,i).
std::int64_t face_count(int d, int i);

/// Range of the one-step change of beta_i in dimension d:
/// lo = -2^{d-1-i} C(d-1,i), hi = 2^{d-i} C(d-1,i-1).
struct JumpBounds {
    int d = 0;
    int i = 0;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};
JumpBounds jump_bounds(int d, int i);

enum class JumpPart { A, B };

/// A configuration in the 5x...x5 grid around an unoccupied center tile
/// whose addition changes the Betti numbers by exactly `claimed_delta`.
/// Certified against the betti() oracle at construction; a mismatch is an
/// internal error.
struct JumpConfig {
    Polyomino tiles;
    CellCoord center;
    std::vector<int> claimed_delta;  // index i = change of beta_i
    std::vector<std::int64_t> betti_before;
    std::vector<std::int64_t> betti_after;
};

/// Part A: adding the center decreases beta_i by k and increases beta_{i+1}
/// by face_count(d-1,i) - k.  Valid for 1 <= i <= d-2 with
/// 0 <= k <= face_count(d-1,i), and for i = d-1 with k = 1 (the complement
/// of that range would require beta_d to grow, which is impossible in R^d).
/// Part B: adding the center increases beta_1 by k, 1 <= k <= 2^{d-1}.
JumpConfig jump_config(int d, int i, int k, JumpPart part);

/// All valid (i, k) parameter pairs of a part for a given dimension.
std::vector<std::pair<int, int>> jump_config_domain(int d, JumpPart part);

/// Window pattern for the local census: occupied cells inside [0,R)^d.
struct LocalPattern {
    int R = 0;
    int d = 0;
    std::vector<CellKey> occupied;  // sorted
    bool require_base = false;      // full base layer (last axis = 0) occupied
    std::optional<CellCoord> marked;  // distinguished tile x0, kept for file round-trips

    void validate() const;
    static LocalPattern from_cells(int R, const std::vector<CellCoord>& cells,
                                   bool require_base = false);
};

// Pattern file: key=value header lines (R=..., require_base=0|1, optional
// x0=c1;...;cd) followed by the polyomino text format.
LocalPattern read_pattern(std::istream& is, const std::string& name = "<stream>");
LocalPattern read_pattern_file(const std::string& path);
void write_pattern(std::ostream& os, const LocalPattern& p);
void write_pattern_file(const std::string& path, const LocalPattern& p);

/// Number of width-R windows whose exact intersection with the occupied set
/// equals the pattern (up to the hyperoctahedral group when `rotations`).
/// Window anchors run over the bounding box inflated by R.
std::int64_t pattern_census(const Polyomino& state, const LocalPattern& p, bool rotations);

/// Per-(dimension, delta) counts of the Betti jumps, in fixed-width step
/// bins; only deltas the trajectory actually tracked are included.
struct JumpHistogram {
    int d = 0;
    std::int64_t bin_width = 50000;
    std::int64_t t_max = 0;
    // (i, delta) -> count per bin; bin b covers steps (b*w, (b+1)*w].
    std::map<std::pair<int, int>, std::vector<std::int64_t>> counts;

    std::int64_t total(int i, int delta) const;
    /// Telescoping sum over all deltas of delta * count.
    std::int64_t delta_sum(int i) const;
};
JumpHistogram jump_histogram_from_events(const std::vector<GrowthEvent>& events, int d,
                                         std::int64_t bin_width = 50000);
inline JumpHistogram jump_histogram_from_events(const Trajectory& traj,
                                                std::int64_t bin_width = 50000) {
    return jump_histogram_from_events(traj.events, traj.d, bin_width);
}

// CSV: i,delta,bin_lo,bin_hi,count.
void write_jump_histogram_csv(std::ostream& os, const JumpHistogram& h);
void write_jump_histogram_csv_file(const std::string& path, const JumpHistogram& h);

}  // namespace eden
