#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "eden/lattice.hpp"
#include "eden/rng.hpp"

namespace eden {

enum class GrowthLaw : std::uint8_t { EdenUniform, SiteFpp, BondFpp };

/// Passage-time law for the FPP modes.  Exponential is the one the growth
/// process is calibrated and tested for; the enum is the extension point.
struct PassageLaw {
    enum class Kind : std::uint8_t { Exponential } kind = Kind::Exponential;
    double mean = 1.0;
};

struct GrowthMode {
    GrowthLaw law = GrowthLaw::EdenUniform;
    PassageLaw passage;

    static GrowthMode eden() { return {}; }
    static GrowthMode site_fpp(double mean = 1.0) {
        return {GrowthLaw::SiteFpp, {PassageLaw::Kind::Exponential, mean}};
    }
    static GrowthMode bond_fpp(double mean = 1.0) {
        return {GrowthLaw::BondFpp, {PassageLaw::Kind::Exponential, mean}};
    }
    std::string name() const;
    static GrowthMode parse(const std::string& name, double mean);
};

enum class HoleEventKind : std::uint8_t { None, Birth, Split, Death };
const char* hole_event_name(HoleEventKind k);

/// One step of the trajectory log: the tile added at step t plus whatever
/// topology deltas the registered hooks attached.
struct GrowthEvent {
    std::int64_t step = 0;
    CellKey tile = kNoCell;
    double fpp_time = 0.0;
    bool has_fpp_time = false;
    // dbeta[i-1] = change of beta_i at this step, valid when bit (i-1) of
    // dbeta_mask is set (hooks fill what they track).
    std::array<std::int16_t, kMaxDim - 1> dbeta{};
    std::uint8_t dbeta_mask = 0;
    HoleEventKind hole_event = HoleEventKind::None;

    void set_dbeta(int i, int delta) {
        dbeta[static_cast<std::size_t>(i - 1)] = static_cast<std::int16_t>(delta);
        dbeta_mask |= static_cast<std::uint8_t>(1u << (i - 1));
    }
    bool has_dbeta(int i) const { return (dbeta_mask >> (i - 1)) & 1; }
    int get_dbeta(int i) const { return dbeta[static_cast<std::size_t>(i - 1)]; }
};

/// Deterministic replayable record of one run.
struct Trajectory {
    int d = 0;
    std::uint64_t seed = 0;
    GrowthMode mode;
    std::int64_t t_max = 0;
    std::vector<GrowthEvent> events;                       // steps 2..t_max
    std::vector<std::pair<std::int64_t, Polyomino>> snapshots;
    std::optional<GrowthState> final_state;

    /// (cell, birth step) for every occupied cube, origin included.
    std::vector<std::pair<CellKey, std::int64_t>> cubes() const;
    /// Folds events through add_tile from the origin cell.
    GrowthState replay() const;
};

using GrowthHook = std::function<void(const GrowthState&, GrowthEvent&)>;

/// Uniform draw from the perimeter without mutating the state.
CellKey sample_next(const GrowthState& state, SplitMix64& rng);

/// One Eden step: uniform perimeter cell, then add_tile.
CellKey eden_step(GrowthState& state, SplitMix64& rng);

/// Lazily assigned exponential clocks for the FPP formulations.  Site mode
/// gives every perimeter cell one clock on entry; bond mode adds one clock
/// per exposed face, which weights a cell by its number of occupied
/// neighbors.  Memorylessness makes lazy assignment exact.
class FppClocks {
public:
    explicit FppClocks(GrowthMode mode) : mode_(mode) {}

    /// Assign clocks to every current perimeter cell (fresh start).
    void prime(const GrowthState& state, SplitMix64& rng);
    /// Assign clocks exposed by the addition of c (call after add_tile).
    void on_added(const GrowthState& state, CellKey c, SplitMix64& rng);

    double now() const { return now_; }
    bool empty() const { return heap_.empty(); }

    friend std::pair<CellKey, double> fpp_step(GrowthState& state, FppClocks& clocks,
                                               SplitMix64& rng);

private:
    struct Entry {
        double time;
        CellKey cell;
        bool operator>(const Entry& o) const {
            return time != o.time ? time > o.time : cell > o.cell;
        }
    };
    void push(CellKey cell, SplitMix64& rng) {
        heap_.push({now_ + rng.exponential(mode_.passage.mean), cell});
    }

    GrowthMode mode_;
    double now_ = 0.0;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap_;
};

/// Pops the minimal pending clock (skipping stale entries) and adds that
/// cell; returns the cell with its absolute FPP time.
std::pair<CellKey, double> fpp_step(GrowthState& state, FppClocks& clocks, SplitMix64& rng);

struct SimulateOptions {
    bool record_events = true;
    std::int64_t snapshot_every = 0;  // 0 = keep no in-memory snapshots
    bool keep_final_state = true;
};

/// Runs t_max - 1 steps from the single origin cell.  Hooks run
/// synchronously in registration order after every addition and may attach
/// topology deltas to the event.  Deterministic in (d, t_max, seed, mode).
Trajectory simulate(int d, std::int64_t t_max, std::uint64_t seed, GrowthMode mode,
                    const std::vector<GrowthHook>& hooks = {},
                    const SimulateOptions& options = {});

/// Uniformly removes boundary cells from a finite region, detecting
/// split/death events of the remaining components; the exact machinery the
/// shrinking ("reverse") process needs, driven cell by cell so tests can
/// force removal orders.
class ReverseProcess {
public:
    explicit ReverseProcess(const Polyomino& region);

    bool done() const { return boundary_.empty(); }
    std::int64_t remaining() const { return static_cast<std::int64_t>(remaining_.size()); }
    const IndexedCellSet& removable() const { return boundary_; }

    /// Removes one uniformly chosen removable cell.
    GrowthEvent remove_random(SplitMix64& rng);
    /// Removes a specific removable cell.
    GrowthEvent remove(CellKey cell);

    /// Number of connected components of the remaining region.
    std::int64_t component_count() const { return components_; }

private:
    int d_;
    FlatSet64 remaining_;
    IndexedCellSet boundary_;  // remaining cells face-adjacent to the complement
    std::int64_t components_;
    std::int64_t step_ = 0;
    struct ProbeHolder;
    std::shared_ptr<ProbeHolder> probe_;
};

/// Shrinks `hole` to nothing by uniform boundary removal; the returned
/// trajectory records one event per removal with split/death annotations in
/// `hole_event` and the component-count delta in the top dbeta slot.
Trajectory reverse_process(const Polyomino& hole, std::uint64_t seed);

// Event log CSV: step,cell,db1,...,db{d-1},hole_event with cell encoded as
// x1;x2;...;xd and empty dbeta columns when untracked.
void write_event_csv_header(std::ostream& os, int d);
void write_event_csv_row(std::ostream& os, int d, const GrowthEvent& e);
void write_event_csv(std::ostream& os, const Trajectory& traj);
void write_event_csv_file(const std::string& path, const Trajectory& traj);

}  // namespace eden
