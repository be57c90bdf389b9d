#include "eden/growth.hpp"

#include <fstream>
#include <memory>

#include "eden/errors.hpp"
#include "eden/split_probe.hpp"

namespace eden {

std::string GrowthMode::name() const {
    switch (law) {
        case GrowthLaw::EdenUniform: return "eden";
        case GrowthLaw::SiteFpp: return "site-fpp";
        case GrowthLaw::BondFpp: return "bond-fpp";
    }
    return "?";
}

GrowthMode GrowthMode::parse(const std::string& name, double mean) {
    if (mean <= 0) throw ConfigError("passage-time mean must be positive");
    if (name == "eden") return eden();
    if (name == "site-fpp") return site_fpp(mean);
    if (name == "bond-fpp") return bond_fpp(mean);
    throw ConfigError("unknown growth mode: " + name);
}

const char* hole_event_name(HoleEventKind k) {
    switch (k) {
        case HoleEventKind::None: return "none";
        case HoleEventKind::Birth: return "birth";
        case HoleEventKind::Split: return "split";
        case HoleEventKind::Death: return "death";
    }
    return "?";
}

std::vector<std::pair<CellKey, std::int64_t>> Trajectory::cubes() const {
    std::vector<std::pair<CellKey, std::int64_t>> out;
    out.reserve(events.size() + 1);
    CellCoord origin;
    origin.d = d;
    out.emplace_back(pack_cell(origin), 1);
    for (const GrowthEvent& e : events) out.emplace_back(e.tile, e.step);
    return out;
}

GrowthState Trajectory::replay() const {
    GrowthState state(d);
    for (const GrowthEvent& e : events) state.add_tile(e.tile);
    return state;
}

CellKey sample_next(const GrowthState& state, SplitMix64& rng) {
    if (state.perimeter().empty()) throw InternalError("empty perimeter");
    return state.perimeter().sample(rng);
}

CellKey eden_step(GrowthState& state, SplitMix64& rng) {
    const CellKey c = sample_next(state, rng);
    state.add_tile(c);
    return c;
}

void FppClocks::prime(const GrowthState& state, SplitMix64& rng) {
    now_ = 0.0;
    while (!heap_.empty()) heap_.pop();
    CellKey nbrs[2 * kMaxDim];
    const int d = state.dim();
    for (CellKey cell : state.perimeter().cells()) {
        if (mode_.law == GrowthLaw::SiteFpp) {
            push(cell, rng);
        } else {
            face_neighbor_keys(cell, d, nbrs);
            for (int i = 0; i < 2 * d; ++i)
                if (state.occupied().contains(nbrs[i])) push(cell, rng);
        }
    }
}

void FppClocks::on_added(const GrowthState& state, CellKey c, SplitMix64& rng) {
    if (mode_.law == GrowthLaw::SiteFpp) {
        for (CellKey cell : state.last_new_perimeter()) push(cell, rng);
    } else {
        // Bond mode: every face newly exposed by c carries a fresh clock,
        // including extra clocks for cells already in the perimeter.
        CellKey nbrs[2 * kMaxDim];
        const int d = state.dim();
        face_neighbor_keys(c, d, nbrs);
        for (int i = 0; i < 2 * d; ++i)
            if (!state.occupied().contains(nbrs[i])) push(nbrs[i], rng);
    }
}

std::pair<CellKey, double> fpp_step(GrowthState& state, FppClocks& clocks, SplitMix64& rng) {
    if (state.perimeter().empty()) throw InternalError("empty perimeter");
    for (;;) {
        if (clocks.heap_.empty()) throw InternalError("FPP clock heap exhausted");
        const auto [time, cell] = clocks.heap_.top();
        clocks.heap_.pop();
        if (state.occupied().contains(cell)) continue;  // stale entry
        clocks.now_ = time;
        state.add_tile(cell);
        clocks.on_added(state, cell, rng);
        return {cell, time};
    }
}

Trajectory simulate(int d, std::int64_t t_max, std::uint64_t seed, GrowthMode mode,
                    const std::vector<GrowthHook>& hooks, const SimulateOptions& options) {
    check_dim(d);
    if (t_max < 1) throw ConfigError("t_max must be >= 1");

    Trajectory traj;
    traj.d = d;
    traj.seed = seed;
    traj.mode = mode;
    traj.t_max = t_max;

    GrowthState state(d);
    SplitMix64 rng(seed);
    FppClocks clocks(mode);
    const bool fpp = mode.law != GrowthLaw::EdenUniform;
    if (fpp) clocks.prime(state, rng);
    if (options.record_events) traj.events.reserve(static_cast<std::size_t>(t_max - 1));

    for (std::int64_t t = 2; t <= t_max; ++t) {
        GrowthEvent event;
        event.step = t;
        if (fpp) {
            const auto [cell, time] = fpp_step(state, clocks, rng);
            event.tile = cell;
            event.fpp_time = time;
            event.has_fpp_time = true;
        } else {
            event.tile = eden_step(state, rng);
        }
        for (const GrowthHook& hook : hooks) hook(state, event);
        if (options.record_events) traj.events.push_back(event);
        if (options.snapshot_every > 0 && t % options.snapshot_every == 0)
            traj.snapshots.emplace_back(t, state.occupied());
    }
    if (options.keep_final_state) traj.final_state.emplace(std::move(state));
    return traj;
}

struct ReverseProcess::ProbeHolder {
    SplitProbe probe;
};

ReverseProcess::ReverseProcess(const Polyomino& region)
    : d_(region.dim()), components_(0), probe_(std::make_shared<ProbeHolder>()) {
    if (region.empty()) throw ConfigError("reverse process needs a nonempty region");
    if (!region.is_face_connected())
        throw ConfigError("reverse process region must be face-connected");
    components_ = 1;
    CellKey nbrs[2 * kMaxDim];
    for (CellKey k : region.cells()) remaining_.insert(k);
    for (CellKey k : region.cells()) {
        face_neighbor_keys(k, d_, nbrs);
        for (int i = 0; i < 2 * d_; ++i) {
            if (!remaining_.contains(nbrs[i])) {
                boundary_.insert(k);
                break;
            }
        }
    }
}

GrowthEvent ReverseProcess::remove_random(SplitMix64& rng) {
    if (boundary_.empty()) throw InternalError("reverse process already finished");
    return remove(boundary_.sample(rng));
}

GrowthEvent ReverseProcess::remove(CellKey cell) {
    if (!boundary_.contains(cell))
        throw ConfigError("reverse process: cell is not removable");
    boundary_.erase(cell);
    remaining_.erase(cell);
    ++step_;

    GrowthEvent event;
    event.step = step_;
    event.tile = cell;

    CellKey nbrs[2 * kMaxDim];
    face_neighbor_keys(cell, d_, nbrs);
    CellKey sources[2 * kMaxDim];
    int nsrc = 0;
    for (int i = 0; i < 2 * d_; ++i) {
        if (remaining_.contains(nbrs[i])) {
            sources[nsrc++] = nbrs[i];
            boundary_.insert(nbrs[i]);  // now exposed to the complement
        }
    }

    int delta = 0;
    if (nsrc == 0) {
        event.hole_event = HoleEventKind::Death;
        --components_;
        delta = -1;
    } else {
        SplitProbeResult res = probe_->probe.run(
            d_, sources, nsrc, [&](CellKey n) { return remaining_.contains(n); },
            [](CellKey) { return false; });
        const int parts = static_cast<int>(res.fragments.size()) + res.survivors;
        if (parts > 1) {
            event.hole_event = HoleEventKind::Split;
            components_ += parts - 1;
            delta = parts - 1;
        }
    }
    event.set_dbeta(d_ - 1, delta);
    return event;
}

Trajectory reverse_process(const Polyomino& hole, std::uint64_t seed) {
    ReverseProcess proc(hole);
    SplitMix64 rng(seed);
    Trajectory traj;
    traj.d = hole.dim();
    traj.seed = seed;
    traj.t_max = static_cast<std::int64_t>(hole.size());
    traj.events.reserve(hole.size());
    while (!proc.done()) traj.events.push_back(proc.remove_random(rng));
    return traj;
}

void write_event_csv_header(std::ostream& os, int d) {
    os << "step,cell";
    for (int i = 1; i <= d - 1; ++i) os << ",db" << i;
    os << ",hole_event\n";
}

void write_event_csv_row(std::ostream& os, int d, const GrowthEvent& e) {
    os << e.step << "," << cell_to_string(unpack_cell(e.tile, d), ';');
    for (int i = 1; i <= d - 1; ++i) {
        os << ",";
        if (e.has_dbeta(i)) os << e.get_dbeta(i);
    }
    os << "," << hole_event_name(e.hole_event) << "\n";
}

void write_event_csv(std::ostream& os, const Trajectory& traj) {
    write_event_csv_header(os, traj.d);
    for (const GrowthEvent& e : traj.events) write_event_csv_row(os, traj.d, e);
}

void write_event_csv_file(const std::string& path, const Trajectory& traj) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_event_csv(os, traj);
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace eden
