#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eden/growth.hpp"

namespace eden {

/// Configuration of a batch of simulation runs (one output subdirectory per
/// seed).  Everything an output depends on lives here; the manifest echoes
/// it so a run directory can be re-derived byte for byte.
struct RunConfig {
    int d = 2;
    std::int64_t t_max = 1000;
    std::vector<std::uint64_t> seeds = {1};
    GrowthMode mode = GrowthMode::eden();
    std::int64_t series_every = 1000;
    std::int64_t snapshot_every = 0;  // cubical snapshot exports
    bool track_holes = true;
    bool full_ph = false;
    std::int64_t ph_budget = 250000;
    bool check_duality = false;
    bool stats_outputs = true;
    bool export_final = false;
    std::string census_pattern_file;
    std::int64_t census_every = 0;
    bool census_rotations = false;
    std::string out_dir;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

/// Runs every seed (worker pool, one pipeline per seed), writing
/// out_dir/seed_<S>/... and finally out_dir/manifest.json.
void run_simulation(const RunConfig& cfg);

std::string manifest_json(const RunConfig& cfg);
RunConfig config_from_manifest_file(const std::string& path);

}  // namespace eden
