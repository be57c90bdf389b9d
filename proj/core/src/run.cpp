#include "eden/run.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <thread>

#include <json.hpp>

#include "eden/census.hpp"
#include "eden/errors.hpp"
#include "eden/holetrack.hpp"
#include "eden/homology.hpp"
#include "eden/stats.hpp"
#include "eden/version.hpp"

namespace eden {

namespace fs = std::filesystem;

void RunConfig::validate() const {
    check_dim(d);
    if (t_max < 1) throw ConfigError("steps must be >= 1");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (series_every < 1) throw ConfigError("series interval must be >= 1");
    if (snapshot_every < 0 || census_every < 0) throw ConfigError("intervals must be >= 0");
    if (out_dir.empty()) throw ConfigError("output directory is required");
    if (full_ph && t_max > ph_budget)
        throw BudgetError("full persistence reduction needs steps <= budget (" +
                          std::to_string(ph_budget) + "); raise --ph-budget explicitly");
    if (census_every > 0 && census_pattern_file.empty())
        throw ConfigError("census interval set but no pattern file given");
}

std::string manifest_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["rng"] = {{"name", kRngName}, {"version", kRngVersion}};
    j["config"]["d"] = cfg.d;
    j["config"]["t_max"] = cfg.t_max;
    j["config"]["seeds"] = cfg.seeds;
    j["config"]["mode"] = cfg.mode.name();
    j["config"]["passage_mean"] = cfg.mode.passage.mean;
    j["config"]["series_every"] = cfg.series_every;
    j["config"]["snapshot_every"] = cfg.snapshot_every;
    j["config"]["track_holes"] = cfg.track_holes;
    j["config"]["full_ph"] = cfg.full_ph;
    j["config"]["ph_budget"] = cfg.ph_budget;
    j["config"]["check_duality"] = cfg.check_duality;
    j["config"]["stats_outputs"] = cfg.stats_outputs;
    j["config"]["export_final"] = cfg.export_final;
    j["config"]["census_pattern_file"] = cfg.census_pattern_file;
    j["config"]["census_every"] = cfg.census_every;
    j["config"]["census_rotations"] = cfg.census_rotations;
    return j.dump(2) + "\n";
}

RunConfig config_from_manifest_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw IoError("bad manifest json: " + std::string(e.what()));
    }
    RunConfig cfg;
    const auto& c = j.at("config");
    cfg.d = c.at("d").get<int>();
    cfg.t_max = c.at("t_max").get<std::int64_t>();
    cfg.seeds = c.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.mode = GrowthMode::parse(c.at("mode").get<std::string>(),
                                 c.at("passage_mean").get<double>());
    cfg.series_every = c.at("series_every").get<std::int64_t>();
    cfg.snapshot_every = c.at("snapshot_every").get<std::int64_t>();
    cfg.track_holes = c.at("track_holes").get<bool>();
    cfg.full_ph = c.at("full_ph").get<bool>();
    cfg.ph_budget = c.at("ph_budget").get<std::int64_t>();
    cfg.check_duality = c.at("check_duality").get<bool>();
    cfg.stats_outputs = c.at("stats_outputs").get<bool>();
    cfg.export_final = c.at("export_final").get<bool>();
    cfg.census_pattern_file = c.at("census_pattern_file").get<std::string>();
    cfg.census_every = c.at("census_every").get<std::int64_t>();
    cfg.census_rotations = c.at("census_rotations").get<bool>();
    return cfg;
}

namespace {

void run_one_seed(const RunConfig& cfg, std::uint64_t seed, const LocalPattern* pattern) {
    const fs::path dir = fs::path(cfg.out_dir) / ("seed_" + std::to_string(seed));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create run directory: " + dir.string());

    std::ofstream events(dir / "events.csv", std::ios::binary);
    if (!events) throw IoError("cannot open for writing: " + (dir / "events.csv").string());
    write_event_csv_header(events, cfg.d);

    GrowthState bootstrap(cfg.d);
    HoleTracker::Options topt;
    auto tracker = cfg.track_holes ? std::make_unique<HoleTracker>(bootstrap, topt) : nullptr;

    std::vector<SeriesRow> series;
    std::ofstream census_csv;
    if (pattern) {
        census_csv.open(dir / "census.csv", std::ios::binary);
        census_csv << "t,count\n";
    }

    auto series_point = [&](const GrowthState& state) {
        SeriesRow row;
        row.t = state.step();
        row.P = static_cast<std::int64_t>(state.perimeter().size());
        if (tracker) {
            row.OutP = tracker->outer_perimeter();
            row.InnP = tracker->inner_perimeter();
            row.set_beta(cfg.d - 1, tracker->hole_count());
        } else {
            row.OutP = row.InnP = 0;
        }
        series.push_back(row);
    };

    std::vector<GrowthHook> hooks;
    if (tracker) hooks.push_back(tracker->hook());
    hooks.push_back([&](const GrowthState& state, GrowthEvent& e) {
        write_event_csv_row(events, cfg.d, e);
        if (state.step() % cfg.series_every == 0 || state.step() == cfg.t_max)
            series_point(state);
        if (pattern && cfg.census_every > 0 &&
            (state.step() % cfg.census_every == 0 || state.step() == cfg.t_max)) {
            census_csv << state.step() << ","
                       << pattern_census(state.occupied(), *pattern, cfg.census_rotations)
                       << "\n";
        }
    });

    SimulateOptions sopt;
    sopt.record_events = cfg.snapshot_every > 0 || cfg.full_ph;
    sopt.keep_final_state = true;
    Trajectory traj = simulate(cfg.d, cfg.t_max, seed, cfg.mode, hooks, sopt);
    const GrowthState& final_state = *traj.final_state;
    if (!events) throw IoError("event log write failed");
    events.close();

    if (cfg.t_max == 1) series_point(final_state);

    if (cfg.snapshot_every > 0) {
        const auto cubes = traj.cubes();
        for (std::int64_t t = cfg.snapshot_every; t <= cfg.t_max; t += cfg.snapshot_every) {
            std::vector<std::pair<CellKey, std::int64_t>> upto(
                cubes.begin(), cubes.begin() + static_cast<std::ptrdiff_t>(t));
            write_cubical_snapshot_file((dir / ("cubical_" + std::to_string(t) + ".txt")).string(),
                                        cfg.d, t, upto);
        }
    }

    std::vector<PersistenceInterval> barcode;
    if (cfg.full_ph) {
        const FilteredComplex fc = build_filtration(cfg.d, traj.cubes());
        barcode = persistence(fc);
        write_barcode_csv_file((dir / "barcode.csv").string(), barcode);
        // Fill the reduction-backed beta columns at every checkpoint.
        for (int i = 1; i <= cfg.d - 1; ++i) {
            const auto series_i = betti_series_from_intervals(barcode, i, cfg.t_max);
            for (SeriesRow& row : series)
                row.set_beta(i, series_i[static_cast<std::size_t>(row.t)]);
        }
    }

    write_series_csv_file((dir / "series.csv").string(), cfg.d, series);

    if (tracker) {
        write_holes_csv_file((dir / "holes.csv").string(), tracker->records());
        write_splittree_json_file((dir / "splittree.json").string(), tracker->tree());
        const auto live = tracker->live_holes();
        write_live_holes_csv_file((dir / "live_holes.csv").string(), live, cfg.d);

        if (cfg.stats_outputs) {
            std::vector<std::pair<std::string, AreaTable>> areas;
            areas.emplace_back("birth", hole_area_distribution_birth(tracker->records()));
            std::vector<std::int64_t> live_volumes;
            for (const auto& hole : live) live_volumes.push_back(hole.volume);
            areas.emplace_back("snapshot", area_table_from_volumes(live_volumes));
            write_areas_csv_file((dir / "areas.csv").string(), areas);

            std::vector<ShapeSection> shape_sections;
            const auto births = birth_shapes(tracker->records());
            std::vector<std::pair<std::int64_t, std::string>> live_shapes;
            for (const auto& hole : live)
                live_shapes.emplace_back(hole.volume,
                                         cfg.d <= 5 ? canonical_free(hole.cells, cfg.d)
                                                    : std::string());
            for (std::int64_t area : {3, 4}) {
                shape_sections.push_back({"birth", area, shape_distribution(births, area)});
                shape_sections.push_back(
                    {"snapshot", area, shape_distribution(live_shapes, area)});
            }
            write_shapes_csv_file((dir / "shapes.csv").string(), shape_sections);
        }

        // Largest hole at birth, exported as a polyomino for cast rendering.
        const LargestHole largest = largest_hole(tracker->records(), live);
        if (largest.max_birth_id >= 0) {
            const HoleRecord& rec = tracker->records()[static_cast<std::size_t>(
                largest.max_birth_id)];
            if (!rec.cells_at_birth.empty()) {
                Polyomino hole_poly(cfg.d);
                for (CellKey k : rec.cells_at_birth) hole_poly.insert(k);
                write_polyomino_file((dir / "largest_hole.poly").string(), hole_poly);
            }
        }

        if (cfg.check_duality) {
            const auto b = betti(final_state.occupied());
            if (b[static_cast<std::size_t>(cfg.d - 1)] != tracker->hole_count())
                throw InternalError("duality check failed: tracker count " +
                                    std::to_string(tracker->hole_count()) + " vs betti " +
                                    std::to_string(b[static_cast<std::size_t>(cfg.d - 1)]));
        }
    }

    if (cfg.full_ph && cfg.stats_outputs) {
        std::vector<std::pair<int, NormalizedPersistence>> hists;
        const std::int64_t b_min = std::max<std::int64_t>(1, cfg.t_max / 2);
        for (int i = 1; i <= cfg.d - 1; ++i)
            hists.emplace_back(
                i, normalized_persistence(barcode, i, b_min, cfg.t_max, cfg.d));
        write_normpers_csv_file((dir / "normpers.csv").string(), hists);
    }

    if (cfg.export_final)
        write_polyomino_file((dir / "final.poly").string(), final_state.occupied());
}

}  // namespace

void run_simulation(const RunConfig& cfg) {
    cfg.validate();
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + cfg.out_dir);

    LocalPattern pattern;
    const bool have_pattern = !cfg.census_pattern_file.empty();
    if (have_pattern) pattern = read_pattern_file(cfg.census_pattern_file);

    int workers = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(cfg.seeds.size())));

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cfg.seeds.size()) break;
                    run_one_seed(cfg, cfg.seeds[i], have_pattern ? &pattern : nullptr);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    // Manifest last: its presence marks a complete run.
    std::ofstream manifest(fs::path(cfg.out_dir) / "manifest.json", std::ios::binary);
    if (!manifest) throw IoError("cannot write manifest");
    manifest << manifest_json(cfg);
}

}  // namespace eden
