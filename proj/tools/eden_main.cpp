// Command-line front end: simulation batches, the exact homology oracle,
// local-pattern censuses, jump-configuration certification, statistics over
// finished runs, and file exports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eden/census.hpp"
#include "eden/errors.hpp"
#include "eden/holetrack.hpp"
#include "eden/homology.hpp"
#include "eden/run.hpp"
#include "eden/stats.hpp"
#include "eden/version.hpp"

namespace {

// Exit codes: 0 ok, 2 config/usage, 3 io, 4 budget, 5 internal invariant.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitBudget = 4;
constexpr int kExitInternal = 5;

namespace fs = std::filesystem;
using namespace eden;

std::string default_out_dir() {
    const char* env = std::getenv("EDEN_OUT_DIR");
    return env ? env : "runs";
}

void cmd_simulate(CLI::App& app) {
    auto* cmd = app.add_subcommand("simulate", "Run growth simulations");
    auto cfg = std::make_shared<RunConfig>();
    auto seed = std::make_shared<std::uint64_t>(1);
    auto nseeds = std::make_shared<int>(1);
    auto mode_name = std::make_shared<std::string>("eden");
    auto mean = std::make_shared<double>(1.0);
    auto manifest_path = std::make_shared<std::string>();
    cfg->out_dir = default_out_dir();

    cmd->add_option("--dim", cfg->d, "lattice dimension (2..8)");
    cmd->add_option("--steps", cfg->t_max, "number of tiles to grow");
    cmd->add_option("--seed", *seed, "first seed");
    cmd->add_option("--seeds", *nseeds, "number of consecutive seeds");
    cmd->add_option("--mode", *mode_name, "eden | site-fpp | bond-fpp");
    cmd->add_option("--mean", *mean, "passage-time mean for FPP modes");
    cmd->add_option("--series-every", cfg->series_every, "series checkpoint interval");
    cmd->add_option("--snapshot-every", cfg->snapshot_every, "cubical snapshot interval");
    cmd->add_flag("--no-holes", "disable hole tracking");
    cmd->add_flag("--full-ph", cfg->full_ph, "compute the full persistence barcode");
    cmd->add_option("--ph-budget", cfg->ph_budget, "max steps allowed with --full-ph");
    cmd->add_flag("--check-duality", cfg->check_duality,
                  "verify tracker hole count against the homology oracle at the end");
    cmd->add_flag("--export-final", cfg->export_final, "write the final polyomino");
    cmd->add_option("--census-pattern", cfg->census_pattern_file, "pattern file to census");
    cmd->add_option("--census-every", cfg->census_every, "census checkpoint interval");
    cmd->add_flag("--census-rotations", cfg->census_rotations, "census up to rotations");
    cmd->add_option("--out", cfg->out_dir, "output directory");
    cmd->add_option("--threads", cfg->threads, "worker threads (0 = hardware)");
    cmd->add_option("--manifest", *manifest_path,
                    "load the configuration from an existing manifest");

    cmd->callback([cmd, cfg, seed, nseeds, mode_name, mean, manifest_path]() {
        RunConfig run;
        if (!manifest_path->empty()) {
            run = config_from_manifest_file(*manifest_path);
            // --out still applies so a rerun can go to a fresh directory.
            run.out_dir = cfg->out_dir;
        } else {
            run = *cfg;
            run.mode = GrowthMode::parse(*mode_name, *mean);
            run.track_holes = cmd->count("--no-holes") == 0;
            if (*nseeds < 1) throw ConfigError("--seeds must be >= 1");
            run.seeds.clear();
            for (int i = 0; i < *nseeds; ++i) run.seeds.push_back(*seed + static_cast<std::uint64_t>(i));
        }
        run_simulation(run);
        std::cout << "wrote " << run.seeds.size() << " run(s) under " << run.out_dir << "\n";
    });
}

void cmd_oracle(CLI::App& app) {
    auto* cmd = app.add_subcommand("oracle", "Betti numbers of a polyomino file");
    auto path = std::make_shared<std::string>();
    cmd->add_option("file", *path, "polyomino text file")->required();
    cmd->callback([path]() {
        const Polyomino p = read_polyomino_file(*path);
        const auto b = betti(p);
        for (std::size_t i = 0; i < b.size(); ++i) std::cout << (i ? " " : "") << b[i];
        std::cout << "\n";
    });
}

void cmd_census(CLI::App& app) {
    auto* cmd = app.add_subcommand("census", "Count pattern occurrences in a state");
    auto poly_path = std::make_shared<std::string>();
    auto pattern_path = std::make_shared<std::string>();
    auto rotations = std::make_shared<bool>(false);
    cmd->add_option("--poly", *poly_path, "polyomino state file")->required();
    cmd->add_option("--pattern", *pattern_path, "pattern file")->required();
    cmd->add_flag("--rotations", *rotations, "match up to rotations/reflections");
    cmd->callback([poly_path, pattern_path, rotations]() {
        const Polyomino state = read_polyomino_file(*poly_path);
        const LocalPattern pattern = read_pattern_file(*pattern_path);
        std::cout << pattern_census(state, pattern, *rotations) << "\n";
    });
}

void cmd_jumpcfg(CLI::App& app) {
    auto* cmd = app.add_subcommand("jumpcfg", "Build a certified Betti-jump configuration");
    auto d = std::make_shared<int>(2);
    auto i = std::make_shared<int>(1);
    auto k = std::make_shared<int>(1);
    auto part = std::make_shared<std::string>("a");
    auto out = std::make_shared<std::string>();
    cmd->add_option("--dim", *d, "dimension")->required();
    cmd->add_option("--i", *i, "homology dimension (part a)");
    cmd->add_option("--k", *k, "jump parameter")->required();
    cmd->add_option("--part", *part, "a | b")->required();
    cmd->add_option("--out", *out, "write the configuration as a polyomino file");
    cmd->callback([d, i, k, part, out]() {
        if (*part != "a" && *part != "b") throw ConfigError("--part must be a or b");
        const JumpPart p = *part == "a" ? JumpPart::A : JumpPart::B;
        const JumpConfig cfg = jump_config(*d, p == JumpPart::A ? *i : 1, *k, p);
        std::cout << "tiles " << cfg.tiles.size() << ", center "
                  << cell_to_string(cfg.center, ';') << "\n";
        std::cout << "betti before:";
        for (auto b : cfg.betti_before) std::cout << " " << b;
        std::cout << "\nbetti after: ";
        for (auto b : cfg.betti_after) std::cout << " " << b;
        std::cout << "\ncertified delta:";
        for (auto delta : cfg.claimed_delta) std::cout << " " << delta;
        std::cout << "\n";
        if (!out->empty()) write_polyomino_file(*out, cfg.tiles);
    });
}

void cmd_stats(CLI::App& app) {
    auto* cmd = app.add_subcommand("stats", "Statistics over a finished run directory");

    auto* fit = cmd->add_subcommand("fit", "Power-law fit of a series column");
    auto run_dir = std::make_shared<std::string>();
    auto series_name = std::make_shared<std::string>("beta_1");
    auto tmin = std::make_shared<std::int64_t>(10000);
    auto tmax = std::make_shared<std::int64_t>(0);
    fit->add_option("--run", *run_dir, "per-seed run directory")->required();
    fit->add_option("--series", *series_name, "column: P | OutP | InnP | beta_i");
    fit->add_option("--tmin", *tmin, "fit window start");
    fit->add_option("--tmax", *tmax, "fit window end (0 = last checkpoint)");
    fit->callback([run_dir, series_name, tmin, tmax]() {
        int d = 0;
        const auto rows = read_series_csv_file((fs::path(*run_dir) / "series.csv").string(), d);
        const TimeSeries s = series_column(rows, *series_name);
        const std::int64_t hi = *tmax > 0 ? *tmax : (s.t.empty() ? 0 : s.t.back());
        const PowerLawFit f = fit_power_law(s, *tmin, hi);
        std::cout << *series_name << ": exponent " << format_double(f.exponent)
                  << ", coefficient " << format_double(f.coefficient) << ", residual "
                  << format_double(f.residual) << "\n";
        write_fits_csv_file((fs::path(*run_dir) / "fits.csv").string(), {{*series_name, f}});
    });

    auto* areas = cmd->add_subcommand("areas", "Hole area distribution");
    auto areas_run = std::make_shared<std::string>();
    auto at_end = std::make_shared<bool>(false);
    areas->add_option("--run", *areas_run, "per-seed run directory")->required();
    areas->add_flag("--at-end", *at_end, "snapshot at the final step instead of over all time");
    areas->callback([areas_run, at_end]() {
        AreaTable table;
        if (*at_end) {
            const auto live =
                read_live_holes_csv_file((fs::path(*areas_run) / "live_holes.csv").string());
            std::vector<std::int64_t> volumes;
            for (const auto& row : live) volumes.push_back(row.volume);
            table = area_table_from_volumes(volumes);
        } else {
            const auto holes =
                read_holes_csv_file((fs::path(*areas_run) / "holes.csv").string());
            table = hole_area_distribution_birth(holes);
        }
        for (int slot = 0; slot < 6; ++slot)
            std::cout << (slot < 5 ? std::to_string(slot + 1) : std::string("6+")) << ": "
                      << format_double(table.frequency(slot)) << "\n";
    });

    auto* shapes = cmd->add_subcommand("shapes", "Hole shape distribution for one area");
    auto shapes_run = std::make_shared<std::string>();
    auto shapes_area = std::make_shared<std::int64_t>(4);
    auto shapes_at_end = std::make_shared<bool>(false);
    shapes->add_option("--run", *shapes_run, "per-seed run directory")->required();
    shapes->add_option("--area", *shapes_area, "hole area");
    shapes->add_flag("--at-end", *shapes_at_end, "snapshot at the final step");
    shapes->callback([shapes_run, shapes_area, shapes_at_end]() {
        std::vector<std::pair<std::int64_t, std::string>> input;
        if (*shapes_at_end) {
            for (const auto& row : read_live_holes_csv_file(
                     (fs::path(*shapes_run) / "live_holes.csv").string()))
                input.emplace_back(row.volume, row.shape_free);
        } else {
            for (const auto& rec :
                 read_holes_csv_file((fs::path(*shapes_run) / "holes.csv").string()))
                input.emplace_back(rec.volume_at_birth, rec.shape_free);
        }
        for (const ShapeRow& row : shape_distribution(input, *shapes_area))
            std::cout << row.shape_free << ": " << format_double(row.frequency) << " (count "
                      << row.count << ", fixed types " << row.fixed_types << ", F/R "
                      << format_double(row.freq_per_fixed) << ")\n";
    });

    auto* normpers = cmd->add_subcommand("normpers", "Normalized persistence histogram");
    auto np_run = std::make_shared<std::string>();
    auto np_hdim = std::make_shared<int>(1);
    auto np_bmin = std::make_shared<std::int64_t>(1);
    auto np_bmax = std::make_shared<std::int64_t>(0);
    normpers->add_option("--run", *np_run, "per-seed run directory (needs barcode.csv)")
        ->required();
    normpers->add_option("--hdim", *np_hdim, "homology dimension");
    normpers->add_option("--bmin", *np_bmin, "birth window start");
    normpers->add_option("--bmax", *np_bmax, "birth window end (0 = max birth)");
    normpers->callback([np_run, np_hdim, np_bmin, np_bmax]() {
        int d = 0;
        const auto rows = read_series_csv_file((fs::path(*np_run) / "series.csv").string(), d);
        (void)rows;
        const auto intervals =
            read_barcode_csv_file((fs::path(*np_run) / "barcode.csv").string());
        std::int64_t bmax = *np_bmax;
        if (bmax == 0)
            for (const auto& iv : intervals) bmax = std::max(bmax, iv.birth);
        const auto h = normalized_persistence(intervals, *np_hdim, *np_bmin, bmax, d);
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            std::cout << format_double(static_cast<double>(b) * h.bin_width) << " "
                      << h.counts[b] << "\n";
        std::cout << "closed " << h.total_closed << ", open excluded " << h.excluded_open
                  << "\n";
    });

    cmd->require_subcommand(1);
}

void cmd_export(CLI::App& app) {
    auto* cmd = app.add_subcommand("export", "File exports from runs and polyominoes");

    auto* cubical = cmd->add_subcommand("cubical", "Cubical snapshot of a run at a step");
    auto run_dir = std::make_shared<std::string>();
    auto at = std::make_shared<std::int64_t>(0);
    auto out = std::make_shared<std::string>();
    cubical->add_option("--run", *run_dir, "per-seed run directory")->required();
    cubical->add_option("--at", *at, "step")->required();
    cubical->add_option("--out", *out, "output file")->required();
    cubical->callback([run_dir, at, out]() {
        // Rebuild the state by replaying the event log.
        const fs::path events_path = fs::path(*run_dir) / "events.csv";
        std::ifstream is(events_path, std::ios::binary);
        if (!is) throw IoError("cannot open: " + events_path.string());
        std::string line;
        if (!std::getline(is, line)) throw IoError("empty event log");
        int d = 2;
        {
            // header: step,cell,db1..db{d-1},hole_event -> 3 + (d-1) columns
            int commas = 0;
            for (char ch : line) commas += ch == ',';
            d = commas - 1;
        }
        std::vector<std::pair<CellKey, std::int64_t>> cubes;
        CellCoord origin;
        origin.d = d;
        cubes.emplace_back(pack_cell(origin), 1);
        long lineno = 1;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos)
                throw ParseError(events_path.string(), lineno, "bad event row");
            const std::int64_t step = std::stoll(line.substr(0, c1));
            if (step > *at) break;
            CellCoord c;
            c.d = d;
            std::istringstream cs(line.substr(c1 + 1, c2 - c1 - 1));
            std::string tok;
            int a = 0;
            while (std::getline(cs, tok, ';')) c.x[a++] = std::stoi(tok);
            if (a != d) throw ParseError(events_path.string(), lineno, "bad cell field");
            cubes.emplace_back(pack_cell(c), step);
        }
        if (static_cast<std::int64_t>(cubes.size()) != *at)
            throw ConfigError("run has fewer than " + std::to_string(*at) + " steps");
        write_cubical_snapshot_file(*out, d, *at, cubes);
        std::cout << "wrote " << *out << "\n";
    });

    auto* cast = cmd->add_subcommand("cast", "OBJ mesh of a 3D cell-set file");
    auto poly_path = std::make_shared<std::string>();
    auto cast_out = std::make_shared<std::string>();
    cast->add_option("--poly", *poly_path, "polyomino file (d=3)")->required();
    cast->add_option("--out", *cast_out, "output OBJ file")->required();
    cast->callback([poly_path, cast_out]() {
        const Polyomino p = read_polyomino_file(*poly_path);
        write_hole_cast_obj_file(*cast_out, p.cells(), p.dim());
        std::cout << "wrote " << *cast_out << "\n";
    });

    cmd->require_subcommand(1);
}

void cmd_reverse(CLI::App& app) {
    auto* cmd = app.add_subcommand("reverse", "Shrink a hole by the reverse process");
    auto poly_path = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(1);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--poly", *poly_path, "hole polyomino file")->required();
    cmd->add_option("--seed", *seed, "seed");
    cmd->add_option("--out", *out, "event CSV output");
    cmd->callback([poly_path, seed, out]() {
        const Polyomino hole = read_polyomino_file(*poly_path);
        const Trajectory traj = reverse_process(hole, *seed);
        std::int64_t splits = 0, deaths = 0;
        for (const auto& e : traj.events) {
            splits += e.hole_event == HoleEventKind::Split;
            deaths += e.hole_event == HoleEventKind::Death;
        }
        std::cout << "removals " << traj.events.size() << ", splits " << splits << ", deaths "
                  << deaths << "\n";
        if (!out->empty()) write_event_csv_file(*out, traj);
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eden growth model simulator with topology tracking"};
    app.set_version_flag("--version", EDEN_VERSION);
    app.require_subcommand(1);

    cmd_simulate(app);
    cmd_oracle(app);
    cmd_census(app);
    cmd_jumpcfg(app);
    cmd_stats(app);
    cmd_export(app);
    cmd_reverse(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
