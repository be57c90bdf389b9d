#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eden/errors.hpp"
#include "eden/holetrack.hpp"
#include "eden/stats.hpp"
#include "test_util.hpp"

using namespace eden;

TEST_CASE("power-law fit recovers exact power laws to 1e-9") {
    TimeSeries s;
    s.label = "synthetic";
    for (std::int64_t t = 10; t <= 10000; t += 37)
        s.push(t, 3.0 * std::pow(static_cast<double>(t), 0.5));
    const PowerLawFit fit = fit_power_law(s, 10, 10000);
    CHECK(std::abs(fit.exponent - 0.5) < 1e-9);
    CHECK(std::abs(fit.coefficient - 3.0) / 3.0 < 1e-9);
    CHECK(fit.residual < 1e-9);
}

TEST_CASE("power-law fit input validation") {
    TimeSeries s;
    for (std::int64_t t = 1; t <= 5; ++t) s.push(t, 1.0);
    CHECK_THROWS_AS(fit_power_law(s, 1, 5), ConfigError);  // too few points

    TimeSeries neg;
    for (std::int64_t t = 1; t <= 20; ++t) neg.push(t, t == 7 ? -1.0 : 1.0);
    CHECK_THROWS_AS(fit_power_law(neg, 1, 20), ConfigError);

    TimeSeries ok;
    CHECK_THROWS_AS(fit_power_law(ok, 5, 5), ConfigError);

    TimeSeries misordered;
    misordered.push(5, 1.0);
    CHECK_THROWS_AS(misordered.push(5, 2.0), ConfigError);
}

TEST_CASE("normalized persistence arithmetic and exclusions") {
    std::vector<PersistenceInterval> intervals;
    // (death - birth) / birth^{1/2} = 10*100^{1/2} / 100^{1/2} = 10 in d=2.
    intervals.push_back({1, 100, 100 + 10 * 10});
    intervals.push_back({1, 100, -1});  // open: excluded but counted
    intervals.push_back({0, 100, 120}); // other dimension: ignored
    intervals.push_back({1, 99999, 100000});  // outside the window

    const NormalizedPersistence h = normalized_persistence(intervals, 1, 50, 200, 2, 0.25);
    CHECK(h.total_closed == 1);
    CHECK(h.excluded_open == 1);
    REQUIRE(h.counts.size() == 41);  // value 10 lands in bin [10, 10.25)
    CHECK(h.counts[40] == 1);
    CHECK(h.quantile(0.5) == doctest::Approx(10.125));

    CHECK_THROWS_AS(normalized_persistence(intervals, 1, 0, 10, 2), ConfigError);
    CHECK_THROWS_AS(normalized_persistence(intervals, 1, 5, 10, 2, 0.0), ConfigError);
}

TEST_CASE("normalized persistence recomputes bit-exactly from a barcode file") {
    GrowthState bootstrap(2);
    HoleTracker tracker(bootstrap);
    const Trajectory traj = simulate(2, 5000, 3, GrowthMode::eden(), {tracker.hook()});
    (void)traj;
    const auto intervals = barcode_dminus1(tracker.tree(), 2);
    const NormalizedPersistence direct = normalized_persistence(intervals, 1, 100, 5000, 2);

    const std::string path = "/tmp/eden_test_barcode.csv";
    write_barcode_csv_file(path, intervals);
    const auto reread = read_barcode_csv_file(path);
    const NormalizedPersistence from_file = normalized_persistence(reread, 1, 100, 5000, 2);
    CHECK(direct.counts == from_file.counts);
    CHECK(direct.total_closed == from_file.total_closed);
    CHECK(direct.excluded_open == from_file.excluded_open);
}

TEST_CASE("area tables aggregate correctly and degenerate inputs are empty") {
    const AreaTable t = area_table_from_volumes({1, 1, 1, 2, 3, 6, 9, 40});
    CHECK(t.total == 8);
    CHECK(t.counts[0] == 3);
    CHECK(t.counts[1] == 1);
    CHECK(t.counts[2] == 1);
    CHECK(t.counts[5] == 3);
    CHECK(t.frequency(0) == doctest::Approx(0.375));
    double sum = 0;
    for (int s = 0; s < 6; ++s) sum += t.frequency(s);
    CHECK(sum == doctest::Approx(1.0));

    const AreaTable empty = area_table_from_volumes({});
    CHECK(empty.total == 0);
    CHECK(hole_area_distribution_birth({}).total == 0);
    CHECK_THROWS_AS(area_table_from_volumes({0}), ConfigError);
}

TEST_CASE("snapshot area distribution uses the volume history") {
    HoleRecord r;
    r.id = 0;
    r.birth = 10;
    r.death = 50;
    r.volume_at_birth = 4;
    r.volume_history = {{10, 4}, {30, 2}, {50, 0}};
    HoleRecord alive;
    alive.id = 1;
    alive.birth = 20;
    alive.volume_at_birth = 3;
    alive.volume_history = {{20, 3}};
    const std::vector<HoleRecord> holes = {r, alive};

    const AreaTable at25 = hole_area_distribution_at(holes, 25);
    CHECK(at25.total == 2);  // volumes 4 and 3
    CHECK(at25.counts[3] == 1);
    CHECK(at25.counts[2] == 1);

    const AreaTable at35 = hole_area_distribution_at(holes, 35);
    CHECK(at35.counts[1] == 1);  // r sampled at 30 with volume 2
    const AreaTable at60 = hole_area_distribution_at(holes, 60);
    CHECK(at60.total == 1);  // r is dead
}

TEST_CASE("shape distribution frequencies and fixed multiplicities") {
    const std::string ell = canonical_free(
        std::vector<CellCoord>{make_cell({0, 0}), make_cell({0, 1}), make_cell({1, 0})});
    const std::string line = canonical_free(
        std::vector<CellCoord>{make_cell({0, 0}), make_cell({0, 1}), make_cell({0, 2})});
    std::vector<std::pair<std::int64_t, std::string>> holes;
    for (int i = 0; i < 3; ++i) holes.emplace_back(3, ell);
    holes.emplace_back(3, line);
    holes.emplace_back(4, ell);  // different area: ignored for area 3

    const auto rows = shape_distribution(holes, 3);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].shape_free == ell);
    CHECK(rows[0].count == 3);
    CHECK(rows[0].frequency == doctest::Approx(0.75));
    CHECK(rows[0].fixed_types == 4);
    CHECK(rows[0].freq_per_fixed == doctest::Approx(0.1875));
    CHECK(rows[1].fixed_types == 2);
    double sum = 0;
    for (const auto& row : rows) sum += row.frequency;
    CHECK(sum == doctest::Approx(1.0));

    CHECK_THROWS_AS(shape_distribution(holes, 0), ConfigError);
}

TEST_CASE("largest hole maxima") {
    HoleRecord a;
    a.id = 0;
    a.volume_at_birth = 1;
    HoleRecord b;
    b.id = 1;
    b.volume_at_birth = 7;
    HoleTracker::LiveHole live;
    live.record_id = 1;
    live.volume = 5;
    const LargestHole l = largest_hole({a, b}, {live});
    CHECK(l.max_birth_volume == 7);
    CHECK(l.max_birth_id == 1);
    CHECK(l.max_live_volume == 5);
    CHECK(l.max_live_id == 1);

    const LargestHole single = largest_hole({a}, {});
    CHECK(single.max_birth_volume == 1);
    CHECK(single.max_live_volume == 0);
}

TEST_CASE("series csv round-trip and column extraction") {
    std::vector<SeriesRow> rows;
    for (std::int64_t t = 1000; t <= 20000; t += 1000) {
        SeriesRow r;
        r.t = t;
        r.P = 2 * t / 100;
        r.OutP = (3 * r.P) / 4;
        r.InnP = r.P - r.OutP;
        r.set_beta(1, t / 500);
        rows.push_back(r);
    }
    const std::string path = "/tmp/eden_test_series.csv";
    write_series_csv_file(path, 2, rows);
    int d = 0;
    const auto reread = read_series_csv_file(path, d);
    CHECK(d == 2);
    REQUIRE(reread.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(reread[i].t == rows[i].t);
        CHECK(reread[i].P == rows[i].P);
        CHECK(reread[i].has_beta(1));
        CHECK(reread[i].beta[0] == rows[i].beta[0]);
    }

    const TimeSeries p = series_column(rows, "P");
    CHECK(p.size() == rows.size());
    const TimeSeries frac = series_column(rows, "OutP_frac");
    CHECK(frac.v[0] == doctest::Approx(0.75));
    const TimeSeries beta = series_column(rows, "beta_1");
    CHECK(beta.v.back() == doctest::Approx(40.0));
    CHECK_THROWS_AS(series_column(rows, "nope"), ConfigError);

    CHECK(check_betti_upper_bounds(rows, 2) == -1);
    rows[0].set_beta(1, rows[0].P + 1);  // violates beta_1 <= P in 2D
    CHECK(check_betti_upper_bounds(rows, 2) == 0);
}

TEST_CASE("stats csv writers emit fixed headers") {
    std::stringstream areas;
    write_areas_csv(areas, {{"birth", area_table_from_volumes({1, 2})}});
    CHECK(areas.str().rfind("mode,area,count,frequency", 0) == 0);

    std::stringstream fits;
    PowerLawFit f;
    f.exponent = 0.5;
    f.coefficient = 1.1;
    f.t_min = 10;
    f.t_max = 100;
    write_fits_csv(fits, {{"beta_1", f}});
    CHECK(fits.str().rfind("series,exponent,coefficient,tmin,tmax,residual", 0) == 0);

    std::stringstream shapes;
    write_shapes_csv(shapes, {});
    CHECK(shapes.str() ==
          "mode,area,shape_free,count,frequency,fixed_types,freq_per_fixed\n");

    std::stringstream normpers;
    NormalizedPersistence h;
    h.counts = {2, 1};
    h.total_closed = 3;
    write_normpers_csv(normpers, {{1, h}});
    CHECK(normpers.str().rfind("hdim,bin_lo,bin_hi,count,excluded_open", 0) == 0);
}

TEST_CASE("parse_shape_key inverts canonical keys") {
    const std::vector<CellCoord> cells = {make_cell({0, 0, 1}), make_cell({1, 2, 0})};
    const std::string key = canonical_fixed(cells);
    const auto parsed = parse_shape_key(key);
    CHECK(canonical_fixed(parsed) == key);
    CHECK(parsed[0].d == 3);
    CHECK_THROWS_AS(parse_shape_key(""), ConfigError);
}
