#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <deque>
#include <map>
#include <sstream>

#include "eden/errors.hpp"
#include "eden/homology.hpp"
#include "test_util.hpp"

using namespace eden;
using eden::test::poly2;
using eden::test::random_polyomino;

namespace {

std::vector<std::pair<CellKey, std::int64_t>> cubes_of(const Polyomino& p) {
    std::vector<std::pair<CellKey, std::int64_t>> out;
    for (CellKey k : p.cells()) out.emplace_back(k, 1);
    return out;
}

/// Brute-force count of bounded complement components: flood the complement
/// inside bbox+1 from the margin, then count leftover pockets.
std::int64_t bounded_complement_components(const Polyomino& p) {
    const int d = p.dim();
    BoundingBox bb;
    bool first = true;
    for (const CellCoord& c : p.coords()) {
        if (first) {
            bb.init(c);
            first = false;
        } else {
            bb.include(c);
        }
    }
    BoundingBox inflated = bb;
    for (int a = 0; a < d; ++a) {
        inflated.lo[a] -= 1;
        inflated.hi[a] += 1;
    }
    auto in_region = [&](const CellCoord& c) { return inflated.contains(c); };

    FlatSet64 outer;
    std::deque<CellKey> queue;
    CellCoord corner;
    corner.d = d;
    for (int a = 0; a < d; ++a) corner.x[a] = inflated.lo[a];
    const CellKey corner_key = pack_cell(corner);
    REQUIRE_FALSE(p.contains(corner_key));
    outer.insert(corner_key);
    queue.push_back(corner_key);
    CellKey nbrs[2 * kMaxDim];
    while (!queue.empty()) {
        const CellKey k = queue.front();
        queue.pop_front();
        face_neighbor_keys(k, d, nbrs);
        for (int i = 0; i < 2 * d; ++i) {
            if (p.contains(nbrs[i]) || outer.contains(nbrs[i])) continue;
            if (!in_region(unpack_cell(nbrs[i], d))) continue;
            outer.insert(nbrs[i]);
            queue.push_back(nbrs[i]);
        }
    }

    // Remaining unoccupied region cells form the bounded components.
    FlatSet64 seen;
    std::int64_t components = 0;
    std::int64_t total = 1;
    for (int a = 0; a < d; ++a) total *= inflated.side(a);
    CellCoord c;
    c.d = d;
    for (std::int64_t m = 0; m < total; ++m) {
        std::int64_t rem = m;
        for (int a = d - 1; a >= 0; --a) {
            c.x[a] = inflated.lo[a] + static_cast<std::int32_t>(rem % inflated.side(a));
            rem /= inflated.side(a);
        }
        const CellKey k = pack_cell(c);
        if (p.contains(k) || outer.contains(k) || seen.contains(k)) continue;
        ++components;
        seen.insert(k);
        queue.push_back(k);
        while (!queue.empty()) {
            const CellKey q = queue.front();
            queue.pop_front();
            face_neighbor_keys(q, d, nbrs);
            for (int i = 0; i < 2 * d; ++i) {
                if (p.contains(nbrs[i]) || outer.contains(nbrs[i]) || seen.contains(nbrs[i]))
                    continue;
                seen.insert(nbrs[i]);
                queue.push_back(nbrs[i]);
            }
        }
    }
    return components;
}

}  // namespace

TEST_CASE("filtration of a single square has nine cells, all born at 1") {
    Polyomino p(2);
    p.insert(make_cell({0, 0}));
    const FilteredComplex fc = build_filtration(2, cubes_of(p));
    REQUIRE(fc.size() == 9);
    int by_dim[3] = {0, 0, 0};
    for (std::size_t i = 0; i < fc.size(); ++i) {
        CHECK(fc.birth(i) == 1);
        ++by_dim[fc.cell_dim(i)];
    }
    CHECK(by_dim[0] == 4);
    CHECK(by_dim[1] == 4);
    CHECK(by_dim[2] == 1);
}

TEST_CASE("filtration birth is the min over incident cubes") {
    std::vector<std::pair<CellKey, std::int64_t>> cubes;
    cubes.emplace_back(pack_cell(make_cell({0, 0})), 1);
    cubes.emplace_back(pack_cell(make_cell({1, 0})), 2);
    const FilteredComplex fc = build_filtration(2, cubes);
    REQUIRE(fc.size() == 15);
    // The shared edge at doubled (2,1) and its vertices (2,0), (2,2).
    std::map<CellKey, std::int32_t> births;
    for (std::size_t i = 0; i < fc.size(); ++i) births[fc.key(i)] = fc.birth(i);
    CHECK(births.at(pack_cell(make_cell({2, 1}))) == 1);
    CHECK(births.at(pack_cell(make_cell({2, 0}))) == 1);
    CHECK(births.at(pack_cell(make_cell({2, 2}))) == 1);
    CHECK(births.at(pack_cell(make_cell({3, 1}))) == 2);
}

TEST_CASE("filtration births match a brute-force recomputation (3d, t=50)") {
    SimulateOptions opt;
    const Trajectory traj = simulate(3, 50, 23, GrowthMode::eden(), {}, opt);
    const auto cubes = traj.cubes();
    const FilteredComplex fc = build_filtration(3, cubes);

    std::map<CellKey, std::int64_t> brute;
    for (const auto& [cube, t] : cubes) {
        const CellKey center = cube_to_doubled(cube, 3);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    CellKey k = center;
                    if (dx) k = key_step(k, 3, 0, dx);
                    if (dy) k = key_step(k, 3, 1, dy);
                    if (dz) k = key_step(k, 3, 2, dz);
                    auto it = brute.find(k);
                    if (it == brute.end() || it->second > t) brute[k] = t;
                }
    }
    REQUIRE(fc.size() == brute.size());
    for (std::size_t i = 0; i < fc.size(); ++i)
        CHECK(fc.birth(i) == brute.at(fc.key(i)));

    // Faces are born no later than their cofaces, and the filtration order
    // puts every face before the cell it bounds.
    for (std::size_t i = 0; i < fc.size(); ++i) {
        auto [fb, fe] = fc.boundary(i);
        for (const std::uint32_t* f = fb; f != fe; ++f) {
            CHECK(*f < i);
            CHECK(fc.birth(*f) <= fc.birth(i));
        }
    }
}

TEST_CASE("boundary of boundary vanishes mod 2") {
    for (int d : {2, 3, 4}) {
        const Polyomino p = random_polyomino(d, 40, 91u + static_cast<unsigned>(d));
        const FilteredComplex fc = build_filtration(d, cubes_of(p));
        for (std::size_t i = 0; i < fc.size(); ++i) {
            std::vector<std::uint32_t> dd;
            auto [fb, fe] = fc.boundary(i);
            for (const std::uint32_t* f = fb; f != fe; ++f) {
                auto [gb, ge] = fc.boundary(*f);
                dd.insert(dd.end(), gb, ge);
            }
            std::sort(dd.begin(), dd.end());
            // Every (dim-2)-face appears exactly twice.
            CHECK(dd.size() % 2 == 0);
            for (std::size_t j = 0; j + 1 < dd.size(); j += 2) CHECK(dd[j] == dd[j + 1]);
        }
    }
}

TEST_CASE("betti of the two highlighted ring polyominoes") {
    const Polyomino left =
        poly2({{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}});
    CHECK(betti(left) == std::vector<std::int64_t>{1, 1});

    const Polyomino right =
        poly2({{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}, {2, 2}});
    CHECK(betti(right) == std::vector<std::int64_t>{1, 1});
}

TEST_CASE("betti of a single cube is trivial in every dimension") {
    for (int d = 2; d <= 5; ++d) {
        Polyomino p(d);
        CellCoord origin;
        origin.d = d;
        p.insert(origin);
        const auto b = betti(p);
        REQUIRE(b.size() == static_cast<std::size_t>(d));
        CHECK(b[0] == 1);
        for (int i = 1; i < d; ++i) CHECK(b[static_cast<std::size_t>(i)] == 0);
    }
}

TEST_CASE("betti of a 3x3x3 block minus its center detects the void") {
    Polyomino p(3);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (int z = 0; z < 3; ++z)
                if (!(x == 1 && y == 1 && z == 1)) p.insert(make_cell({x, y, z}));
    CHECK(betti(p) == std::vector<std::int64_t>{1, 0, 1});
}

TEST_CASE("euler characteristic agrees between cell counts and betti numbers") {
    for (int d : {2, 3}) {
        for (std::uint64_t seed = 1; seed <= 8; ++seed) {
            const Polyomino p = random_polyomino(d, 35 + 11 * static_cast<std::int64_t>(seed),
                                                 seed * 77u);
            const FilteredComplex fc = build_filtration(d, cubes_of(p));
            std::int64_t chi_cells = 0;
            for (std::size_t i = 0; i < fc.size(); ++i)
                chi_cells += fc.cell_dim(i) % 2 == 0 ? 1 : -1;
            const auto b = betti(p);
            std::int64_t chi_betti = 0;
            for (int i = 0; i < d; ++i)
                chi_betti += (i % 2 == 0 ? 1 : -1) * b[static_cast<std::size_t>(i)];
            CHECK(chi_cells == chi_betti);
        }
    }
}

TEST_CASE("persistence of an explicit ring-and-fill trajectory") {
    // Ring of 8 cells closes at step 8; the center is filled at step 9.
    const std::vector<std::pair<int, int>> order = {{0, 0}, {1, 0}, {2, 0}, {2, 1},
                                                    {2, 2}, {1, 2}, {0, 2}, {0, 1}, {1, 1}};
    std::vector<std::pair<CellKey, std::int64_t>> cubes;
    for (std::size_t i = 0; i < order.size(); ++i)
        cubes.emplace_back(pack_cell(make_cell({order[i].first, order[i].second})),
                           static_cast<std::int64_t>(i + 1));
    const FilteredComplex fc = build_filtration(2, cubes);
    const auto intervals = persistence(fc);

    std::vector<PersistenceInterval> h1;
    std::vector<PersistenceInterval> h0;
    for (const auto& iv : intervals) (iv.hdim == 1 ? h1 : h0).push_back(iv);
    REQUIRE(h1.size() == 1);
    CHECK(h1[0].birth == 8);
    CHECK(h1[0].death == 9);
    REQUIRE(h0.size() == 1);
    CHECK(h0[0].birth == 1);
    CHECK(h0[0].death == -1);
}

TEST_CASE("interval counting reproduces betti numbers at every snapshot") {
    struct Corpus {
        int d;
        std::int64_t t;
        std::uint64_t seed;
    };
    const std::vector<Corpus> corpora = {
        {2, 200, 3}, {2, 120, 4}, {3, 150, 5}, {3, 90, 6}, {4, 60, 7}, {4, 40, 8}};
    for (const auto& c : corpora) {
        SimulateOptions opt;
        const Trajectory traj = simulate(c.d, c.t, c.seed, GrowthMode::eden(), {}, opt);
        const FilteredComplex fc = build_filtration(c.d, traj.cubes());
        const auto intervals = persistence(fc);

        // Exactly one open interval in dimension zero.
        std::int64_t open0 = 0;
        for (const auto& iv : intervals)
            if (iv.hdim == 0 && !iv.closed()) ++open0;
        CHECK(open0 == 1);

        std::vector<std::vector<std::int64_t>> series;
        for (int i = 0; i < c.d; ++i)
            series.push_back(betti_series_from_intervals(intervals, i, c.t));

        GrowthState replay(c.d);
        for (std::int64_t t = 1; t <= c.t; ++t) {
            if (t > 1) replay.add_tile(traj.events[static_cast<std::size_t>(t - 2)].tile);
            const bool dense = t == c.t || t % 10 == 0 || c.t <= 60;
            if (!dense) continue;
            const auto b = betti(replay.occupied());
            for (int i = 0; i < c.d; ++i)
                CHECK(series[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] ==
                      b[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("betti upper bounds from the perimeter hold along trajectories") {
    for (int d : {2, 3}) {
        SimulateOptions opt;
        const Trajectory traj = simulate(d, 150, 17, GrowthMode::eden(), {}, opt);
        const FilteredComplex fc = build_filtration(d, traj.cubes());
        const auto intervals = persistence(fc);
        GrowthState replay(d);
        std::vector<std::vector<std::int64_t>> series;
        for (int i = 0; i < d; ++i)
            series.push_back(betti_series_from_intervals(intervals, i, 150));
        for (std::int64_t t = 2; t <= 150; ++t) {
            replay.add_tile(traj.events[static_cast<std::size_t>(t - 2)].tile);
            const auto P = static_cast<std::int64_t>(replay.perimeter().size());
            for (int i = 1; i <= d - 1; ++i) {
                const std::int64_t beta =
                    series[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
                if (i == d - 1) {
                    CHECK(beta <= P);
                } else {
                    // 2^{d-i} C(d,i) P; only (d,i) = (3,1) occurs here.
                    CHECK(beta <= 12 * P);
                }
            }
        }
    }
}

TEST_CASE("alexander duality spot check against complement components") {
    std::int64_t checked = 0;
    for (int d : {2, 3}) {
        for (std::uint64_t seed = 1; seed <= 250; ++seed) {
            const std::int64_t size = 10 + static_cast<std::int64_t>(seed % 51);
            const Polyomino p =
                random_polyomino(d, size, seed * 1001u + static_cast<unsigned>(d));
            const auto b = betti(p);
            CHECK(b[static_cast<std::size_t>(d - 1)] == bounded_complement_components(p));
            ++checked;
        }
    }
    CHECK(checked == 500);
}

TEST_CASE("barcode csv round-trips byte for byte") {
    SimulateOptions opt;
    const Trajectory traj = simulate(2, 150, 31, GrowthMode::eden(), {}, opt);
    const auto intervals = persistence(build_filtration(2, traj.cubes()));
    std::stringstream ss;
    write_barcode_csv(ss, intervals);
    const std::string once = ss.str();

    std::vector<PersistenceInterval> reread;
    std::stringstream again(once);
    std::string line;
    std::getline(again, line);
    while (std::getline(again, line)) {
        PersistenceInterval iv;
        REQUIRE(std::sscanf(line.c_str(), "%d,%ld,%ld", &iv.hdim, &iv.birth, &iv.death) == 3);
        reread.push_back(iv);
    }
    std::stringstream twice;
    write_barcode_csv(twice, reread);
    CHECK(twice.str() == once);
}

TEST_CASE("build_filtration input validation") {
    CHECK_THROWS_AS(build_filtration(2, {}), ConfigError);
    std::vector<std::pair<CellKey, std::int64_t>> bad;
    bad.emplace_back(pack_cell(make_cell({0, 0})), 0);
    CHECK_THROWS_AS(build_filtration(2, bad), ConfigError);
}
