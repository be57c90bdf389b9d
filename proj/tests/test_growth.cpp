#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "eden/errors.hpp"
#include "eden/growth.hpp"
#include "test_util.hpp"

using namespace eden;
using eden::test::chi_square_critical;
using eden::test::chi_square_stat;
using eden::test::kZ1e3;
using eden::test::poly2;

TEST_CASE("simulate contracts: sizes, perimeter, determinism") {
    const Trajectory one = simulate(2, 1, 42, GrowthMode::eden());
    CHECK(one.events.empty());
    CHECK(one.final_state->occupied().size() == 1);
    CHECK(one.final_state->perimeter().size() == 4);

    const Trajectory big = simulate(2, 100000, 42, GrowthMode::eden());
    CHECK(big.final_state->occupied().size() == 100000);

    const Trajectory again = simulate(2, 100000, 42, GrowthMode::eden());
    REQUIRE(big.events.size() == again.events.size());
    for (std::size_t i = 0; i < big.events.size(); ++i) {
        CHECK(big.events[i].tile == again.events[i].tile);
        CHECK(big.events[i].step == again.events[i].step);
    }

    CHECK_THROWS_AS(simulate(2, 0, 1, GrowthMode::eden()), ConfigError);
    CHECK_THROWS_AS(simulate(9, 10, 1, GrowthMode::eden()), ConfigError);
}

TEST_CASE("event steps increase by one from 2 and replay rebuilds the state") {
    const Trajectory traj = simulate(3, 400, 7, GrowthMode::eden());
    for (std::size_t i = 0; i < traj.events.size(); ++i)
        CHECK(traj.events[i].step == static_cast<std::int64_t>(i + 2));

    const GrowthState replayed = traj.replay();
    CHECK(replayed.occupied().size() == traj.final_state->occupied().size());
    for (CellKey k : traj.final_state->occupied().cells()) CHECK(replayed.occupied().contains(k));

    // The event log CSV carries one row per step.
    std::stringstream ss;
    write_event_csv(ss, traj);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "step,cell,db1,db2,hole_event");
    std::size_t rows = 0;
    while (std::getline(ss, line)) ++rows;
    CHECK(rows == traj.events.size());
}

TEST_CASE("single-origin next-tile distribution is symmetric") {
    GrowthState state(2);
    SplitMix64 rng(1234);
    std::map<CellKey, std::int64_t> counts;
    const std::int64_t n = 40000;
    for (std::int64_t i = 0; i < n; ++i) ++counts[sample_next(state, rng)];
    REQUIRE(counts.size() == 4);
    const std::vector<double> expected(4, static_cast<double>(n) / 4.0);
    std::vector<std::int64_t> observed;
    for (const auto& [k, c] : counts) observed.push_back(c);
    CHECK(chi_square_stat(observed, expected) < chi_square_critical(3, kZ1e3));
}

TEST_CASE("uniformity over a frozen 10-cell perimeter (chi-square, alpha 1e-3)") {
    SplitMix64 grow_rng(5);
    GrowthState state(2);
    for (int i = 0; i < 9; ++i) eden_step(state, grow_rng);
    REQUIRE(state.occupied().size() == 10);
    const auto P = state.perimeter().size();

    SplitMix64 rng(99);
    std::map<CellKey, std::int64_t> counts;
    const std::int64_t n = 100000;
    for (std::int64_t i = 0; i < n; ++i) ++counts[sample_next(state, rng)];
    REQUIRE(counts.size() == P);
    std::vector<std::int64_t> observed;
    for (const auto& [k, c] : counts) observed.push_back(c);
    const std::vector<double> expected(P, static_cast<double>(n) / static_cast<double>(P));
    CHECK(chi_square_stat(observed, expected) <
          chi_square_critical(static_cast<int>(P) - 1, kZ1e3));
}

TEST_CASE("site-fpp marginal next-cell law is uniform over the perimeter") {
    SplitMix64 grow_rng(6);
    GrowthState state(2);
    for (int i = 0; i < 9; ++i) eden_step(state, grow_rng);
    const auto P = state.perimeter().size();

    std::map<CellKey, std::int64_t> counts;
    const std::int64_t n = 100000;
    for (std::int64_t i = 0; i < n; ++i) {
        GrowthState copy = state;
        SplitMix64 rng(1000 + static_cast<std::uint64_t>(i));
        FppClocks clocks(GrowthMode::site_fpp());
        clocks.prime(copy, rng);
        const auto [cell, time] = fpp_step(copy, clocks, rng);
        if (i == 0) CHECK(time > 0.0);
        ++counts[cell];
    }
    REQUIRE(counts.size() == P);
    std::vector<std::int64_t> observed;
    for (const auto& [k, c] : counts) observed.push_back(c);
    const std::vector<double> expected(P, static_cast<double>(n) / static_cast<double>(P));
    CHECK(chi_square_stat(observed, expected) <
          chi_square_critical(static_cast<int>(P) - 1, kZ1e3));
}

TEST_CASE("bond-fpp weights cells by their exposed faces") {
    // L-tromino: one perimeter cell touches two occupied cells, six touch
    // one; total face weight 8, so the double cell is twice as likely.
    auto build = []() {
        GrowthState s(2);
        s.add_tile(make_cell({1, 0}));
        s.add_tile(make_cell({0, 1}));
        return s;
    };
    {
        const GrowthState s = build();
        REQUIRE(s.perimeter().size() == 7);
    }
    const CellKey doubly = pack_cell(make_cell({1, 1}));

    std::map<CellKey, std::int64_t> counts;
    const std::int64_t n = 100000;
    for (std::int64_t i = 0; i < n; ++i) {
        GrowthState s = build();
        SplitMix64 rng(5000 + static_cast<std::uint64_t>(i));
        FppClocks clocks(GrowthMode::bond_fpp());
        clocks.prime(s, rng);
        const auto [cell, time] = fpp_step(s, clocks, rng);
        ++counts[cell];
    }
    std::vector<std::int64_t> observed;
    std::vector<double> expected;
    for (const auto& [k, c] : counts) {
        observed.push_back(c);
        expected.push_back(static_cast<double>(n) * (k == doubly ? 2.0 : 1.0) / 8.0);
    }
    REQUIRE(observed.size() == 7);
    CHECK(chi_square_stat(observed, expected) < chi_square_critical(6, kZ1e3));
}

TEST_CASE("fpp times are strictly increasing along a trajectory") {
    const Trajectory traj = simulate(2, 3000, 11, GrowthMode::site_fpp());
    double last = 0.0;
    for (const GrowthEvent& e : traj.events) {
        REQUIRE(e.has_fpp_time);
        CHECK(e.fpp_time > last);
        last = e.fpp_time;
    }

    const Trajectory bond = simulate(2, 3000, 11, GrowthMode::bond_fpp());
    last = 0.0;
    for (const GrowthEvent& e : bond.events) {
        CHECK(e.fpp_time > last);
        last = e.fpp_time;
    }
}

namespace {

std::string state_key(const Polyomino& p) {
    std::string key;
    for (const CellCoord& c : p.sorted_coords()) {
        key += cell_to_string(c, ',');
        key += ';';
    }
    return key;
}

// Exact Eden chain state distribution at time t in 2D by path enumeration.
void enumerate_eden(const GrowthState& state, double prob, int steps_left,
                    std::map<std::string, double>& dist) {
    if (steps_left == 0) {
        dist[state_key(state.occupied())] += prob;
        return;
    }
    const auto perimeter = state.perimeter().cells();
    const double p = prob / static_cast<double>(perimeter.size());
    for (CellKey cell : perimeter) {
        GrowthState copy = state;
        copy.add_tile(cell);
        enumerate_eden(copy, p, steps_left - 1, dist);
    }
}

}  // namespace

TEST_CASE("site-fpp and eden agree with the exact chain distribution at t=4") {
    std::map<std::string, double> exact;
    {
        GrowthState origin(2);
        enumerate_eden(origin, 1.0, 3, exact);
    }
    double total = 0;
    for (const auto& [k, p] : exact) total += p;
    CHECK(std::abs(total - 1.0) < 1e-12);

    const std::int64_t n = 100000;
    for (GrowthMode mode : {GrowthMode::eden(), GrowthMode::site_fpp()}) {
        std::map<std::string, std::int64_t> counts;
        for (std::int64_t i = 0; i < n; ++i) {
            SimulateOptions opt;
            opt.record_events = false;
            const Trajectory traj =
                simulate(2, 4, 777000 + static_cast<std::uint64_t>(i), mode, {}, opt);
            ++counts[state_key(traj.final_state->occupied())];
        }
        // Every observed state must be a legal chain state.
        for (const auto& [key, c] : counts) REQUIRE(exact.count(key) == 1);

        std::vector<std::int64_t> observed;
        std::vector<double> expected;
        for (const auto& [key, p] : exact) {
            const auto it = counts.find(key);
            observed.push_back(it == counts.end() ? 0 : it->second);
            expected.push_back(p * static_cast<double>(n));
        }
        CHECK(chi_square_stat(observed, expected) <
              chi_square_critical(static_cast<int>(exact.size()) - 1, kZ1e3));

        double tv = 0;
        for (std::size_t i = 0; i < observed.size(); ++i)
            tv += std::abs(static_cast<double>(observed[i]) / static_cast<double>(n) -
                           expected[i] / static_cast<double>(n));
        CHECK(tv / 2.0 < 0.02);
    }
}

TEST_CASE("reverse process: single cell dies in one step") {
    Polyomino hole(2);
    hole.insert(make_cell({5, 5}));
    const Trajectory traj = reverse_process(hole, 3);
    REQUIRE(traj.events.size() == 1);
    CHECK(traj.events[0].hole_event == HoleEventKind::Death);
}

TEST_CASE("reverse process: a domino shrinks without splitting") {
    const Trajectory traj = reverse_process(poly2({{0, 0}, {1, 0}}), 9);
    REQUIRE(traj.events.size() == 2);
    CHECK(traj.events[0].hole_event == HoleEventKind::None);
    CHECK(traj.events[1].hole_event == HoleEventKind::Death);
}

TEST_CASE("reverse process: u-shape splits when the middle base cell leaves") {
    // U-shape; removing the middle of the base disconnects the two arms.
    const Polyomino u = poly2({{0, 1}, {0, 0}, {1, 0}, {2, 0}, {2, 1}});
    ReverseProcess proc(u);
    CHECK(proc.component_count() == 1);
    const GrowthEvent e = proc.remove(pack_cell(make_cell({1, 0})));
    CHECK(e.hole_event == HoleEventKind::Split);
    CHECK(e.get_dbeta(1) == 1);
    CHECK(proc.component_count() == 2);

    SplitMix64 rng(17);
    std::int64_t deaths = 0;
    while (!proc.done()) deaths += proc.remove_random(rng).hole_event == HoleEventKind::Death;
    CHECK(deaths == 2);
    CHECK(proc.component_count() == 0);
    CHECK(proc.remaining() == 0);
}

TEST_CASE("reverse process component counts match brute force on random holes") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const Polyomino hole = eden::test::random_polyomino(2, 30, seed * 3 + 1);
        ReverseProcess proc(hole);
        SplitMix64 rng(seed);
        FlatSet64 remaining;
        for (CellKey k : hole.cells()) remaining.insert(k);
        std::int64_t expected_components = 1;
        while (!proc.done()) {
            const GrowthEvent e = proc.remove_random(rng);
            remaining.erase(e.tile);
            // Brute-force flood fill over the remaining cells.
            std::int64_t comps = 0;
            FlatSet64 seen;
            remaining.for_each([&](CellKey start) {
                if (seen.contains(start)) return;
                ++comps;
                std::vector<CellKey> queue = {start};
                seen.insert(start);
                CellKey nbrs[2 * kMaxDim];
                while (!queue.empty()) {
                    const CellKey k = queue.back();
                    queue.pop_back();
                    face_neighbor_keys(k, 2, nbrs);
                    for (int i = 0; i < 4; ++i) {
                        if (remaining.contains(nbrs[i]) && seen.insert(nbrs[i]))
                            queue.push_back(nbrs[i]);
                    }
                }
            });
            CHECK(proc.component_count() == comps);
            expected_components = comps;
        }
        CHECK(expected_components == 0);
    }
}

TEST_CASE("growth mode names parse and round-trip") {
    CHECK(GrowthMode::parse("eden", 1.0).law == GrowthLaw::EdenUniform);
    CHECK(GrowthMode::parse("site-fpp", 2.0).passage.mean == 2.0);
    CHECK(GrowthMode::parse("bond-fpp", 1.0).name() == "bond-fpp");
    CHECK_THROWS_AS(GrowthMode::parse("nope", 1.0), ConfigError);
    CHECK_THROWS_AS(GrowthMode::parse("eden", 0.0), ConfigError);
}
