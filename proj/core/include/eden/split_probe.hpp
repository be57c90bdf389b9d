#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "eden/cell.hpp"
#include "eden/flat_hash.hpp"

namespace eden {

/// Result of a multi-source connectivity probe after a cell is removed from
/// a component.  `fragments` are the source groups whose breadth-first
/// search exhausted: complete, fully enumerated components.  `survivors`
/// counts groups that either escaped (reached a cell satisfying the escape
/// predicate, hence provably in the unbounded part) or were left running
/// when the probe stopped.  `survivor_seed` is one visited cell of the
/// single running group left at the stop, when there is one.
struct SplitProbeResult {
    std::vector<std::vector<CellKey>> fragments;
    int survivors = 0;
    CellKey survivor_seed = kNoCell;
};

/// Plain BFS enumeration of the component of `seed` in the graph induced by
/// the passable predicate (seed included, assumed passable).
template <typename Passable>
std::vector<CellKey> enumerate_component(int d, CellKey seed, Passable&& passable) {
    std::vector<CellKey> cells;
    FlatSet64 seen;
    seen.insert(seed);
    cells.push_back(seed);
    CellKey nbrs[2 * kMaxDim];
    for (std::size_t head = 0; head < cells.size(); ++head) {
        face_neighbor_keys(cells[head], d, nbrs);
        for (int i = 0; i < 2 * d; ++i) {
            if (!seen.contains(nbrs[i]) && passable(nbrs[i])) {
                seen.insert(nbrs[i]);
                cells.push_back(nbrs[i]);
            }
        }
    }
    return cells;
}

/// Lockstep multi-source BFS used for split/birth/death detection.  Sources
/// are expanded one cell per group per round, so the total work is bounded
/// by the sizes of the smaller pieces: groups that meet are merged, groups
/// that exhaust are emitted as fragments, and the probe stops as soon as a
/// single running group remains with no escapes seen (that group keeps its
/// prior identity untouched).  With escapes present, a lone running group
/// could still be a bounded pocket, so it is run to resolution.
class SplitProbe {
public:
    template <typename Passable, typename Escape>
    SplitProbeResult run(int d, const CellKey* sources, int nsrc, Passable&& passable,
                         Escape&& escape) {
        ++epoch_;
        SplitProbeResult result;
        if (nsrc == 0) return result;

        const int k = nsrc;
        for (int i = 0; i < k; ++i) {
            parent_[i] = static_cast<std::uint8_t>(i);
            state_[i] = kRunning;
            queues_[i].clear();
            cells_[i].clear();
        }
        int escaped = 0;

        auto mark = [&](CellKey cell, int root) {
            visited_.insert(cell, (epoch_ << 5) | static_cast<std::uint64_t>(root));
        };
        auto lookup = [&](CellKey cell) -> int {
            const std::uint64_t* v = visited_.find(cell);
            if (!v || (*v >> 5) != epoch_) return -1;
            return find(static_cast<int>(*v & 31));
        };

        for (int i = 0; i < k; ++i) {
            mark(sources[i], i);
            cells_[i].push_back(sources[i]);
            if (escape(sources[i])) {
                state_[i] = kEscaped;
                ++escaped;
            } else {
                queues_[i].push_back(sources[i]);
            }
        }

        CellKey nbrs[2 * kMaxDim];
        std::vector<int> running;
        for (;;) {
            running.clear();
            for (int i = 0; i < k; ++i)
                if (find(i) == i && state_[i] == kRunning) running.push_back(i);
            if (running.empty()) break;
            if (running.size() == 1 && escaped == 0) {
                result.survivors += 1;
                result.survivor_seed = cells_[running[0]].front();
                break;
            }

            for (int r : running) {
                if (find(r) != r || state_[r] != kRunning) continue;
                if (queues_[r].empty()) {
                    state_[r] = kExhausted;
                    result.fragments.push_back(std::move(cells_[r]));
                    cells_[r].clear();
                    continue;
                }
                const CellKey x = queues_[r].front();
                queues_[r].pop_front();
                face_neighbor_keys(x, d, nbrs);
                for (int e = 0; e < 2 * d; ++e) {
                    const CellKey n = nbrs[e];
                    const int other = lookup(n);
                    if (other >= 0) {
                        const int self = find(r);
                        if (other != self) {
                            if (merge(self, other) == kEscapedMerge) --escaped;
                        }
                        continue;
                    }
                    const int self = find(r);
                    if (escape(n)) {
                        mark(n, self);
                        if (state_[self] == kRunning) {
                            state_[self] = kEscaped;
                            ++escaped;
                            queues_[self].clear();
                        }
                        break;
                    }
                    if (passable(n)) {
                        mark(n, self);
                        queues_[self].push_back(n);
                        cells_[self].push_back(n);
                    }
                }
            }
        }

        result.survivors += escaped;
        return result;
    }

private:
    static constexpr std::uint8_t kRunning = 0;
    static constexpr std::uint8_t kEscaped = 1;
    static constexpr std::uint8_t kExhausted = 2;
    static constexpr int kEscapedMerge = 1;

    int find(int i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    // Merge two live roots; returns kEscapedMerge when two escaped groups
    // collapsed into one (the caller rebalances its escape count).
    int merge(int a, int b) {
        const bool both_escaped = state_[a] == kEscaped && state_[b] == kEscaped;
        // Keep the larger side as representative.
        if (cells_[a].size() < cells_[b].size()) std::swap(a, b);
        parent_[b] = static_cast<std::uint8_t>(a);
        cells_[a].insert(cells_[a].end(), cells_[b].begin(), cells_[b].end());
        cells_[b].clear();
        queues_[a].insert(queues_[a].end(), queues_[b].begin(), queues_[b].end());
        queues_[b].clear();
        if (state_[a] == kEscaped || state_[b] == kEscaped) {
            state_[a] = kEscaped;
            queues_[a].clear();
        }
        return both_escaped ? kEscapedMerge : 0;
    }

    FlatMap64<std::uint64_t> visited_;
    std::uint64_t epoch_ = 0;
    std::uint8_t parent_[2 * kMaxDim]{};
    std::uint8_t state_[2 * kMaxDim]{};
    std::deque<CellKey> queues_[2 * kMaxDim];
    std::vector<CellKey> cells_[2 * kMaxDim];
};

}  // namespace eden
