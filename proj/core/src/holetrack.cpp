#include "eden/holetrack.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "eden/errors.hpp"
#include "eden/flat_hash.hpp"
#include "eden/split_probe.hpp"
#include "eden/symmetry.hpp"

namespace eden {

namespace {
constexpr std::uint32_t kNoHandle = std::numeric_limits<std::uint32_t>::max();
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
}  // namespace

struct HoleTracker::Impl {
    struct Handle {
        std::uint32_t record = 0;  // index into records_
        std::int32_t node = -1;    // current tree segment
        std::int64_t volume = 0;
        std::uint32_t live_pos = 0;
        bool alive = false;
    };

    int d = 0;
    Options options;
    FlatMap64<std::uint32_t> labels;  // cell -> handle index (bounded components only)
    std::vector<Handle> handles;
    std::vector<std::uint32_t> live_list;  // alive handle indices, swap-removed
    SplitProbe probe;

    void live_insert(std::uint32_t h) {
        handles[h].live_pos = static_cast<std::uint32_t>(live_list.size());
        live_list.push_back(h);
    }
    void live_erase(std::uint32_t h) {
        const std::uint32_t pos = handles[h].live_pos;
        const std::uint32_t last = live_list.back();
        live_list[pos] = last;
        handles[last].live_pos = pos;
        live_list.pop_back();
    }

    bool in_new_perimeter(const GrowthState& state, CellKey cell) const {
        for (CellKey k : state.last_new_perimeter())
            if (k == cell) return true;
        return false;
    }
};

HoleTracker::HoleTracker(const GrowthState& initial) : HoleTracker(initial, Options()) {}

HoleTracker::HoleTracker(const GrowthState& initial, Options options) : impl_(new Impl) {
    impl_->d = initial.dim();
    impl_->options = options;
    if (initial.step() != 1)
        throw ConfigError("HoleTracker must be attached to a fresh single-cell state");
    outp_ = static_cast<std::int64_t>(initial.perimeter().size());
    innp_ = 0;
}

HoleTracker::~HoleTracker() { delete impl_; }

namespace {

std::vector<CellKey> sorted_cells(std::vector<CellKey> cells) {
    std::sort(cells.begin(), cells.end());
    return cells;
}

}  // namespace

void HoleTracker::on_tile_added(const GrowthState& state, GrowthEvent& event) {
    Impl& im = *impl_;
    const int d = im.d;
    const CellKey c = event.tile;
    const std::int64_t step = event.step;

    const std::uint32_t* hptr = im.labels.find(c);
    const std::uint32_t h = hptr ? *hptr : kNoHandle;

    // The added tile leaves the perimeter; classify it by its old label.
    if (h != kNoHandle)
        --innp_;
    else
        --outp_;

    int delta = 0;

    auto new_record = [&](std::int64_t parent_id, std::vector<CellKey>&& cells,
                          std::int32_t parent_node) -> std::uint32_t {
        const std::int64_t id = static_cast<std::int64_t>(records_.size());
        HoleRecord rec;
        rec.id = id;
        rec.parent = parent_id;
        rec.birth = step;
        rec.volume_at_birth = static_cast<std::int64_t>(cells.size());
        std::vector<CellKey> sorted = sorted_cells(std::move(cells));
        if (im.options.shape_keys) {
            rec.shape_fixed = canonical_fixed(sorted, d);
            rec.shape_free = d <= 5 ? canonical_free(sorted, d) : std::string();
        }
        rec.volume_history.emplace_back(step, rec.volume_at_birth);

        SplitTreeNode node;
        node.record_id = id;
        node.birth = step;
        node.parent = parent_node;
        node.volume_at_start = rec.volume_at_birth;
        node.shape_fixed = rec.shape_fixed;
        node.shape_free = rec.shape_free;
        const auto node_idx = static_cast<std::int32_t>(tree_.nodes.size());
        if (parent_node >= 0)
            tree_.nodes[static_cast<std::size_t>(parent_node)].children.push_back(node_idx);
        else
            tree_.roots.push_back(node_idx);

        Impl::Handle handle;
        handle.record = static_cast<std::uint32_t>(records_.size());
        handle.node = node_idx;
        handle.volume = rec.volume_at_birth;
        handle.alive = true;
        const auto handle_idx = static_cast<std::uint32_t>(im.handles.size());

        for (CellKey cell : sorted) im.labels.insert(cell, handle_idx);
        if (!im.options.record_birth_cells) sorted.clear();
        rec.cells_at_birth = std::move(sorted);

        records_.push_back(std::move(rec));
        tree_.nodes.push_back(std::move(node));
        im.handles.push_back(handle);
        im.live_insert(handle_idx);
        ++live_;
        return handle_idx;
    };

    CellKey nbrs[2 * kMaxDim];
    face_neighbor_keys(c, d, nbrs);
    CellKey sources[2 * kMaxDim];
    int nsrc = 0;
    for (int i = 0; i < 2 * d; ++i)
        if (!state.occupied().contains(nbrs[i])) sources[nsrc++] = nbrs[i];

    if (h != kNoHandle) {
        // Addition inside a hole: the component can shrink, die, or split.
        im.labels.erase(c);
        Impl::Handle& H = im.handles[h];
        H.volume -= 1;
        HoleRecord& rec = records_[H.record];
        if (H.volume == 0) {
            rec.death = step;
            rec.volume_history.emplace_back(step, 0);
            tree_.nodes[static_cast<std::size_t>(H.node)].end = step;
            H.alive = false;
            im.live_erase(h);
            --live_;
            event.hole_event = HoleEventKind::Death;
            delta = -1;
        } else {
            SplitProbeResult res = im.probe.run(
                d, sources, nsrc,
                [&](CellKey n) {
                    const std::uint32_t* p = im.labels.find(n);
                    return p && *p == h;
                },
                [](CellKey) { return false; });
            const int parts = static_cast<int>(res.fragments.size()) + res.survivors;
            if (parts >= 2) {
                // Sizes: fragments are enumerated; the surviving remainder
                // (if any) is everything else, by subtraction.
                std::int64_t frag_total = 0;
                for (const auto& f : res.fragments)
                    frag_total += static_cast<std::int64_t>(f.size());
                const std::int64_t remainder_size = res.survivors ? H.volume - frag_total : 0;

                std::int64_t best = remainder_size;
                for (const auto& f : res.fragments)
                    best = std::max(best, static_cast<std::int64_t>(f.size()));

                // Keeper = largest part; break ties by smallest minimal cell.
                int keeper_frag = -1;  // -1 = remainder keeps the identity
                CellKey best_min = kNoCell;
                std::vector<CellKey> remainder_cells;
                const bool tie_needs_remainder =
                    res.survivors && remainder_size == best;
                if (tie_needs_remainder) {
                    int tied_frags = 0;
                    for (const auto& f : res.fragments)
                        if (static_cast<std::int64_t>(f.size()) == best) ++tied_frags;
                    if (tied_frags > 0) {
                        // Enumerate the remainder only when the tie matters.
                        remainder_cells =
                            enumerate_component(d, res.survivor_seed, [&](CellKey n) {
                                const std::uint32_t* p = im.labels.find(n);
                                return p && *p == h;
                            });
                        best_min = *std::min_element(remainder_cells.begin(),
                                                     remainder_cells.end());
                    } else {
                        best_min = 0;  // remainder wins outright
                    }
                }
                for (std::size_t i = 0; i < res.fragments.size(); ++i) {
                    if (static_cast<std::int64_t>(res.fragments[i].size()) != best) continue;
                    const CellKey m =
                        *std::min_element(res.fragments[i].begin(), res.fragments[i].end());
                    if (keeper_frag < 0 && best_min == kNoCell) {
                        keeper_frag = static_cast<int>(i);
                        best_min = m;
                    } else if (m < best_min) {
                        keeper_frag = static_cast<int>(i);
                        best_min = m;
                    }
                }
                if (!res.survivors && keeper_frag < 0)
                    throw InternalError("split without any keeper candidate");

                // Close the parent segment; open child segments.
                const std::int32_t old_node = H.node;
                tree_.nodes[static_cast<std::size_t>(old_node)].end = step;
                tree_.nodes[static_cast<std::size_t>(old_node)].ends_in_split = true;

                // Keeper segment first (inherits the display id).
                SplitTreeNode keep_node;
                keep_node.record_id = rec.id;
                keep_node.birth = step;
                keep_node.parent = old_node;
                const auto keep_idx = static_cast<std::int32_t>(tree_.nodes.size());
                tree_.nodes[static_cast<std::size_t>(old_node)].children.push_back(keep_idx);
                tree_.nodes.push_back(std::move(keep_node));
                H.node = keep_idx;
                H.volume = keeper_frag >= 0
                               ? static_cast<std::int64_t>(res.fragments[keeper_frag].size())
                               : remainder_size;
                rec.volume_history.emplace_back(step, H.volume);

                const std::int64_t parent_id = rec.id;
                for (std::size_t i = 0; i < res.fragments.size(); ++i) {
                    if (static_cast<int>(i) == keeper_frag) continue;
                    new_record(parent_id, std::move(res.fragments[i]), old_node);
                }
                if (keeper_frag >= 0 && res.survivors) {
                    // The remainder does not keep the identity: enumerate and
                    // relabel it (it is no larger than the keeper fragment).
                    if (remainder_cells.empty()) {
                        remainder_cells =
                            enumerate_component(d, res.survivor_seed, [&](CellKey n) {
                                const std::uint32_t* p = im.labels.find(n);
                                return p && *p == h;
                            });
                    }
                    new_record(parent_id, std::move(remainder_cells), old_node);
                }
                event.hole_event = HoleEventKind::Split;
                delta = parts - 1;
            } else {
                if (im.options.volume_sample_every <= 0)
                    rec.volume_history.emplace_back(step, H.volume);
            }
        }
    } else {
        // Addition in the unbounded component: may pinch off new holes.
        SplitProbeResult res = im.probe.run(
            d, sources, nsrc,
            [&](CellKey n) { return !state.occupied().contains(n) && !im.labels.contains(n); },
            [&](CellKey n) { return !state.bbox().contains(unpack_cell(n, d)); });
        if (!res.fragments.empty()) {
            for (auto& frag : res.fragments) {
                // Perimeter cells swallowed by the new hole flip to inner,
                // except the ones inserted this step (tallied below).
                for (CellKey cell : frag) {
                    if (state.perimeter().contains(cell) && !im.in_new_perimeter(state, cell)) {
                        --outp_;
                        ++innp_;
                    }
                }
                new_record(-1, std::move(frag), -1);
            }
            event.hole_event = HoleEventKind::Birth;
            delta = static_cast<int>(res.fragments.size());
        }
    }

    // Fresh perimeter cells, classified after the event resolution.
    for (CellKey n : state.last_new_perimeter()) {
        if (im.labels.contains(n))
            ++innp_;
        else
            ++outp_;
    }

    if (im.options.volume_sample_every > 0 && step % im.options.volume_sample_every == 0) {
        for (std::uint32_t hl : im.live_list) {
            const Impl::Handle& handle = im.handles[hl];
            records_[handle.record].volume_history.emplace_back(step, handle.volume);
        }
    }

    event.set_dbeta(d - 1, delta);
}

std::vector<HoleTracker::LiveHole> HoleTracker::live_holes() const {
    const Impl& im = *impl_;
    std::vector<LiveHole> out;
    std::vector<std::vector<CellKey>> cells_by_handle(im.handles.size());
    im.labels.for_each([&](CellKey cell, std::uint32_t h) {
        cells_by_handle[h].push_back(cell);
    });
    for (std::size_t h = 0; h < im.handles.size(); ++h) {
        if (!im.handles[h].alive) continue;
        LiveHole live;
        live.record_id = records_[im.handles[h].record].id;
        live.volume = im.handles[h].volume;
        live.cells = sorted_cells(std::move(cells_by_handle[h]));
        if (static_cast<std::int64_t>(live.cells.size()) != live.volume)
            throw InternalError("live hole volume disagrees with its label count");
        out.push_back(std::move(live));
    }
    std::sort(out.begin(), out.end(),
              [](const LiveHole& a, const LiveHole& b) { return a.record_id < b.record_id; });
    return out;
}

std::pair<std::int64_t, std::int64_t> HoleTracker::recount_perimeter_split(
    const GrowthState& state) const {
    std::int64_t outp = 0, innp = 0;
    for (CellKey cell : state.perimeter().cells()) {
        if (impl_->labels.contains(cell))
            ++innp;
        else
            ++outp;
    }
    return {outp, innp};
}

std::vector<PersistenceInterval> barcode_dminus1(const SplitTree& tree, int d) {
    const auto n = tree.nodes.size();
    std::vector<std::int64_t> f(n, 0);

    // f(node) = latest death among leaf descendants (kInf while alive);
    // children are fully built before their parent ends, so a reverse
    // index sweep is a valid post-order.
    for (std::size_t i = n; i-- > 0;) {
        const SplitTreeNode& v = tree.nodes[i];
        if (v.children.empty()) {
            f[i] = v.end < 0 ? kInf : v.end;
        } else {
            std::int64_t best = 0;
            for (std::int32_t c : v.children)
                best = std::max(best, f[static_cast<std::size_t>(c)]);
            f[i] = best;
        }
    }

    std::vector<PersistenceInterval> out;
    auto emit = [&](std::int64_t birth, std::int64_t death) {
        PersistenceInterval iv;
        iv.hdim = d - 1;
        iv.birth = birth;
        iv.death = death == kInf ? -1 : death;
        if (iv.death < 0 || iv.birth < iv.death) out.push_back(iv);
    };

    for (std::int32_t r : tree.roots)
        emit(tree.nodes[static_cast<std::size_t>(r)].birth, f[static_cast<std::size_t>(r)]);
    for (std::size_t i = 0; i < n; ++i) {
        const SplitTreeNode& v = tree.nodes[i];
        if (v.children.empty()) continue;
        // The child with the latest f continues the elder interval; every
        // other child starts a new interval at the split step.
        std::size_t elder = 0;
        for (std::size_t j = 1; j < v.children.size(); ++j) {
            if (f[static_cast<std::size_t>(v.children[j])] >
                f[static_cast<std::size_t>(v.children[elder])])
                elder = j;
        }
        for (std::size_t j = 0; j < v.children.size(); ++j) {
            if (j == elder) continue;
            const auto c = static_cast<std::size_t>(v.children[j]);
            emit(tree.nodes[c].birth, f[c]);
        }
    }
    return out;
}

std::string canonical_fixed(const std::vector<CellCoord>& cells) {
    if (cells.empty()) throw ConfigError("canonical_fixed: empty cell set");
    const int d = cells[0].d;
    CellCoord min = cells[0];
    for (const CellCoord& c : cells)
        for (int a = 0; a < d; ++a) min.x[a] = std::min(min.x[a], c.x[a]);
    std::vector<CellCoord> norm;
    norm.reserve(cells.size());
    for (const CellCoord& c : cells) {
        CellCoord t = c;
        for (int a = 0; a < d; ++a) t.x[a] -= min.x[a];
        norm.push_back(t);
    }
    std::sort(norm.begin(), norm.end());
    std::string key;
    for (std::size_t i = 0; i < norm.size(); ++i) {
        if (i) key += ';';
        key += cell_to_string(norm[i], '.');
    }
    return key;
}

std::string canonical_fixed(const std::vector<CellKey>& cells, int d) {
    std::vector<CellCoord> coords;
    coords.reserve(cells.size());
    for (CellKey k : cells) coords.push_back(unpack_cell(k, d));
    return canonical_fixed(coords);
}

std::string canonical_free(const std::vector<CellCoord>& cells) {
    if (cells.empty()) throw ConfigError("canonical_free: empty cell set");
    const int d = cells[0].d;
    if (d > 5)
        throw ConfigError("canonical_free: group enumeration supported for d <= 5");
    std::string best;
    std::vector<CellCoord> image(cells.size());
    for (const SignedPerm& g : hyperoctahedral_group(d)) {
        for (std::size_t i = 0; i < cells.size(); ++i) image[i] = g.apply(cells[i]);
        std::string key = canonical_fixed(image);
        if (best.empty() || key < best) best = std::move(key);
    }
    return best;
}

std::string canonical_free(const std::vector<CellKey>& cells, int d) {
    std::vector<CellCoord> coords;
    coords.reserve(cells.size());
    for (CellKey k : cells) coords.push_back(unpack_cell(k, d));
    return canonical_free(coords);
}

int fixed_multiplicity(const std::vector<CellKey>& cells, int d) {
    std::vector<CellCoord> coords;
    coords.reserve(cells.size());
    for (CellKey k : cells) coords.push_back(unpack_cell(k, d));
    std::vector<std::string> keys;
    std::vector<CellCoord> image(coords.size());
    for (const SignedPerm& g : hyperoctahedral_group(d)) {
        for (std::size_t i = 0; i < coords.size(); ++i) image[i] = g.apply(coords[i]);
        keys.push_back(canonical_fixed(image));
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return static_cast<int>(keys.size());
}

void write_holes_csv(std::ostream& os, const std::vector<HoleRecord>& records) {
    os << "id,parent,birth,death,volume_at_birth,shape_fixed,shape_free\n";
    for (const HoleRecord& r : records) {
        os << r.id << "," << r.parent << "," << r.birth << "," << r.death << ","
           << r.volume_at_birth << "," << r.shape_fixed << "," << r.shape_free << "\n";
    }
}

void write_holes_csv_file(const std::string& path, const std::vector<HoleRecord>& records) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_holes_csv(os, records);
    if (!os) throw IoError("write failed: " + path);
}

std::vector<HoleRecord> read_holes_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::vector<HoleRecord> out;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;
        HoleRecord r;
        std::istringstream ls(line);
        std::string field;
        try {
            std::getline(ls, field, ',');
            r.id = std::stoll(field);
            std::getline(ls, field, ',');
            r.parent = std::stoll(field);
            std::getline(ls, field, ',');
            r.birth = std::stoll(field);
            std::getline(ls, field, ',');
            r.death = std::stoll(field);
            std::getline(ls, field, ',');
            r.volume_at_birth = std::stoll(field);
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "bad holes row");
        }
        std::getline(ls, r.shape_fixed, ',');
        std::getline(ls, r.shape_free, ',');
        out.push_back(std::move(r));
    }
    return out;
}

void write_live_holes_csv(std::ostream& os, const std::vector<HoleTracker::LiveHole>& live,
                          int d) {
    os << "id,volume,shape_fixed,shape_free\n";
    for (const auto& hole : live) {
        os << hole.record_id << "," << hole.volume << "," << canonical_fixed(hole.cells, d)
           << "," << (d <= 5 ? canonical_free(hole.cells, d) : std::string()) << "\n";
    }
}

void write_live_holes_csv_file(const std::string& path,
                               const std::vector<HoleTracker::LiveHole>& live, int d) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_live_holes_csv(os, live, d);
    if (!os) throw IoError("write failed: " + path);
}

std::vector<LiveHoleRow> read_live_holes_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::vector<LiveHoleRow> out;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;
        LiveHoleRow r;
        std::istringstream ls(line);
        std::string field;
        try {
            std::getline(ls, field, ',');
            r.id = std::stoll(field);
            std::getline(ls, field, ',');
            r.volume = std::stoll(field);
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "bad live-holes row");
        }
        std::getline(ls, r.shape_fixed, ',');
        std::getline(ls, r.shape_free, ',');
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

nlohmann::json node_to_json(const SplitTree& tree, std::int32_t idx) {
    const SplitTreeNode& v = tree.nodes[static_cast<std::size_t>(idx)];
    nlohmann::json j;
    j["id"] = v.record_id;
    j["birth"] = v.birth;
    j["death"] = v.end;
    if (!v.children.empty()) {
        nlohmann::json kids = nlohmann::json::array();
        for (std::int32_t c : v.children) kids.push_back(node_to_json(tree, c));
        j["children"] = std::move(kids);
    }
    return j;
}

}  // namespace

void write_splittree_json(std::ostream& os, const SplitTree& tree) {
    nlohmann::json roots = nlohmann::json::array();
    for (std::int32_t r : tree.roots) roots.push_back(node_to_json(tree, r));
    nlohmann::json j;
    j["roots"] = std::move(roots);
    os << j.dump(2) << "\n";
}

void write_splittree_json_file(const std::string& path, const SplitTree& tree) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_splittree_json(os, tree);
    if (!os) throw IoError("write failed: " + path);
}

void write_hole_cast_obj(std::ostream& os, const std::vector<CellKey>& cells, int d) {
    if (d != 3) throw ConfigError("cast export is defined for d=3 only");
    FlatSet64 body;
    for (CellKey k : cells) body.insert(k);
    std::vector<CellKey> sorted = cells;
    std::sort(sorted.begin(), sorted.end());

    FlatMap64<std::uint32_t> vertex_ids;
    std::vector<CellCoord> vertices;
    auto vertex = [&](std::int32_t x, std::int32_t y, std::int32_t z) -> std::uint32_t {
        const CellCoord v = make_cell({x, y, z});
        const CellKey key = pack_cell(v);
        if (const std::uint32_t* id = vertex_ids.find(key)) return *id;
        const auto id = static_cast<std::uint32_t>(vertices.size());
        vertex_ids.insert(key, id);
        vertices.push_back(v);
        return id;
    };

    // Exposed faces only; corners ordered so the quad normal points outward.
    struct Quad {
        std::uint32_t v[4];
    };
    std::vector<Quad> quads;
    CellKey nbrs[2 * kMaxDim];
    for (CellKey k : sorted) {
        const CellCoord c = unpack_cell(k, 3);
        face_neighbor_keys(k, 3, nbrs);
        const std::int32_t x = c.x[0], y = c.x[1], z = c.x[2];
        const struct {
            int nbr;
            std::int32_t corners[4][3];
        } faces[6] = {
            {0, {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 1, 0}}},  // -x
            {1, {{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 0, 1}}},  // +x
            {2, {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}}},  // -y
            {3, {{0, 1, 0}, {0, 1, 1}, {1, 1, 1}, {1, 1, 0}}},  // +y
            {4, {{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}}},  // -z
            {5, {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}},  // +z
        };
        for (const auto& face : faces) {
            if (body.contains(nbrs[face.nbr])) continue;
            Quad q;
            for (int i = 0; i < 4; ++i)
                q.v[i] = vertex(x + face.corners[i][0], y + face.corners[i][1],
                                z + face.corners[i][2]);
            quads.push_back(q);
        }
    }

    for (const CellCoord& v : vertices)
        os << "v " << v.x[0] << " " << v.x[1] << " " << v.x[2] << "\n";
    for (const Quad& q : quads)
        os << "f " << q.v[0] + 1 << " " << q.v[1] + 1 << " " << q.v[2] + 1 << " "
           << q.v[3] + 1 << "\n";
}

void write_hole_cast_obj_file(const std::string& path, const std::vector<CellKey>& cells,
                              int d) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_hole_cast_obj(os, cells, d);
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace eden
