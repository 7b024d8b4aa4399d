#include "hpr/search.hpp"

#include <algorithm>
#include <set>

#include "hpr/rng.hpp"

namespace hpr {

namespace {

// Induced sub-hypergraph on a handful of vertices, collected by membership
// probes rather than an edge-list scan. Returns the local graph plus the
// local->global vertex map.
std::pair<Hypergraph, std::vector<Vertex>> local_induced(const Hypergraph& h,
                                                         std::span<const Vertex> verts) {
    std::vector<Vertex> sorted(verts.begin(), verts.end());
    std::sort(sorted.begin(), sorted.end());
    const unsigned k = static_cast<unsigned>(h.k());
    std::vector<Vertex> flat;
    std::vector<std::uint32_t> idx(k);
    for (unsigned i = 0; i < k; ++i) idx[i] = i;
    if (sorted.size() >= k) {
        while (true) {
            std::vector<Vertex> cand(k);
            for (unsigned i = 0; i < k; ++i) cand[i] = sorted[idx[i]];
            if (h.contains_edge(cand))
                for (unsigned i = 0; i < k; ++i) flat.push_back(idx[i]);
            unsigned i = k;
            bool done = true;
            while (i > 0) {
                --i;
                if (idx[i] + (k - i) < sorted.size()) {
                    idx[i]++;
                    for (unsigned j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                    done = false;
                    break;
                }
            }
            if (done) break;
        }
    }
    return {Hypergraph(h.k(), sorted.size(), std::move(flat)), sorted};
}

}  // namespace

bool hosts_motif_copy(const Hypergraph& h, const RootedMotif& f, std::span<const Vertex> verts) {
    if (verts.size() != f.graph.vertex_count()) return false;
    auto [local, map] = local_induced(h, verts);
    if (map.size() != verts.size()) return false;  // repeated vertex
    if (local.edge_count() < f.graph.edge_count()) return false;
    SearchOptions opt;
    opt.node_budget = 200'000;
    return find_rooted_copy(local, f, {}, VertexSet::full(local.vertex_count()), opt).outcome ==
           SearchOutcome::found;
}

namespace {

// Spanning F-copy on `verts`, lifted back to host labels. Assumes
// hosts_motif_copy(verts) already holds.
std::vector<Vertex> find_copy_on(const Hypergraph& h, const RootedMotif& f,
                                 std::span<const Vertex> verts) {
    auto [local, map] = local_induced(h, verts);
    SearchOptions opt;
    auto r = find_rooted_copy(local, f, {}, VertexSet::full(local.vertex_count()), opt);
    std::vector<Vertex> image(r.embedding->image.size());
    for (std::size_t i = 0; i < image.size(); ++i) image[i] = map[r.embedding->image[i]];
    return image;
}

}  // namespace

namespace {

// Try to re-tile the 2f vertices of `piece` + `lost` into two copies of F.
std::optional<std::pair<std::vector<Vertex>, std::vector<Vertex>>> exchange(
    const Hypergraph& h, const RootedMotif& f, const std::vector<Vertex>& piece,
    const std::vector<Vertex>& lost) {
    const std::size_t fv = f.graph.vertex_count();
    std::vector<Vertex> all(piece.begin(), piece.end());
    all.insert(all.end(), lost.begin(), lost.end());
    std::sort(all.begin(), all.end());

    std::vector<std::uint32_t> idx(fv);
    for (std::size_t i = 0; i < fv; ++i) idx[i] = static_cast<std::uint32_t>(i);
    // walk f-subsets of the 2f-set; skip the trivial split (original piece)
    std::vector<Vertex> side_a(fv), side_b(fv);
    while (true) {
        side_a.clear();
        side_b.clear();
        std::size_t ai = 0;
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (ai < fv && idx[ai] == i) {
                side_a.push_back(all[i]);
                ai++;
            } else {
                side_b.push_back(all[i]);
            }
        }
        if (hosts_motif_copy(h, f, side_a) && hosts_motif_copy(h, f, side_b)) {
            return std::make_pair(find_copy_on(h, f, side_a), find_copy_on(h, f, side_b));
        }
        std::size_t i = fv;
        bool done = true;
        while (i > 0) {
            --i;
            if (idx[i] + (fv - i) < all.size()) {
                idx[i]++;
                for (std::size_t j = i + 1; j < fv; ++j) idx[j] = idx[j - 1] + 1;
                done = false;
                break;
            }
        }
        if (done) return std::nullopt;
    }
}

}  // namespace

TileResult tile_with_motif(const Hypergraph& h, const RootedMotif& f, const VertexSet& s,
                           std::uint64_t seed, const SearchOptions& opt) {
    TileResult out;
    const std::size_t fv = f.graph.vertex_count();
    std::vector<std::uint8_t> free_mask(h.vertex_count(), 0);
    for (Vertex v : s.items()) free_mask[v] = 1;
    std::size_t remaining = s.size();

    const bool single_edge = f.graph.edge_count() == 1 && fv == static_cast<std::size_t>(h.k());
    if (single_edge) {
        for (EdgeId e : h.lexicographic_order()) {
            auto ed = h.edge(e);
            bool ok = true;
            for (Vertex v : ed)
                if (!free_mask[v]) ok = false;
            if (!ok) continue;
            out.pieces.emplace_back(ed.begin(), ed.end());
            for (Vertex v : ed) free_mask[v] = 0;
            remaining -= ed.size();
        }
    } else {
        while (remaining >= fv) {
            std::vector<Vertex> items;
            for (Vertex v = 0; v < h.vertex_count(); ++v)
                if (free_mask[v]) items.push_back(v);
            VertexSet allowed(h.vertex_count(), items);
            FindResult r = find_rooted_copy(h, f, {}, allowed, opt);
            if (r.outcome != SearchOutcome::found) break;
            out.pieces.push_back(r.embedding->image);
            for (Vertex v : r.embedding->image) free_mask[v] = 0;
            remaining -= fv;
        }
    }

    auto rebuild_leftover = [&] {
        out.leftover.clear();
        for (Vertex v = 0; v < h.vertex_count(); ++v)
            if (free_mask[v]) out.leftover.push_back(v);
    };
    rebuild_leftover();

    // Local exchanges against existing pieces to absorb leftovers f at a time.
    Rng rng = Rng::stream(seed, 0x71e5);
    int stall = 0;
    while (out.leftover.size() >= fv && stall < 3) {
        std::vector<Vertex> lost(out.leftover.begin(), out.leftover.begin() + fv);
        bool improved = false;
        if (hosts_motif_copy(h, f, lost)) {
            out.pieces.push_back(find_copy_on(h, f, lost));
            for (Vertex v : lost) free_mask[v] = 0;
            rebuild_leftover();
            continue;
        }
        std::size_t start = out.pieces.empty() ? 0 : rng.below(out.pieces.size());
        const std::size_t window = std::min<std::size_t>(out.pieces.size(), 600);
        for (std::size_t w = 0; w < window && !improved; ++w) {
            std::size_t pi = (start + w) % out.pieces.size();
            auto res = exchange(h, f, out.pieces[pi], lost);
            if (res) {
                for (Vertex v : lost) free_mask[v] = 0;
                out.pieces[pi] = res->first;
                out.pieces.push_back(res->second);
                rebuild_leftover();
                improved = true;
            }
        }
        if (!improved) {
            // rotate the leftover prefix so a different f-subset is tried
            std::rotate(out.leftover.begin(), out.leftover.begin() + 1, out.leftover.end());
            stall++;
        } else {
            stall = 0;
        }
    }
    return out;
}

namespace {

struct PathSearch {
    const Hypergraph& h;
    Vertex target;
    std::vector<std::uint8_t> usable;  // inside S
    std::vector<std::uint8_t> used;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    std::uint64_t order_salt = 0;
    std::vector<EdgeId> path;
    std::size_t fresh_left = 0;  // usable, unused, not the target

    bool dfs(Vertex end) {
        if (++nodes > budget) return false;
        const unsigned k = static_cast<unsigned>(h.k());
        if (fresh_left == k - 2 || (k == 2 && fresh_left == 0)) {
            // closing edge: {end, target} + all remaining fresh vertices
            std::vector<Vertex> closing{end, target};
            for (Vertex v = 0; v < h.vertex_count(); ++v)
                if (usable[v] && !used[v] && v != target) closing.push_back(v);
            if (h.contains_edge(closing)) {
                auto id = h.find_edge(closing);
                path.push_back(*id);
                return true;
            }
            if (fresh_left > 0) return false;  // only the closing move remains
        }
        if (fresh_left < k - 1) return false;
        const auto& inc = h.incident(end);
        if (inc.empty()) return false;
        std::size_t start = static_cast<std::size_t>(Rng::mix(order_salt ^ (static_cast<std::uint64_t>(end) << 20) ^ path.size()) % inc.size());
        for (std::size_t i = 0; i < inc.size(); ++i) {
            EdgeId e = inc[(start + i) % inc.size()];
            auto ed = h.edge(e);
            bool ok = true;
            for (Vertex v : ed) {
                if (v == end) continue;
                if (!usable[v] || used[v] || v == target) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            for (Vertex v : ed)
                if (v != end) used[v] = 1;
            fresh_left -= k - 1;
            path.push_back(e);
            // any non-end vertex of e can be the next junction
            for (Vertex w : ed) {
                if (w == end) continue;
                if (dfs(w)) return true;
                if (nodes > budget) break;
            }
            path.pop_back();
            fresh_left += k - 1;
            for (Vertex v : ed)
                if (v != end) used[v] = 0;
            if (nodes > budget) return false;
        }
        return false;
    }
};

}  // namespace

std::optional<std::vector<EdgeId>> loose_ham_path(const Hypergraph& h, const VertexSet& s, Vertex a,
                                                  Vertex b, std::uint64_t seed,
                                                  std::uint64_t node_budget, int restarts) {
    const unsigned k = static_cast<unsigned>(h.k());
    if (!s.contains(a) || !s.contains(b) || a == b) return std::nullopt;
    if ((s.size() - 1) % (k - 1) != 0) return std::nullopt;
    for (int r = 0; r < restarts; ++r) {
        PathSearch ps{h, b, {}, {}, node_budget / std::max(1, restarts), 0,
                      Rng::mix(seed + 0x517 * static_cast<std::uint64_t>(r)), {}, 0};
        ps.usable.assign(h.vertex_count(), 0);
        for (Vertex v : s.items()) ps.usable[v] = 1;
        ps.used.assign(h.vertex_count(), 0);
        ps.used[a] = 1;
        ps.fresh_left = s.size() - 2;  // excludes a and the target b
        if (ps.dfs(a)) return ps.path;
    }
    return std::nullopt;
}

std::optional<std::vector<EdgeId>> loose_ham_cycle(const Hypergraph& h, std::uint64_t seed,
                                                   std::uint64_t node_budget, int restarts) {
    const unsigned k = static_cast<unsigned>(h.k());
    const std::size_t n = h.vertex_count();
    if (n % (k - 1) != 0 || n < 3 * (k - 1)) return std::nullopt;
    for (int r = 0; r < restarts; ++r) {
        Vertex v0 = static_cast<Vertex>(Rng::stream(seed, 40 + r).below(n));
        if (h.incident(v0).empty()) return std::nullopt;
        PathSearch ps{h, v0, {}, {}, node_budget / std::max(1, restarts), 0,
                      Rng::mix(seed + 0x9131 * static_cast<std::uint64_t>(r)), {}, 0};
        ps.usable.assign(n, 1);
        ps.used.assign(n, 0);
        ps.used[v0] = 1;
        ps.fresh_left = n - 1;
        if (ps.dfs(v0)) return ps.path;
    }
    return std::nullopt;
}

}  // namespace hpr
