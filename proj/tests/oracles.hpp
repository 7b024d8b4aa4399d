#pragma once

// Test-only brute-force oracles, independent of the library's counting and
// search paths.

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "hpr/hypergraph.hpp"

namespace hpr::oracle {

// e(A_1,...,A_k) by full tuple enumeration.
inline std::uint64_t labelled_count(const Hypergraph& h,
                                    const std::vector<std::vector<Vertex>>& sets) {
    const unsigned k = static_cast<unsigned>(h.k());
    std::uint64_t count = 0;
    std::vector<std::size_t> idx(k, 0);
    if (sets.size() != k) return 0;
    for (const auto& s : sets)
        if (s.empty()) return 0;
    while (true) {
        std::vector<Vertex> tuple(k);
        for (unsigned i = 0; i < k; ++i) tuple[i] = sets[i][idx[i]];
        std::set<Vertex> uniq(tuple.begin(), tuple.end());
        if (uniq.size() == k && h.contains_edge(tuple)) count++;
        unsigned i = 0;
        while (i < k && ++idx[i] == sets[i].size()) idx[i++] = 0;
        if (i == k) break;
    }
    return count;
}

// Classical vertex degeneracy of a 2-uniform graph by min-degree peeling.
inline int graph_degeneracy(const Hypergraph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<int> deg(n, 0);
    std::vector<std::vector<Vertex>> adj(n);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        auto ed = g.edge(static_cast<EdgeId>(e));
        adj[ed[0]].push_back(ed[1]);
        adj[ed[1]].push_back(ed[0]);
        deg[ed[0]]++;
        deg[ed[1]]++;
    }
    std::vector<std::uint8_t> gone(n, 0);
    int best = 0;
    for (std::size_t step = 0; step < n; ++step) {
        int pick = -1;
        for (std::size_t v = 0; v < n; ++v)
            if (!gone[v] && (pick < 0 || deg[v] < deg[pick])) pick = static_cast<int>(v);
        best = std::max(best, deg[pick]);
        gone[pick] = 1;
        for (Vertex u : adj[pick])
            if (!gone[u]) deg[u]--;
    }
    return best;
}

// All rooted embeddings by brute-force injection enumeration.
inline std::uint64_t count_embeddings(const Hypergraph& h, const RootedMotif& m,
                                      const std::vector<Vertex>& targets,
                                      const std::vector<Vertex>& allowed) {
    const std::size_t fv = m.graph.vertex_count();
    std::vector<Vertex> image(fv, 0);
    std::vector<std::uint8_t> used(h.vertex_count(), 0);
    std::vector<std::uint8_t> ok_target(h.vertex_count(), 0);
    for (Vertex v : allowed) ok_target[v] = 1;
    std::vector<int> role(fv, -1);  // -1 free, else root index
    for (std::size_t i = 0; i < m.roots.size(); ++i) role[m.roots[i]] = static_cast<int>(i);

    std::uint64_t count = 0;
    auto edges_ok = [&](std::size_t placed) {
        for (std::size_t e = 0; e < m.graph.edge_count(); ++e) {
            auto ed = m.graph.edge(static_cast<EdgeId>(e));
            bool full = true;
            for (Vertex v : ed)
                if (v >= placed) full = false;
            if (!full) continue;
            std::vector<Vertex> tup;
            for (Vertex v : ed) tup.push_back(image[v]);
            if (!h.contains_edge(tup)) return false;
        }
        return true;
    };
    std::function<void(std::size_t)> rec = [&](std::size_t v) {
        if (v == fv) {
            count++;
            return;
        }
        if (role[v] >= 0) {
            Vertex y = targets[role[v]];
            if (used[y]) return;
            image[v] = y;
            used[y] = 1;
            if (edges_ok(v + 1)) rec(v + 1);
            used[y] = 0;
            return;
        }
        for (Vertex y = 0; y < h.vertex_count(); ++y) {
            if (used[y] || !ok_target[y]) continue;
            bool is_target = false;
            for (Vertex t : targets)
                if (t == y) is_target = true;
            if (is_target) continue;  // non-roots land in U minus Y
            image[v] = y;
            used[y] = 1;
            if (edges_ok(v + 1)) rec(v + 1);
            used[y] = 0;
        }
    };
    rec(0);
    return count;
}

}  // namespace hpr::oracle
