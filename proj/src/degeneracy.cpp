#include "hpr/degeneracy.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace hpr {

namespace {

void require_linear(const Hypergraph& f, const char* who) {
    if (!is_linear(f)) throw std::invalid_argument(std::string(who) + ": hypergraph is not linear");
}

// Adjacency of the line graph as bitsets over edge ids (motif scale).
std::vector<std::vector<std::uint8_t>> line_adjacency(const Hypergraph& f) {
    const std::size_t m = f.edge_count();
    std::vector<std::vector<std::uint8_t>> adj(m, std::vector<std::uint8_t>(m, 0));
    for (std::size_t v = 0; v < f.vertex_count(); ++v) {
        const auto& inc = f.incident(static_cast<Vertex>(v));
        for (std::size_t i = 0; i < inc.size(); ++i)
            for (std::size_t j = i + 1; j < inc.size(); ++j) {
                adj[inc[i]][inc[j]] = 1;
                adj[inc[j]][inc[i]] = 1;
            }
    }
    return adj;
}

std::vector<std::uint8_t> root_edge_marks(const RootedMotif& m) {
    std::vector<std::uint8_t> marks(m.graph.edge_count(), 0);
    for (Vertex r : m.roots)
        for (EdgeId e : m.graph.incident(r)) marks[e] = 1;
    return marks;
}

}  // namespace

int edge_degree(const Hypergraph& f, EdgeId e) {
    require_linear(f, "edge_degree");
    if (e >= f.edge_count()) throw std::invalid_argument("edge_degree: edge out of range");
    int deg = 0;
    for (Vertex v : f.edge(e)) deg += static_cast<int>(f.incident(v).size()) - 1;
    return deg;
}

std::pair<int, int> min_max_edge_degree(const Hypergraph& f) {
    require_linear(f, "min_max_edge_degree");
    if (f.edge_count() == 0) throw std::invalid_argument("min_max_edge_degree: empty edge set");
    int lo = 0, hi = 0;
    for (std::size_t e = 0; e < f.edge_count(); ++e) {
        int d = edge_degree(f, static_cast<EdgeId>(e));
        if (e == 0) lo = hi = d;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return {lo, hi};
}

std::vector<int> exposure_weights(const Hypergraph& f, std::span<const EdgeId> order) {
    const std::size_t m = f.edge_count();
    if (order.size() != m) throw std::invalid_argument("exposure_weights: not a permutation");
    std::vector<std::uint8_t> seen(m, 0);
    for (EdgeId e : order) {
        if (e >= m || seen[e]) throw std::invalid_argument("exposure_weights: not a permutation");
        seen[e] = 1;
    }
    auto adj = line_adjacency(f);
    std::vector<int> weights(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        int w = 0;
        for (std::size_t j = 0; j < i; ++j) w += adj[order[i]][order[j]];
        weights[i] = w;
    }
    return weights;
}

DegeneracyResult edge_degeneracy(const RootedMotif& m) {
    Violations v = validate_rooted(m);
    if (!v.ok) throw std::invalid_argument("edge_degeneracy: invalid rooted motif: " + v.items.front());
    const std::size_t s = m.graph.edge_count();
    DegeneracyResult res;
    if (s == 0) return res;

    auto adj = line_adjacency(m.graph);
    auto is_root_edge = root_edge_marks(m);
    std::vector<int> deg(s, 0);
    for (std::size_t i = 0; i < s; ++i)
        deg[i] = std::accumulate(adj[i].begin(), adj[i].end(), 0);

    std::vector<std::uint8_t> removed(s, 0);
    std::vector<EdgeId> deletion;
    deletion.reserve(s);
    std::size_t root_free_left = 0;
    for (std::size_t i = 0; i < s; ++i) root_free_left += is_root_edge[i] ? 0 : 1;

    int degen = 0;
    for (std::size_t step = 0; step < s; ++step) {
        int best = -1;
        for (std::size_t i = 0; i < s; ++i) {
            if (removed[i]) continue;
            if (root_free_left > 0 && is_root_edge[i]) continue;
            if (best < 0 || deg[i] < deg[best]) best = static_cast<int>(i);
        }
        degen = std::max(degen, deg[best]);
        removed[best] = 1;
        if (!is_root_edge[best]) root_free_left--;
        deletion.push_back(static_cast<EdgeId>(best));
        for (std::size_t j = 0; j < s; ++j)
            if (!removed[j] && adj[best][j]) deg[j]--;
    }

    res.degen = degen;
    res.witness.order.assign(deletion.rbegin(), deletion.rend());
    res.witness.weights = exposure_weights(m.graph, res.witness.order);
    res.witness.max_weight = *std::max_element(res.witness.weights.begin(), res.witness.weights.end());
    return res;
}

int brute_force_degeneracy(const RootedMotif& m) {
    const std::size_t s = m.graph.edge_count();
    if (s > 10) throw std::invalid_argument("brute_force_degeneracy: too many edges");
    if (s == 0) return 0;
    auto adj = line_adjacency(m.graph);
    auto is_root_edge = root_edge_marks(m);

    std::vector<EdgeId> rooted, free_edges;
    for (std::size_t i = 0; i < s; ++i)
        (is_root_edge[i] ? rooted : free_edges).push_back(static_cast<EdgeId>(i));

    int best = static_cast<int>(s);
    std::vector<EdgeId> prefix;
    std::vector<std::uint8_t> used(s, 0);

    // DFS over admissible exposures (rooted edges first), pruning on the
    // running maximum weight.
    auto weight_of = [&](EdgeId e) {
        int w = 0;
        for (EdgeId q : prefix) w += adj[e][q];
        return w;
    };
    std::function<void(std::size_t, int)> go = [&](std::size_t placed, int run_max) {
        if (run_max >= best) return;
        if (placed == s) {
            best = run_max;
            return;
        }
        const bool rooted_phase = placed < rooted.size();
        const auto& pool = rooted_phase ? rooted : free_edges;
        for (EdgeId e : pool) {
            if (used[e]) continue;
            int w = weight_of(e);
            used[e] = 1;
            prefix.push_back(e);
            go(placed + 1, std::max(run_max, w));
            prefix.pop_back();
            used[e] = 0;
        }
    };
    go(0, 0);
    return best;
}

}  // namespace hpr
