#pragma once

#include "hpr/hypergraph.hpp"

namespace hpr {

// Permutation of E(F) with per-position weights: weights[i] counts earlier
// edges intersecting the edge at position i. For rooted motifs every edge
// containing a root must appear before every root-free edge.
struct EdgeExposure {
    std::vector<EdgeId> order;
    std::vector<int> weights;
    int max_weight = 0;
};

// deg(e) in the line graph; requires F linear (the identity
// deg(e) = sum_{v in e}(deg(v)-1) is what the callers rely on).
int edge_degree(const Hypergraph& f, EdgeId e);

std::pair<int, int> min_max_edge_degree(const Hypergraph& f);

struct DegeneracyResult {
    int degen = 0;
    EdgeExposure witness;
};

// Greedy min-degree peeling of the line graph under root precedence
// (root-free edges peel first; peeling is reverse exposure). Ties break on
// the smallest edge index.
DegeneracyResult edge_degeneracy(const RootedMotif& m);

// Minimum over all admissible exposures of the maximum weight; e(F) <= 10.
int brute_force_degeneracy(const RootedMotif& m);

std::vector<int> exposure_weights(const Hypergraph& f, std::span<const EdgeId> order);

}  // namespace hpr
