#pragma once

#include <string_view>

#include "hpr/hypergraph.hpp"
#include "hpr/rng.hpp"

namespace hpr {

struct GenSpec {
    int k = 3;
    std::size_t n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
};

// G(n, p) analogue for k-graphs: each k-set is an edge independently with
// probability p. Draws a Binomial(C(n,k), p) count, then samples that many
// distinct k-sets by rank-unranking. Identical seed, identical output.
Hypergraph random_kgraph(const GenSpec& spec);

// Loose path with t edges on t(k-1)+1 vertices; ends = first and last vertex.
RootedMotif loose_path(int k, int t);

// Loose cycle with t >= 3 edges on t(k-1) vertices.
Hypergraph loose_cycle(int k, int t);

// Motif library: "single_edge", "loose_path_<t>", "loose_triangle", "star_<s>".
RootedMotif motif(std::string_view name, int k);

// Remove every edge lying entirely inside S (negative control for audits).
Hypergraph plant_hole(const Hypergraph& h, const VertexSet& s);

}  // namespace hpr
