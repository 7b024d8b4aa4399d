#pragma once

#include "hpr/degeneracy.hpp"
#include "hpr/hypergraph.hpp"

namespace hpr {

// Grid absorber for a linear F on f vertices: f^2 vertices, the diagonal as
// roots, row copies forming the complete F-factor and shifted-diagonal copies
// forming the internal one.
struct FactorAbsorber {
    RootedMotif motif;
    // Each entry maps F-vertex ell -> absorber vertex (image of one F-copy).
    std::vector<std::vector<Vertex>> complete_factor;
    std::vector<std::vector<Vertex>> internal_factor;
    Hypergraph source;
    int degeneracy_bound = 0;  // degen(F) + Delta'(F) + k
};

// One absorbing gadget of the path absorber, kept so the verifier can point
// at local structure.
struct Gadget {
    std::vector<Vertex> a, a_prime, b, c;
    EdgeId e, e_prime, f, f_prime, g;
};

// Path absorber on 9k^2-23k+15 vertices with k-1 roots and two distinguished
// ends; complete and internal loose paths share the same ends.
struct PathAbsorber {
    RootedMotif motif;  // ends stored in motif.ends
    std::vector<EdgeId> complete_path;
    std::vector<EdgeId> internal_path;
    std::vector<Gadget> gadgets;
    std::vector<EdgeId> connectors;  // h_1..h_{2k-4}
};

FactorAbsorber build_factor_absorber(const Hypergraph& f);
PathAbsorber build_path_absorber(int k);

Violations verify_factor_absorber(const FactorAbsorber& a);
Violations verify_path_absorber(const PathAbsorber& a);

// Shared helper: edge ids form a loose path (consecutive edges meet in
// exactly one vertex, non-consecutive are disjoint) from y1 to y2 covering
// exactly `cover`.
Violations check_loose_path(const Hypergraph& h, std::span<const EdgeId> path, Vertex y1, Vertex y2,
                            const VertexSet& cover);

}  // namespace hpr
