#pragma once

#include <optional>

#include "hpr/embedder.hpp"
#include "hpr/hypergraph.hpp"

namespace hpr {

struct TileResult {
    std::vector<std::vector<Vertex>> pieces;  // motif-vertex -> host-vertex images
    std::vector<Vertex> leftover;
};

// Greedy maximal F-tiling of H[S] followed by local re-tiling swaps that
// shrink the leftover (2f-set exchanges against existing pieces).
TileResult tile_with_motif(const Hypergraph& h, const RootedMotif& f, const VertexSet& s,
                           std::uint64_t seed, const SearchOptions& opt = {});

// Does `verts` induce a spanning copy of F (|verts| = v(F))?
bool hosts_motif_copy(const Hypergraph& h, const RootedMotif& f, std::span<const Vertex> verts);

// Loose Hamilton path of H[S] from a to b (a, b in S); edge sequence or
// nothing. Deterministic per seed; restarts rotate the candidate order.
std::optional<std::vector<EdgeId>> loose_ham_path(const Hypergraph& h, const VertexSet& s, Vertex a,
                                                  Vertex b, std::uint64_t seed,
                                                  std::uint64_t node_budget = 20'000'000,
                                                  int restarts = 8);

// Spanning loose cycle of H as a cyclic edge sequence.
std::optional<std::vector<EdgeId>> loose_ham_cycle(const Hypergraph& h, std::uint64_t seed,
                                                   std::uint64_t node_budget = 20'000'000,
                                                   int restarts = 8);

}  // namespace hpr
