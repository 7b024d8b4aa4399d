#pragma once

#include <optional>

#include "hpr/degeneracy.hpp"
#include "hpr/hypergraph.hpp"

namespace hpr {

// Injective edge-preserving embedding of a rooted motif: image[x] is the
// host vertex of motif vertex x; roots map to the prescribed targets and all
// other vertices land in the allowed set.
struct RootedEmbedding {
    std::vector<Vertex> image;
};

enum class SearchOutcome { found, none, budget_exhausted };

struct FindResult {
    SearchOutcome outcome = SearchOutcome::none;
    std::optional<RootedEmbedding> embedding;
    std::uint64_t nodes = 0;
};

struct CountResult {
    std::uint64_t count = 0;
    bool complete = true;  // false when the node budget cut the search
    std::uint64_t nodes = 0;
};

struct SearchOptions {
    std::uint64_t node_budget = 5'000'000;
};

// Backtracking over the degeneracy-witness edge exposure; candidate edges
// come from intersecting neighbourhoods of already-embedded vertices.
// Deterministic: candidates are scanned in ascending order.
FindResult find_rooted_copy(const Hypergraph& h, const RootedMotif& m,
                            std::span<const Vertex> root_targets, const VertexSet& allowed,
                            const SearchOptions& opt = {});

CountResult count_rooted_copies(const Hypergraph& h, const RootedMotif& m,
                                std::span<const Vertex> root_targets, const VertexSet& allowed,
                                const SearchOptions& opt = {});

// 1/2 (c p)^{e(F)} |U|^f
double counting_lower_bound(double c, double p, int edge_count, double u_size, int f);

struct CompatibleFamily {
    std::vector<std::vector<Vertex>> template_edges;      // ordered root tuples
    std::vector<std::optional<RootedEmbedding>> copies;   // aligned with template_edges
    std::vector<std::size_t> failed;                      // indices with no copy
    std::vector<std::string> notes;                       // pragmatic-mode warnings
};

// Algorithm transcription: walk the ordered tuples, embed into the shrinking
// pool X^s, record failures as data.
CompatibleFamily greedy_builder(const Hypergraph& h, const RootedMotif& m,
                                std::span<const std::vector<Vertex>> ordered_edges,
                                const VertexSet& x, const SearchOptions& opt = {});

struct CompatibleOptions {
    double c = 0.1;                  // degree-fraction constant for the low-degree test
    double reserve_frac = 0.30;      // share of the pool held back for the retry phase
    bool strict = false;             // enforce the asymptotic preconditions verbatim
    double p = 0.0;                  // 0 = estimate from the host density
    std::uint64_t seed = 0;          // pool split randomness
    SearchOptions search;
};

// Three-phase build: edges whose roots have poor degree into the reserve go
// first (into the whole pool), the bulk goes into the main share, leftovers
// retry in the reserve.
CompatibleFamily build_compatible_family(const Hypergraph& h, const RootedMotif& m,
                                         std::span<const std::vector<Vertex>> template_edges,
                                         const VertexSet& pool, const CompatibleOptions& opt = {});

Violations verify_compatible(const CompatibleFamily& fam, const RootedMotif& m, const Hypergraph& h);

}  // namespace hpr
