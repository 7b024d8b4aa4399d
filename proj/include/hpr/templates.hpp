#pragma once

#include <optional>

#include "hpr/hypergraph.hpp"
#include "hpr/rng.hpp"

namespace hpr {

// (r,m)-template: r-partite r-graph with parts Y_0 (4m), Y_1..Y_{r-1} (3m)
// and flexible set Z = the first 2m vertices of Y_0. Vertices are indexed
// part by part: Y_0 = [0, 4m), Y_i = [4m + 3m(i-1), 4m + 3m i).
struct Template {
    int r = 2;
    int m = 1;
    std::vector<std::uint32_t> edges;  // flat r-tuples, coordinate t lies in part t
    int degree_cap = 40;
    std::uint64_t seed = 0;

    std::size_t edge_count() const { return edges.size() / r; }
    std::span<const std::uint32_t> edge(std::size_t j) const {
        return {edges.data() + j * r, static_cast<std::size_t>(r)};
    }
    std::size_t z_size() const { return 2 * static_cast<std::size_t>(m); }
    std::size_t y0_size() const { return 4 * static_cast<std::size_t>(m); }
    std::size_t vertex_count() const { return (4 + 3 * static_cast<std::size_t>(r - 1)) * m; }
    int max_degree() const;
};

struct TemplateOptions {
    int degree_cap = 40;
    int retries = 500;
    std::size_t exhaustive_budget = 1'000'000;  // cap on C(2m, m)
    int sampled_trials = 2000;
    std::size_t prune_target = 0;     // 0 = no pruning; otherwise shrink e(T) toward this
    std::size_t sparsify_target = 0;  // 0 = off; anneal the edge set toward this count
    int sparsify_iterations = 30000;
};

struct FlexReport {
    bool pass = false;
    bool exhaustive = false;
    std::size_t checked = 0;
    std::optional<std::vector<std::uint32_t>> witness;  // failing Z'
};

// Randomized bipartite construction between Y_0 and Y_1, verified flexible,
// retried with fresh randomness, then extended to uniformity r by cloning
// the Y_1 coordinate. Deterministic per (r, m, seed).
Template build_template(int r, int m, std::uint64_t seed, const TemplateOptions& opt = {});

// Clone-extension: each 2-edge (a, b) becomes (a, b, b^2, ..., b^{r-1}).
Template extend_template(const Template& t2, int r_target);

FlexReport verify_flexibility(const Template& t, bool exhaustive, std::size_t budget, int trials,
                              std::uint64_t seed);

// Perfect matching of T[V \ Z'] as template edge indices, or nothing.
// |Z'| must equal m; reduces to bipartite matching on the base projection.
std::optional<std::vector<std::uint32_t>> matching_after_removal(const Template& t,
                                                                 std::span<const std::uint32_t> zprime);

}  // namespace hpr
