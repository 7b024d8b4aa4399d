#pragma once

#include <stdexcept>

#include "hpr/absorbers.hpp"
#include "hpr/embedder.hpp"
#include "hpr/templates.hpp"

namespace hpr {

struct PipelineConfig {
    double c = 0.1;           // degree-fraction constant
    double gamma = 0.0025;    // Z_1/Z_2 imbalance and leftover threshold, fraction of n
    double beta = 0.013;      // m = ceil(beta n)
    double alpha_frac = 0.025;  // reserve W size, fraction of n
    int template_degree_cap = 40;
    bool strict = false;      // strict = paper hierarchy checks, refuses at desk scale
    std::uint64_t seed = 1;
    double p = 0.0;           // 0 = estimate from host density

    std::uint64_t embed_node_budget = 5'000'000;
    int template_retries = 500;
    std::size_t flex_budget = 1'000'000;
    int flex_trials = 2000;
    int sparsify_iterations = 60'000;
    std::uint64_t direct_node_budget = 60'000'000;

    void validate() const;
};

// Phase-tagged failure: the pipeline aborts with a diagnostic instead of
// silently switching algorithms.
class PhaseError : public std::runtime_error {
public:
    PhaseError(std::string phase, const std::string& msg)
        : std::runtime_error(phase + ": " + msg), phase_(std::move(phase)) {}
    const std::string& phase() const { return phase_; }

private:
    std::string phase_;
};

enum class SpanMode { factor, ham };

struct CoverResult {
    std::vector<Vertex> r_hat;
    std::vector<std::vector<Vertex>> factor_pieces;  // factor mode: F-copy images
    std::vector<std::vector<Vertex>> path_edges;     // path mode: edge tuples b1 -> bt
};

// Small-set cover: factor mode tiles B-hat (padded to a multiple of f) with
// grid absorbers and keeps their complete factors; path mode threads the
// listed vertices, in order, with length-3 loose paths.
CoverResult cover_small_set(const Hypergraph& h, std::span<const Vertex> b_ordered,
                            const VertexSet& x, SpanMode mode, const RootedMotif* f,
                            const PipelineConfig& cfg, std::uint64_t stream);

struct AbsorbingStructure {
    SpanMode mode = SpanMode::factor;
    RootedMotif f_motif;  // factor mode source F
    std::size_t m = 0;
    std::vector<Vertex> a_vertices;  // A (sorted)
    std::vector<Vertex> u_patch;     // U (sorted)
    std::vector<Vertex> z1, z2;      // Z = z1 + z2, in template order

    Template tmpl;
    std::vector<Vertex> tmpl_to_host;
    CompatibleFamily family;

    // factor witnesses
    std::optional<FactorAbsorber> factor_absorber;
    std::vector<std::vector<Vertex>> u_factor_pieces;

    // ham witnesses
    std::optional<PathAbsorber> path_absorber;
    std::optional<std::pair<Vertex, Vertex>> ends;  // (a1, a2)
    std::vector<std::pair<Vertex, Vertex>> copy_ends;
    std::vector<std::vector<std::vector<Vertex>>> connectors;  // edge tuples per joint
    std::vector<std::vector<Vertex>> u_path_edges;             // u0 -> v0
    std::pair<Vertex, Vertex> u_path_ends{0, 0};

    std::vector<std::string> notes;
};

AbsorbingStructure build_absorbing_structure(const Hypergraph& h, SpanMode mode,
                                             const RootedMotif* f, const PipelineConfig& cfg);

// Flexibility in action: the spanning structure of H[(A u U) \ Z'] certified
// by the stored witnesses, for any m-subset Z' of Z.
std::vector<std::vector<Vertex>> extract_factor(const AbsorbingStructure& s,
                                                std::span<const Vertex> zprime);
std::vector<std::vector<Vertex>> extract_spanning_path(const AbsorbingStructure& s,
                                                       std::span<const Vertex> zprime);

struct CoverOutcome {
    std::vector<Vertex> zprime;
    std::vector<std::vector<Vertex>> factor_pieces;
    std::vector<std::vector<Vertex>> path_edges;  // ham: a2 -> a1
    std::vector<std::string> notes;
};

CoverOutcome complete_cover(const Hypergraph& h, const std::vector<Vertex>& v_rest,
                            const AbsorbingStructure& s, const PipelineConfig& cfg);

struct SpanningCertificate {
    enum class Kind { matching, factor, ham_cycle } kind = Kind::matching;
    std::vector<std::vector<Vertex>> pieces;
    std::vector<std::string> provenance;
    bool verified = false;
};

SpanningCertificate find_perfect_matching(const Hypergraph& h, const PipelineConfig& cfg);
SpanningCertificate find_f_factor(const Hypergraph& h, const RootedMotif& f,
                                  const PipelineConfig& cfg);
SpanningCertificate find_loose_hamilton_cycle(const Hypergraph& h, const PipelineConfig& cfg);

Violations verify_certificate(const Hypergraph& h, const SpanningCertificate& cert,
                              const RootedMotif* f = nullptr);

// Budget feasibility of the absorbing structure at (n, config); the failure
// string carries the arithmetic.
bool absorption_feasible(const Hypergraph& h, SpanMode mode, const RootedMotif* f,
                         const PipelineConfig& cfg, std::string* why = nullptr);

}  // namespace hpr
