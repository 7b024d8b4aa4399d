#pragma once

#include <optional>
#include <string>

#include "hpr/hypergraph.hpp"

namespace hpr {

struct PseudoParams {
    double p = 0.5;
    double alpha = 0.1;  // volume threshold as a fraction of n^k
    double eps = 0.1;
};

struct WitnessTuple {
    std::vector<std::vector<Vertex>> sets;
    std::uint64_t observed = 0;
    double expected = 0.0;      // p * prod |A_i|
    double volume = 0.0;        // prod |A_i|
    double violation = 0.0;     // relative error (pseudo) or excess ratio (jumbled)
    std::string descriptor;
};

struct AuditReport {
    enum class Mode { exhaustive, sampled };
    enum class Verdict { pass, fail, inconclusive };
    Mode mode = Mode::sampled;
    std::uint64_t trials = 0;
    std::optional<WitnessTuple> worst_violation;
    Verdict verdict = Verdict::inconclusive;
    std::uint64_t hypergraph_hash = 0;
    int distribution_version = 1;
    std::string note;
};

inline const char* to_string(AuditReport::Verdict v) {
    switch (v) {
        case AuditReport::Verdict::pass: return "pass";
        case AuditReport::Verdict::fail: return "fail";
        default: return "inconclusive";
    }
}

struct AuditOptions {
    std::uint64_t exhaustive_budget = 100'000'000;  // subset tuples examined
};

// Check e(A_1,...,A_k) = (1 +- eps) p prod|A_i| over tuples with
// prod|A_i| >= alpha n^k. Fail verdicts always carry a concrete witness;
// a sampled pass only means "no violation found".
AuditReport audit_pseudo_random(const Hypergraph& h, const PseudoParams& params,
                                AuditReport::Mode mode, std::uint64_t trials, std::uint64_t seed,
                                const AuditOptions& opt = {});

// Additive criterion |e - p prod| <= beta sqrt(prod), all tuples.
AuditReport audit_jumbled(const Hypergraph& h, double p, double beta, AuditReport::Mode mode,
                          std::uint64_t trials, std::uint64_t seed, const AuditOptions& opt = {});

// alpha = beta^2 / (eps^2 p^2 n^k)
double jumbled_to_pseudo(double p, double beta, double eps, std::size_t n, int k);

// Fact: restricting to U with |U| >= gamma^{1/k} n keeps (p, alpha/gamma, eps).
PseudoParams restrict_params(const PseudoParams& params, double gamma, bool* vacuous = nullptr);

struct DensityFloorReport {
    bool refuted = false;          // true: H is certifiably not (p, eps p^ell, ·)-pseudo-random
    std::size_t independent_set = 0;
    double threshold = 0.0;        // (eps p^ell)^{1/k} n
    double s_exponent = 0.0;       // k(k-1) / (ell(k-1)+k)
    std::vector<Vertex> witness;
};

// Greedy maximal independent set I; if |I|^k >= eps p^ell n^k with
// e(I,...,I) = 0 the pseudo-randomness claim is contradicted.
DensityFloorReport density_floor_check(const Hypergraph& h, double eps, int ell);

}  // namespace hpr
