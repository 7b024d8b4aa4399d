#pragma once

#include <optional>

#include "hpr/hypergraph.hpp"

namespace hpr {

// Estimates of the k-linear form norms: lambda1 = |tau_H|, lambda2 =
// |tau_H - (k! e(H)/n^k) J|. Alternating maximization gives lower-bound
// estimates (exact only for k = 2, where the symmetric eigensolver runs
// alongside).
struct SpectralReport {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    int iterations = 0;
    bool converged = false;
    std::optional<double> exact_lambda1;  // k = 2 only
    std::optional<double> exact_lambda2;  // k = 2 only
};

SpectralReport estimate_second_eigenvalue(const Hypergraph& h, int iterations, int restarts,
                                          std::uint64_t seed);

}  // namespace hpr
