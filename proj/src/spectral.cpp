#include "hpr/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "hpr/rng.hpp"

namespace hpr {

namespace {

// Alternating maximization of |tau_H - shift J| over unit-vector tuples:
// fixing all slots but one, the optimum is the normalized gradient and the
// attained value is its norm, so the value sequence is non-decreasing.
double alternating_max(const Hypergraph& h, double shift, int iterations, int restarts,
                       std::uint64_t seed, int& iters_used, bool& converged) {
    const unsigned k = static_cast<unsigned>(h.k());
    const std::size_t n = h.vertex_count();
    double best = 0.0;
    converged = false;
    iters_used = 0;
    if (n == 0) {
        converged = true;
        return 0.0;
    }

    std::vector<std::vector<double>> x(k, std::vector<double>(n));
    std::vector<double> grad(n);
    std::vector<Vertex> perm(k);

    for (int r = 0; r < restarts; ++r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        for (auto& xi : x) {
            double norm2 = 0;
            for (auto& v : xi) {
                v = rng.uniform01() * 2.0 - 1.0;
                norm2 += v * v;
            }
            double inv = 1.0 / std::sqrt(std::max(norm2, 1e-300));
            for (auto& v : xi) v *= inv;
        }
        double value = 0.0, prev = -1.0;
        int stable = 0;
        int it = 0;
        for (; it < iterations; ++it) {
            for (unsigned j = 0; j < k; ++j) {
                std::fill(grad.begin(), grad.end(), 0.0);
                for (std::size_t e = 0; e < h.edge_count(); ++e) {
                    auto ed = h.edge(static_cast<EdgeId>(e));
                    std::vector<Vertex> verts(ed.begin(), ed.end());
                    std::sort(verts.begin(), verts.end());
                    do {
                        double prod = 1.0;
                        for (unsigned i = 0; i < k; ++i)
                            if (i != j) prod *= x[i][verts[i]];
                        grad[verts[j]] += prod;
                    } while (std::next_permutation(verts.begin(), verts.end()));
                }
                if (shift != 0.0) {
                    double prod_sums = 1.0;
                    for (unsigned i = 0; i < k; ++i) {
                        if (i == j) continue;
                        double s = 0;
                        for (double v : x[i]) s += v;
                        prod_sums *= s;
                    }
                    for (auto& g : grad) g -= shift * prod_sums;
                }
                double norm2 = 0;
                for (double g : grad) norm2 += g * g;
                double norm = std::sqrt(norm2);
                if (norm < 1e-300) continue;  // flat slice; keep current slot vector
                double inv = 1.0 / norm;
                for (std::size_t v = 0; v < n; ++v) x[j][v] = grad[v] * inv;
                value = norm;
            }
            if (std::abs(value - prev) <= 1e-13 * std::max(1.0, value)) {
                if (++stable >= 3) {
                    converged = true;
                    break;
                }
            } else {
                stable = 0;
            }
            prev = value;
        }
        iters_used = std::max(iters_used, it);
        best = std::max(best, value);
    }
    return best;
}

double exact_spectral_norm_k2(const Hypergraph& h, double shift) {
    const std::size_t n = h.vertex_count();
    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, -shift);
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
        auto ed = h.edge(static_cast<EdgeId>(e));
        a(ed[0], ed[1]) += 1.0;
        a(ed[1], ed[0]) += 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    double best = 0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        best = std::max(best, std::abs(solver.eigenvalues()[i]));
    return best;
}

}  // namespace

SpectralReport estimate_second_eigenvalue(const Hypergraph& h, int iterations, int restarts,
                                          std::uint64_t seed) {
    SpectralReport rep;
    const std::size_t n = h.vertex_count();
    if (n == 0) {
        rep.converged = true;
        return rep;
    }
    double p_hat = degree_report(h).density;
    bool conv1 = false, conv2 = false;
    int it1 = 0, it2 = 0;
    rep.lambda1 = alternating_max(h, 0.0, iterations, restarts, Rng::mix(seed ^ 0x11), it1, conv1);
    rep.lambda2 = alternating_max(h, p_hat, iterations, restarts, Rng::mix(seed ^ 0x22), it2, conv2);
    rep.iterations = std::max(it1, it2);
    rep.converged = conv1 && conv2;
    if (h.k() == 2 && n <= 4096) {
        rep.exact_lambda1 = exact_spectral_norm_k2(h, 0.0);
        rep.exact_lambda2 = exact_spectral_norm_k2(h, p_hat);
    }
    return rep;
}

}  // namespace hpr
