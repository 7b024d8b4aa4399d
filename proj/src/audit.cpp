#include "hpr/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hpr/rng.hpp"
#include "hpr/parallel.hpp"

namespace hpr {

namespace {

double volume_of(const std::vector<std::vector<Vertex>>& sets) {
    double v = 1.0;
    for (const auto& s : sets) v *= static_cast<double>(s.size());
    return v;
}

// Sampled-audit tuple source, fixed and versioned (distribution_version 1).
// Kinds rotate per trial: independent uniform sets, one shared uniform set,
// low-degree prefix, high-degree prefix, pair-neighbourhood sets, and shared
// sets sized near the volume threshold.
class TupleSampler {
public:
    TupleSampler(const Hypergraph& h, double alpha_volume, std::uint64_t seed)
        : h_(h), alpha_volume_(alpha_volume), seed_(seed) {
        by_degree_.resize(h.vertex_count());
        std::iota(by_degree_.begin(), by_degree_.end(), 0);
        std::stable_sort(by_degree_.begin(), by_degree_.end(), [&](Vertex a, Vertex b) {
            return h.incident(a).size() < h.incident(b).size();
        });
    }

    std::vector<std::vector<Vertex>> draw(std::uint64_t trial, std::string& descriptor) {
        const unsigned k = static_cast<unsigned>(h_.k());
        const std::size_t n = h_.vertex_count();
        Rng rng = Rng::stream(seed_, trial);
        std::vector<std::vector<Vertex>> sets(k);
        switch (trial % 6) {
            case 0: {
                descriptor = "uniform-independent";
                for (auto& s : sets) s = random_subset(rng, 1 + rng.below(n));
                break;
            }
            case 1: {
                descriptor = "uniform-shared";
                auto s = random_subset(rng, 1 + rng.below(n));
                for (auto& t : sets) t = s;
                break;
            }
            case 2: {
                descriptor = "low-degree-prefix";
                std::size_t sz = 1 + rng.below(n);
                std::vector<Vertex> s(by_degree_.begin(), by_degree_.begin() + sz);
                for (auto& t : sets) t = s;
                break;
            }
            case 3: {
                descriptor = "high-degree-prefix";
                std::size_t sz = 1 + rng.below(n);
                std::vector<Vertex> s(by_degree_.end() - sz, by_degree_.end());
                for (auto& t : sets) t = s;
                break;
            }
            case 4: {
                descriptor = "pair-neighbourhood";
                if (h_.edge_count() == 0) {
                    for (auto& t : sets) t = random_subset(rng, 1 + rng.below(n));
                    break;
                }
                EdgeId e = static_cast<EdgeId>(rng.below(h_.edge_count()));
                auto ed = h_.edge(e);
                Vertex a = ed[0], b = ed[1];
                std::vector<std::uint8_t> mask(n, 0);
                for (EdgeId ie : h_.incident(a)) {
                    auto ied = h_.edge(ie);
                    if (std::find(ied.begin(), ied.end(), b) == ied.end()) continue;
                    for (Vertex v : ied)
                        if (v != a && v != b) mask[v] = 1;
                }
                std::vector<Vertex> s;
                for (Vertex v = 0; v < n; ++v)
                    if (mask[v]) s.push_back(v);
                if (s.empty()) s.push_back(a);
                for (auto& t : sets) t = s;
                break;
            }
            default: {
                descriptor = "threshold-sized";
                double target = std::pow(std::max(alpha_volume_, 1.0), 1.0 / k);
                std::size_t sz = std::min<std::size_t>(n, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(target)) + rng.below(3)));
                auto s = random_subset(rng, sz);
                for (auto& t : sets) t = s;
                break;
            }
        }
        return sets;
    }

private:
    std::vector<Vertex> random_subset(Rng& rng, std::size_t size) {
        auto picks = rng.distinct(h_.vertex_count(), std::min(size, h_.vertex_count()));
        return std::vector<Vertex>(picks.begin(), picks.end());
    }

    const Hypergraph& h_;
    double alpha_volume_;
    std::uint64_t seed_;
    std::vector<Vertex> by_degree_;
};

// Odometer over all (2^n)^k subset tuples.
template <typename Fn>
void exhaustive_tuples(const Hypergraph& h, std::uint64_t budget, Fn&& fn) {
    const unsigned k = static_cast<unsigned>(h.k());
    const std::size_t n = h.vertex_count();
    if (n >= 64) throw std::invalid_argument("exhaustive audit: n too large");
    const std::uint64_t per = 1ULL << n;
    double total = std::pow(static_cast<double>(per), static_cast<double>(k));
    if (total > static_cast<double>(budget))
        throw std::invalid_argument("exhaustive audit: budget exceeded");
    std::vector<std::uint64_t> masks(k, 0);
    while (true) {
        std::vector<std::vector<Vertex>> sets(k);
        for (unsigned i = 0; i < k; ++i)
            for (std::size_t v = 0; v < n; ++v)
                if (masks[i] >> v & 1) sets[i].push_back(static_cast<Vertex>(v));
        if (!fn(sets)) return;
        unsigned i = 0;
        while (i < k && ++masks[i] == per) masks[i++] = 0;
        if (i == k) return;
    }
}

}  // namespace

AuditReport audit_pseudo_random(const Hypergraph& h, const PseudoParams& params,
                                AuditReport::Mode mode, std::uint64_t trials, std::uint64_t seed,
                                const AuditOptions& opt) {
    if (params.p <= 0 || params.p > 1) throw std::invalid_argument("audit: p outside (0,1]");
    if (params.eps <= 0 || params.eps > 1) throw std::invalid_argument("audit: eps outside (0,1]");
    AuditReport rep;
    rep.mode = mode;
    rep.hypergraph_hash = h.digest();
    double nk = std::pow(static_cast<double>(h.vertex_count()), h.k());
    const double alpha_volume = params.alpha * nk;

    auto consider = [&](const std::vector<std::vector<Vertex>>& sets, const std::string& desc) {
        double vol = volume_of(sets);
        if (vol < alpha_volume || vol == 0) return true;
        std::uint64_t e = labelled_edge_count(h, sets);
        double expected = params.p * vol;
        double rel = std::abs(static_cast<double>(e) - expected) / expected;
        if (!rep.worst_violation || rel > rep.worst_violation->violation) {
            rep.worst_violation = WitnessTuple{sets, e, expected, vol, rel, desc};
        }
        return rel <= params.eps;  // stop scanning on first genuine violation
    };

    if (mode == AuditReport::Mode::exhaustive) {
        bool ok = true;
        std::uint64_t seen = 0;
        exhaustive_tuples(h, opt.exhaustive_budget, [&](const std::vector<std::vector<Vertex>>& sets) {
            seen++;
            ok = consider(sets, "exhaustive");
            return ok;
        });
        rep.trials = seen;
        rep.verdict = ok ? AuditReport::Verdict::pass : AuditReport::Verdict::fail;
        if (ok) rep.worst_violation.reset();  // keep fail witnesses only
        else rep.note = "violation found by exhaustive scan";
        return rep;
    }

    if (trials < 1) throw std::invalid_argument("audit: sampled mode needs trials >= 1");
    // Trials evaluate independently (HPR_THREADS caps the workers); the
    // worst-violation reduction keeps the report thread-count independent.
    TupleSampler sampler(h, alpha_volume, seed);
    std::vector<std::optional<WitnessTuple>> results(trials);
    parallel_for(trials, [&](std::size_t t) {
        std::string desc;
        auto sets = sampler.draw(t, desc);
        double vol = volume_of(sets);
        if (vol < alpha_volume || vol == 0) return;
        std::uint64_t e = labelled_edge_count(h, sets);
        double expected = params.p * vol;
        double rel = std::abs(static_cast<double>(e) - expected) / expected;
        results[t] = WitnessTuple{sets, e, expected, vol, rel, desc};
    });
    rep.trials = trials;
    bool ok = true;
    for (auto& r : results) {
        if (!r) continue;
        if (!rep.worst_violation || r->violation > rep.worst_violation->violation)
            rep.worst_violation = *r;
        if (r->violation > params.eps) ok = false;
    }
    rep.verdict = ok ? AuditReport::Verdict::pass : AuditReport::Verdict::fail;
    if (ok) {
        rep.worst_violation.reset();
        rep.note = "sampled pass: no violation found in " + std::to_string(trials) + " trials";
    } else {
        rep.note = "violation found by sampled scan";
    }
    return rep;
}

AuditReport audit_jumbled(const Hypergraph& h, double p, double beta, AuditReport::Mode mode,
                          std::uint64_t trials, std::uint64_t seed, const AuditOptions& opt) {
    if (p < 0 || p > 1) throw std::invalid_argument("audit_jumbled: p outside [0,1]");
    if (beta < 0) throw std::invalid_argument("audit_jumbled: beta < 0");
    AuditReport rep;
    rep.mode = mode;
    rep.hypergraph_hash = h.digest();

    auto consider = [&](const std::vector<std::vector<Vertex>>& sets, const std::string& desc) {
        double vol = volume_of(sets);
        if (vol == 0) return true;
        std::uint64_t e = labelled_edge_count(h, sets);
        double dev = std::abs(static_cast<double>(e) - p * vol);
        double allowed = beta * std::sqrt(vol);
        double ratio = allowed > 0 ? dev / allowed : (dev > 0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (!rep.worst_violation || ratio > rep.worst_violation->violation)
            rep.worst_violation = WitnessTuple{sets, e, p * vol, vol, ratio, desc};
        return dev <= allowed + 1e-12;
    };

    if (mode == AuditReport::Mode::exhaustive) {
        bool ok = true;
        std::uint64_t seen = 0;
        exhaustive_tuples(h, opt.exhaustive_budget, [&](const std::vector<std::vector<Vertex>>& sets) {
            seen++;
            ok = consider(sets, "exhaustive");
            return ok;
        });
        rep.trials = seen;
        rep.verdict = ok ? AuditReport::Verdict::pass : AuditReport::Verdict::fail;
        if (ok) rep.worst_violation.reset();
        return rep;
    }

    if (trials < 1) throw std::invalid_argument("audit_jumbled: sampled mode needs trials >= 1");
    TupleSampler sampler(h, 0.0, seed);
    std::vector<std::optional<WitnessTuple>> results(trials);
    parallel_for(trials, [&](std::size_t t) {
        std::string desc;
        auto sets = sampler.draw(t, desc);
        double vol = volume_of(sets);
        if (vol == 0) return;
        std::uint64_t e = labelled_edge_count(h, sets);
        double dev = std::abs(static_cast<double>(e) - p * vol);
        double allowed = beta * std::sqrt(vol);
        double ratio =
            allowed > 0 ? dev / allowed : (dev > 0 ? std::numeric_limits<double>::infinity() : 0.0);
        results[t] = WitnessTuple{sets, e, p * vol, vol, ratio, desc};
    });
    rep.trials = trials;
    bool ok = true;
    for (auto& r : results) {
        if (!r) continue;
        if (!rep.worst_violation || r->violation > rep.worst_violation->violation)
            rep.worst_violation = *r;
        if (r->violation > 1.0 + 1e-12) ok = false;
    }
    rep.verdict = ok ? AuditReport::Verdict::pass : AuditReport::Verdict::fail;
    if (ok) {
        rep.worst_violation.reset();
        rep.note = "sampled pass: no violation found in " + std::to_string(trials) + " trials";
    }
    return rep;
}

double jumbled_to_pseudo(double p, double beta, double eps, std::size_t n, int k) {
    if (p <= 0 || eps <= 0 || n == 0) throw std::invalid_argument("jumbled_to_pseudo: division by zero");
    double nk = std::pow(static_cast<double>(n), k);
    return beta * beta / (eps * eps * p * p * nk);
}

PseudoParams restrict_params(const PseudoParams& params, double gamma, bool* vacuous) {
    if (gamma <= 0 || gamma > 1) throw std::invalid_argument("restrict_params: gamma outside (0,1]");
    PseudoParams out = params;
    out.alpha = params.alpha / gamma;
    if (vacuous) *vacuous = out.alpha > 1.0;
    return out;
}

DensityFloorReport density_floor_check(const Hypergraph& h, double eps, int ell) {
    DensityFloorReport rep;
    const int k = h.k();
    const std::size_t n = h.vertex_count();
    double p_hat = degree_report(h).density;
    rep.s_exponent = static_cast<double>(k) * (k - 1) / (static_cast<double>(ell) * (k - 1) + k);

    // Greedy maximal edge-free set, lowest degree first.
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
        return h.incident(a).size() < h.incident(b).size();
    });
    std::vector<std::uint8_t> in_set(n, 0);
    for (Vertex v : order) {
        bool creates_edge = false;
        for (EdgeId e : h.incident(v)) {
            auto ed = h.edge(e);
            bool all = true;
            for (Vertex u : ed)
                if (u != v && !in_set[u]) all = false;
            if (all) {
                creates_edge = true;
                break;
            }
        }
        if (!creates_edge) {
            in_set[v] = 1;
            rep.witness.push_back(v);
        }
    }
    rep.independent_set = rep.witness.size();
    rep.threshold = std::pow(eps * std::pow(p_hat, ell), 1.0 / k) * static_cast<double>(n);
    rep.refuted = static_cast<double>(rep.independent_set) >= rep.threshold && rep.independent_set > 0;
    return rep;
}

}  // namespace hpr
