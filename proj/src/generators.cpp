#include "hpr/generators.hpp"

#include <charconv>
#include <stdexcept>

namespace hpr {

Hypergraph random_kgraph(const GenSpec& spec) {
    if (spec.p < 0.0 || spec.p > 1.0) throw std::invalid_argument("p outside [0,1]");
    if (spec.n < static_cast<std::size_t>(spec.k)) throw std::invalid_argument("n < k");
    const unsigned k = static_cast<unsigned>(spec.k);
    const uint128 total = binom128(spec.n, k);
    if (total > static_cast<uint128>(~0ULL))
        throw std::invalid_argument("C(n,k) exceeds sampling range");
    const std::uint64_t universe = static_cast<std::uint64_t>(total);

    Rng rng = Rng::stream(spec.seed, 0);
    std::uint64_t count = binomial_sample(rng, universe, spec.p);

    Rng pick = Rng::stream(spec.seed, 1);
    std::vector<std::uint64_t> ranks = pick.distinct(universe, count);

    std::vector<Vertex> flat;
    flat.reserve(static_cast<std::size_t>(count) * k);
    for (std::uint64_t r : ranks) {
        auto s = unrank_kset(r, static_cast<std::uint32_t>(spec.n), k);
        flat.insert(flat.end(), s.begin(), s.end());
    }
    return Hypergraph(spec.k, spec.n, std::move(flat));
}

RootedMotif loose_path(int k, int t) {
    if (k < 2) throw std::invalid_argument("loose_path: k < 2");
    if (t < 1) throw std::invalid_argument("loose_path: t < 1");
    const std::size_t n = static_cast<std::size_t>(t) * (k - 1) + 1;
    std::vector<Vertex> flat;
    for (int e = 0; e < t; ++e)
        for (int i = 0; i < k; ++i) flat.push_back(static_cast<Vertex>(e * (k - 1) + i));
    RootedMotif m{Hypergraph(k, n, std::move(flat)), {}, std::make_pair<Vertex, Vertex>(0, static_cast<Vertex>(n - 1))};
    return m;
}

Hypergraph loose_cycle(int k, int t) {
    if (k < 2) throw std::invalid_argument("loose_cycle: k < 2");
    if (t < 3) throw std::invalid_argument("loose_cycle: t < 3");
    const std::size_t n = static_cast<std::size_t>(t) * (k - 1);
    std::vector<Vertex> flat;
    for (int e = 0; e < t; ++e)
        for (int i = 0; i < k; ++i)
            flat.push_back(static_cast<Vertex>((static_cast<std::size_t>(e) * (k - 1) + i) % n));
    return Hypergraph(k, n, std::move(flat));
}

RootedMotif motif(std::string_view name, int k) {
    auto suffix_int = [&](std::string_view prefix) -> int {
        std::string_view tail = name.substr(prefix.size());
        int v = 0;
        auto res = std::from_chars(tail.data(), tail.data() + tail.size(), v);
        if (res.ec != std::errc() || res.ptr != tail.data() + tail.size())
            throw std::invalid_argument("bad motif suffix in '" + std::string(name) + "'");
        return v;
    };
    if (name == "single_edge") {
        std::vector<Vertex> flat;
        for (int i = 0; i < k; ++i) flat.push_back(static_cast<Vertex>(i));
        return RootedMotif{Hypergraph(k, static_cast<std::size_t>(k), std::move(flat)), {}, std::nullopt};
    }
    if (name == "loose_triangle") {
        return RootedMotif{loose_cycle(k, 3), {}, std::nullopt};
    }
    if (name.substr(0, 11) == "loose_path_") {
        int t = suffix_int("loose_path_");
        RootedMotif m = loose_path(k, t);
        m.ends.reset();
        return m;
    }
    if (name.substr(0, 5) == "star_") {
        int s = suffix_int("star_");
        if (s < 1) throw std::invalid_argument("star needs at least one edge");
        std::vector<Vertex> flat;
        Vertex next = 1;
        for (int e = 0; e < s; ++e) {
            flat.push_back(0);
            for (int i = 1; i < k; ++i) flat.push_back(next++);
        }
        return RootedMotif{Hypergraph(k, static_cast<std::size_t>(1 + s * (k - 1)), std::move(flat)), {}, std::nullopt};
    }
    throw std::invalid_argument("unknown motif '" + std::string(name) + "'");
}

Hypergraph plant_hole(const Hypergraph& h, const VertexSet& s) {
    if (s.universe() != h.vertex_count()) throw std::invalid_argument("plant_hole: universe mismatch");
    std::vector<Vertex> flat;
    flat.reserve(h.edge_count() * h.k());
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
        auto ed = h.edge(static_cast<EdgeId>(e));
        bool all_inside = true;
        for (Vertex v : ed)
            if (!s.contains(v)) {
                all_inside = false;
                break;
            }
        if (all_inside) continue;
        flat.insert(flat.end(), ed.begin(), ed.end());
    }
    return Hypergraph(h.k(), h.vertex_count(), std::move(flat));
}

}  // namespace hpr
