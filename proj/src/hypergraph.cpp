#include "hpr/hypergraph.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hpr {

namespace {

constexpr std::size_t kDensePairLimit = 2048;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

void Violations::fail(std::string msg) {
    ok = false;
    items.push_back(std::move(msg));
}

VertexSet::VertexSet(std::size_t n, std::span<const Vertex> items) : mask_(n, 0) {
    items_.assign(items.begin(), items.end());
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    for (Vertex v : items_) {
        if (v >= n) throw std::invalid_argument("VertexSet: vertex out of range");
        mask_[v] = 1;
    }
}

VertexSet VertexSet::full(std::size_t n) {
    std::vector<Vertex> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<Vertex>(i);
    return VertexSet(n, all);
}

Hypergraph::Hypergraph(int k, std::size_t n) : k_(k), n_(n) {
    if (k < 2 || k > kMaxUniformity) throw std::invalid_argument("uniformity k out of range");
    build_indices();
}

Hypergraph::Hypergraph(int k, std::size_t n, const std::vector<std::vector<Vertex>>& edges)
    : k_(k), n_(n) {
    if (k < 2 || k > kMaxUniformity) throw std::invalid_argument("uniformity k out of range");
    data_.reserve(edges.size() * k);
    for (const auto& e : edges) {
        if (static_cast<int>(e.size()) != k)
            throw std::invalid_argument("edge does not have k vertices");
        for (Vertex v : e) data_.push_back(v);
    }
    build_indices();
}

Hypergraph::Hypergraph(int k, std::size_t n, std::vector<Vertex> flat_edges)
    : k_(k), n_(n), data_(std::move(flat_edges)) {
    if (k < 2 || k > kMaxUniformity) throw std::invalid_argument("uniformity k out of range");
    if (data_.size() % k != 0) throw std::invalid_argument("flat edge data not a multiple of k");
    build_indices();
}

void Hypergraph::build_indices() {
    const std::size_t m = edge_count();
    const unsigned k = static_cast<unsigned>(k_);

    for (std::size_t e = 0; e < m; ++e) {
        Vertex* p = data_.data() + e * k;
        std::sort(p, p + k);
        for (unsigned i = 0; i < k; ++i) {
            if (p[i] >= n_) throw std::invalid_argument("edge vertex out of range");
            if (i + 1 < k && p[i] == p[i + 1])
                throw std::invalid_argument("edge has repeated vertex");
        }
    }

    lex_order_.resize(m);
    for (std::size_t e = 0; e < m; ++e) lex_order_[e] = static_cast<EdgeId>(e);
    const unsigned bits = n_ <= 1 ? 1 : std::bit_width(n_ - 1);
    if (bits * k <= 64) {
        std::vector<std::pair<std::uint64_t, EdgeId>> keys(m);
        for (std::size_t e = 0; e < m; ++e) {
            std::uint64_t key = 0;
            const Vertex* p = data_.data() + e * k;
            for (unsigned i = 0; i < k; ++i) key = (key << bits) | p[i];
            keys[e] = {key, static_cast<EdgeId>(e)};
        }
        std::sort(keys.begin(), keys.end());
        for (std::size_t i = 0; i < m; ++i) {
            lex_order_[i] = keys[i].second;
            if (i > 0 && keys[i].first == keys[i - 1].first)
                throw std::invalid_argument("duplicate edge");
        }
    } else {
        auto cmp = [&](EdgeId a, EdgeId b) {
            const Vertex* pa = data_.data() + static_cast<std::size_t>(a) * k;
            const Vertex* pb = data_.data() + static_cast<std::size_t>(b) * k;
            return std::lexicographical_compare(pa, pa + k, pb, pb + k);
        };
        std::sort(lex_order_.begin(), lex_order_.end(), cmp);
        for (std::size_t i = 1; i < m; ++i) {
            auto ea = edge(lex_order_[i - 1]), eb = edge(lex_order_[i]);
            if (std::equal(ea.begin(), ea.end(), eb.begin())) throw std::invalid_argument("duplicate edge");
        }
    }

    std::vector<std::uint32_t> counts(n_, 0);
    for (Vertex v : data_) counts[v]++;
    incidence_.assign(n_, {});
    for (std::size_t v = 0; v < n_; ++v) incidence_[v].reserve(counts[v]);
    for (std::size_t e = 0; e < m; ++e)
        for (unsigned i = 0; i < k; ++i) incidence_[data_[e * k + i]].push_back(static_cast<EdgeId>(e));

    pair_dense_mode_ = n_ <= kDensePairLimit;
    if (pair_dense_mode_) pair_dense_.assign(n_ * n_, 0);
    for (std::size_t e = 0; e < m; ++e) {
        const Vertex* p = data_.data() + e * k;
        for (unsigned i = 0; i < k; ++i)
            for (unsigned j = i + 1; j < k; ++j) {
                if (pair_dense_mode_)
                    pair_dense_[static_cast<std::size_t>(p[i]) * n_ + p[j]]++;
                else
                    pair_sparse_[static_cast<std::uint64_t>(p[i]) * n_ + p[j]]++;
            }
    }
}

std::uint32_t Hypergraph::pair_codegree(Vertex u, Vertex v) const {
    if (u == v) return 0;
    if (u > v) std::swap(u, v);
    if (pair_dense_mode_) return pair_dense_[static_cast<std::size_t>(u) * n_ + v];
    auto it = pair_sparse_.find(static_cast<std::uint64_t>(u) * n_ + v);
    return it == pair_sparse_.end() ? 0 : it->second;
}

std::uint32_t Hypergraph::max_pair_codegree() const {
    std::uint32_t best = 0;
    if (pair_dense_mode_) {
        for (std::uint32_t c : pair_dense_) best = std::max(best, c);
    } else {
        for (const auto& [key, c] : pair_sparse_) best = std::max(best, c);
    }
    return best;
}

bool Hypergraph::contains_edge(std::span<const Vertex> verts) const {
    return find_edge(verts).has_value();
}

std::optional<EdgeId> Hypergraph::find_edge(std::span<const Vertex> verts) const {
    if (verts.size() != static_cast<std::size_t>(k_)) return std::nullopt;
    std::array<Vertex, kMaxUniformity> key{};
    std::copy(verts.begin(), verts.end(), key.begin());
    std::sort(key.begin(), key.begin() + k_);
    auto cmp = [&](EdgeId a, const Vertex* b) {
        auto ea = edge(a);
        return std::lexicographical_compare(ea.begin(), ea.end(), b, b + k_);
    };
    auto it = std::lower_bound(lex_order_.begin(), lex_order_.end(), key.data(), cmp);
    if (it == lex_order_.end()) return std::nullopt;
    auto e = edge(*it);
    if (std::equal(e.begin(), e.end(), key.begin())) return *it;
    return std::nullopt;
}

std::uint64_t Hypergraph::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::uint32_t kk = static_cast<std::uint32_t>(k_), nn = static_cast<std::uint32_t>(n_);
    h = fnv1a(h, &kk, sizeof kk);
    h = fnv1a(h, &nn, sizeof nn);
    for (EdgeId e : lex_order_) {
        auto ed = edge(e);
        h = fnv1a(h, ed.data(), ed.size() * sizeof(Vertex));
    }
    return h;
}

namespace {

// Permanent of the k x k 0/1 matrix whose (i, j) entry is "column j admissible
// for row i", given per-column row masks. Subset DP, O(2^k k).
std::uint64_t permanent_from_columns(std::span<const std::uint32_t> col_masks) {
    const unsigned k = static_cast<unsigned>(col_masks.size());
    for (auto m : col_masks)
        if (m == 0) return 0;
    std::array<std::uint64_t, 256> dp{};
    dp[0] = 1;
    const std::uint32_t full = (1u << k) - 1;
    for (std::uint32_t s = 1; s <= full; ++s) {
        const unsigned c = static_cast<unsigned>(std::popcount(s)) - 1;
        std::uint32_t avail = s & col_masks[c];
        std::uint64_t acc = 0;
        while (avail) {
            std::uint32_t bit = avail & (~avail + 1);
            acc += dp[s ^ bit];
            avail ^= bit;
        }
        dp[s] = acc;
    }
    return dp[full];
}

}  // namespace

std::uint64_t labelled_edge_count(const Hypergraph& h, std::span<const VertexSet> sets) {
    const unsigned k = static_cast<unsigned>(h.k());
    if (sets.size() != k) throw std::invalid_argument("labelled_edge_count: need k sets");
    for (const auto& s : sets)
        if (s.universe() != h.vertex_count())
            throw std::invalid_argument("labelled_edge_count: set universe mismatch");
    std::uint64_t total = 0;
    std::array<std::uint32_t, kMaxUniformity> cols{};
    const std::size_t m = h.edge_count();
    for (std::size_t e = 0; e < m; ++e) {
        auto ed = h.edge(static_cast<EdgeId>(e));
        bool any_zero = false;
        for (unsigned j = 0; j < k; ++j) {
            std::uint32_t mask = 0;
            for (unsigned i = 0; i < k; ++i)
                if (sets[i].contains(ed[j])) mask |= 1u << i;
            if (mask == 0) {
                any_zero = true;
                break;
            }
            cols[j] = mask;
        }
        if (any_zero) continue;
        total += permanent_from_columns({cols.data(), k});
    }
    return total;
}

std::uint64_t labelled_edge_count(const Hypergraph& h, const std::vector<std::vector<Vertex>>& sets) {
    std::vector<VertexSet> vs;
    vs.reserve(sets.size());
    for (const auto& s : sets) vs.emplace_back(h.vertex_count(), std::span<const Vertex>(s));
    return labelled_edge_count(h, vs);
}

std::uint64_t degree_into(const Hypergraph& h, Vertex v, std::span<const VertexSet> sets) {
    const unsigned k = static_cast<unsigned>(h.k());
    if (v >= h.vertex_count()) throw std::invalid_argument("degree_into: vertex out of range");
    if (sets.size() != k - 1) throw std::invalid_argument("degree_into: need k-1 sets");
    std::uint64_t total = 0;
    std::array<std::uint32_t, kMaxUniformity> cols{};
    for (EdgeId e : h.incident(v)) {
        auto ed = h.edge(e);
        unsigned j = 0;
        bool any_zero = false;
        for (Vertex u : ed) {
            if (u == v) continue;
            std::uint32_t mask = 0;
            for (unsigned i = 0; i + 1 < k; ++i)
                if (sets[i].contains(u)) mask |= 1u << i;
            if (mask == 0) {
                any_zero = true;
                break;
            }
            cols[j++] = mask;
        }
        if (any_zero) continue;
        total += permanent_from_columns({cols.data(), k - 1});
    }
    return total;
}

std::uint64_t degree_into_set(const Hypergraph& h, Vertex v, const VertexSet& u) {
    std::vector<VertexSet> sets(static_cast<std::size_t>(h.k()) - 1, u);
    return degree_into(h, v, sets);
}

std::vector<std::uint64_t> degrees_into_set(const Hypergraph& h, const VertexSet& s) {
    const unsigned k = static_cast<unsigned>(h.k());
    std::uint64_t fact = 1;
    for (unsigned i = 2; i < k; ++i) fact *= i;  // (k-1)!
    std::vector<std::uint64_t> deg(h.vertex_count(), 0);
    const std::size_t m = h.edge_count();
    for (std::size_t e = 0; e < m; ++e) {
        auto ed = h.edge(static_cast<EdgeId>(e));
        unsigned inside = 0;
        Vertex outsider = 0;
        for (Vertex v : ed)
            if (s.contains(v))
                inside++;
            else
                outsider = v;
        if (inside == k) {
            for (Vertex v : ed) deg[v] += fact;
        } else if (inside == k - 1) {
            deg[outsider] += fact;
        }
    }
    return deg;
}

DegreeReport degree_report(const Hypergraph& h) {
    DegreeReport r;
    const unsigned k = static_cast<unsigned>(h.k());
    std::uint64_t fact = 1;
    for (unsigned i = 2; i < k; ++i) fact *= i;
    std::uint64_t mind = ~0ULL;
    for (std::size_t v = 0; v < h.vertex_count(); ++v)
        mind = std::min<std::uint64_t>(mind, h.vertex_edge_count(static_cast<Vertex>(v)) * fact);
    r.min_vertex_degree = h.vertex_count() == 0 ? 0 : mind;
    r.max_pair_degree = h.max_pair_codegree();
    double nk = 1;
    for (unsigned i = 0; i < k; ++i) nk *= static_cast<double>(h.vertex_count());
    std::uint64_t kfact = fact * k;
    r.density = nk == 0 ? 0.0 : static_cast<double>(kfact) * static_cast<double>(h.edge_count()) / nk;
    return r;
}

bool is_linear(const Hypergraph& h) { return h.max_pair_codegree() <= 1; }

Hypergraph line_graph(const Hypergraph& h) {
    const std::size_t m = h.edge_count();
    std::vector<std::vector<Vertex>> pairs;
    for (std::size_t v = 0; v < h.vertex_count(); ++v) {
        const auto& inc = h.incident(static_cast<Vertex>(v));
        for (std::size_t i = 0; i < inc.size(); ++i)
            for (std::size_t j = i + 1; j < inc.size(); ++j) {
                Vertex a = inc[i], b = inc[j];
                if (a > b) std::swap(a, b);
                pairs.push_back({a, b});
            }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return Hypergraph(2, m, pairs);
}

Induced induced(const Hypergraph& h, const VertexSet& s) {
    if (s.universe() != h.vertex_count()) throw std::invalid_argument("induced: universe mismatch");
    std::vector<Vertex> old_to_new(h.vertex_count(), 0);
    const auto& kept = s.items();
    for (std::size_t i = 0; i < kept.size(); ++i) old_to_new[kept[i]] = static_cast<Vertex>(i);
    std::vector<Vertex> flat;
    const unsigned k = static_cast<unsigned>(h.k());
    for (std::size_t e = 0; e < h.edge_count(); ++e) {
        auto ed = h.edge(static_cast<EdgeId>(e));
        bool all = true;
        for (Vertex v : ed)
            if (!s.contains(v)) {
                all = false;
                break;
            }
        if (!all) continue;
        for (Vertex v : ed) flat.push_back(old_to_new[v]);
        (void)k;
    }
    return Induced{Hypergraph(h.k(), kept.size(), std::move(flat)), kept};
}

Violations validate_rooted(const RootedMotif& m) {
    Violations out;
    const auto& g = m.graph;
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        for (std::size_t w = v + 1; w < g.vertex_count(); ++w)
            if (g.pair_codegree(static_cast<Vertex>(v), static_cast<Vertex>(w)) > 1)
                out.fail("not linear: pair (" + std::to_string(v) + "," + std::to_string(w) +
                         ") lies in " + std::to_string(g.pair_codegree(static_cast<Vertex>(v), static_cast<Vertex>(w))) +
                         " edges");
    std::vector<std::uint8_t> is_root(g.vertex_count(), 0);
    for (Vertex r : m.roots) {
        if (r >= g.vertex_count()) {
            out.fail("root out of range");
            continue;
        }
        if (is_root[r]) out.fail("repeated root " + std::to_string(r));
        is_root[r] = 1;
    }
    for (std::size_t i = 0; i < m.roots.size(); ++i) {
        for (std::size_t j = i + 1; j < m.roots.size(); ++j) {
            Vertex xi = m.roots[i], xj = m.roots[j];
            if (xi >= g.vertex_count() || xj >= g.vertex_count()) continue;
            for (EdgeId ei : g.incident(xi)) {
                auto edi = g.edge(ei);
                for (EdgeId ej : g.incident(xj)) {
                    if (ei == ej) {
                        out.fail("roots " + std::to_string(xi) + "," + std::to_string(xj) +
                                 " share edge " + std::to_string(ei));
                        continue;
                    }
                    auto edj = g.edge(ej);
                    bool meet = false;
                    for (Vertex a : edi)
                        for (Vertex b : edj)
                            if (a == b) meet = true;
                    if (meet)
                        out.fail("edges " + std::to_string(ei) + " (root " + std::to_string(xi) +
                                 ") and " + std::to_string(ej) + " (root " + std::to_string(xj) +
                                 ") intersect");
                }
            }
        }
    }
    if (m.ends) {
        auto [y1, y2] = *m.ends;
        if (y1 >= g.vertex_count() || y2 >= g.vertex_count()) out.fail("end out of range");
        else {
            if (y1 == y2) out.fail("ends coincide");
            if (is_root[y1] || is_root[y2]) out.fail("end is a root");
        }
    }
    return out;
}

Hypergraph read_hg(std::istream& in) {
    std::string line;
    int k = -1;
    std::size_t n = 0;
    std::vector<Vertex> flat;
    while (std::getline(in, line)) {
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] == '#') continue;
        std::istringstream ls(line);
        if (k < 0) {
            long long kk, nn;
            if (!(ls >> kk >> nn) || kk < 2 || nn < 0)
                throw std::invalid_argument("bad .hg header");
            k = static_cast<int>(kk);
            n = static_cast<std::size_t>(nn);
            continue;
        }
        long long v;
        int cnt = 0;
        while (ls >> v) {
            if (v < 0) throw std::invalid_argument("negative vertex index");
            flat.push_back(static_cast<Vertex>(v));
            cnt++;
        }
        if (cnt != k) throw std::invalid_argument("edge line does not have k vertices");
    }
    if (k < 0) throw std::invalid_argument("missing .hg header");
    return Hypergraph(k, n, std::move(flat));
}

Hypergraph read_hg_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_hg(in);
}

void write_hg(const Hypergraph& h, std::ostream& out) {
    out << h.k() << ' ' << h.vertex_count() << '\n';
    for (EdgeId e : h.lexicographic_order()) {
        auto ed = h.edge(e);
        for (std::size_t i = 0; i < ed.size(); ++i) out << (i ? " " : "") << ed[i];
        out << '\n';
    }
}

void write_hg_file(const Hypergraph& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_hg(h, out);
}

}  // namespace hpr
