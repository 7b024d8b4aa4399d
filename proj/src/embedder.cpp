#include "hpr/embedder.hpp"
#include "hpr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace hpr {

namespace {

constexpr Vertex kUnset = std::numeric_limits<Vertex>::max();

// Shared backtracking engine for find/count. Walks the rooted degeneracy
// exposure; at each edge the already-embedded motif vertices anchor the
// candidate host edges.
class EmbedSearch {
public:
    EmbedSearch(const Hypergraph& h, const RootedMotif& m, std::span<const Vertex> root_targets,
                const VertexSet& allowed, std::uint64_t budget, bool count_all)
        : h_(h), m_(m), allowed_(allowed), budget_(budget), count_all_(count_all) {
        if (root_targets.size() != m.roots.size())
            throw std::invalid_argument("root target arity mismatch");
        for (Vertex y : root_targets)
            if (y >= h.vertex_count()) throw std::invalid_argument("root target out of range");
        image_.assign(m.graph.vertex_count(), kUnset);
        used_.assign(h.vertex_count(), 0);
        const auto expo = edge_degeneracy(m).witness;
        order_ = expo.order;
        for (std::size_t i = 0; i < m.roots.size(); ++i) {
            Vertex y = root_targets[i];
            if (used_[y]) throw std::invalid_argument("root targets repeat a vertex");
            image_[m.roots[i]] = y;
            mark(y);
        }
        std::vector<std::uint8_t> covered(m.graph.vertex_count(), 0);
        for (std::size_t e = 0; e < m.graph.edge_count(); ++e)
            for (Vertex v : m.graph.edge(static_cast<EdgeId>(e))) covered[v] = 1;
        for (Vertex r : m.roots) covered[r] = 1;
        for (Vertex v = 0; v < m.graph.vertex_count(); ++v)
            if (!covered[v]) spare_.push_back(v);
    }

    // Returns number of embeddings found (capped at 1 unless counting).
    std::uint64_t run() {
        descend(0);
        return found_;
    }

    bool budget_hit() const { return budget_hit_; }
    std::uint64_t nodes() const { return nodes_; }
    const std::vector<Vertex>& first_image() const { return first_image_; }

private:
    void mark(Vertex v) {
        used_[v] = 1;
        if (allowed_.contains(v)) allowed_used_++;
    }
    void unmark(Vertex v) {
        used_[v] = 0;
        if (allowed_.contains(v)) allowed_used_--;
    }

    bool tick() {
        if (++nodes_ > budget_) {
            budget_hit_ = true;
            return false;
        }
        return true;
    }

    void finish() {
        std::uint64_t avail = allowed_.size() - allowed_used_;
        if (spare_.size() > avail) return;
        if (count_all_) {
            std::uint64_t ways = 1;
            for (std::size_t i = 0; i < spare_.size(); ++i) ways *= avail - i;
            found_ += ways;
            if (first_image_.empty() && ways > 0) snapshot_spares();
        } else {
            snapshot_spares();
            found_ = 1;
        }
    }

    void snapshot_spares() {
        first_image_ = image_;
        std::size_t next = 0;
        for (Vertex v : spare_) {
            while (true) {
                if (next >= allowed_.items().size()) return;  // cannot happen after avail check
                Vertex cand = allowed_.items()[next++];
                if (!used_[cand]) {
                    first_image_[v] = cand;
                    break;
                }
            }
        }
    }

    void descend(std::size_t depth) {
        if (stop()) return;
        if (depth == order_.size()) {
            finish();
            return;
        }
        const auto fedge = m_.graph.edge(order_[depth]);
        const unsigned k = static_cast<unsigned>(h_.k());

        std::vector<Vertex> mapped_hosts;
        std::vector<Vertex> free_slots;  // motif vertices
        for (Vertex fv : fedge) {
            if (image_[fv] != kUnset)
                mapped_hosts.push_back(image_[fv]);
            else
                free_slots.push_back(fv);
        }

        auto try_host_edge = [&](EdgeId he) {
            if (!tick()) return;
            auto ed = h_.edge(he);
            // host edge must contain every mapped image
            for (Vertex mh : mapped_hosts)
                if (std::find(ed.begin(), ed.end(), mh) == ed.end()) return;
            std::vector<Vertex> rest;
            for (Vertex hv : ed) {
                if (std::find(mapped_hosts.begin(), mapped_hosts.end(), hv) != mapped_hosts.end())
                    continue;
                if (used_[hv] || !allowed_.contains(hv)) return;
                rest.push_back(hv);
            }
            if (rest.size() != free_slots.size()) return;
            std::sort(rest.begin(), rest.end());
            do {
                if (stop()) return;
                for (std::size_t i = 0; i < free_slots.size(); ++i) {
                    image_[free_slots[i]] = rest[i];
                    mark(rest[i]);
                }
                descend(depth + 1);
                for (std::size_t i = 0; i < free_slots.size(); ++i) {
                    unmark(rest[i]);
                    image_[free_slots[i]] = kUnset;
                }
            } while (std::next_permutation(rest.begin(), rest.end()));
        };

        if (mapped_hosts.empty()) {
            for (std::size_t he = 0; he < h_.edge_count() && !stop(); ++he)
                try_host_edge(static_cast<EdgeId>(he));
        } else {
            Vertex anchor = mapped_hosts[0];
            for (Vertex mh : mapped_hosts)
                if (h_.incident(mh).size() < h_.incident(anchor).size()) anchor = mh;
            for (EdgeId he : h_.incident(anchor)) {
                if (stop()) break;
                try_host_edge(he);
            }
        }
        (void)k;
    }

    bool stop() const { return budget_hit_ || (!count_all_ && found_ > 0); }

    const Hypergraph& h_;
    const RootedMotif& m_;
    const VertexSet& allowed_;
    std::uint64_t budget_;
    bool count_all_;

    std::vector<EdgeId> order_;
    std::vector<Vertex> image_;
    std::vector<std::uint8_t> used_;
    std::vector<Vertex> spare_;  // motif vertices in no edge and not roots
    std::size_t allowed_used_ = 0;
    std::uint64_t nodes_ = 0;
    std::uint64_t found_ = 0;
    bool budget_hit_ = false;
    std::vector<Vertex> first_image_;
};

}  // namespace

FindResult find_rooted_copy(const Hypergraph& h, const RootedMotif& m,
                            std::span<const Vertex> root_targets, const VertexSet& allowed,
                            const SearchOptions& opt) {
    FindResult res;
    EmbedSearch search(h, m, root_targets, allowed, opt.node_budget, false);
    std::uint64_t got = search.run();
    res.nodes = search.nodes();
    if (got > 0) {
        res.outcome = SearchOutcome::found;
        res.embedding = RootedEmbedding{search.first_image()};
    } else {
        res.outcome = search.budget_hit() ? SearchOutcome::budget_exhausted : SearchOutcome::none;
    }
    return res;
}

CountResult count_rooted_copies(const Hypergraph& h, const RootedMotif& m,
                                std::span<const Vertex> root_targets, const VertexSet& allowed,
                                const SearchOptions& opt) {
    CountResult res;
    EmbedSearch search(h, m, root_targets, allowed, opt.node_budget, true);
    res.count = search.run();
    res.nodes = search.nodes();
    res.complete = !search.budget_hit();
    return res;
}

double counting_lower_bound(double c, double p, int edge_count, double u_size, int f) {
    return 0.5 * std::pow(c * p, edge_count) * std::pow(u_size, f);
}

CompatibleFamily greedy_builder(const Hypergraph& h, const RootedMotif& m,
                                std::span<const std::vector<Vertex>> ordered_edges,
                                const VertexSet& x, const SearchOptions& opt) {
    CompatibleFamily fam;
    std::vector<std::uint8_t> in_x(h.vertex_count(), 0);
    for (Vertex v : x.items()) in_x[v] = 1;

    for (const auto& e : ordered_edges) fam.template_edges.emplace_back(e);
    fam.copies.resize(ordered_edges.size());

    for (std::size_t s = 0; s < ordered_edges.size(); ++s) {
        std::vector<Vertex> xs_items;
        for (Vertex v = 0; v < h.vertex_count(); ++v)
            if (in_x[v]) xs_items.push_back(v);
        VertexSet xs(h.vertex_count(), xs_items);
        FindResult r = find_rooted_copy(h, m, ordered_edges[s], xs, opt);
        if (r.outcome == SearchOutcome::found) {
            for (Vertex v : r.embedding->image) in_x[v] = 0;
            fam.copies[s] = std::move(r.embedding);
        } else {
            fam.failed.push_back(s);
        }
    }
    return fam;
}

CompatibleFamily build_compatible_family(const Hypergraph& h, const RootedMotif& m,
                                         std::span<const std::vector<Vertex>> template_edges,
                                         const VertexSet& pool, const CompatibleOptions& opt) {
    const unsigned k = static_cast<unsigned>(h.k());
    const std::size_t r = m.roots.size();
    const std::size_t f = m.graph.vertex_count() - r;
    double p = opt.p > 0 ? opt.p : degree_report(h).density;

    std::set<Vertex> vt_set;
    for (const auto& e : template_edges) {
        if (e.size() != r) throw std::invalid_argument("template edge arity != root count");
        for (Vertex v : e) vt_set.insert(v);
    }
    for (Vertex v : vt_set)
        if (pool.contains(v)) throw std::invalid_argument("pool intersects the template vertex set");

    CompatibleFamily fam;
    fam.template_edges.assign(template_edges.begin(), template_edges.end());
    fam.copies.resize(template_edges.size());
    if (template_edges.empty()) return fam;

    // degree caps per template vertex
    std::vector<int> tdeg(h.vertex_count(), 0);
    int delta1 = 0;
    for (const auto& e : template_edges)
        for (Vertex v : e) delta1 = std::max(delta1, ++tdeg[v]);

    if (opt.strict) {
        double cap = static_cast<double>(h.vertex_count()) /
                     (200.0 * delta1 * delta1 * static_cast<double>((r + f) * (r + f)));
        if (static_cast<double>(vt_set.size()) > cap)
            throw std::invalid_argument("strict mode: |Y| exceeds n / (200 Delta^2 (r+f)^2)");
    } else if (vt_set.size() * 200 * static_cast<std::size_t>(delta1) * delta1 * (r + f) * (r + f) >
               h.vertex_count()) {
        fam.notes.push_back("pragmatic: |Y| above the asymptotic bound n/(200 Delta^2 (r+f)^2)");
    }

    // Split the pool into a main share and a reserve.
    std::vector<Vertex> items = pool.items();
    Rng rng = Rng::stream(opt.seed, 0xfa71);
    rng.shuffle(items);
    std::size_t reserve_n = static_cast<std::size_t>(opt.reserve_frac * static_cast<double>(items.size()));
    std::vector<Vertex> reserve_items(items.begin(), items.begin() + reserve_n);
    std::vector<Vertex> main_items(items.begin() + reserve_n, items.end());
    VertexSet reserve(h.vertex_count(), reserve_items);

    // Low-degree-into-reserve roots route their edges through phase 1.
    double wthresh = 2.0 * opt.c * p;
    for (unsigned i = 0; i < k - 1; ++i) wthresh *= static_cast<double>(reserve.size());
    auto degs_reserve = degrees_into_set(h, reserve);
    std::vector<std::size_t> phase1, phase2;
    for (std::size_t j = 0; j < template_edges.size(); ++j) {
        bool low = false;
        for (Vertex v : template_edges[j])
            if (static_cast<double>(degs_reserve[v]) < wthresh) low = true;
        (low ? phase1 : phase2).push_back(j);
    }

    std::vector<std::uint8_t> avail(h.vertex_count(), 0);
    for (Vertex v : items) avail[v] = 1;

    auto run_phase = [&](const std::vector<std::size_t>& idx, const std::vector<Vertex>& source,
                         std::vector<std::size_t>& fails) {
        std::vector<std::uint8_t> local(h.vertex_count(), 0);
        for (Vertex v : source)
            if (avail[v]) local[v] = 1;
        for (std::size_t j : idx) {
            std::vector<Vertex> xs_items;
            for (Vertex v = 0; v < h.vertex_count(); ++v)
                if (local[v]) xs_items.push_back(v);
            VertexSet xs(h.vertex_count(), xs_items);
            FindResult r = find_rooted_copy(h, m, fam.template_edges[j], xs, opt.search);
            if (r.outcome == SearchOutcome::found) {
                for (Vertex v : r.embedding->image) {
                    local[v] = 0;
                    avail[v] = 0;
                }
                fam.copies[j] = std::move(r.embedding);
            } else {
                fails.push_back(j);
            }
        }
    };

    std::vector<std::size_t> fail1, fail2, fail3;
    run_phase(phase1, items, fail1);         // whole pool
    run_phase(phase2, main_items, fail2);    // main share
    run_phase(fail2, reserve_items, fail3);  // retry the leftovers in the reserve

    fam.failed = fail1;
    fam.failed.insert(fam.failed.end(), fail3.begin(), fail3.end());
    std::sort(fam.failed.begin(), fam.failed.end());
    return fam;
}

Violations verify_compatible(const CompatibleFamily& fam, const RootedMotif& m, const Hypergraph& h) {
    Violations out;
    std::set<Vertex> vt;
    for (const auto& e : fam.template_edges) vt.insert(e.begin(), e.end());

    std::vector<std::set<Vertex>> images;
    std::vector<std::size_t> which;
    for (std::size_t j = 0; j < fam.copies.size(); ++j) {
        if (!fam.copies[j]) continue;
        const auto& img = fam.copies[j]->image;
        if (img.size() != m.graph.vertex_count()) {
            out.fail("copy " + std::to_string(j) + ": image size mismatch");
            continue;
        }
        std::set<Vertex> s(img.begin(), img.end());
        if (s.size() != img.size()) out.fail("copy " + std::to_string(j) + ": not injective");
        // condition 1: rooted at its template edge
        const auto& te = fam.template_edges[j];
        for (std::size_t i = 0; i < m.roots.size(); ++i)
            if (img[m.roots[i]] != te[i])
                out.fail("copy " + std::to_string(j) + ": root " + std::to_string(i) + " not mapped to tuple");
        // edge preservation
        for (std::size_t e = 0; e < m.graph.edge_count(); ++e) {
            std::vector<Vertex> mapped;
            for (Vertex v : m.graph.edge(static_cast<EdgeId>(e))) mapped.push_back(img[v]);
            if (!h.contains_edge(mapped))
                out.fail("copy " + std::to_string(j) + ": motif edge " + std::to_string(e) +
                         " not an edge of the host");
        }
        // condition 2: intersects V_T exactly in its own roots
        std::set<Vertex> own_roots(te.begin(), te.end());
        for (Vertex v : s)
            if (vt.count(v) && !own_roots.count(v))
                out.fail("copy " + std::to_string(j) + ": touches template vertex " + std::to_string(v) +
                         " outside its tuple (condition 2)");
        images.push_back(std::move(s));
        which.push_back(j);
    }
    // condition 3: pairwise intersections match tuple intersections
    for (std::size_t a = 0; a < images.size(); ++a) {
        for (std::size_t b = a + 1; b < images.size(); ++b) {
            std::set<Vertex> ea(fam.template_edges[which[a]].begin(), fam.template_edges[which[a]].end());
            std::set<Vertex> eb(fam.template_edges[which[b]].begin(), fam.template_edges[which[b]].end());
            for (Vertex v : images[a]) {
                bool in_b = images[b].count(v) > 0;
                bool should = ea.count(v) && eb.count(v);
                if (in_b && !should)
                    out.fail("copies " + std::to_string(which[a]) + "," + std::to_string(which[b]) +
                             ": share vertex " + std::to_string(v) + " outside tuple overlap (condition 3)");
            }
        }
    }
    return out;
}

}  // namespace hpr
