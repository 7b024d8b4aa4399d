#include "hpr/absorbers.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace hpr {

FactorAbsorber build_factor_absorber(const Hypergraph& f) {
    if (!is_linear(f)) throw std::invalid_argument("build_factor_absorber: F not linear");
    const std::size_t fv = f.vertex_count();
    const int k = f.k();
    if (fv < static_cast<std::size_t>(k)) throw std::invalid_argument("build_factor_absorber: v(F) < k");

    auto flat = [&](std::size_t row, std::size_t col) { return static_cast<Vertex>(row * fv + col); };

    std::vector<std::vector<Vertex>> edges;
    std::vector<std::vector<Vertex>> complete, internal;

    // Rows F_i on {i} x Z_f; second-coordinate projection is the isomorphism.
    for (std::size_t i = 0; i < fv; ++i) {
        std::vector<Vertex> image(fv);
        for (std::size_t ell = 0; ell < fv; ++ell) image[ell] = flat(i, ell);
        for (std::size_t e = 0; e < f.edge_count(); ++e) {
            std::vector<Vertex> ne;
            for (Vertex v : f.edge(static_cast<EdgeId>(e))) ne.push_back(image[v]);
            edges.push_back(std::move(ne));
        }
        complete.push_back(std::move(image));
    }
    // Diagonals F^j on {(i, i+j)}, j = 1..f-1.
    for (std::size_t j = 1; j < fv; ++j) {
        std::vector<Vertex> image(fv);
        for (std::size_t ell = 0; ell < fv; ++ell) image[ell] = flat((ell + fv - j) % fv, ell);
        for (std::size_t e = 0; e < f.edge_count(); ++e) {
            std::vector<Vertex> ne;
            for (Vertex v : f.edge(static_cast<EdgeId>(e))) ne.push_back(image[v]);
            edges.push_back(std::move(ne));
        }
        internal.push_back(std::move(image));
    }

    std::vector<Vertex> roots(fv);
    for (std::size_t i = 0; i < fv; ++i) roots[i] = flat(i, i);

    FactorAbsorber out{RootedMotif{Hypergraph(k, fv * fv, edges), std::move(roots), std::nullopt},
                       std::move(complete),
                       std::move(internal),
                       f,
                       0};
    int degen_f = edge_degeneracy(RootedMotif{f, {}, std::nullopt}).degen;
    int dprime = 0;
    if (f.edge_count() > 0) dprime = min_max_edge_degree(f).second;
    out.degeneracy_bound = degen_f + dprime + k;
    return out;
}

PathAbsorber build_path_absorber(int k) {
    if (k < 3) throw std::invalid_argument("build_path_absorber: k < 3");
    const int q = k - 1;  // modulus for the U-labels
    auto mod = [&](int a) { return ((a % q) + q) % q; };
    // u_{ij} exists iff i mod (k-1) is outside {j, j-1} mod (k-1).
    auto u_exists = [&](int i, int j) { return mod(i) != mod(j) && mod(i) != mod(j - 1); };

    Vertex next = 0;
    std::vector<Vertex> xs(k - 1);
    for (int i = 1; i <= k - 1; ++i) xs[i - 1] = next++;
    std::map<std::pair<int, int>, Vertex> u, v, w;
    for (int i = 1; i <= k - 1; ++i)
        for (int j = 1; j <= k - 1; ++j)
            if (u_exists(i, j)) u[{i, j}] = next++;
    for (int i = 1; i <= k - 1; ++i)
        for (int j = k; j <= 2 * k - 3; ++j) v[{i, j}] = next++;
    for (int i = k; i <= 2 * k - 3; ++i)
        for (int j = k; j <= 2 * k - 3; ++j)
            if (i != j) w[{i, j}] = next++;
    const int gadgets = 2 * k - 3;
    // C_i = {c_{i1..ik}, c'_{i1..ik}, c_{i*}}.
    std::vector<std::vector<Vertex>> c(gadgets + 1), cp(gadgets + 1);
    std::vector<Vertex> cstar(gadgets + 1);
    for (int i = 1; i <= gadgets; ++i) {
        c[i].resize(k + 1);
        cp[i].resize(k + 1);
        for (int j = 1; j <= k; ++j) c[i][j] = next++;
        for (int j = 1; j <= k; ++j) cp[i][j] = next++;
        cstar[i] = next++;
    }
    std::vector<std::vector<Vertex>> d(std::max(0, 2 * k - 4) + 1);
    for (int i = 1; i <= 2 * k - 4; ++i)
        for (int t = 0; t < k - 2; ++t) d[i].push_back(next++);

    const std::size_t nverts = next;

    std::vector<std::vector<Vertex>> edges;
    auto add_edge = [&](std::vector<Vertex> e) {
        edges.push_back(std::move(e));
        return static_cast<EdgeId>(edges.size() - 1);
    };

    std::vector<Gadget> gds;
    for (int i = 1; i <= gadgets; ++i) {
        Gadget gd;
        if (i <= k - 1) {
            gd.a.push_back(xs[i - 1]);
            for (int ell = 1; ell <= k - 1; ++ell)
                if (mod(ell) != mod(i) && mod(ell) != mod(i + 1)) gd.a.push_back(u.at({i, ell}));
            for (int ell = k; ell <= 2 * k - 3; ++ell) gd.a_prime.push_back(v.at({i, ell}));
            for (int ell = 1; ell <= k - 1; ++ell)
                if (mod(ell) != mod(i - 1) && mod(ell) != mod(i)) gd.b.push_back(u.at({ell, i}));
        } else {
            gd.a.push_back(v.at({i - k + 1, i}));
            for (int ell = k; ell <= 2 * k - 3; ++ell)
                if (ell != i) gd.a.push_back(w.at({i, ell}));
            for (int ell = 1; ell <= k - 1; ++ell)
                if (ell != i - k + 1) gd.a_prime.push_back(v.at({ell, i}));
            for (int ell = k; ell <= 2 * k - 3; ++ell)
                if (ell != i) gd.b.push_back(w.at({ell, i}));
        }
        for (int j = 1; j <= k; ++j) gd.c.push_back(c[i][j]);
        for (int j = 1; j <= k; ++j) gd.c.push_back(cp[i][j]);
        gd.c.push_back(cstar[i]);

        std::vector<Vertex> e_i{c[i][2], cstar[i]};
        e_i.insert(e_i.end(), gd.a.begin(), gd.a.end());
        std::vector<Vertex> ep_i{cp[i][2], cstar[i]};
        ep_i.insert(ep_i.end(), gd.a_prime.begin(), gd.a_prime.end());
        std::vector<Vertex> f_i(c[i].begin() + 1, c[i].end());
        std::vector<Vertex> fp_i(cp[i].begin() + 1, cp[i].end());
        std::vector<Vertex> g_i{c[i][k], cstar[i], cp[i][1]};
        g_i.insert(g_i.end(), gd.b.begin(), gd.b.end());

        gd.e = add_edge(std::move(e_i));
        gd.e_prime = add_edge(std::move(ep_i));
        gd.f = add_edge(std::move(f_i));
        gd.f_prime = add_edge(std::move(fp_i));
        gd.g = add_edge(std::move(g_i));
        gds.push_back(std::move(gd));
    }
    std::vector<EdgeId> connectors;
    for (int i = 1; i <= 2 * k - 4; ++i) {
        std::vector<Vertex> h{cp[i][k], c[i + 1][1]};
        h.insert(h.end(), d[i].begin(), d[i].end());
        connectors.push_back(add_edge(std::move(h)));
    }

    auto outer = [&](const Gadget& gd) { return std::vector<EdgeId>{gd.f, gd.e, gd.e_prime, gd.f_prime}; };
    auto inner = [&](const Gadget& gd) { return std::vector<EdgeId>{gd.f, gd.g, gd.f_prime}; };

    std::vector<EdgeId> complete, internal;
    for (int i = 1; i <= gadgets; ++i) {
        auto seq_c = i <= k - 1 ? outer(gds[i - 1]) : inner(gds[i - 1]);
        auto seq_i = i <= k - 1 ? inner(gds[i - 1]) : outer(gds[i - 1]);
        complete.insert(complete.end(), seq_c.begin(), seq_c.end());
        internal.insert(internal.end(), seq_i.begin(), seq_i.end());
        if (i <= 2 * k - 4) {
            complete.push_back(connectors[i - 1]);
            internal.push_back(connectors[i - 1]);
        }
    }

    PathAbsorber out;
    out.motif = RootedMotif{Hypergraph(k, nverts, edges), xs,
                            std::make_pair(c[1][1], cp[gadgets][k])};
    out.complete_path = std::move(complete);
    out.internal_path = std::move(internal);
    out.gadgets = std::move(gds);
    out.connectors = std::move(connectors);
    return out;
}

Violations check_loose_path(const Hypergraph& h, std::span<const EdgeId> path, Vertex y1, Vertex y2,
                            const VertexSet& cover) {
    Violations out;
    if (path.empty()) {
        out.fail("empty path");
        return out;
    }
    for (EdgeId e : path)
        if (e >= h.edge_count()) {
            out.fail("edge id out of range");
            return out;
        }
    for (std::size_t i = 0; i < path.size(); ++i) {
        for (std::size_t j = i + 1; j < path.size(); ++j) {
            auto ei = h.edge(path[i]), ej = h.edge(path[j]);
            int common = 0;
            for (Vertex a : ei)
                for (Vertex b : ej)
                    if (a == b) common++;
            int want = (j == i + 1) ? 1 : 0;
            if (common != want)
                out.fail("edges at positions " + std::to_string(i) + "," + std::to_string(j) +
                         " share " + std::to_string(common) + " vertices, want " + std::to_string(want));
        }
    }
    std::set<Vertex> covered;
    for (EdgeId e : path)
        for (Vertex v : h.edge(e)) covered.insert(v);
    for (Vertex v : covered)
        if (!cover.contains(v)) out.fail("covers unexpected vertex " + std::to_string(v));
    for (Vertex v : cover.items())
        if (!covered.count(v)) out.fail("misses vertex " + std::to_string(v));

    auto in_edge = [&](EdgeId e, Vertex v) {
        auto ed = h.edge(e);
        return std::find(ed.begin(), ed.end(), v) != ed.end();
    };
    if (!in_edge(path.front(), y1)) out.fail("y1 not in first edge");
    if (!in_edge(path.back(), y2)) out.fail("y2 not in last edge");
    if (path.size() >= 2) {
        if (in_edge(path[1], y1)) out.fail("y1 is the first junction, not an end");
        if (in_edge(path[path.size() - 2], y2)) out.fail("y2 is the last junction, not an end");
    } else if (y1 == y2) {
        out.fail("ends coincide");
    }
    return out;
}

Violations verify_factor_absorber(const FactorAbsorber& a) {
    Violations out;
    const auto& g = a.motif.graph;
    const std::size_t fv = a.source.vertex_count();
    if (g.vertex_count() != fv * fv) out.fail("vertex count is not f^2");
    if (a.motif.roots.size() != fv) out.fail("root count is not f");
    if (!is_linear(g)) out.fail("absorber not linear");
    Violations rooted = validate_rooted(a.motif);
    if (!rooted.ok)
        for (auto& s : rooted.items) out.fail("rooted: " + s);

    auto check_partition = [&](const std::vector<std::vector<Vertex>>& pieces, const VertexSet& target,
                               const char* tag) {
        std::set<Vertex> used;
        for (const auto& image : pieces) {
            if (image.size() != fv) {
                out.fail(std::string(tag) + ": image size mismatch");
                continue;
            }
            std::set<Vertex> here(image.begin(), image.end());
            if (here.size() != fv) out.fail(std::string(tag) + ": image not injective");
            for (Vertex v : image) {
                if (!target.contains(v)) out.fail(std::string(tag) + ": vertex outside target");
                if (used.count(v)) out.fail(std::string(tag) + ": vertex covered twice");
                used.insert(v);
            }
            for (std::size_t e = 0; e < a.source.edge_count(); ++e) {
                std::vector<Vertex> mapped;
                for (Vertex v : a.source.edge(static_cast<EdgeId>(e))) mapped.push_back(image[v]);
                if (!g.contains_edge(mapped)) out.fail(std::string(tag) + ": image misses an F-edge");
            }
        }
        if (used.size() != target.size()) out.fail(std::string(tag) + ": does not cover target exactly");
    };

    check_partition(a.complete_factor, VertexSet::full(g.vertex_count()), "complete");
    std::vector<Vertex> non_roots;
    std::vector<std::uint8_t> is_root(g.vertex_count(), 0);
    for (Vertex r : a.motif.roots)
        if (r < g.vertex_count()) is_root[r] = 1;
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (!is_root[v]) non_roots.push_back(v);
    check_partition(a.internal_factor, VertexSet(g.vertex_count(), non_roots), "internal");

    if (out.ok) {
        int measured = edge_degeneracy(a.motif).degen;
        if (measured > a.degeneracy_bound)
            out.fail("degeneracy " + std::to_string(measured) + " exceeds bound " +
                     std::to_string(a.degeneracy_bound));
    }
    return out;
}

Violations verify_path_absorber(const PathAbsorber& a) {
    Violations out;
    const auto& g = a.motif.graph;
    const int k = g.k();
    const std::size_t want = static_cast<std::size_t>(9) * k * k - 23 * k + 15;
    if (g.vertex_count() != want)
        out.fail("vertex count " + std::to_string(g.vertex_count()) + " != " + std::to_string(want));
    if (a.motif.roots.size() != static_cast<std::size_t>(k - 1)) out.fail("root count is not k-1");
    if (!a.motif.ends) {
        out.fail("missing ends");
        return out;
    }
    if (!is_linear(g)) out.fail("not linear");
    Violations rooted = validate_rooted(a.motif);
    if (!rooted.ok)
        for (auto& s : rooted.items) out.fail("rooted: " + s);

    const std::size_t expect_edges = static_cast<std::size_t>(5) * (2 * k - 3) + (2 * k - 4);
    if (g.edge_count() != expect_edges) out.fail("edge count mismatch");

    for (std::size_t i = 0; i < a.gadgets.size(); ++i) {
        const auto& gd = a.gadgets[i];
        if (gd.a.size() != static_cast<std::size_t>(k - 2)) out.fail("gadget A size");
        if (gd.a_prime.size() != static_cast<std::size_t>(k - 2)) out.fail("gadget A' size");
        if (gd.b.size() != static_cast<std::size_t>(k - 3)) out.fail("gadget B size");
        if (gd.c.size() != static_cast<std::size_t>(2 * k + 1)) out.fail("gadget C size");
    }

    auto [y1, y2] = *a.motif.ends;
    Violations pc = check_loose_path(g, a.complete_path, y1, y2, VertexSet::full(g.vertex_count()));
    if (!pc.ok)
        for (auto& s : pc.items) out.fail("complete path: " + s);
    std::vector<Vertex> non_roots;
    std::vector<std::uint8_t> is_root(g.vertex_count(), 0);
    for (Vertex r : a.motif.roots) is_root[r] = 1;
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (!is_root[v]) non_roots.push_back(v);
    Violations pi = check_loose_path(g, a.internal_path, y1, y2, VertexSet(g.vertex_count(), non_roots));
    if (!pi.ok)
        for (auto& s : pi.items) out.fail("internal path: " + s);

    if (out.ok) {
        int measured = edge_degeneracy(a.motif).degen;
        if (measured > k - 1)
            out.fail("degeneracy " + std::to_string(measured) + " exceeds k-1");
    }
    return out;
}

}  // namespace hpr
