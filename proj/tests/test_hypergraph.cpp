#include <doctest.h>

#include <sstream>

#include "hpr/generators.hpp"
#include "hpr/hypergraph.hpp"
#include "hpr/rng.hpp"
#include "oracles.hpp"

using namespace hpr;

namespace {

Hypergraph single_edge3() { return Hypergraph(3, 3, std::vector<std::vector<Vertex>>{{0, 1, 2}}); }

std::vector<Vertex> all_of(std::size_t n) {
    std::vector<Vertex> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<Vertex>(i);
    return v;
}

}  // namespace

TEST_CASE("construction validates edges") {
    CHECK_THROWS_AS(Hypergraph(3, 3, std::vector<std::vector<Vertex>>{{0, 1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(Hypergraph(3, 3, std::vector<std::vector<Vertex>>{{0, 1, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(Hypergraph(3, 4, std::vector<std::vector<Vertex>>{{0, 1, 2}, {2, 1, 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Hypergraph(1, 3), std::invalid_argument);
    CHECK_THROWS_AS(Hypergraph(9, 20), std::invalid_argument);
}

TEST_CASE("labelled_edge_count on the single edge") {
    Hypergraph h = single_edge3();
    auto v = all_of(3);
    CHECK(labelled_edge_count(h, {v, v, v}) == 6);  // counted k! times
    CHECK(labelled_edge_count(h, {{0}, {1}, {2}}) == 1);
    CHECK(labelled_edge_count(h, {{0, 1}, {0, 1}, {2}}) == 2);
}

TEST_CASE("labelled_edge_count agrees with tuple enumeration on random hosts") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Hypergraph h = random_kgraph({3, 9, 0.4, seed});
        Rng rng(seed * 77 + 1);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<std::vector<Vertex>> sets(3);
            for (auto& s : sets) {
                auto picks = rng.distinct(9, 1 + rng.below(9));
                s.assign(picks.begin(), picks.end());
            }
            CHECK(labelled_edge_count(h, sets) == oracle::labelled_count(h, sets));
        }
    }
}

TEST_CASE("labelled_edge_count is monotone in each coordinate") {
    Hypergraph h = random_kgraph({3, 10, 0.5, 3});
    std::vector<std::vector<Vertex>> small{{0, 1, 2}, {3, 4, 5}, {6, 7}};
    std::vector<std::vector<Vertex>> big{{0, 1, 2, 8}, {3, 4, 5, 9}, {6, 7, 2}};
    CHECK(labelled_edge_count(h, small) <= labelled_edge_count(h, big));
}

TEST_CASE("degree_into matches the footnote convention") {
    Hypergraph h = single_edge3();
    VertexSet u12(3, std::vector<Vertex>{1, 2});
    CHECK(degree_into_set(h, 0, u12) == 2);  // (k-1)! orderings
    VertexSet u1(3, std::vector<Vertex>{1});
    CHECK(degree_into_set(h, 0, u1) == 0);

    Hypergraph cyc = loose_cycle(3, 3);
    VertexSet v6 = VertexSet::full(6);
    // junction vertices lie in two edges, each counted 2! times
    CHECK(degree_into_set(cyc, 0, v6) == 4);
}

TEST_CASE("sum of degrees identity") {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        Hypergraph h = random_kgraph({3, 12, 0.3, seed});
        VertexSet full = VertexSet::full(12);
        std::uint64_t sum = 0;
        for (Vertex v = 0; v < 12; ++v) sum += degree_into_set(h, v, full);
        CHECK(sum == 3 * 2 * h.edge_count());  // k (k-1)! e(H)
    }
}

TEST_CASE("degree_report") {
    Hypergraph h = single_edge3();
    DegreeReport r = degree_report(h);
    CHECK(r.min_vertex_degree == 2);
    CHECK(r.max_pair_degree == 1);
    // density is k! e(H) / n^k (the paper's p-hat); 6/27 here
    CHECK(r.density == doctest::Approx(6.0 / 27.0));

    Hypergraph empty(3, 5);
    DegreeReport re = degree_report(empty);
    CHECK(re.min_vertex_degree == 0);
    CHECK(re.max_pair_degree == 0);
    CHECK(re.density == 0.0);

    DegreeReport rc = degree_report(loose_cycle(3, 3));
    CHECK(rc.min_vertex_degree == 2);
}

TEST_CASE("is_linear") {
    CHECK_FALSE(is_linear(Hypergraph(3, 4, std::vector<std::vector<Vertex>>{{0, 1, 2}, {0, 1, 3}})));
    CHECK(is_linear(loose_path(3, 3).graph));
}

TEST_CASE("line_graph") {
    Hypergraph lp = loose_path(3, 3).graph;
    Hypergraph lg = line_graph(lp);
    CHECK(lg.k() == 2);
    CHECK(lg.vertex_count() == 3);
    CHECK(lg.edge_count() == 2);  // path on 3 vertices

    Hypergraph pm(3, 6, std::vector<std::vector<Vertex>>{{0, 1, 2}, {3, 4, 5}});
    CHECK(line_graph(pm).edge_count() == 0);

    Hypergraph lt = loose_cycle(3, 3);
    CHECK(line_graph(lt).edge_count() == 3);  // triangle
}

TEST_CASE("induced") {
    Hypergraph h(3, 6, std::vector<std::vector<Vertex>>{{0, 1, 2}, {3, 4, 5}});
    auto full = induced(h, VertexSet::full(6));
    CHECK(full.graph.edge_count() == 2);
    auto part = induced(h, VertexSet(6, std::vector<Vertex>{0, 1, 2}));
    CHECK(part.graph.edge_count() == 1);
    CHECK(part.graph.vertex_count() == 3);
    auto cut = induced(h, VertexSet(6, std::vector<Vertex>{0, 1, 3, 4, 5}));
    CHECK(cut.graph.edge_count() == 1);

    // counting inside the induced graph equals counting with intersected sets
    Hypergraph r = random_kgraph({3, 10, 0.5, 9});
    std::vector<Vertex> s{0, 2, 3, 5, 6, 8, 9};
    auto ind = induced(r, VertexSet(10, s));
    std::vector<std::vector<Vertex>> sets{{0, 1, 2, 3}, {2, 3, 4, 5, 6}, {0, 5, 6}};
    std::vector<std::vector<Vertex>> capped(3);
    std::vector<std::vector<Vertex>> local(3);
    for (int i = 0; i < 3; ++i)
        for (Vertex v : sets[i]) {
            auto it = std::find(ind.kept.begin(), ind.kept.end(), v);
            if (it != ind.kept.end()) {
                capped[i].push_back(v);
                local[i].push_back(static_cast<Vertex>(it - ind.kept.begin()));
            }
        }
    CHECK(labelled_edge_count(ind.graph, local) == labelled_edge_count(r, capped));
}

TEST_CASE("validate_rooted") {
    RootedMotif ok{single_edge3(), {0}, std::nullopt};
    CHECK(validate_rooted(ok).ok);

    RootedMotif bad{single_edge3(), {0, 1}, std::nullopt};
    CHECK_FALSE(validate_rooted(bad).ok);

    RootedMotif path = loose_path(3, 3);
    path.roots = {path.ends->first, path.ends->second};
    path.ends.reset();
    CHECK(validate_rooted(path).ok);
}

TEST_CASE("hg round trip") {
    Hypergraph h = random_kgraph({3, 20, 0.3, 5});
    std::stringstream ss;
    write_hg(h, ss);
    Hypergraph back = read_hg(ss);
    CHECK(back.digest() == h.digest());
    CHECK(back.edge_count() == h.edge_count());

    std::stringstream dup("3 4\n0 1 2\n2 1 0\n");
    CHECK_THROWS(read_hg(dup));
    std::stringstream comments("# header comment\n2 3\n# edge\n0 2\n");
    Hypergraph c = read_hg(comments);
    CHECK(c.edge_count() == 1);
}

TEST_CASE("contains_edge and pair codegrees") {
    Hypergraph h(3, 5, std::vector<std::vector<Vertex>>{{0, 1, 2}, {0, 1, 3}});
    CHECK(h.contains_edge(std::vector<Vertex>{2, 0, 1}));
    CHECK_FALSE(h.contains_edge(std::vector<Vertex>{0, 2, 3}));
    CHECK(h.pair_codegree(0, 1) == 2);
    CHECK(h.pair_codegree(1, 0) == 2);
    CHECK(h.pair_codegree(2, 3) == 0);
    CHECK(h.max_pair_codegree() == 2);
}
