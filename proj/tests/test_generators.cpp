#include <doctest.h>

#include <sstream>

#include "hpr/generators.hpp"

using namespace hpr;

TEST_CASE("random_kgraph edge probability extremes") {
    CHECK(random_kgraph({3, 8, 0.0, 1}).edge_count() == 0);
    CHECK(random_kgraph({3, 8, 1.0, 1}).edge_count() == 56);  // C(8,3)
    CHECK(random_kgraph({2, 5, 1.0, 1}).edge_count() == 10);
}

TEST_CASE("random_kgraph determinism per seed") {
    Hypergraph a = random_kgraph({3, 25, 0.4, 42});
    Hypergraph b = random_kgraph({3, 25, 0.4, 42});
    Hypergraph c = random_kgraph({3, 25, 0.4, 43});
    std::stringstream sa, sb;
    write_hg(a, sa);
    write_hg(b, sb);
    CHECK(sa.str() == sb.str());  // byte-identical output
    CHECK(a.digest() == b.digest());
    CHECK(a.digest() != c.digest());
}

TEST_CASE("random_kgraph density concentration and pinned regression value") {
    Hypergraph h = random_kgraph({3, 30, 0.5, 7});
    double frac = static_cast<double>(h.edge_count()) / 4060.0;  // C(30,3)
    CHECK(frac > 0.42);
    CHECK(frac < 0.58);
    // regression: exact count for this seed
    CHECK(h.edge_count() == 2102);
}

TEST_CASE("loose_path shape") {
    RootedMotif p33 = loose_path(3, 3);
    CHECK(p33.graph.vertex_count() == 7);
    CHECK(p33.graph.edge_count() == 3);
    CHECK(p33.ends->first == 0);
    CHECK(p33.ends->second == 6);

    CHECK(loose_path(2, 1).graph.edge_count() == 1);
    CHECK(loose_path(4, 2).graph.vertex_count() == 7);

    for (int k = 2; k <= 6; ++k)
        for (int t = 1; t <= 10; ++t) {
            RootedMotif p = loose_path(k, t);
            CHECK(p.graph.vertex_count() == static_cast<std::size_t>(t * (k - 1) + 1));
            CHECK(p.graph.edge_count() == static_cast<std::size_t>(t));
            CHECK(is_linear(p.graph));
        }
}

TEST_CASE("loose_cycle shape and degree profile") {
    CHECK(loose_cycle(3, 3).vertex_count() == 6);
    CHECK(loose_cycle(2, 5).vertex_count() == 5);
    CHECK(loose_cycle(2, 5).edge_count() == 5);
    CHECK_THROWS_AS(loose_cycle(3, 2), std::invalid_argument);

    for (int k = 2; k <= 6; ++k)
        for (int t = 3; t <= 10; ++t) {
            Hypergraph c = loose_cycle(k, t);
            CHECK(is_linear(c));
            CHECK(c.vertex_count() == static_cast<std::size_t>(t * (k - 1)));
            CHECK(c.edge_count() == static_cast<std::size_t>(t));
            std::uint64_t fact = 1;
            for (int i = 2; i < k; ++i) fact *= i;
            VertexSet full = VertexSet::full(c.vertex_count());
            std::size_t junctions = 0, interiors = 0;
            for (Vertex v = 0; v < c.vertex_count(); ++v) {
                std::uint64_t d = degree_into_set(c, v, full);
                if (d == 2 * fact) junctions++;
                else if (d == fact) interiors++;
            }
            CHECK(junctions == static_cast<std::size_t>(t));
            CHECK(junctions + interiors == c.vertex_count());
        }
}

TEST_CASE("motif library") {
    RootedMotif se = motif("single_edge", 3);
    CHECK(se.graph.vertex_count() == 3);
    CHECK(se.graph.edge_count() == 1);

    RootedMotif lt = motif("loose_triangle", 3);
    CHECK(lt.graph.vertex_count() == 6);
    CHECK(lt.graph.edge_count() == 3);

    RootedMotif s2 = motif("star_2", 3);
    CHECK(s2.graph.vertex_count() == 5);
    CHECK(s2.graph.edge_count() == 2);
    CHECK(s2.graph.incident(0).size() == 2);  // shared center

    RootedMotif lp2 = motif("loose_path_2", 3);
    CHECK(lp2.graph.edge_count() == 2);

    CHECK_THROWS_AS(motif("unknown_thing", 3), std::invalid_argument);
}

TEST_CASE("plant_hole") {
    Hypergraph h = random_kgraph({3, 12, 0.6, 11});
    VertexSet empty(12, std::vector<Vertex>{});
    CHECK(plant_hole(h, empty).edge_count() == h.edge_count());
    VertexSet all = VertexSet::full(12);
    CHECK(plant_hole(h, all).edge_count() == 0);

    std::vector<Vertex> s{0, 1, 2, 3, 4, 5};
    VertexSet hole(12, s);
    Hypergraph planted = plant_hole(h, hole);
    std::vector<std::vector<Vertex>> sets{s, s, s};
    CHECK(labelled_edge_count(planted, sets) == 0);
    CHECK(planted.edge_count() < h.edge_count());
}
