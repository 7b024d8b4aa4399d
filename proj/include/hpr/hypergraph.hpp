#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hpr {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr int kMaxUniformity = 8;

// Membership structure over [0, n): bitmap plus the sorted item list.
class VertexSet {
public:
    VertexSet() = default;
    VertexSet(std::size_t n, std::span<const Vertex> items);
    static VertexSet full(std::size_t n);

    bool contains(Vertex v) const { return mask_[v] != 0; }
    std::size_t size() const { return items_.size(); }
    std::size_t universe() const { return mask_.size(); }
    const std::vector<Vertex>& items() const { return items_; }

private:
    std::vector<std::uint8_t> mask_;
    std::vector<Vertex> items_;
};

// Immutable k-uniform hypergraph on vertices [0, n). Edges are stored as
// sorted k-tuples; edge identity is the sorted content and duplicates are
// rejected at construction. All queries are pure reads, safe to share
// across threads.
class Hypergraph {
public:
    Hypergraph() : Hypergraph(2, 0) {}
    Hypergraph(int k, std::size_t n);  // edgeless
    Hypergraph(int k, std::size_t n, const std::vector<std::vector<Vertex>>& edges);
    // Flat storage: k consecutive vertices per edge. Preferred for large inputs.
    Hypergraph(int k, std::size_t n, std::vector<Vertex> flat_edges);

    int k() const { return k_; }
    std::size_t vertex_count() const { return n_; }
    std::size_t edge_count() const { return data_.size() / k_; }

    std::span<const Vertex> edge(EdgeId e) const {
        return {data_.data() + static_cast<std::size_t>(e) * k_, static_cast<std::size_t>(k_)};
    }
    const std::vector<EdgeId>& incident(Vertex v) const { return incidence_[v]; }
    std::size_t vertex_edge_count(Vertex v) const { return incidence_[v].size(); }

    std::uint32_t pair_codegree(Vertex u, Vertex v) const;
    std::uint32_t max_pair_codegree() const;

    // Membership test; input need not be sorted.
    bool contains_edge(std::span<const Vertex> verts) const;
    std::optional<EdgeId> find_edge(std::span<const Vertex> verts) const;

    // Edge ids in lexicographic order of content (the canonical write order).
    const std::vector<EdgeId>& lexicographic_order() const { return lex_order_; }

    std::uint64_t digest() const;

private:
    void build_indices();

    int k_ = 2;
    std::size_t n_ = 0;
    std::vector<Vertex> data_;
    std::vector<std::vector<EdgeId>> incidence_;
    bool pair_dense_mode_ = true;
    std::vector<std::uint32_t> pair_dense_;
    std::unordered_map<std::uint64_t, std::uint32_t> pair_sparse_;
    std::vector<EdgeId> lex_order_;
};

// Linear k-graph with an ordered root tuple and optional distinguished ends.
struct RootedMotif {
    Hypergraph graph;
    std::vector<Vertex> roots;
    std::optional<std::pair<Vertex, Vertex>> ends;
};

struct DegreeReport {
    std::uint64_t min_vertex_degree = 0;  // labelled: delta(H)
    std::uint32_t max_pair_degree = 0;    // Delta_2(H)
    double density = 0.0;                 // k! e(H) / n^k
};

struct Violations {
    bool ok = true;
    std::vector<std::string> items;
    void fail(std::string msg);
};

// e(A_1,...,A_k): ordered k-tuples with i-th entry in A_i whose set is an edge.
std::uint64_t labelled_edge_count(const Hypergraph& h, std::span<const VertexSet> sets);
std::uint64_t labelled_edge_count(const Hypergraph& h, const std::vector<std::vector<Vertex>>& sets);

// deg(v; U_1,...,U_{k-1}) = e({v}, U_1,...,U_{k-1}).
std::uint64_t degree_into(const Hypergraph& h, Vertex v, std::span<const VertexSet> sets);
std::uint64_t degree_into_set(const Hypergraph& h, Vertex v, const VertexSet& u);

// deg(v; S) for every v at once; one scan over the edge list.
std::vector<std::uint64_t> degrees_into_set(const Hypergraph& h, const VertexSet& s);

DegreeReport degree_report(const Hypergraph& h);

bool is_linear(const Hypergraph& h);

// Vertices of the line graph are the edge ids of h; two connected iff the
// edges intersect. Meant for motif-sized inputs.
Hypergraph line_graph(const Hypergraph& h);

struct Induced {
    Hypergraph graph;
    std::vector<Vertex> kept;  // new index -> old vertex
};
Induced induced(const Hypergraph& h, const VertexSet& s);

Violations validate_rooted(const RootedMotif& m);

// ".hg" text format: '#' comments, "k n" header, one edge per line.
Hypergraph read_hg(std::istream& in);
Hypergraph read_hg_file(const std::string& path);
void write_hg(const Hypergraph& h, std::ostream& out);
void write_hg_file(const Hypergraph& h, const std::string& path);

}  // namespace hpr
