#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace corematch {

/// Simple undirected graph on vertices {0,...,n-1}. Immutable after
/// construction; neighbor lists are kept sorted. Safe to share across threads.
class Graph {
public:
    Graph() = default;
    /// Edgeless graph on n vertices.
    explicit Graph(int n);

    /// Builds from an edge list, validating range, self-loops and duplicates.
    static Graph from_edges(int n, std::span<const std::pair<int, int>> edges);
    static Graph complete(int n);

    int vertex_count() const { return n_; }
    int edge_count() const { return m_; }

    /// Sorted neighbor list of v.
    const std::vector<int>& neighbors(int v) const;
    int degree(int v) const;
    bool has_edge(int u, int v) const;

    /// All edges as (u, v) pairs with u < v, lexicographically sorted.
    std::vector<std::pair<int, int>> edges() const;

    bool operator==(const Graph&) const = default;

private:
    int n_ = 0;
    int m_ = 0;
    std::vector<std::vector<int>> adj_;

    void check_vertex(int v) const;
};

/// Subset of {0,...,n-1} with the ambient size recorded. Members are kept
/// sorted and deduplicated.
class VertexSet {
public:
    VertexSet() = default;
    VertexSet(int ambient, std::vector<int> members);

    static VertexSet full(int n);
    static VertexSet empty_set(int n);

    int ambient() const { return n_; }
    int size() const { return static_cast<int>(members_.size()); }
    bool empty() const { return members_.empty(); }
    bool contains(int v) const;
    const std::vector<int>& members() const { return members_; }

    VertexSet complement() const;
    bool is_subset_of(const VertexSet& other) const;

    bool operator==(const VertexSet&) const = default;

private:
    int n_ = 0;
    std::vector<int> members_;
};

/// Minimum degree over all vertices. Rejects the empty graph.
int min_degree(const Graph& g);

/// Number of edges with both endpoints in s.
int edge_count_within(const Graph& g, const VertexSet& s);

/// Core number of every vertex (largest k such that the vertex survives
/// peeling to minimum degree k), via bucket peeling in O(n + m).
std::vector<int> core_numbers(const Graph& g);

/// The k-core: unique maximal vertex set whose induced subgraph has minimum
/// degree >= k. Returned in the original index space. k = 0 yields all
/// vertices.
VertexSet k_core(const Graph& g, int k);

/// Induced subgraph reindexed to {0,...,|s|-1}; to_global maps local indices
/// back to the original vertex ids.
struct InducedSubgraph {
    Graph graph;
    std::vector<int> to_global;
};
InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& s);

/// Edge-list text format: first line "n m", then m lines "u v" with u < v,
/// 0-indexed. The reader rejects duplicates, self-loops, out-of-range and
/// malformed input.
Graph read_edge_list(std::istream& in);
void write_edge_list(const Graph& g, std::ostream& out);

} // namespace corematch
