#include "corematch/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace corematch {

Graph::Graph(int n) : n_(n), m_(0), adj_(static_cast<std::size_t>(std::max(n, 0))) {
    if (n < 0) throw std::invalid_argument("Graph: vertex count must be nonnegative");
}

Graph Graph::from_edges(int n, std::span<const std::pair<int, int>> edges) {
    Graph g(n);
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("Graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                        ") out of range for n=" + std::to_string(n));
        if (u == v)
            throw std::invalid_argument("Graph: self-loop at vertex " + std::to_string(u));
        g.adj_[static_cast<std::size_t>(u)].push_back(v);
        g.adj_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (int v = 0; v < n; ++v) {
        auto& nb = g.adj_[static_cast<std::size_t>(v)];
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
            throw std::invalid_argument("Graph: duplicate edge at vertex " + std::to_string(v));
        g.m_ += static_cast<int>(nb.size());
    }
    g.m_ /= 2;
    return g;
}

Graph Graph::complete(int n) {
    Graph g(n);
    for (int v = 0; v < n; ++v) {
        auto& nb = g.adj_[static_cast<std::size_t>(v)];
        nb.reserve(static_cast<std::size_t>(n - 1));
        for (int u = 0; u < n; ++u)
            if (u != v) nb.push_back(u);
    }
    g.m_ = n * (n - 1) / 2;
    return g;
}

void Graph::check_vertex(int v) const {
    if (v < 0 || v >= n_)
        throw std::invalid_argument("Graph: vertex " + std::to_string(v) + " out of range for n=" +
                                    std::to_string(n_));
}

const std::vector<int>& Graph::neighbors(int v) const {
    check_vertex(v);
    return adj_[static_cast<std::size_t>(v)];
}

int Graph::degree(int v) const {
    check_vertex(v);
    return static_cast<int>(adj_[static_cast<std::size_t>(v)].size());
}

bool Graph::has_edge(int u, int v) const {
    check_vertex(u);
    check_vertex(v);
    const auto& nb = adj_[static_cast<std::size_t>(u)];
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(m_));
    for (int u = 0; u < n_; ++u)
        for (int v : adj_[static_cast<std::size_t>(u)])
            if (u < v) out.emplace_back(u, v);
    return out;
}

VertexSet::VertexSet(int ambient, std::vector<int> members) : n_(ambient), members_(std::move(members)) {
    if (ambient < 0) throw std::invalid_argument("VertexSet: ambient size must be nonnegative");
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty() && (members_.front() < 0 || members_.back() >= n_))
        throw std::invalid_argument("VertexSet: member out of range for n=" + std::to_string(n_));
}

VertexSet VertexSet::full(int n) {
    std::vector<int> all(static_cast<std::size_t>(std::max(n, 0)));
    for (int v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = v;
    return VertexSet(n, std::move(all));
}

VertexSet VertexSet::empty_set(int n) { return VertexSet(n, {}); }

bool VertexSet::contains(int v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
}

VertexSet VertexSet::complement() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n_ - size()));
    std::size_t i = 0;
    for (int v = 0; v < n_; ++v) {
        if (i < members_.size() && members_[i] == v) {
            ++i;
        } else {
            out.push_back(v);
        }
    }
    return VertexSet(n_, std::move(out));
}

bool VertexSet::is_subset_of(const VertexSet& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
}

int min_degree(const Graph& g) {
    if (g.vertex_count() == 0) throw std::invalid_argument("min_degree: empty graph");
    int md = g.degree(0);
    for (int v = 1; v < g.vertex_count(); ++v) md = std::min(md, g.degree(v));
    return md;
}

int edge_count_within(const Graph& g, const VertexSet& s) {
    if (s.ambient() != g.vertex_count())
        throw std::invalid_argument("edge_count_within: vertex set ambient size mismatch");
    int count = 0;
    for (int u : s.members())
        for (int v : g.neighbors(u))
            if (u < v && s.contains(v)) ++count;
    return count;
}

// Batagelj-Zaversnik bucket peeling. Vertices are processed in nondecreasing
// order of current degree; the degree at removal time is the core number.
std::vector<int> core_numbers(const Graph& g) {
    const int n = g.vertex_count();
    std::vector<int> deg(static_cast<std::size_t>(n));
    int max_deg = 0;
    for (int v = 0; v < n; ++v) {
        deg[static_cast<std::size_t>(v)] = g.degree(v);
        max_deg = std::max(max_deg, deg[static_cast<std::size_t>(v)]);
    }

    std::vector<int> bucket_start(static_cast<std::size_t>(max_deg + 2), 0);
    for (int v = 0; v < n; ++v) ++bucket_start[static_cast<std::size_t>(deg[v] + 1)];
    for (std::size_t d = 1; d < bucket_start.size(); ++d) bucket_start[d] += bucket_start[d - 1];

    std::vector<int> order(static_cast<std::size_t>(n));
    std::vector<int> pos(static_cast<std::size_t>(n));
    {
        std::vector<int> next = bucket_start;
        for (int v = 0; v < n; ++v) {
            pos[static_cast<std::size_t>(v)] = next[static_cast<std::size_t>(deg[v])];
            order[static_cast<std::size_t>(pos[v])] = v;
            ++next[static_cast<std::size_t>(deg[v])];
        }
    }

    std::vector<int> core(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int v = order[static_cast<std::size_t>(i)];
        core[static_cast<std::size_t>(v)] = deg[static_cast<std::size_t>(v)];
        for (int u : g.neighbors(v)) {
            if (deg[static_cast<std::size_t>(u)] > deg[static_cast<std::size_t>(v)]) {
                // move u one bucket down: swap it with the first vertex of its bucket
                const int du = deg[static_cast<std::size_t>(u)];
                const int pu = pos[static_cast<std::size_t>(u)];
                const int pw = bucket_start[static_cast<std::size_t>(du)];
                const int w = order[static_cast<std::size_t>(pw)];
                if (u != w) {
                    std::swap(order[static_cast<std::size_t>(pu)], order[static_cast<std::size_t>(pw)]);
                    pos[static_cast<std::size_t>(u)] = pw;
                    pos[static_cast<std::size_t>(w)] = pu;
                }
                ++bucket_start[static_cast<std::size_t>(du)];
                --deg[static_cast<std::size_t>(u)];
            }
        }
    }
    return core;
}

VertexSet k_core(const Graph& g, int k) {
    if (k < 0) throw std::invalid_argument("k_core: k must be nonnegative");
    if (k == 0) return VertexSet::full(g.vertex_count());
    const std::vector<int> core = core_numbers(g);
    std::vector<int> members;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (core[static_cast<std::size_t>(v)] >= k) members.push_back(v);
    return VertexSet(g.vertex_count(), std::move(members));
}

InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& s) {
    if (s.ambient() != g.vertex_count())
        throw std::invalid_argument("induced_subgraph: vertex set ambient size mismatch");
    const auto& members = s.members();
    std::vector<int> to_local(static_cast<std::size_t>(g.vertex_count()), -1);
    for (std::size_t i = 0; i < members.size(); ++i)
        to_local[static_cast<std::size_t>(members[i])] = static_cast<int>(i);

    std::vector<std::pair<int, int>> edges;
    for (int u : members)
        for (int v : g.neighbors(u))
            if (u < v && to_local[static_cast<std::size_t>(v)] >= 0)
                edges.emplace_back(to_local[static_cast<std::size_t>(u)], to_local[static_cast<std::size_t>(v)]);

    return InducedSubgraph{Graph::from_edges(s.size(), edges), members};
}

Graph read_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("edge list: missing header line");
    std::istringstream header(line);
    long long n = 0, m = 0;
    if (!(header >> n >> m) || n < 0 || m < 0)
        throw std::invalid_argument("edge list: header must be 'n m' with nonnegative counts");
    std::string extra;
    if (header >> extra) throw std::invalid_argument("edge list: trailing tokens after header");

    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long i = 0; i < m; ++i) {
        long long u = 0, v = 0;
        if (!(in >> u >> v))
            throw std::invalid_argument("edge list: expected " + std::to_string(m) + " edges, got " +
                                        std::to_string(i));
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("edge list: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                        ") out of range");
        if (u == v)
            throw std::invalid_argument("edge list: self-loop at vertex " + std::to_string(u));
        if (u > v)
            throw std::invalid_argument("edge list: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                        ") must satisfy u < v");
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    // from_edges rejects duplicates
    return Graph::from_edges(static_cast<int>(n), edges);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    out << g.vertex_count() << ' ' << g.edge_count() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

} // namespace corematch
