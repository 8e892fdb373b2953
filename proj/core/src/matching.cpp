#include "corematch/matching.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "corematch/errors.hpp"

namespace corematch {

namespace {

using nlohmann::json;

std::pair<int, int> normalized(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

} // namespace

Matching Matching::from_pairs(int n, std::vector<std::pair<int, int>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> target_used(static_cast<std::size_t>(n), 0);
    int prev_source = -1;
    for (const auto& [i, m] : pairs) {
        const std::string where = "matching pair (" + std::to_string(i) + ", " + std::to_string(m) + ")";
        if (i < 0 || i >= n || m < 0 || m >= n)
            throw std::invalid_argument(where + ": index out of range for n=" + std::to_string(n));
        if (i == prev_source) throw std::invalid_argument(where + ": duplicate source vertex");
        if (target_used[static_cast<std::size_t>(m)]) throw std::invalid_argument(where + ": duplicate target vertex");
        target_used[static_cast<std::size_t>(m)] = 1;
        prev_source = i;
    }
    Matching out;
    out.n_ = n;
    out.pairs_ = std::move(pairs);
    return out;
}

Matching Matching::from_permutation(const Permutation& pi) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(pi.size()));
    for (int i = 0; i < pi.size(); ++i) pairs.emplace_back(i, pi(i));
    return from_pairs(pi.size(), std::move(pairs));
}

Matching Matching::restriction(const Permutation& pi, const VertexSet& domain) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(domain.size()));
    for (int i : domain.members()) pairs.emplace_back(i, pi(i));
    return from_pairs(pi.size(), std::move(pairs));
}

bool Matching::matched(int i) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair<int, int>{i, -1});
    return it != pairs_.end() && it->first == i;
}

int Matching::image_of(int i) const {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), std::pair<int, int>{i, -1});
    if (it == pairs_.end() || it->first != i)
        throw std::invalid_argument("Matching: vertex " + std::to_string(i) + " is unmatched");
    return it->second;
}

VertexSet Matching::domain() const {
    std::vector<int> members;
    members.reserve(pairs_.size());
    for (const auto& [i, m] : pairs_) members.push_back(i);
    return VertexSet(n_, std::move(members));
}

VertexSet Matching::image_set() const {
    std::vector<int> members;
    members.reserve(pairs_.size());
    for (const auto& [i, m] : pairs_) members.push_back(m);
    return VertexSet(n_, std::move(members));
}

int Matching::mismatch_count(const Permutation& truth) const {
    int count = 0;
    for (const auto& [i, m] : pairs_)
        if (truth(i) != m) ++count;
    return count;
}

std::string Matching::to_json() const {
    json j;
    j["pairs"] = json::array();
    for (const auto& [i, m] : pairs_) j["pairs"].push_back(json::array({i, m}));
    return j.dump();
}

Matching Matching::from_json(int n, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("matching: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array())
        throw std::invalid_argument("matching: expected object with \"pairs\" array");
    std::vector<std::pair<int, int>> pairs;
    for (const auto& entry : j["pairs"]) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() || !entry[1].is_number_integer())
            throw std::invalid_argument("matching: each pair must be [i, mu_i]");
        pairs.emplace_back(entry[0].get<int>(), entry[1].get<int>());
    }
    return from_pairs(n, std::move(pairs));
}

Graph intersection_graph(const Graph& g1, const Graph& g2, const Matching& mu) {
    if (g1.vertex_count() != g2.vertex_count())
        throw std::invalid_argument("intersection_graph: graphs must have equal vertex counts");
    if (mu.ambient() != g1.vertex_count())
        throw std::invalid_argument("intersection_graph: matching ambient size mismatch");

    const auto& pairs = mu.pairs();
    std::vector<std::pair<int, int>> edges;
    for (std::size_t a = 0; a < pairs.size(); ++a) {
        for (std::size_t b = a + 1; b < pairs.size(); ++b) {
            const auto& [i, mi] = pairs[a];
            const auto& [j, mj] = pairs[b];
            if (g1.has_edge(i, j) && g2.has_edge(mi, mj)) edges.emplace_back(i, j);
        }
    }
    return Graph::from_edges(g1.vertex_count(), edges);
}

bool is_k_core_matching(const Graph& g1, const Graph& g2, const Matching& mu, int k) {
    if (mu.empty()) return true; // size-0 k-core matching by convention
    const auto& pairs = mu.pairs();
    for (std::size_t a = 0; a < pairs.size(); ++a) {
        int deg = 0;
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            if (a == b) continue;
            if (g1.has_edge(pairs[a].first, pairs[b].first) && g2.has_edge(pairs[a].second, pairs[b].second))
                ++deg;
        }
        if (deg < k) return false;
    }
    return true;
}

namespace {

// Lexicographically next r-combination of {0,...,n-1}; false when exhausted.
bool next_combination(std::vector<int>& comb, int n) {
    const int r = static_cast<int>(comb.size());
    for (int i = r - 1; i >= 0; --i) {
        if (comb[static_cast<std::size_t>(i)] < n - r + i) {
            ++comb[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < r; ++j)
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
            return true;
        }
    }
    return false;
}

// Recursively assigns targets to sorted sources in lexicographic target
// order, invoking visit on every complete injection until it returns true.
bool for_each_injection(const std::vector<int>& sources, int n, std::size_t idx, std::vector<char>& used,
                        std::vector<std::pair<int, int>>& assignment,
                        const std::function<bool(const std::vector<std::pair<int, int>>&)>& visit) {
    if (idx == sources.size()) return visit(assignment);
    for (int t = 0; t < n; ++t) {
        if (used[static_cast<std::size_t>(t)]) continue;
        used[static_cast<std::size_t>(t)] = 1;
        assignment.emplace_back(sources[idx], t);
        const bool done = for_each_injection(sources, n, idx + 1, used, assignment, visit);
        assignment.pop_back();
        used[static_cast<std::size_t>(t)] = 0;
        if (done) return true;
    }
    return false;
}

} // namespace

Matching brute_force_k_core_estimator(const Graph& g1, const Graph& g2, int k, int limit) {
    if (g1.vertex_count() != g2.vertex_count())
        throw std::invalid_argument("brute_force_k_core_estimator: graphs must have equal vertex counts");
    if (k < 1) throw std::invalid_argument("brute_force_k_core_estimator: k must be >= 1");
    const int n = g1.vertex_count();
    if (n > limit)
        throw capacity_error("brute_force_k_core_estimator: n=" + std::to_string(n) + " exceeds limit " +
                             std::to_string(limit));

    for (int size = n; size >= 1; --size) {
        std::vector<int> comb(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) comb[static_cast<std::size_t>(i)] = i;
        do {
            std::vector<char> used(static_cast<std::size_t>(n), 0);
            std::vector<std::pair<int, int>> assignment;
            assignment.reserve(static_cast<std::size_t>(size));
            Matching found;
            const bool hit = for_each_injection(
                comb, n, 0, used, assignment, [&](const std::vector<std::pair<int, int>>& pairs) {
                    Matching candidate = Matching::from_pairs(n, pairs);
                    if (is_k_core_matching(g1, g2, candidate, k)) {
                        found = std::move(candidate);
                        return true;
                    }
                    return false;
                });
            if (hit) return found;
        } while (next_combination(comb, n));
    }
    return Matching::from_pairs(n, {});
}

Matching ground_truth_core_matching(const CorrelatedPair& pair, int k) {
    const Graph h = intersection_graph(pair.g1, pair.g2, Matching::from_permutation(pair.truth));
    return Matching::restriction(pair.truth, k_core(h, k));
}

int mismatched_degree_sum(const Graph& g1, const Graph& g2, const Matching& mu, const Permutation& truth) {
    if (truth.size() != mu.ambient())
        throw std::invalid_argument("mismatched_degree_sum: permutation size mismatch");
    const auto& pairs = mu.pairs();
    int total = 0;
    for (std::size_t a = 0; a < pairs.size(); ++a) {
        const auto& [i, mi] = pairs[a];
        if (truth(i) == mi) continue;
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            if (a == b) continue;
            if (g1.has_edge(i, pairs[b].first) && g2.has_edge(mi, pairs[b].second)) ++total;
        }
    }
    return total;
}

bool is_weak_k_core_matching(const Graph& g1, const Graph& g2, const Matching& mu, const Permutation& truth,
                             int k) {
    return mismatched_degree_sum(g1, g2, mu, truth) >= k * mu.mismatch_count(truth);
}

bool is_maximal_matching(const Matching& mu, const Permutation& truth) {
    if (truth.size() != mu.ambient())
        throw std::invalid_argument("is_maximal_matching: permutation size mismatch");
    const VertexSet image = mu.image_set();
    for (int i = 0; i < truth.size(); ++i)
        if (!mu.matched(i) && !image.contains(truth(i))) return false;
    return true;
}

std::vector<Matching> enumerate_maximal_matchings(const Permutation& truth, int errors, int limit) {
    const int n = truth.size();
    if (n > limit)
        throw capacity_error("enumerate_maximal_matchings: n=" + std::to_string(n) + " exceeds limit " +
                             std::to_string(limit));
    if (errors < 0) throw std::invalid_argument("enumerate_maximal_matchings: negative error count");

    std::vector<Matching> out;
    for (int size = 0; size <= n; ++size) {
        std::vector<int> comb(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) comb[static_cast<std::size_t>(i)] = i;
        bool more = true;
        while (more) {
            std::vector<char> used(static_cast<std::size_t>(n), 0);
            std::vector<std::pair<int, int>> assignment;
            for_each_injection(comb, n, 0, used, assignment, [&](const std::vector<std::pair<int, int>>& pairs) {
                Matching candidate = Matching::from_pairs(n, pairs);
                if (candidate.mismatch_count(truth) == errors && is_maximal_matching(candidate, truth))
                    out.push_back(std::move(candidate));
                return false; // keep enumerating
            });
            more = size > 0 && next_combination(comb, n);
            if (size == 0) break;
        }
    }
    return out;
}

namespace {

// Dependency-graph vertices are unordered cross pairs; adjacency holds when
// the edge indicators of the two pairs involve a common parent edge.
struct DependencyGraph {
    std::vector<std::pair<int, int>> vertices; // sorted
    std::vector<std::vector<int>> adj;
};

DependencyGraph build_dependency_graph(const std::vector<std::pair<int, int>>& cross_pairs, const Matching& mu,
                                       const Permutation& truth) {
    DependencyGraph h;
    for (const auto& [i, j] : cross_pairs)
        if (i != j) h.vertices.push_back(normalized(i, j));
    std::sort(h.vertices.begin(), h.vertices.end());
    h.vertices.erase(std::unique(h.vertices.begin(), h.vertices.end()), h.vertices.end());

    std::map<std::pair<int, int>, int> index;
    for (std::size_t v = 0; v < h.vertices.size(); ++v) index[h.vertices[v]] = static_cast<int>(v);

    const Permutation truth_inv = truth.inverse();
    std::map<int, int> mu_inv;
    for (const auto& [i, m] : mu.pairs()) mu_inv[m] = i;

    h.adj.resize(h.vertices.size());
    for (std::size_t v = 0; v < h.vertices.size(); ++v) {
        const auto [i, j] = h.vertices[v];
        std::vector<int> nbrs;
        // {mu(i), mu(j)} = {truth(a), truth(b)}
        {
            const auto cand = normalized(truth_inv(mu.image_of(i)), truth_inv(mu.image_of(j)));
            auto it = index.find(cand);
            if (it != index.end() && it->second != static_cast<int>(v)) nbrs.push_back(it->second);
        }
        // {mu(a), mu(b)} = {truth(i), truth(j)}
        {
            auto a_it = mu_inv.find(truth(i));
            auto b_it = mu_inv.find(truth(j));
            if (a_it != mu_inv.end() && b_it != mu_inv.end() && a_it->second != b_it->second) {
                const auto cand = normalized(a_it->second, b_it->second);
                auto it = index.find(cand);
                if (it != index.end() && it->second != static_cast<int>(v)) nbrs.push_back(it->second);
            }
        }
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        h.adj[v] = std::move(nbrs);
    }
    return h;
}

} // namespace

ErrorDecomposition decompose_errors(const Matching& mu, const Permutation& truth) {
    if (truth.size() != mu.ambient())
        throw std::invalid_argument("decompose_errors: permutation size mismatch");

    ErrorDecomposition out;
    const auto& pairs = mu.pairs();
    for (const auto& [i, mi] : pairs) {
        if (truth(i) == mi) continue;
        ++out.error_count;
        for (const auto& [j, mj] : pairs) {
            out.mismatch_pairs.emplace_back(i, j);
            if (mu.image_of(i) == truth(j) && mj == truth(i))
                out.swap_pairs.emplace_back(i, j);
            else
                out.cross_pairs.emplace_back(i, j);
        }
    }
    std::sort(out.mismatch_pairs.begin(), out.mismatch_pairs.end());
    std::sort(out.swap_pairs.begin(), out.swap_pairs.end());
    std::sort(out.cross_pairs.begin(), out.cross_pairs.end());

    const DependencyGraph h = build_dependency_graph(out.cross_pairs, mu, truth);
    std::vector<int> color(h.vertices.size(), 0);
    for (std::size_t v = 0; v < h.vertices.size(); ++v) {
        bool used[4] = {false, false, false, false};
        for (int w : h.adj[v])
            if (static_cast<std::size_t>(w) < v && color[static_cast<std::size_t>(w)] <= 3)
                used[color[static_cast<std::size_t>(w)]] = true;
        int c = 1;
        while (c <= 3 && used[c]) ++c;
        if (c > 3) throw internal_error("decompose_errors: dependency graph required a fourth color");
        color[v] = c;
    }

    std::map<std::pair<int, int>, int> vertex_color;
    for (std::size_t v = 0; v < h.vertices.size(); ++v) vertex_color[h.vertices[v]] = color[v];
    for (const auto& [i, j] : out.cross_pairs) {
        // diagonal pairs carry no parent edge; color 1 unconditionally
        out.coloring[{i, j}] = i == j ? 1 : vertex_color.at(normalized(i, j));
    }
    return out;
}

int dependency_graph_max_degree(const Matching& mu, const Permutation& truth) {
    ErrorDecomposition d = decompose_errors(mu, truth);
    const DependencyGraph h = build_dependency_graph(d.cross_pairs, mu, truth);
    int max_deg = 0;
    for (const auto& nbrs : h.adj) max_deg = std::max(max_deg, static_cast<int>(nbrs.size()));
    return max_deg;
}

std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> dependency_graph_edges(
    const Matching& mu, const Permutation& truth) {
    ErrorDecomposition d = decompose_errors(mu, truth);
    const DependencyGraph h = build_dependency_graph(d.cross_pairs, mu, truth);
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> edges;
    for (std::size_t v = 0; v < h.vertices.size(); ++v)
        for (int w : h.adj[v])
            if (static_cast<int>(v) < w)
                edges.emplace_back(h.vertices[v], h.vertices[static_cast<std::size_t>(w)]);
    return edges;
}

} // namespace corematch
