#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "corematch/graph.hpp"
#include "corematch/models.hpp"

namespace corematch {

/// Partial injective map between two vertex sets of equal size n. Pairs are
/// kept sorted by source vertex.
class Matching {
public:
    Matching() = default;

    /// Validates sources distinct, targets distinct, indices in [0, n).
    /// Throws std::invalid_argument naming the offending pair.
    static Matching from_pairs(int n, std::vector<std::pair<int, int>> pairs);
    static Matching from_permutation(const Permutation& pi);
    /// pi restricted to the given domain.
    static Matching restriction(const Permutation& pi, const VertexSet& domain);

    int ambient() const { return n_; }
    int size() const { return static_cast<int>(pairs_.size()); }
    bool empty() const { return pairs_.empty(); }
    bool matched(int i) const;
    int image_of(int i) const;
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    VertexSet domain() const;
    VertexSet image_set() const;

    /// Number of matched vertices whose image differs from truth.
    int mismatch_count(const Permutation& truth) const;

    /// {"pairs": [[i, mu_i], ...]} sorted by i.
    std::string to_json() const;
    static Matching from_json(int n, const std::string& text);

    bool operator==(const Matching&) const = default;

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> pairs_;
};

/// Intersection graph of (g1, g2) under mu: vertices keep their global ids;
/// (i, j) is an edge iff (i, j) is in g1 and (mu(i), mu(j)) is in g2.
/// Unmatched vertices are isolated.
Graph intersection_graph(const Graph& g1, const Graph& g2, const Matching& mu);

/// True iff every matched vertex has degree >= k in the intersection graph.
/// The empty matching counts as a k-core matching of size 0.
bool is_k_core_matching(const Graph& g1, const Graph& g2, const Matching& mu, int k);

/// Maximum-cardinality k-core matching by exhaustive enumeration (subsets by
/// size descending then lexicographic; injections in lexicographic target
/// order), so ties resolve to the lexicographically smallest matching.
/// Returns the empty matching when none exists. Refuses n > limit.
Matching brute_force_k_core_estimator(const Graph& g1, const Graph& g2, int k, int limit = 8);

/// The matching the estimator is expected to coincide with: the k-core of
/// the truth-aligned intersection graph, matched by the truth itself.
Matching ground_truth_core_matching(const CorrelatedPair& pair, int k);

/// Sum over incorrectly matched vertices of their intersection-graph degree.
int mismatched_degree_sum(const Graph& g1, const Graph& g2, const Matching& mu, const Permutation& truth);

/// True iff the total intersection degree of mismatched vertices is at least
/// k times their number.
bool is_weak_k_core_matching(const Graph& g1, const Graph& g2, const Matching& mu, const Permutation& truth,
                             int k);

/// True iff every vertex is matched or its true partner is already used as a
/// target.
bool is_maximal_matching(const Matching& mu, const Permutation& truth);

/// All maximal matchings (w.r.t. truth) with exactly the given number of
/// mismatched vertices, in deterministic order (|M| ascending, then M
/// lexicographic, then target tuples lexicographic). Refuses n > limit.
std::vector<Matching> enumerate_maximal_matchings(const Permutation& truth, int errors, int limit = 7);

/// Decomposition of the ordered pairs touched by matching errors:
///   mismatch_pairs: (i, j) in M^2 with mu(i) != truth(i)
///   swap_pairs:     those where mu(i) = truth(j) and mu(j) = truth(i)
///   cross_pairs:    the rest
/// The dependency graph on unordered cross pairs (two pairs adjacent when
/// their edge indicators share a parent edge) has maximum degree 2 and is
/// greedily 3-colored; coloring maps every cross pair to its color.
struct ErrorDecomposition {
    int error_count = 0;
    std::vector<std::pair<int, int>> mismatch_pairs;
    std::vector<std::pair<int, int>> swap_pairs;
    std::vector<std::pair<int, int>> cross_pairs;
    std::map<std::pair<int, int>, int> coloring; // colors in {1, 2, 3}
};
ErrorDecomposition decompose_errors(const Matching& mu, const Permutation& truth);

/// Maximum degree of the dependency graph built by decompose_errors.
int dependency_graph_max_degree(const Matching& mu, const Permutation& truth);

/// Edges of that dependency graph, as pairs of normalized (min, max) cross
/// pairs, each edge listed once.
std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> dependency_graph_edges(
    const Matching& mu, const Permutation& truth);

} // namespace corematch
