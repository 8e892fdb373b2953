#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corematch/graph.hpp"
#include "corematch/models.hpp"

namespace corematch {

/// Minimum expected degree: smallest row sum of the probability matrix.
double min_expected_degree(const EdgeProbabilities& probs);

/// Heterogeneity ratio (n-1) * p_max / d_min; 1 for constant matrices.
/// Rejects d_min = 0.
double heterogeneity_ratio(const EdgeProbabilities& probs);

/// Chernoff upper bound on the expected number of vertices with degree <= k:
/// (1/(1-c))^k * sum_i exp(-c * row_sum(i)), valid for any c in (0,1).
double low_degree_expectation_bound(const EdgeProbabilities& probs, int k, double c);

/// Vertices with degree <= k.
VertexSet low_degree_vertices(const Graph& g, int k);

/// Vertices outside the k-core.
VertexSet core_complement(const Graph& g, int k);

/// Exhaustive check that no vertex subset of size up to
/// min(floor(3n/(4 gamma^2)), size_cap) induces more than 2|S| edges.
/// Enumeration walks subsets in DFS prefix order (vertices ascending), so a
/// reported witness is the first violation in that order. Throws
/// capacity_error when the subset count exceeds the budget.
struct DensityCheckResult {
    bool passed = true;
    int limit = 0;                            // effective size limit
    std::uint64_t subsets_checked = 0;
    std::optional<std::vector<int>> witness;  // violating subset, if any
};
DensityCheckResult subgraph_density_check(const Graph& g, double gamma, int size_cap = 1 << 30,
                                          std::uint64_t budget = 10'000'000);

/// Iterative expansion from the set of vertices with degree <= k+1: grows by
/// absorbing the smallest-index outside vertex with at least 3 neighbors
/// inside, until none qualifies. The complement of the final level always has
/// induced minimum degree >= k, so it contains the k-core.
struct ExpansionTrace {
    std::vector<VertexSet> levels; // levels[0] is the seed set
    const VertexSet& final_level() const { return levels.back(); }
};
ExpansionTrace expansion_closure(const Graph& g, int k);

/// Non-vanishing term of the exact-recovery failure bound:
/// (1/(1-c))^(k-1) * sum_i exp(-c * row_sum(i) * s^2).
double exact_recovery_error_bound(const EdgeProbabilities& probs, double s, int k, double c);

/// Chernoff bound on P(total mismatched intersection degree >= k * errors)
/// for a maximal matching with the given error count:
/// 3 * exp(-errors * (theta k - e^{2 theta} p_max s^2 - n e^{6 theta} p_max^2 s^2)).
double weak_matching_probability_bound(double p_max, double s, int n, int k, int errors, double theta);

/// Per-error rate bound, minimized over a theta grid (the error_count = 1
/// case dominates the factor 3); reports the leading term only and whether
/// n^2 * rate falls below the tolerance.
struct WeakMatchingRateBound {
    double rate = 0.0;
    double theta = 0.0;
    double n_squared_rate = 0.0;
    bool below_tolerance = false;
    double success_probability_bound = 0.0; // 2 - exp(n^2 * rate); vacuous when negative
};
WeakMatchingRateBound weak_matching_rate_bound(double p_max, double s, int n, int k,
                                               std::span<const double> theta_grid, double tolerance = 1.0);

/// theta = c * log n for 10 values of c spanning (2.1/k, (2 alpha - 1)/6);
/// falls back to a fixed positive grid when that interval is empty.
std::vector<double> default_theta_grid(int n, int k, double alpha);

/// Guaranteed matched fraction max(0, 1 - 3 exp(-d_min s^2 / 7)).
double partial_fraction_bound(double d_min, double s);

/// Knobs for the recovery-condition checkers.
struct BoundParams {
    double c = 0.5;       // Chernoff tilt in (0,1)
    double theta = 0.0;   // optional fixed exponential tilt (> 0 when set)
    double alpha = 0.75;  // sparsity exponent in (1/2, 1]
    double epsilon = 0.1; // slack > 0
    int k = 13;           // core order >= 1
    void validate() const;
};

/// One evaluated inequality. margin is signed so that >= 0 means satisfied.
struct ConditionClause {
    std::string name;
    bool satisfied = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
};

/// Verdicts plus the raw quantities they were computed from.
struct ConditionReport {
    std::vector<ConditionClause> clauses;
    double d_min = 0.0;
    double heterogeneity = 0.0; // +inf when d_min = 0
    double p_max = 0.0;
    int n = 0;
    std::map<std::string, double> surrogates; // extra raw quantities
    bool all_satisfied() const;
    std::string to_json() const;
};

/// Exact-recovery conditions: generic clauses (minimum expected degree vs
/// (1+eps) log n, p_max vs n^-alpha, core order vs 12/(2 alpha - 1)) plus the
/// model-specific specializations where the spec has one.
ConditionReport check_exact_condition(const ModelSpec& spec, double s, const BoundParams& params);

/// Partial-matching conditions at core order 13: d_min s^2 vs the
/// heterogeneity ratio and vs 154, the density-scale surrogate
/// n p_max <= n^{1/8}, and the model-specific surrogate inequality.
ConditionReport check_partial_condition(const ModelSpec& spec, double s);

} // namespace corematch
