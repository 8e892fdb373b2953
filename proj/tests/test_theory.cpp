#include <doctest.h>

#include <cmath>
#include <vector>

#include "corematch/errors.hpp"
#include "corematch/models.hpp"
#include "corematch/theory.hpp"

#include <json.hpp>

using namespace corematch;

namespace {

Graph from_edges(int n, std::vector<std::pair<int, int>> edges) { return Graph::from_edges(n, edges); }

Graph star_graph(int leaves) {
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
    return Graph::from_edges(leaves + 1, edges);
}

Graph random_graph(int n, double p, std::uint64_t seed) {
    RngStream rng(seed, 0);
    return sample_graph(build_probabilities(ErSpec{n, p}), rng);
}

EdgeProbabilities matrix3(double p01, double p02, double p12) {
    IrgSpec spec{3, {0.0, p01, p02, p01, 0.0, p12, p02, p12, 0.0}};
    return build_probabilities(spec);
}

const ConditionClause& clause_named(const ConditionReport& report, const std::string& name) {
    for (const auto& clause : report.clauses)
        if (clause.name == name) return clause;
    REQUIRE(false);
    return report.clauses.front();
}

} // namespace

TEST_CASE("minimum expected degree") {
    CHECK(min_expected_degree(build_probabilities(ErSpec{5, 0.2})) == doctest::Approx(4 * 0.2));
    CHECK(min_expected_degree(build_probabilities(ErSpec{5, 0.0})) == 0.0);
    // row sums {0.5, 0.7, 0.8}
    CHECK(min_expected_degree(matrix3(0.2, 0.3, 0.5)) == doctest::Approx(0.5));
}

TEST_CASE("heterogeneity ratio") {
    CHECK(heterogeneity_ratio(build_probabilities(ErSpec{100, 0.07})) == doctest::Approx(1.0));
    // one row sum halved relative to the constant case: rows {p, 2p, p}
    CHECK(heterogeneity_ratio(matrix3(0.3, 0.0, 0.3)) == doctest::Approx(2.0));
    CHECK_THROWS_AS(heterogeneity_ratio(build_probabilities(ErSpec{4, 0.0})), std::invalid_argument);
}

TEST_CASE("sbm heterogeneity dominated by the probability ratio") {
    for (int t = 0; t < 20; ++t) {
        RngStream rng(123, static_cast<std::uint64_t>(t));
        const int m = 2 + static_cast<int>(rng.next_below(3));
        const int n = 3 * m + static_cast<int>(rng.next_below(20));
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(m));
        for (int v = 0; v < n; ++v) blocks[static_cast<std::size_t>(v % m)].push_back(v);
        std::vector<std::vector<double>> q(static_cast<std::size_t>(m),
                                           std::vector<double>(static_cast<std::size_t>(m), 0.0));
        double q_max = 0.0, q_min = 1.0;
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                const double value = 0.05 + 0.4 * rng.next_unit();
                q[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = value;
                q[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = value;
                q_max = std::max(q_max, value);
                q_min = std::min(q_min, value);
            }
        const double ratio = heterogeneity_ratio(build_probabilities(SbmSpec{blocks, q}));
        CHECK(ratio <= q_max / q_min + 1e-12);
    }
}

TEST_CASE("low-degree expectation bound values") {
    const EdgeProbabilities two = build_probabilities(ErSpec{2, 1.0});
    CHECK(low_degree_expectation_bound(two, 0, 0.5) == doctest::Approx(2.0 * std::exp(-0.5)));
    CHECK(low_degree_expectation_bound(two, 1, 0.5) == doctest::Approx(4.0 * std::exp(-0.5)));
    // nondecreasing in k
    double prev = 0.0;
    for (int k = 0; k <= 6; ++k) {
        const double bound = low_degree_expectation_bound(build_probabilities(ErSpec{30, 0.2}), k, 0.4);
        CHECK(bound >= prev);
        prev = bound;
    }
    CHECK_THROWS_AS(low_degree_expectation_bound(two, 1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(low_degree_expectation_bound(two, 1, 1.0), std::invalid_argument);
}

TEST_CASE("low-degree vertex sets") {
    CHECK(low_degree_vertices(Graph::complete(4), 2).empty());
    CHECK(low_degree_vertices(star_graph(4), 1) == VertexSet(5, {1, 2, 3, 4}));
    CHECK(low_degree_vertices(Graph(4), 0) == VertexSet::full(4));
    for (int t = 0; t < 10; ++t) {
        const Graph g = random_graph(15, 0.3, 42 + static_cast<std::uint64_t>(t));
        for (int k = 0; k < 5; ++k)
            CHECK(low_degree_vertices(g, k).is_subset_of(low_degree_vertices(g, k + 1)));
    }
}

TEST_CASE("core complement") {
    const Graph pendant =
        from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {0, 4}});
    CHECK(core_complement(pendant, 3) == VertexSet(5, {4}));
    CHECK(core_complement(Graph::complete(5), 3).empty());
    const Graph path = from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
    CHECK(core_complement(path, 2) == VertexSet::full(4));
}

TEST_CASE("subgraph density check") {
    CHECK(subgraph_density_check(Graph(8), 1.0).passed);
    CHECK(subgraph_density_check(Graph::complete(3), 0.8).passed); // 3 edges <= 6

    const DensityCheckResult k6 = subgraph_density_check(Graph::complete(6), 0.8);
    CHECK(k6.limit >= 6);
    CHECK(!k6.passed);
    REQUIRE(k6.witness.has_value());
    CHECK(k6.witness->size() == 6); // 15 edges > 12

    CHECK_THROWS_AS(subgraph_density_check(Graph(40), 0.1, 40, 1000), capacity_error);
    CHECK_THROWS_AS(subgraph_density_check(Graph(8), 0.0), std::invalid_argument);

    // size cap bounds the scan
    const DensityCheckResult capped = subgraph_density_check(Graph::complete(6), 0.8, 3);
    CHECK(capped.limit == 3);
    CHECK(capped.passed); // every 3-subset has at most 3 <= 6 edges
}

TEST_CASE("expansion closure") {
    CHECK(expansion_closure(Graph::complete(6), 1).levels.size() == 1);
    CHECK(expansion_closure(Graph::complete(6), 1).final_level().empty()); // min degree 5 >= k+2

    const ExpansionTrace star = expansion_closure(star_graph(4), 1);
    REQUIRE(star.levels.size() == 2);
    CHECK(star.levels[0] == VertexSet(5, {1, 2, 3, 4}));
    CHECK(star.levels[1] == VertexSet::full(5));
}

TEST_CASE("expansion closure always contains the core complement") {
    for (int t = 0; t < 60; ++t) {
        RngStream rng(7000, static_cast<std::uint64_t>(t));
        const int n = 8 + static_cast<int>(rng.next_below(9));
        const Graph g = random_graph(n, 0.1 + 0.3 * rng.next_unit(), 7100 + static_cast<std::uint64_t>(t));
        for (int k = 1; k <= 3; ++k) {
            const ExpansionTrace trace = expansion_closure(g, k);
            CHECK(core_complement(g, k).is_subset_of(trace.final_level()));
            const VertexSet rest = trace.final_level().complement();
            if (!rest.empty()) {
                const Graph sub = induced_subgraph(g, rest).graph;
                if (sub.vertex_count() > 0) CHECK(min_degree(sub) >= k);
            }
            // levels grow one vertex at a time
            for (std::size_t level = 1; level < trace.levels.size(); ++level) {
                CHECK(trace.levels[level - 1].is_subset_of(trace.levels[level]));
                CHECK(trace.levels[level].size() == trace.levels[level - 1].size() + 1);
            }
        }
    }
}

TEST_CASE("conditional expansion size bound") {
    int evaluated = 0;
    for (int t = 0; t < 200; ++t) {
        const int n = 16;
        const double gamma = 1.0 + (t % 2) * 0.2;
        const Graph g = random_graph(n, gamma / n, 7500 + static_cast<std::uint64_t>(t));
        const DensityCheckResult density = subgraph_density_check(g, gamma);
        for (int k = 1; k <= 2; ++k) {
            const VertexSet seed_set = low_degree_vertices(g, k + 1);
            if (!density.passed || seed_set.size() > n / (4.0 * gamma * gamma)) continue;
            ++evaluated;
            CHECK(core_complement(g, k).size() <= 3 * seed_set.size());
        }
    }
    MESSAGE("conditional bound evaluated on ", evaluated, " of 400 (graph, k) cases");
}

TEST_CASE("exact recovery error bound") {
    const EdgeProbabilities two = build_probabilities(ErSpec{2, 1.0});
    CHECK(exact_recovery_error_bound(two, 1.0, 1, 0.5) == doctest::Approx(2.0 * std::exp(-0.5)));

    // equals the low-degree bound on s^2-scaled probabilities at order k-1
    for (int t = 0; t < 10; ++t) {
        RngStream rng(345, static_cast<std::uint64_t>(t));
        const double p = 0.02 + 0.2 * rng.next_unit();
        const double s = 0.3 + 0.7 * rng.next_unit();
        const int k = 1 + static_cast<int>(rng.next_below(5));
        const double c = 0.2 + 0.6 * rng.next_unit();
        const EdgeProbabilities probs = build_probabilities(ErSpec{40, p});
        const EdgeProbabilities scaled = build_probabilities(ErSpec{40, p * s * s});
        CHECK(exact_recovery_error_bound(probs, s, k, c) ==
              doctest::Approx(low_degree_expectation_bound(scaled, k - 1, c)).epsilon(1e-12));
    }

    // decreasing in s
    double prev = 1e18;
    for (double s : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        const double bound = exact_recovery_error_bound(build_probabilities(ErSpec{50, 0.3}), s, 3, 0.5);
        CHECK(bound <= prev);
        prev = bound;
    }
}

TEST_CASE("weak matching probability bound") {
    CHECK(weak_matching_probability_bound(0.0, 0.8, 50, 3, 4, 0.7) ==
          doctest::Approx(3.0 * std::exp(-4.0 * 0.7 * 3)));
    // decreasing in the error count when the exponent is positive
    double prev = 1e18;
    for (int d = 1; d <= 6; ++d) {
        const double bound = weak_matching_probability_bound(0.01, 0.8, 50, 5, d, 0.5);
        CHECK(bound < prev);
        prev = bound;
    }
    CHECK_THROWS_AS(weak_matching_probability_bound(0.1, 0.8, 50, 3, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(weak_matching_probability_bound(0.1, 0.8, 50, 3, 0, 0.7), std::invalid_argument);
}

TEST_CASE("weak matching rate bound") {
    // sparse regime: theta = c log n with c = 0.11, alpha = 0.9, k = 20
    const int n = 10000;
    const double p_max = std::pow(n, -0.9);
    const std::vector<double> grid = {0.11 * std::log(n)};
    const WeakMatchingRateBound bound = weak_matching_rate_bound(p_max, 1.0, n, 20, grid);
    CHECK(bound.n_squared_rate < 1.0);
    CHECK(bound.below_tolerance);

    // p_max = 0: bound is 3 e^{-theta k}, minimized at the largest theta
    const std::vector<double> grid2 = {0.1, 0.5, 0.9};
    const WeakMatchingRateBound zero = weak_matching_rate_bound(0.0, 1.0, 100, 4, grid2);
    CHECK(zero.theta == 0.9);
    CHECK(zero.rate == doctest::Approx(3.0 * std::exp(-0.9 * 4)));

    // nonincreasing in k at fixed theta
    double prev = 1e18;
    for (int k = 1; k <= 6; ++k) {
        const double rate = weak_matching_rate_bound(0.001, 0.9, 200, k, grid2).rate;
        CHECK(rate <= prev);
        prev = rate;
    }
    CHECK_THROWS_AS(weak_matching_rate_bound(0.1, 1.0, 10, 3, std::span<const double>{}),
                    std::invalid_argument);
}

TEST_CASE("default theta grid") {
    const auto grid = default_theta_grid(10000, 20, 0.9);
    CHECK(grid.size() == 10);
    CHECK(grid.front() == doctest::Approx((2.1 / 20) * std::log(10000.0)));
    CHECK(grid.back() == doctest::Approx((0.8 / 6) * std::log(10000.0)));
    // ill-formed regime falls back to a fixed positive grid
    const auto fallback = default_theta_grid(50, 3, 0.9);
    CHECK(fallback.size() == 20);
    for (double theta : fallback) CHECK(theta > 0.0);
}

TEST_CASE("partial fraction bound") {
    CHECK(partial_fraction_bound(154.0, 1.0) == doctest::Approx(1.0 - 3.0 * std::exp(-22.0)));
    CHECK(partial_fraction_bound(0.0, 1.0) == 0.0); // raw value -2, clamped
    // threshold inequality the 154 constant rests on
    CHECK(std::exp(-154.0 / 7.0) <= 1.0 / (6.0 * std::pow(154.0, 4.0)));
    // nondecreasing in d_min and s
    double prev = -1.0;
    for (double d : {0.0, 10.0, 50.0, 154.0, 300.0}) {
        const double f = partial_fraction_bound(d, 0.9);
        CHECK(f >= prev);
        prev = f;
    }
    prev = -1.0;
    for (double s : {0.0, 0.3, 0.6, 0.9, 1.0}) {
        const double f = partial_fraction_bound(200.0, s);
        CHECK(f >= prev);
        prev = f;
    }
}

TEST_CASE("exact condition report on the worked ER instance") {
    const int n = 10000;
    const double s = 0.9;
    const double p = 2.0 * std::log(n) / (n * s * s);
    const BoundParams params{0.5, 0.0, 0.6, 0.5, 16};
    const ConditionReport report = check_exact_condition(ErSpec{n, p}, s, params);

    const auto& degree = clause_named(report, "exact/min-expected-degree");
    CHECK(degree.satisfied);
    CHECK(degree.lhs == doctest::Approx(2.0 * std::log(n) * (n - 1.0) / n));
    CHECK(degree.rhs == doctest::Approx(1.5 * std::log(n)));

    const auto& pmax = clause_named(report, "exact/max-probability");
    CHECK(pmax.satisfied);
    CHECK(pmax.lhs == doctest::Approx(2.2741581e-3).epsilon(1e-4));
    CHECK(pmax.rhs == doctest::Approx(3.9810717e-3).epsilon(1e-6));

    const auto& core_order = clause_named(report, "exact/core-order");
    CHECK(!core_order.satisfied); // 16 < 12 / (2*0.6 - 1) = 60
    CHECK(core_order.rhs == doctest::Approx(60.0));

    CHECK(!report.all_satisfied());
}

TEST_CASE("partial condition reduces to the 154 clause for constant p") {
    const ConditionReport report = check_partial_condition(ErSpec{2000, 160.0 / 2000}, 1.0);
    CHECK(report.heterogeneity == doctest::Approx(1.0));
    CHECK(clause_named(report, "partial/min-expected-degree-vs-heterogeneity").satisfied);
    const auto& main_clause = clause_named(report, "partial/min-expected-degree-vs-154");
    CHECK(main_clause.rhs == 154.0);
    CHECK(main_clause.satisfied); // 1999 * 0.08 = 159.9 >= 154
    CHECK(report.surrogates.at("fraction_bound") ==
          doctest::Approx(1.0 - 3.0 * std::exp(-report.d_min / 7.0)));
}

TEST_CASE("sbm partial surrogate dominates the generic clause") {
    for (int t = 0; t < 20; ++t) {
        RngStream rng(650, static_cast<std::uint64_t>(t));
        const int m = 2 + static_cast<int>(rng.next_below(2));
        const int n = 200 + static_cast<int>(rng.next_below(200));
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(m));
        for (int v = 0; v < n; ++v) blocks[static_cast<std::size_t>(v % m)].push_back(v);
        std::vector<std::vector<double>> q(static_cast<std::size_t>(m),
                                           std::vector<double>(static_cast<std::size_t>(m)));
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                const double value = 0.3 + 0.6 * rng.next_unit();
                q[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = value;
                q[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = value;
            }
        const ConditionReport report = check_partial_condition(SbmSpec{blocks, q}, 1.0);
        // q_max / q_min upper-bounds the heterogeneity ratio, so the surrogate
        // verdict implies the generic one
        const auto& surrogate = clause_named(report, "partial/sbm-surrogate");
        const auto& generic = clause_named(report, "partial/min-expected-degree-vs-heterogeneity");
        if (surrogate.satisfied) CHECK(generic.satisfied);
    }
}

TEST_CASE("rgg partial surrogate algebra") {
    for (int t = 0; t < 20; ++t) {
        RngStream rng(660, static_cast<std::uint64_t>(t));
        const int n = 30 + static_cast<int>(rng.next_below(40));
        const RggSpec spec{3, sample_sphere_points(n, 3, rng), 0.5 + 1.2 * rng.next_unit(),
                           0.05 + 0.4 * rng.next_unit()};
        const double s = 0.5 + 0.5 * rng.next_unit();

        // neighbor count excluding the point itself
        int min_excl = n;
        for (int i = 0; i < n; ++i) {
            int count = 0;
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                double dist2 = 0.0;
                for (int d = 0; d < 3; ++d) {
                    const double diff = spec.points[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] -
                                        spec.points[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)];
                    dist2 += diff * diff;
                }
                if (std::sqrt(dist2) <= spec.r) ++count;
            }
            min_excl = std::min(min_excl, count);
        }
        if (min_excl == 0) continue;

        const EdgeProbabilities probs = build_probabilities(spec);
        CHECK(heterogeneity_ratio(probs) <= static_cast<double>(n) / min_excl + 1e-9);

        // p s^2 D >= s sqrt(n p)  <=>  p s^2 D >= n / D
        const double lhs = spec.p * s * s * min_excl;
        const bool via_sqrt = lhs >= s * std::sqrt(n * spec.p);
        const bool via_ratio = lhs >= static_cast<double>(n) / min_excl;
        CHECK(via_sqrt == via_ratio);
    }
}

TEST_CASE("condition report json carries the documented fields") {
    const ConditionReport report = check_partial_condition(ErSpec{100, 0.05}, 0.9);
    const auto j = nlohmann::json::parse(report.to_json());
    REQUIRE(j.contains("conditions"));
    REQUIRE(!j["conditions"].empty());
    for (const auto& clause : j["conditions"]) {
        CHECK(clause.contains("condition_name"));
        CHECK(clause.contains("verdict"));
        CHECK(clause.contains("lhs"));
        CHECK(clause.contains("rhs"));
        CHECK(clause.contains("margin"));
        REQUIRE(clause.contains("surrogates"));
        CHECK(clause["surrogates"].contains("d_min"));
        CHECK(clause["surrogates"].contains("R"));
        CHECK(clause["surrogates"].contains("p_max"));
        CHECK(clause["surrogates"].contains("n"));
    }
}

TEST_CASE("bound params validation") {
    CHECK_THROWS_AS((BoundParams{1.5, 0.0, 0.75, 0.1, 13}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((BoundParams{0.5, 0.0, 0.4, 0.1, 13}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((BoundParams{0.5, 0.0, 0.75, 0.0, 13}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((BoundParams{0.5, 0.0, 0.75, 0.1, 0}).validate(), std::invalid_argument);
    CHECK_NOTHROW((BoundParams{0.5, 0.0, 0.75, 0.1, 13}).validate());
}
