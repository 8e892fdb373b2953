#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "corematch/models.hpp"
#include "corematch/theory.hpp"

using namespace corematch;

namespace {

bool matrices_equal(const EdgeProbabilities& a, const EdgeProbabilities& b, double tol = 0.0) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j)
            if (std::abs(a.at(i, j) - b.at(i, j)) > tol) return false;
    return true;
}

void check_probability_invariants(const EdgeProbabilities& probs) {
    for (int i = 0; i < probs.size(); ++i) {
        CHECK(probs.at(i, i) == 0.0);
        for (int j = 0; j < probs.size(); ++j) {
            CHECK(probs.at(i, j) == probs.at(j, i));
            CHECK(probs.at(i, j) >= 0.0);
            CHECK(probs.at(i, j) <= 1.0);
        }
    }
}

} // namespace

TEST_CASE("sbm with one block reduces to er") {
    const SbmSpec sbm{{{0, 1, 2, 3}}, {{0.3}}};
    const EdgeProbabilities probs = build_probabilities(sbm);
    check_probability_invariants(probs);
    CHECK(matrices_equal(probs, build_probabilities(ErSpec{4, 0.3})));
}

TEST_CASE("chung-lu with equal weights gives w/n") {
    const double w = 1.7;
    const int n = 6;
    const EdgeProbabilities probs = build_probabilities(ChungLuSpec{std::vector<double>(n, w)});
    check_probability_invariants(probs);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) CHECK(probs.at(i, j) == doctest::Approx(w / n).epsilon(1e-12));
}

TEST_CASE("rgg with radius 2 connects every pair") {
    RngStream rng(5, 0);
    const RggSpec spec{3, sample_sphere_points(5, 3, rng), 2.0, 0.4};
    const EdgeProbabilities probs = build_probabilities(spec);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (i != j) CHECK(probs.at(i, j) == 0.4);
}

TEST_CASE("model validation names the offender") {
    CHECK_THROWS_WITH_AS(build_probabilities(ChungLuSpec{{1.0, -0.5}}),
                         doctest::Contains("weight 1"), std::invalid_argument);
    // vertex 2 in two blocks
    CHECK_THROWS_WITH_AS(build_probabilities(SbmSpec{{{0, 2}, {1, 2}}, {{0.1, 0.1}, {0.1, 0.1}}}),
                         doctest::Contains("vertex 2"), std::invalid_argument);
    // asymmetric explicit matrix
    IrgSpec irg{2, {0.0, 0.2, 0.3, 0.0}};
    CHECK_THROWS_AS(build_probabilities(irg), std::invalid_argument);
    // non-unit point
    RggSpec rgg{2, {{1.0, 0.0}, {0.5, 0.5}}, 1.0, 0.5};
    CHECK_THROWS_WITH_AS(build_probabilities(rgg), doctest::Contains("point 1"), std::invalid_argument);
    // admissibility: max w > sqrt(sum w)
    CHECK_THROWS_AS(build_probabilities(ChungLuSpec{{9.0, 1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(build_probabilities(ErSpec{4, 1.5}), std::invalid_argument);
}

TEST_CASE("sbm block relabeling leaves the matrix unchanged") {
    const SbmSpec fixed_a{{{0, 3}, {1, 4}, {2, 5}}, {{0.1, 0.2, 0.3}, {0.2, 0.4, 0.5}, {0.3, 0.5, 0.6}}};
    // blocks and q rows/columns permuted together by (2 0 1)
    const SbmSpec fixed_b{{{2, 5}, {0, 3}, {1, 4}}, {{0.6, 0.3, 0.5}, {0.3, 0.1, 0.2}, {0.5, 0.2, 0.4}}};
    CHECK(matrices_equal(build_probabilities(fixed_a), build_probabilities(fixed_b)));

    for (int t = 0; t < 10; ++t) {
        RngStream rng(2026, static_cast<std::uint64_t>(t));
        const int m = 2 + static_cast<int>(rng.next_below(3));
        const int n = m + static_cast<int>(rng.next_below(15));
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(m));
        for (int v = 0; v < n; ++v)
            blocks[static_cast<std::size_t>(v < m ? v : rng.next_below(m))].push_back(v);
        std::vector<std::vector<double>> q(static_cast<std::size_t>(m),
                                           std::vector<double>(static_cast<std::size_t>(m)));
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b)
                q[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    q[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = rng.next_unit();

        const Permutation relabel = sample_permutation(m, rng);
        std::vector<std::vector<int>> blocks2(static_cast<std::size_t>(m));
        std::vector<std::vector<double>> q2(static_cast<std::size_t>(m),
                                            std::vector<double>(static_cast<std::size_t>(m)));
        for (int a = 0; a < m; ++a) {
            blocks2[static_cast<std::size_t>(relabel(a))] = blocks[static_cast<std::size_t>(a)];
            for (int b = 0; b < m; ++b)
                q2[static_cast<std::size_t>(relabel(a))][static_cast<std::size_t>(relabel(b))] =
                    q[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        }
        CHECK(matrices_equal(build_probabilities(SbmSpec{blocks, q}), build_probabilities(SbmSpec{blocks2, q2})));
    }
}

TEST_CASE("sampling the all-zero and all-one matrices") {
    RngStream rng(1, 0);
    CHECK(sample_graph(build_probabilities(ErSpec{6, 0.0}), rng).edge_count() == 0);
    CHECK(sample_graph(build_probabilities(ErSpec{6, 1.0}), rng) == Graph::complete(6));
}

TEST_CASE("er edge counts concentrate") {
    const int n = 1000;
    const double pairs = n * (n - 1) / 2.0;
    const double mean = pairs * 0.5;
    const double window = 3.0 * std::sqrt(pairs * 0.25);
    const EdgeProbabilities probs = build_probabilities(ErSpec{n, 0.5});
    int within = 0;
    for (int t = 0; t < 100; ++t) {
        RngStream rng(2024, static_cast<std::uint64_t>(t));
        const int m = sample_graph(probs, rng).edge_count();
        if (std::abs(m - mean) <= window) ++within;
    }
    CHECK(within >= 99);
}

TEST_CASE("sphere points are unit and centered") {
    RngStream rng(7, 0);
    const auto points = sample_sphere_points(10000, 2, rng);
    double sum_x = 0.0, sum_y = 0.0;
    for (const auto& p : points) {
        CHECK(std::abs(std::sqrt(p[0] * p[0] + p[1] * p[1]) - 1.0) <= 1e-9);
        sum_x += p[0];
        sum_y += p[1];
    }
    const double mean_norm = std::sqrt(sum_x * sum_x + sum_y * sum_y) / 10000.0;
    CHECK(mean_norm <= 0.05);

    RngStream again(7, 0);
    CHECK(sample_sphere_points(100, 2, again) == [] {
        RngStream r(7, 0);
        return sample_sphere_points(100, 2, r);
    }());
    CHECK_THROWS_AS(sample_sphere_points(3, 0, rng), std::invalid_argument);
}

TEST_CASE("correlated pair at s=1 relabels the parent") {
    const EdgeProbabilities probs = build_probabilities(ErSpec{8, 0.6});
    RngStream rng(11, 0);
    const CorrelatedSample sample = sample_correlated_pair_with_parent(probs, 1.0, rng);
    CHECK(sample.pair.g1 == sample.parent);
    CHECK(sample.pair.g2.edge_count() == sample.parent.edge_count());
    for (const auto& [u, v] : sample.parent.edges())
        CHECK(sample.pair.g2.has_edge(sample.pair.truth(u), sample.pair.truth(v)));
}

TEST_CASE("correlated pair at s=0 is empty") {
    const EdgeProbabilities probs = build_probabilities(ErSpec{8, 0.9});
    RngStream rng(12, 0);
    const CorrelatedPair pair = sample_correlated_pair(probs, 0.0, rng);
    CHECK(pair.g1.edge_count() == 0);
    CHECK(pair.g2.edge_count() == 0);
}

TEST_CASE("correlated pair marginal and joint rates") {
    // single pair: n = 2 with p_01 = 0.5, s = 0.6
    const EdgeProbabilities probs = build_probabilities(ErSpec{2, 0.5});
    const int trials = 100000;
    int g1_edges = 0, joint = 0;
    for (int t = 0; t < trials; ++t) {
        RngStream rng(314159, static_cast<std::uint64_t>(t));
        const CorrelatedPair pair = sample_correlated_pair(probs, 0.6, rng);
        const bool in_g1 = pair.g1.has_edge(0, 1);
        const bool in_g2_aligned = pair.g2.has_edge(pair.truth(0), pair.truth(1));
        if (in_g1) ++g1_edges;
        if (in_g1 && in_g2_aligned) ++joint;
    }
    const double marginal = 0.5 * 0.6;        // p s
    const double both = 0.5 * 0.6 * 0.6;      // p s^2
    const double se_marginal = std::sqrt(marginal * (1 - marginal) / trials);
    const double se_joint = std::sqrt(both * (1 - both) / trials);
    CHECK(std::abs(g1_edges / double(trials) - marginal) <= 3 * se_marginal);
    CHECK(std::abs(joint / double(trials) - both) <= 3 * se_joint);
}

TEST_CASE("identity hook gives nested subsampling") {
    const EdgeProbabilities probs = build_probabilities(ErSpec{10, 0.5});
    for (int t = 0; t < 20; ++t) {
        RngStream rng(55, static_cast<std::uint64_t>(t));
        const CorrelatedSample sample =
            sample_correlated_pair_with_parent(probs, 0.7, rng, Permutation::identity(10));
        for (const auto& [u, v] : sample.pair.g1.edges()) CHECK(sample.parent.has_edge(u, v));
        for (const auto& [u, v] : sample.pair.g2.edges()) CHECK(sample.parent.has_edge(u, v));
        // intersection under identity sits inside g1
        for (const auto& [u, v] : sample.pair.g1.edges())
            if (sample.pair.g2.has_edge(u, v)) CHECK(sample.pair.g1.has_edge(u, v));
    }
}

TEST_CASE("correlated pair is deterministic in the stream") {
    const EdgeProbabilities probs = build_probabilities(ErSpec{20, 0.3});
    RngStream a(99, 4), b(99, 4), c(99, 5);
    const CorrelatedPair pa = sample_correlated_pair(probs, 0.8, a);
    const CorrelatedPair pb = sample_correlated_pair(probs, 0.8, b);
    const CorrelatedPair pc = sample_correlated_pair(probs, 0.8, c);
    CHECK(pa.g1 == pb.g1);
    CHECK(pa.g2 == pb.g2);
    CHECK(pa.truth == pb.truth);
    CHECK(pa.truth.image() != pc.truth.image());
}

TEST_CASE("permutations") {
    const Permutation pi({2, 0, 1});
    CHECK(pi(0) == 2);
    CHECK(pi.inverse()(2) == 0);
    CHECK_THROWS_AS(Permutation({0, 0, 1}), std::invalid_argument);
    RngStream rng(3, 0);
    std::set<std::vector<int>> seen;
    for (int t = 0; t < 50; ++t) seen.insert(sample_permutation(4, rng).image());
    CHECK(seen.size() > 10); // hits many of the 24 permutations
}

TEST_CASE("model spec json round trip") {
    std::vector<ModelSpec> specs;
    specs.push_back(ErSpec{5, 0.25});
    specs.push_back(SbmSpec{{{0, 1}, {2, 3, 4}}, {{0.5, 0.1}, {0.1, 0.4}}});
    specs.push_back(ChungLuSpec{{1.0, 2.0, 1.5}});
    RngStream rng(17, 0);
    specs.push_back(RggSpec{3, sample_sphere_points(4, 3, rng), 0.9, 0.35});
    IrgSpec irg{3, {0.0, 0.2, 0.1, 0.2, 0.0, 0.3, 0.1, 0.3, 0.0}};
    specs.push_back(irg);

    for (const ModelSpec& spec : specs) {
        const ModelSpec back = model_spec_from_json(model_spec_to_json(spec));
        CHECK(matrices_equal(build_probabilities(spec), build_probabilities(back)));
    }
    CHECK_THROWS_AS(model_spec_from_json("{\"model\": \"zebra\"}"), std::invalid_argument);
    CHECK_THROWS_AS(model_spec_from_json("not json"), std::invalid_argument);
    CHECK_THROWS_AS(model_spec_from_json("{\"n\": 3, \"p\": 0.5}"), std::invalid_argument);
}

TEST_CASE("large structured models are evaluated lazily") {
    const int n = 4200; // above the dense storage limit
    const EdgeProbabilities probs = build_probabilities(ErSpec{n, 0.001});
    CHECK(probs.at(0, 1) == 0.001);
    CHECK(probs.row_sum(0) == doctest::Approx((n - 1) * 0.001));
    CHECK(probs.max_entry() == 0.001);

    IrgSpec big{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    CHECK_THROWS_AS(build_probabilities(big), std::invalid_argument);
}
