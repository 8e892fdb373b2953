#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "corematch/graph.hpp"
#include "corematch/rng.hpp"

namespace corematch {

/// Explicit symmetric probability matrix, row-major n*n. Diagonal is forced
/// to zero on ingestion.
struct IrgSpec {
    int n = 0;
    std::vector<double> matrix;
};

/// Stochastic block model: blocks partition {0,...,n-1}; q is the m x m
/// symmetric block probability matrix.
struct SbmSpec {
    std::vector<std::vector<int>> blocks;
    std::vector<std::vector<double>> q;
};

/// Chung-Lu model with vertex weights w; p_ij = w_i w_j / sum(w), subject to
/// the admissibility condition max(w) <= sqrt(sum(w)).
struct ChungLuSpec {
    std::vector<double> weights;
};

/// Noisy random geometric graph: unit vectors on the (d-1)-sphere, edge
/// probability p whenever the endpoint distance is at most r.
struct RggSpec {
    int d = 0;
    std::vector<std::vector<double>> points;
    double r = 0.0;
    double p = 0.0;
};

struct ErSpec {
    int n = 0;
    double p = 0.0;
};

using ModelSpec = std::variant<IrgSpec, SbmSpec, ChungLuSpec, RggSpec, ErSpec>;

/// Vertex count implied by the spec.
int model_size(const ModelSpec& spec);

/// Checks all model invariants; throws std::invalid_argument naming the
/// offending index on violation.
void validate(const ModelSpec& spec);

/// JSON with a "model" discriminator ("irg" | "sbm" | "chung_lu" | "rgg" |
/// "er") and model-specific keys (q, blocks, weights, points, r, p, n).
ModelSpec model_spec_from_json(const std::string& text);
std::string model_spec_to_json(const ModelSpec& spec);

/// Symmetric edge-probability matrix with zero diagonal. Stores a dense
/// lower triangle up to kDenseLimit vertices; beyond that only structured
/// specs are accepted and entries are computed on the fly. Row sums and the
/// maximum entry are precomputed.
class EdgeProbabilities {
public:
    static constexpr int kDenseLimit = 4096;

    int size() const { return n_; }
    double at(int i, int j) const;
    double row_sum(int i) const { return row_sums_.at(static_cast<std::size_t>(i)); }
    double max_entry() const { return p_max_; }
    double min_row_sum() const { return d_min_; }

private:
    friend EdgeProbabilities build_probabilities(const ModelSpec& spec);

    int n_ = 0;
    std::vector<double> tri_;   // entry (i, j), i > j, at i*(i-1)/2 + j; empty when lazy
    std::optional<ModelSpec> lazy_;
    std::vector<int> block_of_; // SBM lazy lookup
    std::vector<double> row_sums_;
    double p_max_ = 0.0;
    double d_min_ = 0.0;

    double compute(int i, int j) const;
    void finalize();
};

/// Builds the edge-probability matrix of a validated model spec.
EdgeProbabilities build_probabilities(const ModelSpec& spec);

/// Bijection on {0,...,n-1}.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> image);

    static Permutation identity(int n);

    int size() const { return static_cast<int>(image_.size()); }
    int operator()(int i) const { return image_.at(static_cast<std::size_t>(i)); }
    const std::vector<int>& image() const { return image_; }
    Permutation inverse() const;

    bool operator==(const Permutation&) const = default;

private:
    std::vector<int> image_;
};

/// Uniform random permutation (Fisher-Yates).
Permutation sample_permutation(int n, RngStream& rng);

/// Two edge-subsampled copies of a common parent; g2 carries the relabeling
/// by the ground-truth permutation.
struct CorrelatedPair {
    Graph g1;
    Graph g2;
    Permutation truth; // pi_star: g2 vertex = truth(parent vertex)
    double s = 1.0;
};

/// Pair plus the parent it was subsampled from (diagnostics and tests).
struct CorrelatedSample {
    CorrelatedPair pair;
    Graph parent;
};

/// Each unordered pair {i, j} becomes an edge independently with probability
/// p_ij, consuming one uniform draw per pair in row-major (i < j) order.
Graph sample_graph(const EdgeProbabilities& probs, RngStream& rng);

/// n independent uniform points on the (d-1)-sphere (normalized Gaussians).
std::vector<std::vector<double>> sample_sphere_points(int n, int d, RngStream& rng);

/// Parent ~ probs; g1 and g2' keep each parent edge independently with
/// probability s; truth is uniform unless forced; g2 = truth applied to g2'.
/// Sub-streams: 0 parent, 1 g1 subsample, 2 g2 subsample, 3 permutation.
CorrelatedPair sample_correlated_pair(const EdgeProbabilities& probs, double s, RngStream& rng,
                                      const std::optional<Permutation>& forced_truth = std::nullopt);
CorrelatedSample sample_correlated_pair_with_parent(const EdgeProbabilities& probs, double s, RngStream& rng,
                                                    const std::optional<Permutation>& forced_truth = std::nullopt);

} // namespace corematch
