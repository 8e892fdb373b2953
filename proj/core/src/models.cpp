#include "corematch/models.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace corematch {

namespace {

using nlohmann::json;

constexpr double kUnitNormTolerance = 1e-9;

void check_probability(double p, const std::string& where) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(where + ": probability " + std::to_string(p) + " outside [0,1]");
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double diff = a[t] - b[t];
        acc += diff * diff;
    }
    return acc;
}

} // namespace

int model_size(const ModelSpec& spec) {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IrgSpec>) {
                return m.n;
            } else if constexpr (std::is_same_v<T, SbmSpec>) {
                int n = 0;
                for (const auto& block : m.blocks) n += static_cast<int>(block.size());
                return n;
            } else if constexpr (std::is_same_v<T, ChungLuSpec>) {
                return static_cast<int>(m.weights.size());
            } else if constexpr (std::is_same_v<T, RggSpec>) {
                return static_cast<int>(m.points.size());
            } else {
                return m.n;
            }
        },
        spec);
}

void validate(const ModelSpec& spec) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IrgSpec>) {
                if (m.n < 0) throw std::invalid_argument("irg: negative vertex count");
                if (m.matrix.size() != static_cast<std::size_t>(m.n) * static_cast<std::size_t>(m.n))
                    throw std::invalid_argument("irg: matrix must be n*n");
                for (int i = 0; i < m.n; ++i) {
                    for (int j = 0; j < m.n; ++j) {
                        const double pij = m.matrix[static_cast<std::size_t>(i) * m.n + j];
                        check_probability(pij, "irg entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
                        const double pji = m.matrix[static_cast<std::size_t>(j) * m.n + i];
                        if (pij != pji)
                            throw std::invalid_argument("irg: matrix not symmetric at (" + std::to_string(i) +
                                                        "," + std::to_string(j) + ")");
                    }
                }
            } else if constexpr (std::is_same_v<T, SbmSpec>) {
                const int n = model_size(ModelSpec(m));
                const std::size_t blocks = m.blocks.size();
                if (m.q.size() != blocks)
                    throw std::invalid_argument("sbm: q must be m x m with m = number of blocks");
                std::vector<int> seen(static_cast<std::size_t>(n), 0);
                for (std::size_t a = 0; a < blocks; ++a) {
                    if (m.q[a].size() != blocks)
                        throw std::invalid_argument("sbm: q row " + std::to_string(a) + " has wrong length");
                    for (std::size_t b = 0; b < blocks; ++b) {
                        check_probability(m.q[a][b], "sbm q(" + std::to_string(a) + "," + std::to_string(b) + ")");
                        if (m.q[a][b] != m.q[b][a])
                            throw std::invalid_argument("sbm: q not symmetric at (" + std::to_string(a) + "," +
                                                        std::to_string(b) + ")");
                    }
                    for (int v : m.blocks[a]) {
                        if (v < 0 || v >= n)
                            throw std::invalid_argument("sbm: vertex " + std::to_string(v) + " out of range");
                        if (seen[static_cast<std::size_t>(v)]++)
                            throw std::invalid_argument("sbm: vertex " + std::to_string(v) +
                                                        " appears in two blocks");
                    }
                }
                // every vertex covered exactly once (sizes sum to n and no repeats)
            } else if constexpr (std::is_same_v<T, ChungLuSpec>) {
                double total = 0.0;
                double max_w = 0.0;
                for (std::size_t i = 0; i < m.weights.size(); ++i) {
                    if (!(m.weights[i] > 0.0))
                        throw std::invalid_argument("chung_lu: weight " + std::to_string(i) +
                                                    " must be positive");
                    total += m.weights[i];
                    max_w = std::max(max_w, m.weights[i]);
                }
                if (!m.weights.empty() && max_w > std::sqrt(total))
                    throw std::invalid_argument("chung_lu: max weight " + std::to_string(max_w) +
                                                " exceeds sqrt(total weight) " + std::to_string(std::sqrt(total)));
            } else if constexpr (std::is_same_v<T, RggSpec>) {
                if (m.d < 1) throw std::invalid_argument("rgg: dimension must be >= 1");
                if (!(m.r >= 0.0 && m.r <= 2.0))
                    throw std::invalid_argument("rgg: radius must lie in [0,2]");
                check_probability(m.p, "rgg p");
                for (std::size_t i = 0; i < m.points.size(); ++i) {
                    if (m.points[i].size() != static_cast<std::size_t>(m.d))
                        throw std::invalid_argument("rgg: point " + std::to_string(i) + " has wrong dimension");
                    double norm2 = 0.0;
                    for (double x : m.points[i]) norm2 += x * x;
                    if (std::abs(std::sqrt(norm2) - 1.0) > kUnitNormTolerance)
                        throw std::invalid_argument("rgg: point " + std::to_string(i) + " is not a unit vector");
                }
            } else {
                if (m.n < 0) throw std::invalid_argument("er: negative vertex count");
                check_probability(m.p, "er p");
            }
        },
        spec);
}

double EdgeProbabilities::compute(int i, int j) const {
    if (i == j) return 0.0;
    const ModelSpec& spec = *lazy_;
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SbmSpec>) {
                const int a = block_of_[static_cast<std::size_t>(i)];
                const int b = block_of_[static_cast<std::size_t>(j)];
                return m.q[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            } else if constexpr (std::is_same_v<T, ChungLuSpec>) {
                double total = 0.0;
                for (double w : m.weights) total += w;
                return std::min(1.0, m.weights[static_cast<std::size_t>(i)] *
                                         m.weights[static_cast<std::size_t>(j)] / total);
            } else if constexpr (std::is_same_v<T, RggSpec>) {
                const double dist2 = squared_distance(m.points[static_cast<std::size_t>(i)],
                                                      m.points[static_cast<std::size_t>(j)]);
                return std::sqrt(dist2) <= m.r ? m.p : 0.0;
            } else if constexpr (std::is_same_v<T, ErSpec>) {
                return m.p;
            } else {
                return 0.0; // IrgSpec never stored lazily
            }
        },
        spec);
}

double EdgeProbabilities::at(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
        throw std::invalid_argument("EdgeProbabilities: index out of range");
    if (i == j) return 0.0;
    if (!tri_.empty()) {
        const int hi = std::max(i, j), lo = std::min(i, j);
        return tri_[static_cast<std::size_t>(hi) * (hi - 1) / 2 + lo];
    }
    return compute(i, j);
}

void EdgeProbabilities::finalize() {
    row_sums_.assign(static_cast<std::size_t>(n_), 0.0);
    p_max_ = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j < n_; ++j) {
            const double p = at(i, j);
            row_sums_[static_cast<std::size_t>(i)] += p;
            row_sums_[static_cast<std::size_t>(j)] += p;
            p_max_ = std::max(p_max_, p);
        }
    }
    d_min_ = n_ > 0 ? *std::min_element(row_sums_.begin(), row_sums_.end()) : 0.0;
}

EdgeProbabilities build_probabilities(const ModelSpec& spec) {
    validate(spec);
    const int n = model_size(spec);

    EdgeProbabilities probs;
    probs.n_ = n;

    if (n > EdgeProbabilities::kDenseLimit) {
        if (std::holds_alternative<IrgSpec>(spec))
            throw std::invalid_argument("build_probabilities: explicit matrices limited to n <= " +
                                        std::to_string(EdgeProbabilities::kDenseLimit) +
                                        "; use a structured model");
        probs.lazy_ = spec;
        if (const auto* sbm = std::get_if<SbmSpec>(&*probs.lazy_)) {
            probs.block_of_.assign(static_cast<std::size_t>(n), 0);
            for (std::size_t a = 0; a < sbm->blocks.size(); ++a)
                for (int v : sbm->blocks[a]) probs.block_of_[static_cast<std::size_t>(v)] = static_cast<int>(a);
        }
        probs.finalize();
        return probs;
    }

    probs.tri_.assign(static_cast<std::size_t>(n) * (n - 1) / 2, 0.0);
    auto set_entry = [&](int i, int j, double p) {
        const int hi = std::max(i, j), lo = std::min(i, j);
        probs.tri_[static_cast<std::size_t>(hi) * (hi - 1) / 2 + lo] = p;
    };

    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IrgSpec>) {
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        set_entry(i, j, m.matrix[static_cast<std::size_t>(i) * n + j]);
            } else if constexpr (std::is_same_v<T, SbmSpec>) {
                std::vector<int> block_of(static_cast<std::size_t>(n), 0);
                for (std::size_t a = 0; a < m.blocks.size(); ++a)
                    for (int v : m.blocks[a]) block_of[static_cast<std::size_t>(v)] = static_cast<int>(a);
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        set_entry(i, j, m.q[static_cast<std::size_t>(block_of[i])]
                                           [static_cast<std::size_t>(block_of[j])]);
            } else if constexpr (std::is_same_v<T, ChungLuSpec>) {
                const double total = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
                bool clamped = false;
                for (int i = 0; i < n; ++i) {
                    for (int j = i + 1; j < n; ++j) {
                        double p = m.weights[static_cast<std::size_t>(i)] *
                                   m.weights[static_cast<std::size_t>(j)] / total;
                        if (p > 1.0) {
                            p = 1.0;
                            clamped = true;
                        }
                        set_entry(i, j, p);
                    }
                }
                if (clamped)
                    std::cerr << "corematch: chung_lu entries clamped to 1 (weights violate admissibility)\n";
            } else if constexpr (std::is_same_v<T, RggSpec>) {
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) {
                        const double dist = std::sqrt(squared_distance(m.points[static_cast<std::size_t>(i)],
                                                                       m.points[static_cast<std::size_t>(j)]));
                        set_entry(i, j, dist <= m.r ? m.p : 0.0);
                    }
            } else {
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) set_entry(i, j, m.p);
            }
        },
        spec);

    probs.finalize();
    return probs;
}

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
    const int n = static_cast<int>(image_.size());
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int v : image_) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]++)
            throw std::invalid_argument("Permutation: image is not a rearrangement of 0..n-1");
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> image(static_cast<std::size_t>(std::max(n, 0)));
    std::iota(image.begin(), image.end(), 0);
    return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i)
        inv[static_cast<std::size_t>(image_[i])] = static_cast<int>(i);
    return Permutation(std::move(inv));
}

Permutation sample_permutation(int n, RngStream& rng) {
    std::vector<int> image(static_cast<std::size_t>(std::max(n, 0)));
    std::iota(image.begin(), image.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        const auto j = rng.next_below(static_cast<std::uint64_t>(i) + 1);
        std::swap(image[static_cast<std::size_t>(i)], image[static_cast<std::size_t>(j)]);
    }
    return Permutation(std::move(image));
}

Graph sample_graph(const EdgeProbabilities& probs, RngStream& rng) {
    const int n = probs.size();
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double u = rng.next_unit(); // one draw per pair, always
            if (u < probs.at(i, j)) edges.emplace_back(i, j);
        }
    }
    return Graph::from_edges(n, edges);
}

std::vector<std::vector<double>> sample_sphere_points(int n, int d, RngStream& rng) {
    if (d < 1) throw std::invalid_argument("sample_sphere_points: dimension must be >= 1");
    if (n < 0) throw std::invalid_argument("sample_sphere_points: negative count");

    std::vector<std::vector<double>> points(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<double> x(static_cast<std::size_t>(d));
        double norm2 = 0.0;
        do {
            // Box-Muller pairs; a fixed number of draws per attempt
            for (int t = 0; t < d; t += 2) {
                const double u = rng.next_positive_unit();
                const double v = rng.next_unit();
                const double radius = std::sqrt(-2.0 * std::log(u));
                const double angle = 2.0 * M_PI * v;
                x[static_cast<std::size_t>(t)] = radius * std::cos(angle);
                if (t + 1 < d) x[static_cast<std::size_t>(t + 1)] = radius * std::sin(angle);
            }
            norm2 = 0.0;
            for (double c : x) norm2 += c * c;
        } while (norm2 == 0.0);
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& c : x) c *= inv;
        points[static_cast<std::size_t>(i)] = std::move(x);
    }
    return points;
}

namespace {

// Keeps each edge independently with probability s, one draw per edge in
// the parent's sorted edge order.
Graph subsample_edges(const Graph& parent, double s, RngStream& rng) {
    std::vector<std::pair<int, int>> kept;
    for (const auto& e : parent.edges())
        if (rng.next_unit() < s) kept.push_back(e);
    return Graph::from_edges(parent.vertex_count(), kept);
}

Graph relabel(const Graph& g, const Permutation& pi) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(g.edge_count()));
    for (const auto& [u, v] : g.edges()) {
        const int a = pi(u), b = pi(v);
        edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    return Graph::from_edges(g.vertex_count(), edges);
}

} // namespace

CorrelatedSample sample_correlated_pair_with_parent(const EdgeProbabilities& probs, double s, RngStream& rng,
                                                    const std::optional<Permutation>& forced_truth) {
    if (!(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("sample_correlated_pair: s must lie in [0,1]");
    const int n = probs.size();
    if (forced_truth && forced_truth->size() != n)
        throw std::invalid_argument("sample_correlated_pair: forced permutation has wrong size");

    RngStream parent_rng = rng.substream(0);
    RngStream g1_rng = rng.substream(1);
    RngStream g2_rng = rng.substream(2);
    RngStream perm_rng = rng.substream(3);

    Graph parent = sample_graph(probs, parent_rng);
    Graph g1 = subsample_edges(parent, s, g1_rng);
    Graph g2_prime = subsample_edges(parent, s, g2_rng);
    Permutation truth = forced_truth ? *forced_truth : sample_permutation(n, perm_rng);
    Graph g2 = relabel(g2_prime, truth);

    return CorrelatedSample{CorrelatedPair{std::move(g1), std::move(g2), std::move(truth), s}, std::move(parent)};
}

CorrelatedPair sample_correlated_pair(const EdgeProbabilities& probs, double s, RngStream& rng,
                                      const std::optional<Permutation>& forced_truth) {
    return sample_correlated_pair_with_parent(probs, s, rng, forced_truth).pair;
}

namespace {

json spec_to_json_value(const ModelSpec& spec) {
    json j;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IrgSpec>) {
                j["model"] = "irg";
                j["n"] = m.n;
                json rows = json::array();
                for (int i = 0; i < m.n; ++i) {
                    json row = json::array();
                    for (int k = 0; k < m.n; ++k)
                        row.push_back(m.matrix[static_cast<std::size_t>(i) * m.n + k]);
                    rows.push_back(std::move(row));
                }
                j["p"] = std::move(rows);
            } else if constexpr (std::is_same_v<T, SbmSpec>) {
                j["model"] = "sbm";
                j["blocks"] = m.blocks;
                j["q"] = m.q;
            } else if constexpr (std::is_same_v<T, ChungLuSpec>) {
                j["model"] = "chung_lu";
                j["weights"] = m.weights;
            } else if constexpr (std::is_same_v<T, RggSpec>) {
                j["model"] = "rgg";
                j["points"] = m.points;
                j["r"] = m.r;
                j["p"] = m.p;
            } else {
                j["model"] = "er";
                j["n"] = m.n;
                j["p"] = m.p;
            }
        },
        spec);
    return j;
}

} // namespace

ModelSpec model_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model spec: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
        throw std::invalid_argument("model spec: missing \"model\" discriminator");
    const std::string kind = j["model"].get<std::string>();

    ModelSpec spec;
    try {
        if (kind == "irg") {
            IrgSpec m;
            const auto& rows = j.at("p");
            m.n = static_cast<int>(rows.size());
            m.matrix.resize(static_cast<std::size_t>(m.n) * static_cast<std::size_t>(m.n), 0.0);
            for (int i = 0; i < m.n; ++i) {
                if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != m.n)
                    throw std::invalid_argument("model spec: irg row " + std::to_string(i) + " has wrong length");
                for (int k = 0; k < m.n; ++k)
                    m.matrix[static_cast<std::size_t>(i) * m.n + k] =
                        rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
            }
            // diagonal forced to zero
            for (int i = 0; i < m.n; ++i) m.matrix[static_cast<std::size_t>(i) * m.n + i] = 0.0;
            spec = std::move(m);
        } else if (kind == "sbm") {
            SbmSpec m;
            m.blocks = j.at("blocks").get<std::vector<std::vector<int>>>();
            m.q = j.at("q").get<std::vector<std::vector<double>>>();
            spec = std::move(m);
        } else if (kind == "chung_lu") {
            ChungLuSpec m;
            m.weights = j.at("weights").get<std::vector<double>>();
            spec = std::move(m);
        } else if (kind == "rgg") {
            RggSpec m;
            m.points = j.at("points").get<std::vector<std::vector<double>>>();
            m.d = m.points.empty() ? 1 : static_cast<int>(m.points.front().size());
            m.r = j.at("r").get<double>();
            m.p = j.at("p").get<double>();
            spec = std::move(m);
        } else if (kind == "er") {
            ErSpec m;
            m.n = j.at("n").get<int>();
            m.p = j.at("p").get<double>();
            spec = std::move(m);
        } else {
            throw std::invalid_argument("model spec: unknown model \"" + kind + "\"");
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model spec: ") + e.what());
    }
    validate(spec);
    return spec;
}

std::string model_spec_to_json(const ModelSpec& spec) { return spec_to_json_value(spec).dump(); }

} // namespace corematch
