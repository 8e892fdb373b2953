#include "corematch/theory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "corematch/errors.hpp"

namespace corematch {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_tilt(double c) {
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("Chernoff tilt c must lie in (0,1), got " + std::to_string(c));
}

void check_correlation(double s) {
    if (!(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("correlation s must lie in [0,1], got " + std::to_string(s));
}

json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

} // namespace

double min_expected_degree(const EdgeProbabilities& probs) { return probs.min_row_sum(); }

double heterogeneity_ratio(const EdgeProbabilities& probs) {
    const double d_min = probs.min_row_sum();
    if (!(d_min > 0.0))
        throw std::invalid_argument("heterogeneity_ratio: undefined when the minimum expected degree is 0");
    return (probs.size() - 1) * probs.max_entry() / d_min;
}

double low_degree_expectation_bound(const EdgeProbabilities& probs, int k, double c) {
    check_tilt(c);
    if (k < 0) throw std::invalid_argument("low_degree_expectation_bound: k must be nonnegative");
    double total = 0.0;
    for (int i = 0; i < probs.size(); ++i) total += std::exp(-c * probs.row_sum(i));
    return std::pow(1.0 / (1.0 - c), k) * total;
}

VertexSet low_degree_vertices(const Graph& g, int k) {
    std::vector<int> members;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) <= k) members.push_back(v);
    return VertexSet(g.vertex_count(), std::move(members));
}

VertexSet core_complement(const Graph& g, int k) { return k_core(g, k).complement(); }

namespace {

struct DensityScan {
    const std::vector<std::vector<std::uint64_t>>& masks;
    int n;
    int limit;
    std::uint64_t checked = 0;
    std::vector<int> current;
    std::vector<int> witness;
    bool violated = false;

    int common_neighbors(int v, const std::vector<std::uint64_t>& in_set) const {
        int count = 0;
        for (std::size_t w = 0; w < in_set.size(); ++w)
            count += std::popcount(masks[static_cast<std::size_t>(v)][w] & in_set[w]);
        return count;
    }

    // DFS in prefix order: the first violation found is the lexicographically
    // first one in that order.
    void extend(int start, int edges, std::vector<std::uint64_t>& in_set) {
        if (violated) return;
        for (int v = start; v < n; ++v) {
            const int added = common_neighbors(v, in_set);
            const int new_edges = edges + added;
            current.push_back(v);
            ++checked;
            if (new_edges > 2 * static_cast<int>(current.size())) {
                witness = current;
                violated = true;
                current.pop_back();
                return;
            }
            if (static_cast<int>(current.size()) < limit) {
                in_set[static_cast<std::size_t>(v) / 64] |= 1ULL << (v % 64);
                extend(v + 1, new_edges, in_set);
                in_set[static_cast<std::size_t>(v) / 64] &= ~(1ULL << (v % 64));
                if (violated) {
                    current.pop_back();
                    return;
                }
            }
            current.pop_back();
        }
    }
};

} // namespace

DensityCheckResult subgraph_density_check(const Graph& g, double gamma, int size_cap, std::uint64_t budget) {
    if (!(gamma > 0.0)) throw std::invalid_argument("subgraph_density_check: gamma must be positive");
    if (size_cap < 0) throw std::invalid_argument("subgraph_density_check: negative size cap");
    const int n = g.vertex_count();
    const double raw_limit = 3.0 * n / (4.0 * gamma * gamma);
    const int limit = std::min({static_cast<int>(std::floor(raw_limit)), size_cap, n});

    DensityCheckResult result;
    result.limit = std::max(limit, 0);
    if (result.limit == 0) return result; // nothing in range

    // a-priori subset count; refuse rather than run an open-ended scan
    double total = 0.0, binom = 1.0;
    for (int r = 1; r <= result.limit; ++r) {
        binom *= static_cast<double>(n - r + 1) / r;
        total += binom;
        if (total > static_cast<double>(budget))
            throw capacity_error("subgraph_density_check: ~" + std::to_string(total) +
                                 " subsets exceed budget " + std::to_string(budget));
    }

    const std::size_t words = static_cast<std::size_t>((n + 63) / 64);
    std::vector<std::vector<std::uint64_t>> masks(static_cast<std::size_t>(n),
                                                  std::vector<std::uint64_t>(words, 0));
    for (int v = 0; v < n; ++v)
        for (int u : g.neighbors(v))
            masks[static_cast<std::size_t>(v)][static_cast<std::size_t>(u) / 64] |= 1ULL << (u % 64);

    DensityScan scan{masks, n, result.limit};
    std::vector<std::uint64_t> in_set(words, 0);
    scan.extend(0, 0, in_set);

    result.subsets_checked = scan.checked;
    result.passed = !scan.violated;
    if (scan.violated) result.witness = scan.witness;
    return result;
}

ExpansionTrace expansion_closure(const Graph& g, int k) {
    if (k < 0) throw std::invalid_argument("expansion_closure: k must be nonnegative");
    const int n = g.vertex_count();
    std::vector<char> inside(static_cast<std::size_t>(n), 0);
    std::vector<int> inside_neighbors(static_cast<std::size_t>(n), 0);

    ExpansionTrace trace;
    const VertexSet seed = low_degree_vertices(g, k + 1);
    for (int v : seed.members()) inside[static_cast<std::size_t>(v)] = 1;
    for (int v = 0; v < n; ++v)
        for (int u : g.neighbors(v))
            if (inside[static_cast<std::size_t>(u)]) ++inside_neighbors[static_cast<std::size_t>(v)];
    trace.levels.push_back(seed);

    std::vector<int> members = seed.members();
    for (;;) {
        int pick = -1;
        for (int v = 0; v < n; ++v) {
            if (!inside[static_cast<std::size_t>(v)] && inside_neighbors[static_cast<std::size_t>(v)] >= 3) {
                pick = v;
                break;
            }
        }
        if (pick < 0) break;
        inside[static_cast<std::size_t>(pick)] = 1;
        for (int u : g.neighbors(pick)) ++inside_neighbors[static_cast<std::size_t>(u)];
        members.push_back(pick);
        trace.levels.push_back(VertexSet(n, members));
    }
    return trace;
}

double exact_recovery_error_bound(const EdgeProbabilities& probs, double s, int k, double c) {
    check_tilt(c);
    check_correlation(s);
    if (k < 1) throw std::invalid_argument("exact_recovery_error_bound: k must be >= 1");
    double total = 0.0;
    for (int i = 0; i < probs.size(); ++i) total += std::exp(-c * probs.row_sum(i) * s * s);
    return std::pow(1.0 / (1.0 - c), k - 1) * total;
}

double weak_matching_probability_bound(double p_max, double s, int n, int k, int errors, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("weak_matching_probability_bound: theta must be positive");
    if (errors < 1) throw std::invalid_argument("weak_matching_probability_bound: errors must be >= 1");
    check_correlation(s);
    const double s2 = s * s;
    const double exponent =
        theta * k - std::exp(2.0 * theta) * p_max * s2 - n * std::exp(6.0 * theta) * p_max * p_max * s2;
    return 3.0 * std::exp(-errors * exponent);
}

WeakMatchingRateBound weak_matching_rate_bound(double p_max, double s, int n, int k,
                                               std::span<const double> theta_grid, double tolerance) {
    if (theta_grid.empty()) throw std::invalid_argument("weak_matching_rate_bound: empty theta grid");
    WeakMatchingRateBound out;
    out.rate = kInf;
    for (double theta : theta_grid) {
        const double bound = weak_matching_probability_bound(p_max, s, n, k, 1, theta);
        if (bound < out.rate) {
            out.rate = bound;
            out.theta = theta;
        }
    }
    out.n_squared_rate = static_cast<double>(n) * n * out.rate;
    out.below_tolerance = out.n_squared_rate < tolerance;
    out.success_probability_bound = 2.0 - std::exp(out.n_squared_rate);
    return out;
}

std::vector<double> default_theta_grid(int n, int k, double alpha) {
    const double lo = 2.1 / k;
    const double hi = (2.0 * alpha - 1.0) / 6.0;
    std::vector<double> grid;
    if (lo < hi && n >= 2) {
        const double log_n = std::log(static_cast<double>(n));
        for (int i = 0; i < 10; ++i) grid.push_back((lo + (hi - lo) * i / 9.0) * log_n);
    } else {
        for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
    }
    return grid;
}

double partial_fraction_bound(double d_min, double s) {
    if (d_min < 0.0) throw std::invalid_argument("partial_fraction_bound: negative minimum expected degree");
    check_correlation(s);
    return std::max(0.0, 1.0 - 3.0 * std::exp(-d_min * s * s / 7.0));
}

void BoundParams::validate() const {
    check_tilt(c);
    if (theta < 0.0) throw std::invalid_argument("BoundParams: theta must be nonnegative");
    if (!(alpha > 0.5 && alpha <= 1.0))
        throw std::invalid_argument("BoundParams: alpha must lie in (1/2, 1]");
    if (!(epsilon > 0.0)) throw std::invalid_argument("BoundParams: epsilon must be positive");
    if (k < 1) throw std::invalid_argument("BoundParams: k must be >= 1");
}

bool ConditionReport::all_satisfied() const {
    for (const auto& clause : clauses)
        if (!clause.satisfied) return false;
    return true;
}

std::string ConditionReport::to_json() const {
    json surro;
    surro["d_min"] = json_number(d_min);
    surro["R"] = json_number(heterogeneity);
    surro["p_max"] = json_number(p_max);
    surro["n"] = n;
    for (const auto& [key, value] : surrogates) surro[key] = json_number(value);

    json out;
    out["conditions"] = json::array();
    for (const auto& clause : clauses) {
        json c;
        c["condition_name"] = clause.name;
        c["verdict"] = clause.satisfied ? "satisfied" : "violated";
        c["lhs"] = json_number(clause.lhs);
        c["rhs"] = json_number(clause.rhs);
        c["margin"] = json_number(clause.margin);
        c["surrogates"] = surro;
        out["conditions"].push_back(std::move(c));
    }
    out["all_satisfied"] = all_satisfied();
    return out.dump();
}

namespace {

ConditionClause clause_ge(std::string name, double lhs, double rhs) {
    return ConditionClause{std::move(name), lhs >= rhs, lhs, rhs, lhs - rhs};
}

ConditionClause clause_gt(std::string name, double lhs, double rhs) {
    return ConditionClause{std::move(name), lhs > rhs, lhs, rhs, lhs - rhs};
}

ConditionClause clause_le(std::string name, double lhs, double rhs) {
    return ConditionClause{std::move(name), lhs <= rhs, lhs, rhs, rhs - lhs};
}

// Minimum over points of the number of points within distance r (the point
// itself included, matching the specialized degree sums).
int min_neighborhood_count(const RggSpec& m) {
    const int n = static_cast<int>(m.points.size());
    int best = n;
    for (int i = 0; i < n; ++i) {
        int count = 0;
        for (int j = 0; j < n; ++j) {
            double dist2 = 0.0;
            for (int t = 0; t < m.d; ++t) {
                const double diff = m.points[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] -
                                    m.points[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
                dist2 += diff * diff;
            }
            if (std::sqrt(dist2) <= m.r) ++count;
        }
        best = std::min(best, count);
    }
    return best;
}

struct ReportBase {
    ConditionReport report;
    double s2;
    double log_n;
};

ReportBase start_report(const ModelSpec& spec, double s) {
    check_correlation(s);
    validate(spec);
    const int n = model_size(spec);
    if (n < 2) throw std::invalid_argument("condition check: model must have at least 2 vertices");
    const EdgeProbabilities probs = build_probabilities(spec);

    ReportBase base;
    base.report.n = n;
    base.report.d_min = probs.min_row_sum();
    base.report.p_max = probs.max_entry();
    base.report.heterogeneity = base.report.d_min > 0.0 ? heterogeneity_ratio(probs) : kInf;
    base.report.surrogates["gamma"] = n * base.report.p_max;
    base.report.surrogates["s"] = s;
    base.s2 = s * s;
    base.log_n = std::log(static_cast<double>(n));
    return base;
}

} // namespace

ConditionReport check_exact_condition(const ModelSpec& spec, double s, const BoundParams& params) {
    params.validate();
    ReportBase base = start_report(spec, s);
    ConditionReport& report = base.report;
    const int n = report.n;
    const double degree_threshold = (1.0 + params.epsilon) * base.log_n;
    const double p_threshold = std::pow(static_cast<double>(n), -params.alpha);

    report.surrogates["alpha"] = params.alpha;
    report.surrogates["epsilon"] = params.epsilon;
    report.surrogates["k"] = params.k;

    report.clauses.push_back(clause_ge("exact/min-expected-degree", report.d_min * base.s2, degree_threshold));
    report.clauses.push_back(clause_le("exact/max-probability", report.p_max, p_threshold));
    report.clauses.push_back(
        clause_gt("exact/core-order", params.k, 12.0 / (2.0 * params.alpha - 1.0)));

    if (const auto* m = std::get_if<SbmSpec>(&spec)) {
        double min_block_degree = kInf;
        double q_max = 0.0;
        for (std::size_t a = 0; a < m->blocks.size(); ++a) {
            double row = 0.0;
            for (std::size_t b = 0; b < m->blocks.size(); ++b) {
                row += static_cast<double>(m->blocks[b].size()) * m->q[a][b];
                q_max = std::max(q_max, m->q[a][b]);
            }
            if (!m->blocks[a].empty()) min_block_degree = std::min(min_block_degree, row);
        }
        report.surrogates["sbm_min_block_degree"] = min_block_degree;
        report.clauses.push_back(
            clause_ge("exact/sbm-block-degree", min_block_degree * base.s2, degree_threshold));
        report.clauses.push_back(clause_le("exact/sbm-max-probability", q_max, p_threshold));
    } else if (const auto* m = std::get_if<ChungLuSpec>(&spec)) {
        double total = 0.0, w_min = kInf, w_max = 0.0;
        for (double w : m->weights) {
            total += w;
            w_min = std::min(w_min, w);
            w_max = std::max(w_max, w);
        }
        report.surrogates["w_min"] = w_min;
        report.surrogates["w_max"] = w_max;
        report.clauses.push_back(clause_ge("exact/chung-lu-min-weight", w_min * base.s2, degree_threshold));
        report.clauses.push_back(clause_le("exact/chung-lu-weight-scale", w_max,
                                           std::pow(static_cast<double>(n), -params.alpha / 2.0) *
                                               std::sqrt(total)));
    } else if (const auto* m = std::get_if<RggSpec>(&spec)) {
        const int neighborhood = min_neighborhood_count(*m);
        report.surrogates["rgg_min_neighborhood"] = neighborhood;
        report.clauses.push_back(
            clause_ge("exact/rgg-neighborhood-degree", m->p * base.s2 * neighborhood, degree_threshold));
        report.clauses.push_back(clause_le("exact/rgg-max-probability", m->p, p_threshold));
    }
    return report;
}

ConditionReport check_partial_condition(const ModelSpec& spec, double s) {
    ReportBase base = start_report(spec, s);
    ConditionReport& report = base.report;
    const int n = report.n;
    const double lhs = report.d_min * base.s2;

    report.surrogates["k"] = 13;
    report.surrogates["fraction_bound"] = partial_fraction_bound(report.d_min, s);
    // the concentration slack absorbed into o(n) by the guarantee, made explicit
    report.surrogates["o_n_slack"] = std::pow(static_cast<double>(n), 0.75);

    report.clauses.push_back(clause_ge("partial/min-expected-degree-vs-heterogeneity", lhs, report.heterogeneity));
    report.clauses.push_back(clause_ge("partial/min-expected-degree-vs-154", lhs, 154.0));
    report.clauses.push_back(clause_le("partial/max-probability-scale", n * report.p_max,
                                       std::pow(static_cast<double>(n), 1.0 / 8.0)));

    if (const auto* m = std::get_if<SbmSpec>(&spec)) {
        double min_block_degree = kInf, q_max = 0.0, q_min = kInf;
        for (std::size_t a = 0; a < m->blocks.size(); ++a) {
            double row = 0.0;
            for (std::size_t b = 0; b < m->blocks.size(); ++b) {
                row += static_cast<double>(m->blocks[b].size()) * m->q[a][b];
                q_max = std::max(q_max, m->q[a][b]);
                q_min = std::min(q_min, m->q[a][b]);
            }
            if (!m->blocks[a].empty()) min_block_degree = std::min(min_block_degree, row);
        }
        report.surrogates["sbm_min_block_degree"] = min_block_degree;
        report.surrogates["sbm_q_ratio"] = q_min > 0.0 ? q_max / q_min : kInf;
        report.clauses.push_back(clause_ge("partial/sbm-surrogate", min_block_degree * base.s2,
                                           std::max(q_min > 0.0 ? q_max / q_min : kInf, 154.0)));
    } else if (const auto* m = std::get_if<ChungLuSpec>(&spec)) {
        double w_min = kInf, w_max = 0.0;
        for (double w : m->weights) {
            w_min = std::min(w_min, w);
            w_max = std::max(w_max, w);
        }
        const double ratio2 = (w_max / w_min) * (w_max / w_min);
        report.surrogates["w_min"] = w_min;
        report.surrogates["w_max"] = w_max;
        report.clauses.push_back(
            clause_ge("partial/chung-lu-surrogate", w_min * base.s2, std::max(ratio2, 154.0)));
    } else if (const auto* m = std::get_if<RggSpec>(&spec)) {
        const int neighborhood = min_neighborhood_count(*m);
        report.surrogates["rgg_min_neighborhood"] = neighborhood;
        report.clauses.push_back(clause_ge("partial/rgg-surrogate", m->p * base.s2 * neighborhood,
                                           std::max(s * std::sqrt(n * m->p), 154.0)));
    }
    return report;
}

} // namespace corematch
