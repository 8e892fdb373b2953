#include "corematch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "corematch/errors.hpp"

namespace corematch {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, result.ptr);
}

struct Welford {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }
    double stddev() const { return count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1)) : 0.0; }
};

} // namespace

Mode mode_from_string(const std::string& name) {
    if (name == "min-degree") return Mode::MinDegree;
    if (name == "core-size") return Mode::CoreSize;
    if (name == "brute-force") return Mode::BruteForce;
    if (name == "bounds") return Mode::Bounds;
    if (name == "lemmas") return Mode::Lemmas;
    throw std::invalid_argument("unknown mode \"" + name + "\"");
}

std::string mode_to_string(Mode mode) {
    switch (mode) {
    case Mode::MinDegree: return "min-degree";
    case Mode::CoreSize: return "core-size";
    case Mode::BruteForce: return "brute-force";
    case Mode::Bounds: return "bounds";
    case Mode::Lemmas: return "lemmas";
    }
    throw std::invalid_argument("unknown mode");
}

void ExperimentConfig::validate() const {
    corematch::validate(model);
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("config: s must lie in [0,1]");
    if (k < 0) throw std::invalid_argument("config: k must be nonnegative");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (lemma_scale != "desk" && lemma_scale != "smoke")
        throw std::invalid_argument("config: lemma_scale must be \"desk\" or \"smoke\"");
    BoundParams{0.5, 0.0, alpha, epsilon, std::max(k, 1)}.validate();
    if (sweep) {
        if (sweep->values.empty()) throw std::invalid_argument("config: sweep grid is empty");
        for (double value : sweep->values) apply_sweep_value(*this, sweep->parameter, value); // validates each
    }
    if (mode == Mode::BruteForce && model_size(model) > brute_force_limit)
        throw std::invalid_argument("config: brute-force mode requires n <= " +
                                    std::to_string(brute_force_limit));
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");

    ExperimentConfig config;
    try {
        if (!j.contains("model")) throw std::invalid_argument("config: missing \"model\"");
        config.model = model_spec_from_json(j["model"].dump());
        if (j.contains("s")) config.s = j["s"].get<double>();
        if (j.contains("k")) config.k = j["k"].get<int>();
        if (j.contains("trials")) config.trials = j["trials"].get<int>();
        if (j.contains("master_seed")) config.master_seed = j["master_seed"].get<std::uint64_t>();
        if (j.contains("alpha")) config.alpha = j["alpha"].get<double>();
        if (j.contains("epsilon")) config.epsilon = j["epsilon"].get<double>();
        if (j.contains("mode")) config.mode = mode_from_string(j["mode"].get<std::string>());
        if (j.contains("output_path")) config.output_path = j["output_path"].get<std::string>();
        if (j.contains("brute_force_limit")) config.brute_force_limit = j["brute_force_limit"].get<int>();
        if (j.contains("lemma_scale")) config.lemma_scale = j["lemma_scale"].get<std::string>();
        if (j.contains("sweep") && !j["sweep"].is_null()) {
            SweepSpec sweep;
            sweep.parameter = j["sweep"].at("parameter").get<std::string>();
            sweep.values = j["sweep"].at("values").get<std::vector<double>>();
            config.sweep = std::move(sweep);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    config.validate();
    return config;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& config, const std::string& parameter, double value) {
    ExperimentConfig out = config;
    out.sweep.reset();
    auto as_int = [&](const char* what) {
        const double rounded = std::round(value);
        if (std::abs(value - rounded) > 1e-9)
            throw std::invalid_argument(std::string("sweep: ") + what + " value " + format_double(value) +
                                        " is not an integer");
        return static_cast<int>(rounded);
    };
    if (parameter == "s") {
        out.s = value;
    } else if (parameter == "k") {
        out.k = as_int("k");
    } else if (parameter == "p") {
        if (auto* er = std::get_if<ErSpec>(&out.model)) {
            er->p = value;
        } else if (auto* rgg = std::get_if<RggSpec>(&out.model)) {
            rgg->p = value;
        } else {
            throw std::invalid_argument("sweep: parameter \"p\" requires an er or rgg model");
        }
    } else if (parameter == "n") {
        if (auto* er = std::get_if<ErSpec>(&out.model)) {
            er->n = as_int("n");
        } else {
            throw std::invalid_argument("sweep: parameter \"n\" requires an er model");
        }
    } else if (parameter == "r") {
        if (auto* rgg = std::get_if<RggSpec>(&out.model)) {
            rgg->r = value;
        } else {
            throw std::invalid_argument("sweep: parameter \"r\" requires an rgg model");
        }
    } else {
        throw std::invalid_argument("sweep: unsupported parameter \"" + parameter + "\"");
    }
    corematch::validate(out.model);
    if (!(out.s >= 0.0 && out.s <= 1.0)) throw std::invalid_argument("sweep: s must lie in [0,1]");
    if (out.k < 0) throw std::invalid_argument("sweep: k must be nonnegative");
    return out;
}

TrialContext::TrialContext(ExperimentConfig config)
    : config_(std::move(config)), probs_(build_probabilities(config_.model)) {
    const double d_min = probs_.min_row_sum();
    d_min_s2_ = d_min * config_.s * config_.s;
    heterogeneity_ =
        d_min > 0.0 ? heterogeneity_ratio(probs_) : std::numeric_limits<double>::infinity();
    const BoundParams params{0.5, 0.0, config_.alpha, config_.epsilon, std::max(config_.k, 1)};
    verdict_exact_ = check_exact_condition(config_.model, config_.s, params).all_satisfied();
    verdict_partial_ = check_partial_condition(config_.model, config_.s).all_satisfied();
}

TrialRecord run_trial(const TrialContext& ctx, int stream_index) {
    const ExperimentConfig& cfg = ctx.config();
    if (cfg.mode == Mode::Bounds || cfg.mode == Mode::Lemmas)
        throw std::invalid_argument("run_trial: mode " + mode_to_string(cfg.mode) +
                                    " is served by check / verify-lemmas");

    TrialRecord rec;
    rec.trial_index = stream_index;
    rec.n = ctx.probs().size();
    rec.s = cfg.s;
    rec.k = cfg.k;
    rec.d_min_s2 = ctx.d_min_s2();
    rec.heterogeneity = ctx.heterogeneity();
    rec.verdict_exact = ctx.verdict_exact();
    rec.verdict_partial = ctx.verdict_partial();
    rec.wall_time_ms = 0; // pinned: CSV output must be byte-stable

    RngStream rng(cfg.master_seed, static_cast<std::uint64_t>(stream_index));
    rec.seed = rng.stream_seed();

    try {
        if (cfg.mode == Mode::BruteForce && rec.n > cfg.brute_force_limit)
            throw capacity_error("brute-force mode requires n <= " + std::to_string(cfg.brute_force_limit));

        const CorrelatedPair pair = sample_correlated_pair(ctx.probs(), cfg.s, rng);
        const Graph h = intersection_graph(pair.g1, pair.g2, Matching::from_permutation(pair.truth));
        rec.min_deg_intersection = h.vertex_count() > 0 ? min_degree(h) : 0;
        const VertexSet core = k_core(h, cfg.k);
        rec.core_size = core.size();
        rec.fraction_matched = rec.n > 0 ? static_cast<double>(core.size()) / rec.n : 0.0;
        rec.errors_made = 0;

        if (cfg.mode == Mode::BruteForce) {
            const Matching estimate =
                brute_force_k_core_estimator(pair.g1, pair.g2, std::max(cfg.k, 1), cfg.brute_force_limit);
            rec.errors_made = estimate.mismatch_count(pair.truth);
            rec.fraction_matched = rec.n > 0 ? static_cast<double>(estimate.size()) / rec.n : 0.0;
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
        rec.min_deg_intersection = -1;
        rec.core_size = -1;
        rec.fraction_matched = -1.0;
        rec.errors_made = -1;
    }
    return rec;
}

TrialRecord run_trial(const ExperimentConfig& config, int stream_index) {
    config.validate();
    return run_trial(TrialContext(config), stream_index);
}

int thread_count_from_env() {
    const char* raw = std::getenv("COREMATCH_THREADS");
    if (raw == nullptr || *raw == '\0') {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    }
    int value = 0;
    const auto result = std::from_chars(raw, raw + std::string_view(raw).size(), value);
    if (result.ec != std::errc() || *result.ptr != '\0' || value < 1)
        throw std::invalid_argument("COREMATCH_THREADS must be a positive integer, got \"" + std::string(raw) +
                                    "\"");
    return value;
}

SweepResult run_sweep(const ExperimentConfig& config) {
    config.validate();
    if (config.mode == Mode::Bounds || config.mode == Mode::Lemmas)
        throw std::invalid_argument("run_sweep: mode " + mode_to_string(config.mode) +
                                    " is served by check / verify-lemmas");

    struct GridPoint {
        std::string parameter;
        double value;
        TrialContext ctx;
    };
    std::vector<GridPoint> grid;
    if (config.sweep) {
        for (double value : config.sweep->values)
            grid.push_back(GridPoint{config.sweep->parameter, value,
                                     TrialContext(apply_sweep_value(config, config.sweep->parameter, value))});
    } else {
        ExperimentConfig single = config;
        single.sweep.reset();
        grid.push_back(GridPoint{"none", 0.0, TrialContext(std::move(single))});
    }

    const int per_point = config.trials;
    const int total = static_cast<int>(grid.size()) * per_point;
    SweepResult result;
    result.records.resize(static_cast<std::size_t>(total));

    const int workers = std::min(thread_count_from_env(), std::max(total, 1));
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= total) break;
            const int g = t / per_point;
            // stream index == global trial index: disjoint across the sweep
            result.records[static_cast<std::size_t>(t)] = run_trial(grid[static_cast<std::size_t>(g)].ctx, t);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    for (std::size_t g = 0; g < grid.size(); ++g) {
        SweepRow row;
        row.parameter = grid[g].parameter;
        row.value = grid[g].value;
        row.trials = per_point;
        row.d_min_s2 = grid[g].ctx.d_min_s2();
        row.heterogeneity = grid[g].ctx.heterogeneity();
        row.verdict_exact = grid[g].ctx.verdict_exact();
        row.verdict_partial = grid[g].ctx.verdict_partial();

        Welford min_deg, core_size, fraction, errors;
        int ge_k = 0;
        const int k_threshold = grid[g].ctx.config().k;
        for (int t = 0; t < per_point; ++t) {
            const TrialRecord& rec = result.records[g * static_cast<std::size_t>(per_point) +
                                                    static_cast<std::size_t>(t)];
            min_deg.add(rec.min_deg_intersection);
            core_size.add(rec.core_size);
            fraction.add(rec.fraction_matched);
            errors.add(rec.errors_made);
            if (rec.error.empty() && rec.min_deg_intersection >= k_threshold) ++ge_k;
        }
        row.min_deg_mean = min_deg.mean;
        row.min_deg_stddev = min_deg.stddev();
        row.min_deg_ge_k_fraction = per_point > 0 ? static_cast<double>(ge_k) / per_point : 0.0;
        row.core_size_mean = core_size.mean;
        row.core_size_stddev = core_size.stddev();
        row.fraction_matched_mean = fraction.mean;
        row.fraction_matched_stddev = fraction.stddev();
        row.errors_made_mean = errors.mean;
        row.errors_made_stddev = errors.stddev();
        result.rows.push_back(std::move(row));
    }
    return result;
}

const char* const kRawCsvHeader =
    "trial_index,seed,n,s,k,min_deg_intersection,core_size,fraction_matched,errors_made,d_min_s2,R,"
    "verdict_exact,verdict_partial,wall_time_ms";

const char* const kSummaryCsvHeader =
    "parameter,value,trials,min_deg_mean,min_deg_stddev,min_deg_ge_k_fraction,core_size_mean,"
    "core_size_stddev,fraction_matched_mean,fraction_matched_stddev,errors_made_mean,errors_made_stddev,"
    "d_min_s2,R,verdict_exact,verdict_partial";

void write_raw_csv(const SweepResult& result, std::ostream& out) {
    out << kRawCsvHeader << '\n';
    for (const TrialRecord& rec : result.records) {
        out << rec.trial_index << ',' << rec.seed << ',' << rec.n << ',' << format_double(rec.s) << ','
            << rec.k << ',' << rec.min_deg_intersection << ',' << rec.core_size << ','
            << format_double(rec.fraction_matched) << ',' << rec.errors_made << ','
            << format_double(rec.d_min_s2) << ',' << format_double(rec.heterogeneity) << ','
            << (rec.verdict_exact ? 1 : 0) << ',' << (rec.verdict_partial ? 1 : 0) << ','
            << rec.wall_time_ms << '\n';
    }
    if (!out) throw std::runtime_error("write_raw_csv: stream failure");
}

void write_summary_csv(const SweepResult& result, std::ostream& out) {
    out << kSummaryCsvHeader << '\n';
    for (const SweepRow& row : result.rows) {
        out << row.parameter << ',' << format_double(row.value) << ',' << row.trials << ','
            << format_double(row.min_deg_mean) << ',' << format_double(row.min_deg_stddev) << ','
            << format_double(row.min_deg_ge_k_fraction) << ',' << format_double(row.core_size_mean) << ','
            << format_double(row.core_size_stddev) << ',' << format_double(row.fraction_matched_mean) << ','
            << format_double(row.fraction_matched_stddev) << ',' << format_double(row.errors_made_mean)
            << ',' << format_double(row.errors_made_stddev) << ',' << format_double(row.d_min_s2) << ','
            << format_double(row.heterogeneity) << ',' << (row.verdict_exact ? 1 : 0) << ','
            << (row.verdict_partial ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("write_summary_csv: stream failure");
}

std::string summary_path_for(const std::string& raw_path) {
    const std::string suffix = ".csv";
    if (raw_path.size() > suffix.size() &&
        raw_path.compare(raw_path.size() - suffix.size(), suffix.size(), suffix) == 0)
        return raw_path.substr(0, raw_path.size() - suffix.size()) + ".summary.csv";
    return raw_path + ".summary.csv";
}

std::string run_check(const ExperimentConfig& config) {
    config.validate();
    const BoundParams params{0.5, 0.0, config.alpha, config.epsilon, std::max(config.k, 1)};

    auto report_for = [&](const ExperimentConfig& cfg) {
        json j;
        j["exact"] = json::parse(check_exact_condition(cfg.model, cfg.s, params).to_json());
        j["partial"] = json::parse(check_partial_condition(cfg.model, cfg.s).to_json());
        return j;
    };

    json out;
    if (config.sweep) {
        out["reports"] = json::array();
        for (double value : config.sweep->values) {
            json entry;
            entry["parameter"] = config.sweep->parameter;
            entry["value"] = value;
            const ExperimentConfig cfg = apply_sweep_value(config, config.sweep->parameter, value);
            entry.update(report_for(cfg));
            out["reports"].push_back(std::move(entry));
        }
    } else {
        out = report_for(config);
    }
    return out.dump(2);
}

// --- lemma-level checks ------------------------------------------------------

namespace {

std::vector<std::vector<int>> sample_low_degree_counts(const EdgeProbabilities& probs,
                                                       std::span<const int> ks, int samples,
                                                       std::uint64_t master_seed) {
    std::vector<std::vector<int>> counts(ks.size(), std::vector<int>(static_cast<std::size_t>(samples), 0));
    for (int t = 0; t < samples; ++t) {
        RngStream rng(master_seed, static_cast<std::uint64_t>(t));
        const Graph g = sample_graph(probs, rng);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            int count = 0;
            for (int v = 0; v < g.vertex_count(); ++v)
                if (g.degree(v) <= ks[i]) ++count;
            counts[i][static_cast<std::size_t>(t)] = count;
        }
    }
    return counts;
}

} // namespace

std::vector<MeanDominationCase> run_low_degree_mean_check(const EdgeProbabilities& probs, std::span<const int> ks,
                                                          std::span<const double> cs, int samples,
                                                          std::uint64_t master_seed) {
    if (samples < 2) throw std::invalid_argument("run_low_degree_mean_check: need at least 2 samples");
    const auto counts = sample_low_degree_counts(probs, ks, samples, master_seed);

    std::vector<MeanDominationCase> out;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        Welford w;
        for (int x : counts[i]) w.add(x);
        const double se = w.stddev() / std::sqrt(static_cast<double>(samples));
        for (double c : cs) {
            MeanDominationCase item;
            item.k = ks[i];
            item.c = c;
            item.mean = w.mean;
            item.se = se;
            item.bound = low_degree_expectation_bound(probs, ks[i], c);
            item.ok = item.mean <= item.bound + 3.0 * se;
            out.push_back(item);
        }
    }
    return out;
}

VarianceCheck run_low_degree_variance_check(const EdgeProbabilities& probs, int k, int samples,
                                            int bootstrap_resamples, double sigmas, std::uint64_t master_seed) {
    if (samples < 2) throw std::invalid_argument("run_low_degree_variance_check: need at least 2 samples");
    const int ks[] = {k};
    const auto counts = sample_low_degree_counts(probs, ks, samples, master_seed);
    const std::vector<int>& xs = counts[0];

    Welford w;
    for (int x : xs) w.add(x);
    const double variance = w.stddev() * w.stddev();

    // bootstrap spread of the variance estimate
    Welford boot;
    RngStream rng(master_seed ^ 0x626f6f74ULL, 0);
    for (int b = 0; b < bootstrap_resamples; ++b) {
        Welford resample;
        for (int t = 0; t < samples; ++t)
            resample.add(xs[static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(samples)))]);
        boot.add(resample.stddev() * resample.stddev());
    }

    VarianceCheck out;
    out.variance = variance;
    out.mean = w.mean;
    out.bound = w.mean + 3.0 * static_cast<double>(probs.size()) * probs.size() * probs.max_entry();
    out.slack = sigmas * boot.stddev();
    out.ok = variance <= out.bound + out.slack;
    return out;
}

ConcentrationCheck run_low_degree_concentration_check(const EdgeProbabilities& probs, int k, int samples,
                                                      double min_fraction, std::uint64_t master_seed) {
    const int ks[] = {k};
    const auto counts = sample_low_degree_counts(probs, ks, samples, master_seed);
    Welford w;
    for (int x : counts[0]) w.add(x);

    ConcentrationCheck out;
    out.window = std::pow(static_cast<double>(probs.size()), 0.75) / 3.0;
    int within = 0;
    for (int x : counts[0])
        if (std::abs(x - w.mean) <= out.window) ++within;
    out.fraction_within = static_cast<double>(within) / samples;
    out.required = min_fraction;
    out.ok = out.fraction_within >= min_fraction;
    return out;
}

ExpansionCheck run_expansion_check(int n, std::span<const double> gammas, std::span<const int> ks,
                                   int graphs_per_gamma, std::uint64_t master_seed) {
    ExpansionCheck out;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        const double gamma = gammas[gi];
        const EdgeProbabilities probs = build_probabilities(ErSpec{n, gamma / n});
        for (int t = 0; t < graphs_per_gamma; ++t) {
            RngStream rng(master_seed, gi * static_cast<std::uint64_t>(graphs_per_gamma) +
                                           static_cast<std::uint64_t>(t));
            const Graph g = sample_graph(probs, rng);
            ++out.graphs;
            const DensityCheckResult density = subgraph_density_check(g, gamma);
            for (int k : ks) {
                ++out.evaluations;
                const ExpansionTrace trace = expansion_closure(g, k);
                const VertexSet& final_level = trace.final_level();
                const VertexSet outside_core = core_complement(g, k);
                if (!outside_core.is_subset_of(final_level)) ++out.containment_violations;

                const VertexSet rest = final_level.complement();
                if (!rest.empty()) {
                    const InducedSubgraph sub = induced_subgraph(g, rest);
                    if (sub.graph.vertex_count() > 0 && min_degree(sub.graph) < k)
                        ++out.complement_degree_violations;
                }

                const VertexSet seed_set = low_degree_vertices(g, k + 1);
                if (density.passed && seed_set.size() <= n / (4.0 * gamma * gamma)) {
                    ++out.size_bound_evaluated;
                    if (outside_core.size() > 3 * seed_set.size()) ++out.size_bound_violations;
                } else {
                    ++out.size_bound_skipped;
                }
            }
        }
    }
    return out;
}

WeakMatchingTailCheck run_weak_matching_tail_check(int n, double p, double s, int k, int errors, int trials,
                                                   std::span<const double> theta_grid,
                                                   std::uint64_t master_seed) {
    if (errors < 2 || errors > n)
        throw std::invalid_argument("run_weak_matching_tail_check: errors must lie in [2, n]");
    const EdgeProbabilities probs = build_probabilities(ErSpec{n, p});
    const Permutation truth = Permutation::identity(n);

    // cyclic shift on the first `errors` vertices: a maximal matching with
    // exactly that many mismatches
    std::vector<int> image(static_cast<std::size_t>(n));
    std::iota(image.begin(), image.end(), 0);
    for (int i = 0; i < errors; ++i) image[static_cast<std::size_t>(i)] = (i + 1) % errors;
    const Matching mu = Matching::from_permutation(Permutation(std::move(image)));

    const int threshold = k * errors;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        RngStream rng(master_seed, static_cast<std::uint64_t>(t));
        const CorrelatedPair pair = sample_correlated_pair(probs, s, rng, truth);
        if (mismatched_degree_sum(pair.g1, pair.g2, mu, truth) >= threshold) ++hits;
    }

    WeakMatchingTailCheck out;
    out.trials = trials;
    out.p_hat = static_cast<double>(hits) / trials;
    out.se = std::sqrt(out.p_hat * (1.0 - out.p_hat) / trials);
    out.bound = std::numeric_limits<double>::infinity();
    for (double theta : theta_grid)
        out.bound = std::min(out.bound, weak_matching_probability_bound(p, s, n, k, errors, theta));
    out.threshold = out.bound + 3.0 * out.se;
    out.ok = out.p_hat <= out.threshold;
    return out;
}

ColoringCheck run_coloring_check(int n, int trials, std::uint64_t master_seed) {
    ColoringCheck out;
    out.trials = trials;
    for (int t = 0; t < trials; ++t) {
        RngStream rng(master_seed, static_cast<std::uint64_t>(t));
        const Permutation truth = sample_permutation(n, rng);

        // random partial injection: keep each vertex with prob 0.7, then
        // assign targets from a random permutation
        const Permutation targets = sample_permutation(n, rng);
        std::vector<std::pair<int, int>> pairs;
        int used = 0;
        for (int v = 0; v < n; ++v)
            if (rng.next_unit() < 0.7) pairs.emplace_back(v, targets(used++));
        const Matching mu = Matching::from_pairs(n, std::move(pairs));

        const int max_deg = dependency_graph_max_degree(mu, truth);
        out.max_degree_seen = std::max(out.max_degree_seen, max_deg);
        bool bad = max_deg > 2;

        const ErrorDecomposition decomposition = decompose_errors(mu, truth);
        auto color_of = [&](std::pair<int, int> key) {
            auto it = decomposition.coloring.find(key);
            if (it == decomposition.coloring.end()) it = decomposition.coloring.find({key.second, key.first});
            return it == decomposition.coloring.end() ? 0 : it->second;
        };
        for (const auto& [a, b] : dependency_graph_edges(mu, truth)) {
            const int ca = color_of(a), cb = color_of(b);
            if (ca == 0 || cb == 0 || ca == cb || ca > 3 || cb > 3) bad = true;
        }
        if (bad) ++out.violations;
    }
    out.ok = out.violations == 0 && out.max_degree_seen <= 2;
    return out;
}

namespace {

bool clauses_agree(const ConditionReport& a, const ConditionReport& b, std::span<const std::string> names) {
    auto find = [](const ConditionReport& r, const std::string& name) -> const ConditionClause* {
        for (const auto& clause : r.clauses)
            if (clause.name == name) return &clause;
        return nullptr;
    };
    for (const auto& name : names) {
        const ConditionClause* ca = find(a, name);
        const ConditionClause* cb = find(b, name);
        if (ca == nullptr || cb == nullptr) return false;
        if (ca->satisfied != cb->satisfied) return false;
        if (std::abs(ca->lhs - cb->lhs) > 1e-12 * std::max({1.0, std::abs(ca->lhs), std::abs(cb->lhs)}))
            return false;
    }
    return true;
}

} // namespace

ReductionCheck run_corollary_reduction_check(int draws, std::uint64_t master_seed) {
    const std::string exact_names_arr[] = {"exact/min-expected-degree", "exact/max-probability",
                                           "exact/core-order"};
    const std::string partial_names_arr[] = {"partial/min-expected-degree-vs-heterogeneity",
                                             "partial/min-expected-degree-vs-154",
                                             "partial/max-probability-scale"};
    const std::span<const std::string> exact_names(exact_names_arr);
    const std::span<const std::string> partial_names(partial_names_arr);

    ReductionCheck out;
    out.draws = draws;
    for (int t = 0; t < draws; ++t) {
        RngStream rng(master_seed, static_cast<std::uint64_t>(t));
        const int n = 50 + static_cast<int>(rng.next_below(351));
        const double q = 0.001 + 0.15 * rng.next_unit();
        const double s = 0.5 + 0.5 * rng.next_unit();
        const BoundParams params{0.5, 0.0, 0.55 + 0.45 * rng.next_unit(), 0.05 + 0.9 * rng.next_unit(),
                                 13 + static_cast<int>(rng.next_below(8))};

        // SBM with every block probability equal to q
        const int m = 1 + static_cast<int>(rng.next_below(4));
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(m));
        for (int v = 0; v < n; ++v) blocks[static_cast<std::size_t>(v % m)].push_back(v);
        SbmSpec sbm{std::move(blocks),
                    std::vector<std::vector<double>>(static_cast<std::size_t>(m),
                                                     std::vector<double>(static_cast<std::size_t>(m), q))};
        const ErSpec er{n, q};

        const ConditionReport sbm_exact = check_exact_condition(sbm, s, params);
        const ConditionReport er_exact = check_exact_condition(er, s, params);
        const ConditionReport sbm_partial = check_partial_condition(ModelSpec(sbm), s);
        const ConditionReport er_partial = check_partial_condition(ModelSpec(er), s);
        if (!clauses_agree(sbm_exact, er_exact, exact_names) ||
            !clauses_agree(sbm_partial, er_partial, partial_names))
            ++out.disagreements;

        // Chung-Lu with constant weights w: matrix equals ER(w/n); the
        // specialized clause sits at the n/(n-1) diagonal gap
        const double w = 0.5 + 19.5 * rng.next_unit();
        const ChungLuSpec cl{std::vector<double>(static_cast<std::size_t>(n), w)};
        const ErSpec er_cl{n, w / n};
        const ConditionReport cl_exact = check_exact_condition(cl, s, params);
        const ConditionReport er_cl_exact = check_exact_condition(er_cl, s, params);
        const ConditionReport cl_partial = check_partial_condition(ModelSpec(cl), s);
        const ConditionReport er_cl_partial = check_partial_condition(ModelSpec(er_cl), s);
        if (!clauses_agree(cl_exact, er_cl_exact, exact_names) ||
            !clauses_agree(cl_partial, er_cl_partial, partial_names))
            ++out.disagreements;

        for (const auto& clause : cl_exact.clauses) {
            if (clause.name != "exact/chung-lu-min-weight") continue;
            // corollary lhs = w s^2; generic lhs = (n-1)(w/n) s^2
            const double generic = cl_exact.d_min * s * s;
            const double gap = std::abs(clause.lhs * (n - 1.0) / n - generic) / std::max(generic, 1e-30);
            out.max_gap_error = std::max(out.max_gap_error, gap);
        }
    }
    out.ok = out.disagreements == 0 && out.max_gap_error <= 1e-9;
    return out;
}

bool LemmaReport::all_passed() const {
    for (const auto& check : checks)
        if (!check.passed) return false;
    return true;
}

std::string LemmaReport::to_json() const {
    json out;
    out["checks"] = json::array();
    for (const auto& check : checks) {
        json c;
        c["name"] = check.name;
        c["passed"] = check.passed;
        c["measured"] = std::isfinite(check.measured) ? json(check.measured) : json("inf");
        c["bound"] = std::isfinite(check.bound) ? json(check.bound) : json("inf");
        c["detail"] = check.detail;
        out["checks"].push_back(std::move(c));
    }
    out["all_passed"] = all_passed();
    return out.dump(2);
}

namespace {

struct LemmaScales {
    int mean_samples;
    int variance_n;
    int variance_samples;
    int bootstrap;
    int concentration_samples;
    int density_graphs;
    int expansion_graphs_per_gamma;
    int weak_matching_trials;
    int coloring_trials;
    int reduction_draws;
    int weak_core_pairs;
};

LemmaScales scales_for(const std::string& name) {
    if (name == "desk")
        return LemmaScales{1000, 2000, 500, 200, 400, 200, 250, 100000, 100, 50, 3};
    return LemmaScales{60, 300, 60, 50, 60, 40, 30, 3000, 25, 10, 2};
}

// every k-core matching is a weak k-core matching, exhaustively over all
// partial injections of small random graph pairs
LemmaCheck weak_core_implication_check(int pairs, std::uint64_t seed) {
    LemmaCheck check;
    check.name = "weak-core-implication";
    long long examined = 0;
    int violations = 0;
    for (int t = 0; t < pairs; ++t) {
        const int n = 4 + t % 2;
        RngStream rng(seed, static_cast<std::uint64_t>(t));
        const EdgeProbabilities probs = build_probabilities(ErSpec{n, 0.6});
        RngStream g1_rng = rng.substream(0);
        RngStream g2_rng = rng.substream(1);
        RngStream truth_rng = rng.substream(2);
        const Graph g1 = sample_graph(probs, g1_rng);
        const Graph g2 = sample_graph(probs, g2_rng);
        const Permutation truth = sample_permutation(n, truth_rng);

        // enumerate all partial injections via per-vertex decisions
        std::vector<std::pair<int, int>> pairs_buf;
        std::vector<char> used(static_cast<std::size_t>(n), 0);
        auto recurse = [&](auto&& self, int v) -> void {
            if (v == n) {
                const Matching mu = Matching::from_pairs(n, pairs_buf);
                for (int k = 1; k <= 3; ++k) {
                    if (!mu.empty() && is_k_core_matching(g1, g2, mu, k)) {
                        ++examined;
                        if (!is_weak_k_core_matching(g1, g2, mu, truth, k)) ++violations;
                    }
                }
                return;
            }
            self(self, v + 1); // skip v
            for (int target = 0; target < n; ++target) {
                if (used[static_cast<std::size_t>(target)]) continue;
                used[static_cast<std::size_t>(target)] = 1;
                pairs_buf.emplace_back(v, target);
                self(self, v + 1);
                pairs_buf.pop_back();
                used[static_cast<std::size_t>(target)] = 0;
            }
        };
        recurse(recurse, 0);
    }
    check.measured = violations;
    check.bound = 0;
    check.passed = violations == 0;
    check.detail = std::to_string(examined) + " k-core matchings examined across " + std::to_string(pairs) +
                   " graph pairs";
    return check;
}

LemmaCheck density_rate_check(int graphs, std::uint64_t seed) {
    LemmaCheck check;
    check.name = "subgraph-density-rate";
    const int n = 16;
    const double gamma = 1.0;
    const EdgeProbabilities probs = build_probabilities(ErSpec{n, gamma / n});
    int passes = 0;
    for (int t = 0; t < graphs; ++t) {
        RngStream rng(seed, static_cast<std::uint64_t>(t));
        if (subgraph_density_check(sample_graph(probs, rng), gamma).passed) ++passes;
    }
    check.measured = static_cast<double>(passes) / graphs;
    check.bound = 0.9; // minimum pass rate at this scale
    check.passed = check.measured >= check.bound;
    check.detail = std::to_string(passes) + "/" + std::to_string(graphs) + " sampled graphs satisfy the event";
    return check;
}

LemmaCheck fraction_threshold_check() {
    LemmaCheck check;
    check.name = "fraction-bound-threshold";
    double worst = 0.0;
    for (int x = 154; x <= 400; x += 2)
        worst = std::max(worst, std::exp(-x / 7.0) * 6.0 * std::pow(static_cast<double>(x), 4.0));
    check.measured = worst;
    check.bound = 1.0;
    check.passed = worst <= 1.0;
    check.detail = "max over x in [154,400] of 6 x^4 e^{-x/7}";
    return check;
}

LemmaCheck recovery_identity_check(std::uint64_t seed) {
    LemmaCheck check;
    check.name = "recovery-bound-identity";
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        RngStream rng(seed, static_cast<std::uint64_t>(t));
        const int n = 5 + static_cast<int>(rng.next_below(26));
        IrgSpec spec{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
        const double s = 0.3 + 0.7 * rng.next_unit();
        IrgSpec scaled = spec;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double p = 0.3 * rng.next_unit();
                spec.matrix[static_cast<std::size_t>(i) * n + j] = p;
                spec.matrix[static_cast<std::size_t>(j) * n + i] = p;
                scaled.matrix[static_cast<std::size_t>(i) * n + j] = p * s * s;
                scaled.matrix[static_cast<std::size_t>(j) * n + i] = p * s * s;
            }
        }
        const int k = 1 + static_cast<int>(rng.next_below(6));
        const double c = 0.2 + 0.6 * rng.next_unit();
        const double direct = exact_recovery_error_bound(build_probabilities(spec), s, k, c);
        const double via_scaled = low_degree_expectation_bound(build_probabilities(scaled), k - 1, c);
        worst = std::max(worst, std::abs(direct - via_scaled) / std::max(1.0, std::abs(direct)));
    }
    check.measured = worst;
    check.bound = 1e-12;
    check.passed = worst <= check.bound;
    check.detail = "max relative gap over 20 random matrices";
    return check;
}

} // namespace

LemmaReport verify_lemmas(const ExperimentConfig& config, const std::string& inject_fault) {
    const LemmaScales scale = scales_for(config.lemma_scale);
    const std::uint64_t seed = config.master_seed;
    LemmaReport report;

    {
        const EdgeProbabilities probs = build_probabilities(ErSpec{500, 0.01});
        const int ks[] = {1, 2, 3, 4, 5};
        const double cs[] = {0.3, 0.5, 0.7};
        const auto cases = run_low_degree_mean_check(probs, ks, cs, scale.mean_samples, seed + 1);
        LemmaCheck check;
        check.name = "low-degree-expectation";
        check.passed = true;
        double worst_margin = std::numeric_limits<double>::infinity();
        for (const auto& item : cases) {
            if (!item.ok) check.passed = false;
            const double margin = item.bound + 3.0 * item.se - item.mean;
            if (margin < worst_margin) {
                worst_margin = margin;
                check.measured = item.mean;
                check.bound = item.bound + 3.0 * item.se;
                check.detail = "tightest case k=" + std::to_string(item.k) + " c=" + format_double(item.c) +
                               " over " + std::to_string(cases.size()) + " (k,c) cases";
            }
        }
        report.checks.push_back(std::move(check));
    }
    {
        const double p = std::pow(static_cast<double>(scale.variance_n), -0.6);
        const EdgeProbabilities probs = build_probabilities(ErSpec{scale.variance_n, p});
        const VarianceCheck vc =
            run_low_degree_variance_check(probs, 3, scale.variance_samples, scale.bootstrap, 4.0, seed + 2);
        report.checks.push_back(LemmaCheck{"low-degree-variance", vc.ok, vc.variance, vc.bound + vc.slack,
                                           "mean " + format_double(vc.mean) + ", bootstrap slack " +
                                               format_double(vc.slack)});
    }
    {
        const EdgeProbabilities probs = build_probabilities(ErSpec{500, 0.01});
        const ConcentrationCheck cc =
            run_low_degree_concentration_check(probs, 3, scale.concentration_samples, 0.95, seed + 3);
        report.checks.push_back(LemmaCheck{"low-degree-concentration", cc.ok, cc.fraction_within, cc.required,
                                           "window (1/3) n^{3/4} = " + format_double(cc.window)});
    }
    report.checks.push_back(density_rate_check(scale.density_graphs, seed + 4));
    {
        const double gammas[] = {1.0, 1.2};
        const int ks[] = {1, 2};
        const ExpansionCheck ec = run_expansion_check(16, gammas, ks, scale.expansion_graphs_per_gamma, seed + 5);
        report.checks.push_back(
            LemmaCheck{"expansion-containment", ec.unconditional_ok(),
                       static_cast<double>(ec.containment_violations + ec.complement_degree_violations), 0.0,
                       std::to_string(ec.evaluations) + " (graph, k) evaluations"});
        report.checks.push_back(
            LemmaCheck{"expansion-size-bound", ec.conditional_ok(),
                       static_cast<double>(ec.size_bound_violations), 0.0,
                       std::to_string(ec.size_bound_evaluated) + " evaluated, " +
                           std::to_string(ec.size_bound_skipped) + " skipped (premise not met)"});
    }
    report.checks.push_back(weak_core_implication_check(scale.weak_core_pairs, seed + 6));
    {
        const ColoringCheck cc = run_coloring_check(8, scale.coloring_trials, seed + 7);
        report.checks.push_back(LemmaCheck{"dependency-coloring", cc.ok,
                                           static_cast<double>(cc.max_degree_seen), 2.0,
                                           std::to_string(cc.violations) + " violations in " +
                                               std::to_string(cc.trials) + " trials"});
    }
    {
        std::vector<double> grid;
        for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
        const WeakMatchingTailCheck wc =
            run_weak_matching_tail_check(50, 0.05, 0.8, 3, 5, scale.weak_matching_trials, grid, seed + 8);
        report.checks.push_back(LemmaCheck{"weak-matching-tail", wc.ok, wc.p_hat, wc.threshold,
                                           "bound " + format_double(wc.bound) + " + 3 SE over " +
                                               std::to_string(wc.trials) + " trials"});
    }
    report.checks.push_back(fraction_threshold_check());
    report.checks.push_back(recovery_identity_check(seed + 9));
    {
        const ReductionCheck rc = run_corollary_reduction_check(scale.reduction_draws, seed + 10);
        report.checks.push_back(LemmaCheck{"corollary-reduction", rc.ok,
                                           static_cast<double>(rc.disagreements), 0.0,
                                           std::to_string(rc.draws) + " parameter draws, max gap error " +
                                               format_double(rc.max_gap_error)});
    }

    if (!inject_fault.empty()) {
        bool found = false;
        for (auto& check : report.checks) {
            if (check.name == inject_fault) {
                check.passed = !check.passed;
                check.detail += " [fault injected]";
                found = true;
            }
        }
        if (!found) throw std::invalid_argument("verify_lemmas: no check named \"" + inject_fault + "\"");
    }
    return report;
}

} // namespace corematch
