#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corematch/matching.hpp"
#include "corematch/models.hpp"
#include "corematch/theory.hpp"

namespace corematch {

enum class Mode { MinDegree, CoreSize, BruteForce, Bounds, Lemmas };
Mode mode_from_string(const std::string& name);
std::string mode_to_string(Mode mode);

struct SweepSpec {
    std::string parameter; // "s" | "k" | "p" | "n" | "r"
    std::vector<double> values;
};

/// One experiment: a model, correlation, core order, trial count and seed,
/// optionally swept over a parameter grid. Ingested from a JSON file; CLI
/// flags override top-level scalar fields.
struct ExperimentConfig {
    ModelSpec model = ErSpec{0, 0.0};
    double s = 1.0;
    int k = 13;
    int trials = 1;
    std::uint64_t master_seed = 0;
    double alpha = 0.75;   // sparsity exponent for the exact checker
    double epsilon = 0.1;  // slack for the exact checker
    Mode mode = Mode::CoreSize;
    std::optional<SweepSpec> sweep;
    std::string output_path;
    int brute_force_limit = 8;
    std::string lemma_scale = "desk"; // "desk" | "smoke"

    void validate() const;
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
};

/// Copy of the config with one sweep value applied to the named parameter.
ExperimentConfig apply_sweep_value(const ExperimentConfig& config, const std::string& parameter, double value);

/// Measured outcomes of one trial. wall_time_ms is always 0: the CSV output
/// is required to be byte-identical across runs and thread counts, which a
/// measured duration cannot be (timings are reported on stderr instead).
struct TrialRecord {
    int trial_index = 0;
    std::uint64_t seed = 0;
    int n = 0;
    double s = 0.0;
    int k = 0;
    int min_deg_intersection = 0;
    int core_size = 0;          // size of the k-core of the truth-aligned intersection
    double fraction_matched = 0.0;
    int errors_made = 0;
    double d_min_s2 = 0.0;
    double heterogeneity = 0.0; // R column
    bool verdict_exact = false;
    bool verdict_partial = false;
    std::int64_t wall_time_ms = 0;
    std::string error; // structured capacity/config error; numeric fields are -1 when set
};

/// Per-grid-point precomputation shared by all trials of that point.
class TrialContext {
public:
    explicit TrialContext(ExperimentConfig config);
    const ExperimentConfig& config() const { return config_; }
    const EdgeProbabilities& probs() const { return probs_; }
    double d_min_s2() const { return d_min_s2_; }
    double heterogeneity() const { return heterogeneity_; }
    bool verdict_exact() const { return verdict_exact_; }
    bool verdict_partial() const { return verdict_partial_; }

private:
    ExperimentConfig config_;
    EdgeProbabilities probs_;
    double d_min_s2_ = 0.0;
    double heterogeneity_ = 0.0;
    bool verdict_exact_ = false;
    bool verdict_partial_ = false;
};

/// Runs one trial with RNG stream (master_seed, stream_index). Deterministic
/// given (config, stream_index). Capacity violations are recorded, not thrown.
TrialRecord run_trial(const TrialContext& ctx, int stream_index);
TrialRecord run_trial(const ExperimentConfig& config, int stream_index);

struct SweepRow {
    std::string parameter;
    double value = 0.0;
    int trials = 0;
    double min_deg_mean = 0.0, min_deg_stddev = 0.0;
    double min_deg_ge_k_fraction = 0.0; // fraction of trials with min degree >= config k
    double core_size_mean = 0.0, core_size_stddev = 0.0;
    double fraction_matched_mean = 0.0, fraction_matched_stddev = 0.0;
    double errors_made_mean = 0.0, errors_made_stddev = 0.0;
    double d_min_s2 = 0.0;
    double heterogeneity = 0.0;
    bool verdict_exact = false;
    bool verdict_partial = false;
};

struct SweepResult {
    std::vector<TrialRecord> records; // ordered by trial_index; grid point g owns indices [g*trials, (g+1)*trials)
    std::vector<SweepRow> rows;
};

/// Runs trials for every grid point (disjoint stream indices), in parallel
/// across COREMATCH_THREADS workers; output is independent of the worker
/// count. A missing sweep runs the config as a single grid point.
SweepResult run_sweep(const ExperimentConfig& config);

extern const char* const kRawCsvHeader;
extern const char* const kSummaryCsvHeader;
void write_raw_csv(const SweepResult& result, std::ostream& out);
void write_summary_csv(const SweepResult& result, std::ostream& out);

/// "<stem>.summary.csv" next to the raw output path.
std::string summary_path_for(const std::string& raw_path);

/// Worker count from COREMATCH_THREADS (default: hardware concurrency).
int thread_count_from_env();

/// Exact and partial condition reports for the config (and each sweep value,
/// when a grid is present), as one JSON document.
std::string run_check(const ExperimentConfig& config);

// --- lemma-level checks -----------------------------------------------------
// Shared between `verify-lemmas` and the acceptance suite, which runs them at
// the scales its criteria state.

/// Mean |{v : deg <= k}| over sampled graphs vs the Chernoff bound, for every
/// (k, c) combination; ok iff mean <= bound + 3 * standard error everywhere.
struct MeanDominationCase {
    int k = 0;
    double c = 0.0;
    double mean = 0.0;
    double se = 0.0;
    double bound = 0.0;
    bool ok = false;
};
std::vector<MeanDominationCase> run_low_degree_mean_check(const EdgeProbabilities& probs, std::span<const int> ks,
                                                          std::span<const double> cs, int samples,
                                                          std::uint64_t master_seed);

/// Empirical variance of |{v : deg <= k}| vs mean + 3 n^2 p_max, with a
/// bootstrap slack of `sigmas` standard deviations on the variance estimate.
struct VarianceCheck {
    double variance = 0.0;
    double mean = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    bool ok = false;
};
VarianceCheck run_low_degree_variance_check(const EdgeProbabilities& probs, int k, int samples,
                                            int bootstrap_resamples, double sigmas, std::uint64_t master_seed);

/// Fraction of samples with | |Z_k| - mean | <= (1/3) n^{3/4}.
struct ConcentrationCheck {
    double fraction_within = 0.0;
    double window = 0.0;
    double required = 0.0;
    bool ok = false;
};
ConcentrationCheck run_low_degree_concentration_check(const EdgeProbabilities& probs, int k, int samples,
                                                      double min_fraction, std::uint64_t master_seed);

/// Expansion closure on random ER(n, gamma/n) graphs: unconditionally the
/// core complement sits inside the final level and the outside has induced
/// minimum degree >= k; conditionally (density check passed and the seed set
/// is small) the complement is at most 3x the seed set.
struct ExpansionCheck {
    int graphs = 0;
    int evaluations = 0;
    int containment_violations = 0;
    int complement_degree_violations = 0;
    int size_bound_evaluated = 0;
    int size_bound_violations = 0;
    int size_bound_skipped = 0;
    bool unconditional_ok() const { return containment_violations == 0 && complement_degree_violations == 0; }
    bool conditional_ok() const { return size_bound_violations == 0; }
};
ExpansionCheck run_expansion_check(int n, std::span<const double> gammas, std::span<const int> ks,
                                   int graphs_per_gamma, std::uint64_t master_seed);

/// Tail of the mismatched-degree statistic for a fixed cyclic error pattern
/// on the first `errors` vertices (truth = identity), vs the Chernoff bound
/// minimized over the theta grid plus 3 standard errors.
struct WeakMatchingTailCheck {
    double p_hat = 0.0;
    double se = 0.0;
    double bound = 0.0;
    double threshold = 0.0;
    int trials = 0;
    bool ok = false;
};
WeakMatchingTailCheck run_weak_matching_tail_check(int n, double p, double s, int k, int errors, int trials,
                                                   std::span<const double> theta_grid, std::uint64_t master_seed);

/// Dependency-graph structure over random (matching, truth) pairs: maximum
/// degree at most 2 and the greedy 3-coloring proper.
struct ColoringCheck {
    int trials = 0;
    int max_degree_seen = 0;
    int violations = 0;
    bool ok = false;
};
ColoringCheck run_coloring_check(int n, int trials, std::uint64_t master_seed);

/// SBM with all blocks sharing one probability and Chung-Lu with constant
/// weights against the equivalent ER model: generic checker clauses must
/// agree exactly; the Chung-Lu specialization must sit at the documented
/// n/(n-1) diagonal gap.
struct ReductionCheck {
    int draws = 0;
    int disagreements = 0;
    double max_gap_error = 0.0;
    bool ok = false;
};
ReductionCheck run_corollary_reduction_check(int draws, std::uint64_t master_seed);

struct LemmaCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct LemmaReport {
    std::vector<LemmaCheck> checks;
    bool all_passed() const;
    std::string to_json() const;
};

/// Runs the full registry of lemma-level checks at the config's registered
/// scale ("desk" or "smoke"), seeded by master_seed. When inject_fault names
/// a check, that check's verdict is flipped (test hook).
LemmaReport verify_lemmas(const ExperimentConfig& config, const std::string& inject_fault = "");

} // namespace corematch
