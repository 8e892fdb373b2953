// corematch command-line front end: sample graphs and correlated pairs, peel
// k-cores, run the brute-force estimator, evaluate recovery conditions, run
// Monte Carlo sweeps and the lemma-check battery.
//
// Exit codes: 0 success, 1 check failure, 2 I/O or config error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "corematch/errors.hpp"
#include "corematch/graph.hpp"
#include "corematch/harness.hpp"
#include "corematch/matching.hpp"
#include "corematch/models.hpp"
#include "corematch/theory.hpp"

namespace {

using namespace corematch;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

Graph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_edge_list(in);
}

struct ScalarOverrides {
    std::optional<double> s;
    std::optional<int> k;
    std::optional<int> trials;
    std::optional<std::uint64_t> master_seed;
    std::optional<double> alpha;
    std::optional<double> epsilon;
    std::optional<std::string> mode;
    std::optional<std::string> output;

    void apply(ExperimentConfig& config) const {
        if (s) config.s = *s;
        if (k) config.k = *k;
        if (trials) config.trials = *trials;
        if (master_seed) config.master_seed = *master_seed;
        if (alpha) config.alpha = *alpha;
        if (epsilon) config.epsilon = *epsilon;
        if (mode) config.mode = mode_from_string(*mode);
        if (output) config.output_path = *output;
        config.validate();
    }
};

void add_override_flags(CLI::App* cmd, ScalarOverrides& overrides) {
    cmd->add_option("--s", overrides.s, "override correlation s");
    cmd->add_option("--k", overrides.k, "override core order k");
    cmd->add_option("--trials", overrides.trials, "override trial count");
    cmd->add_option("--master-seed", overrides.master_seed, "override master seed");
    cmd->add_option("--alpha", overrides.alpha, "override sparsity exponent");
    cmd->add_option("--epsilon", overrides.epsilon, "override slack epsilon");
    cmd->add_option("--mode", overrides.mode, "override mode");
    cmd->add_option("--output", overrides.output, "override output path");
}

int cmd_sample(const std::string& config_path, const std::string& out_prefix, bool pair,
               const ScalarOverrides& overrides) {
    ExperimentConfig config = ExperimentConfig::from_json_file(config_path);
    overrides.apply(config);
    const EdgeProbabilities probs = build_probabilities(config.model);
    RngStream rng(config.master_seed, 0);

    if (!pair) {
        const Graph g = sample_graph(probs, rng);
        if (out_prefix.empty()) {
            write_edge_list(g, std::cout);
        } else {
            std::ostringstream text;
            write_edge_list(g, text);
            write_file(out_prefix + ".txt", text.str());
        }
        return 0;
    }

    const CorrelatedPair cp = sample_correlated_pair(probs, config.s, rng);
    const std::string prefix = out_prefix.empty() ? std::string("pair") : out_prefix;
    std::ostringstream g1_text, g2_text;
    write_edge_list(cp.g1, g1_text);
    write_edge_list(cp.g2, g2_text);
    write_file(prefix + ".g1.txt", g1_text.str());
    write_file(prefix + ".g2.txt", g2_text.str());
    nlohmann::json truth;
    truth["s"] = cp.s;
    truth["pi_star"] = cp.truth.image();
    write_file(prefix + ".truth.json", truth.dump(2));
    std::cerr << "wrote " << prefix << ".g1.txt, " << prefix << ".g2.txt, " << prefix << ".truth.json\n";
    return 0;
}

int cmd_core(const std::string& input, int k, const std::string& out_path) {
    const Graph g = read_graph_file(input);
    const VertexSet core = k_core(g, k);
    std::ostringstream text;
    for (int v : core.members()) text << v << '\n';
    if (out_path.empty()) {
        std::cout << text.str();
    } else {
        write_file(out_path, text.str());
    }
    std::cerr << "k-core size " << core.size() << " of " << g.vertex_count() << "\n";
    return 0;
}

int cmd_match(const std::string& g1_path, const std::string& g2_path, int k, int limit,
              const std::string& out_path) {
    const Graph g1 = read_graph_file(g1_path);
    const Graph g2 = read_graph_file(g2_path);
    const Matching matching = brute_force_k_core_estimator(g1, g2, k, limit);
    const std::string text = matching.to_json();
    if (out_path.empty()) {
        std::cout << text << '\n';
    } else {
        write_file(out_path, text);
    }
    std::cerr << "matched " << matching.size() << " of " << g1.vertex_count() << " vertices\n";
    return 0;
}

int cmd_check(const std::string& config_path, const ScalarOverrides& overrides) {
    ExperimentConfig config = ExperimentConfig::from_json_file(config_path);
    overrides.apply(config);
    const std::string report = run_check(config);
    if (config.output_path.empty()) {
        std::cout << report << '\n';
    } else {
        write_file(config.output_path, report);
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const ScalarOverrides& overrides) {
    ExperimentConfig config = ExperimentConfig::from_json_file(config_path);
    overrides.apply(config);
    if (config.output_path.empty()) throw std::invalid_argument("sweep: output_path is required");

    const auto started = std::chrono::steady_clock::now();
    const SweepResult result = run_sweep(config);
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);

    std::ofstream raw(config.output_path);
    if (!raw) throw std::runtime_error("cannot open " + config.output_path + " for writing");
    write_raw_csv(result, raw);
    const std::string summary_path = summary_path_for(config.output_path);
    std::ofstream summary(summary_path);
    if (!summary) throw std::runtime_error("cannot open " + summary_path + " for writing");
    write_summary_csv(result, summary);

    int errored = 0;
    for (const auto& rec : result.records)
        if (!rec.error.empty()) ++errored;
    std::cerr << result.records.size() << " trials in " << elapsed.count() << " ms across "
              << thread_count_from_env() << " workers";
    if (errored > 0) std::cerr << " (" << errored << " trials recorded errors)";
    std::cerr << "\nwrote " << config.output_path << " and " << summary_path << "\n";
    return 0;
}

int cmd_verify_lemmas(const std::string& config_path, const std::string& inject_fault,
                      const ScalarOverrides& overrides) {
    ExperimentConfig config = ExperimentConfig::from_json_file(config_path);
    overrides.apply(config);
    const LemmaReport report = verify_lemmas(config, inject_fault);
    const std::string text = report.to_json();
    if (config.output_path.empty()) {
        std::cout << text << '\n';
    } else {
        write_file(config.output_path, text);
    }
    for (const auto& check : report.checks)
        std::cerr << (check.passed ? "pass" : "FAIL") << "  " << check.name << "  (" << check.detail << ")\n";
    return report.all_passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-core matching for correlated inhomogeneous random graphs"};
    app.require_subcommand(1);

    std::string config_path, out_prefix, input, g1_path, g2_path, out_path, inject_fault;
    bool pair = false;
    int k = 1, limit = 8;
    ScalarOverrides overrides;

    auto* sample = app.add_subcommand("sample", "sample a graph or a correlated pair");
    sample->add_option("--config", config_path, "experiment config JSON")->required();
    sample->add_option("--out", out_prefix, "output path prefix (default: stdout / 'pair')");
    sample->add_flag("--pair", pair, "emit a correlated pair plus ground truth");
    add_override_flags(sample, overrides);

    auto* core = app.add_subcommand("core", "k-core of an edge-list graph");
    core->add_option("--input", input, "edge-list file")->required();
    core->add_option("--k", k, "core order")->required();
    core->add_option("--out", out_path, "output file (default: stdout)");

    auto* match = app.add_subcommand("match", "brute-force k-core estimator on two edge lists");
    match->add_option("--g1", g1_path, "first edge-list file")->required();
    match->add_option("--g2", g2_path, "second edge-list file")->required();
    match->add_option("--k", k, "core order")->required();
    match->add_option("--limit", limit, "vertex-count capacity limit");
    match->add_option("--out", out_path, "output file (default: stdout)");

    auto* check = app.add_subcommand("check", "exact/partial recovery condition reports");
    check->add_option("--config", config_path, "experiment config JSON")->required();
    add_override_flags(check, overrides);

    auto* sweep = app.add_subcommand("sweep", "seeded Monte Carlo sweep to CSV");
    sweep->add_option("--config", config_path, "experiment config JSON")->required();
    add_override_flags(sweep, overrides);

    auto* verify = app.add_subcommand("verify-lemmas", "run the lemma-check battery");
    verify->add_option("--config", config_path, "experiment config JSON")->required();
    verify->add_option("--inject-fault", inject_fault, "flip the named check (test hook)");
    add_override_flags(verify, overrides);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sample->parsed()) return cmd_sample(config_path, out_prefix, pair, overrides);
        if (core->parsed()) return cmd_core(input, k, out_path);
        if (match->parsed()) return cmd_match(g1_path, g2_path, k, limit, out_path);
        if (check->parsed()) return cmd_check(config_path, overrides);
        if (sweep->parsed()) return cmd_sweep(config_path, overrides);
        if (verify->parsed()) return cmd_verify_lemmas(config_path, inject_fault, overrides);
    } catch (const corematch::capacity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
