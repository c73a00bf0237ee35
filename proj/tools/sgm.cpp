#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgm/sgm.hpp"

namespace {

constexpr int exit_usage = 2;
constexpr int exit_failure = 1;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelFlags {
    int n = 0;
    double a = 5.0;
    double b = 1.0;
    double s = 0.8;
    std::uint64_t seed = 0;
    bool shuffle_labels = false;

    sgm::CsbmParams params() const { return {n, a, b, s, seed, shuffle_labels}; }

    void add(CLI::App* app, bool require_n) {
        auto* opt = app->add_option("--n", n, "Number of vertices (even)");
        if (require_n) opt->required();
        app->add_option("--a", a, "Intra-community density parameter")->capture_default_str();
        app->add_option("--b", b, "Inter-community density parameter")->capture_default_str();
        app->add_option("--s", s, "Edge retention probability")->capture_default_str();
        app->add_option("--seed,--rng_seed", seed, "RNG seed")->capture_default_str();
        app->add_flag("--shuffle_labels", shuffle_labels, "Shuffle community labels over vertices");
    }
};

struct PairFlags {
    std::string a_edges;
    std::string b_edges;
    std::string seeds;
    int n = 0;

    void add(CLI::App* app) {
        app->add_option("--a-edges,--A", a_edges, "Edge list of A (integer labels)")->required()->check(CLI::ExistingFile);
        app->add_option("--b-edges,--B", b_edges, "Edge list of B (integer labels)")->required()->check(CLI::ExistingFile);
        app->add_option("--seeds", seeds, "Seed CSV with rows u,pi_u")->required()->check(CLI::ExistingFile);
        app->add_option("--n", n, "Vertex count (default: '# n=' header or largest index + 1)");
    }

    struct Loaded {
        sgm::Graph A;
        sgm::Graph B;
        sgm::SeedMap seeds;
    };

    Loaded load() const {
        Loaded out;
        out.A = sgm::load_indexed_edgelist(a_edges, n);
        out.B = sgm::load_indexed_edgelist(b_edges, n > 0 ? n : out.A.n());
        if (out.A.n() != out.B.n()) {
            // Fall back to the larger size when only one file declares it.
            const int size = std::max(out.A.n(), out.B.n());
            out.A = sgm::load_indexed_edgelist(a_edges, size);
            out.B = sgm::load_indexed_edgelist(b_edges, size);
        }
        for (auto [u, v] : sgm::read_index_pairs_csv(seeds)) {
            out.seeds.vertices.push_back(u);
            out.seeds.images.push_back(v);
        }
        out.seeds.normalize(out.A.n());
        return out;
    }
};

int cmd_generate(const ModelFlags& model, double delta, const std::string& out_dir) {
    const auto params = model.params();
    const sgm::Instance inst = sgm::sample_instance(params, delta);
    sgm::write_instance(out_dir, inst);
    return 0;
}

int cmd_match(const PairFlags& pair, const std::string& method_name, const std::string& truth_path,
              const sgm::MatchOptions& options) {
    const auto method = sgm::parse_method(method_name);
    if (!method) throw UsageError("unknown method '" + method_name + "' (hungarian, greedy, lp, fw, hop2)");
    const auto loaded = pair.load();
    const sgm::MatchResult result = sgm::run_matcher(*method, loaded.A, loaded.B, loaded.seeds, options);
    std::optional<double> acc;
    if (!truth_path.empty()) {
        sgm::Permutation truth(static_cast<std::size_t>(loaded.A.n()), -1);
        for (auto [u, v] : sgm::read_index_pairs_csv(truth_path)) {
            if (u < 0 || u >= loaded.A.n()) throw std::invalid_argument("truth: vertex out of range");
            truth[static_cast<std::size_t>(u)] = v;
        }
        if (!sgm::is_permutation_of(truth, loaded.A.n())) throw std::invalid_argument("truth: not a permutation");
        acc = sgm::accuracy(result.pi_hat, truth, loaded.seeds.unrevealed(loaded.A.n()));
    }
    std::cout << sgm::to_json(result, acc).dump() << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path, std::vector<double> deltas, bool verbose) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open " + config_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(config_path + ": " + e.what());
    }
    sgm::TrialConfig cfg;
    try {
        cfg = sgm::trial_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(config_path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(config_path + ": " + e.what());
    }
    if (deltas.empty() && j.contains("deltas")) deltas = j["deltas"].get<std::vector<double>>();
    if (deltas.empty()) deltas.push_back(cfg.seed_fraction);
    if (verbose) cfg.log = &std::cerr;
    const sgm::SweepResult result = sgm::sweep_seed_fraction(cfg, deltas);
    if (out_path.empty() || out_path == "-")
        sgm::write_csv(std::cout, result);
    else
        sgm::write_csv(out_path, result);
    return 0;
}

struct OracleFlags {
    bool isolated = false;
    bool score_tail = false;
    int trials = 200;
    int u_size = 0;
    double delta = -1.0;
    std::vector<double> epsilons;
};

int cmd_oracle(const ModelFlags& model, const OracleFlags& f) {
    const auto params = model.params();
    params.validate();
    int u_size = f.u_size;
    if (u_size == 0) {
        if (f.delta < 0.0) throw UsageError("oracle: give --u-size or --delta");
        u_size = params.n - sgm::balanced_seed_count(params.n, f.delta);
    }
    nlohmann::json out;
    out["params"] = params;
    out["u_size"] = u_size;
    out["alpha"] = sgm::alpha_from_unrevealed(params.n, u_size);
    out["regime"] = sgm::to_string(sgm::threshold_predicate(params.a, params.b, params.s, out["alpha"].get<double>()));
    const bool all = !f.isolated && !f.score_tail;
    if (f.isolated || all) out["isolated"] = sgm::isolated_count_study(params, u_size, f.trials, params.rng_seed);
    if (f.score_tail || all) {
        std::vector<double> eps = f.epsilons;
        if (eps.empty()) {
            const double half = params.lambda() * params.s * params.s / 2.0;
            eps = {0.0, half / 2.0, half, 2.0 * half};
        }
        out["score_tail"] = sgm::score_tail_estimate(params, u_size, f.trials, eps, params.rng_seed);
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_lp_dump(const PairFlags& pair, const std::string& out_path) {
    const auto loaded = pair.load();
    const sgm::SeededBlocks blocks(loaded.A, loaded.B, loaded.seeds);
    const sgm::ReducedLp lp = sgm::build_reduced_lp(blocks);
    if (out_path.empty() || out_path == "-") {
        sgm::write_lp_format(std::cout, lp);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        sgm::write_lp_format(out, lp);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seeded graph matching on correlated block models"};
    app.require_subcommand(1);

    ModelFlags gen_model;
    double gen_delta = 0.9;
    std::string gen_out = ".";
    auto* gen = app.add_subcommand("generate", "Sample an instance and write A.edges, B.edges, seeds.csv, truth.csv");
    gen_model.add(gen, true);
    gen->add_option("--delta,--seed_fraction", gen_delta, "Seed fraction")->capture_default_str()->check(CLI::Range(0.0, 0.999999));
    gen->add_option("--out,-o", gen_out, "Output directory")->capture_default_str();

    PairFlags match_pair;
    std::string match_method = "hungarian", match_truth;
    sgm::MatchOptions match_opts;
    auto* match = app.add_subcommand("match", "Match a seeded pair and print the result as JSON");
    match_pair.add(match);
    match->add_option("--method", match_method, "hungarian, greedy, lp, fw or hop2")->capture_default_str();
    match->add_option("--truth", match_truth, "Truth CSV with rows u,pi_u; adds accuracy")->check(CLI::ExistingFile);
    match->add_option("--fw-iters,--fw_iterations", match_opts.fw_iterations, "Frank-Wolfe iterations")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    match->add_option("--lp-max-unrevealed,--lp_max_unrevealed", match_opts.lp_max_unrevealed,
                      "Largest unrevealed block the LP accepts")
        ->capture_default_str();

    std::string sweep_config, sweep_out;
    std::vector<double> sweep_deltas;
    bool sweep_verbose = false;
    auto* sweep = app.add_subcommand("sweep", "Run trials over seed fractions and write CSV");
    sweep->add_option("--config", sweep_config, "JSON trial configuration")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out,-o", sweep_out, "CSV path (default stdout)");
    sweep->add_option("--deltas", sweep_deltas, "Seed fractions (overrides the config)");
    sweep->add_flag("--verbose,-v", sweep_verbose, "Per-trial log lines on stderr");

    ModelFlags oracle_model;
    OracleFlags oracle_flags;
    auto* oracle = app.add_subcommand("oracle", "Monte-Carlo estimates of isolation counts and score tails");
    oracle_model.add(oracle, true);
    oracle->add_flag("--isolated", oracle_flags.isolated, "Isolated and hard isolated counts");
    oracle->add_flag("--score-tail", oracle_flags.score_tail, "Score tail frequencies");
    oracle->add_option("--trials", oracle_flags.trials, "Monte-Carlo trials")->capture_default_str()->check(CLI::PositiveNumber);
    oracle->add_option("--u-size,--u_size", oracle_flags.u_size, "Unrevealed set size")->check(CLI::PositiveNumber);
    oracle->add_option("--delta,--seed_fraction", oracle_flags.delta, "Seed fraction (when --u-size is absent)")
        ->check(CLI::Range(0.0, 0.999999));
    oracle->add_option("--epsilon", oracle_flags.epsilons, "Score thresholds as multiples of ln n");

    PairFlags dump_pair;
    std::string dump_out;
    auto* dump = app.add_subcommand("lp-dump", "Write the reduced LP in CPLEX LP format");
    dump_pair.add(dump);
    dump->add_option("--out,-o", dump_out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*gen) return cmd_generate(gen_model, gen_delta, gen_out);
        if (*match) return cmd_match(match_pair, match_method, match_truth, match_opts);
        if (*sweep) return cmd_sweep(sweep_config, sweep_out, sweep_deltas, sweep_verbose);
        if (*oracle) return cmd_oracle(oracle_model, oracle_flags);
        if (*dump) return cmd_lp_dump(dump_pair, dump_out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}
