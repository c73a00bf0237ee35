#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sgm/csbm.hpp"
#include "sgm/graph.hpp"
#include "sgm/matchers.hpp"
#include "sgm/parallel.hpp"
#include "sgm/rng.hpp"

namespace sgm {

/// Fraction of unrevealed vertices u with pi_hat[u] == pi_star[u].
inline double accuracy(std::span<const int> pi_hat, std::span<const int> pi_star, std::span<const int> unrevealed) {
    if (unrevealed.empty()) throw std::invalid_argument("accuracy: empty unrevealed set");
    if (pi_hat.size() != pi_star.size()) throw std::invalid_argument("accuracy: permutation sizes differ");
    std::size_t hits = 0;
    for (int u : unrevealed) {
        if (u < 0 || static_cast<std::size_t>(u) >= pi_star.size()) throw std::invalid_argument("accuracy: vertex out of range");
        if (pi_hat[static_cast<std::size_t>(u)] == pi_star[static_cast<std::size_t>(u)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(unrevealed.size());
}

/// Two observed graphs on a shared label set.
struct RealPairSource {
    std::string path_a;
    std::string path_b;
    /// Optional `label_a,label_b` file; without it equal labels correspond.
    std::optional<std::string> correspondence;
    /// Restrict to the largest connected component of the intersection graph.
    bool largest_component = false;
    int max_vertices = 0;
};

struct TrialConfig {
    std::variant<CsbmParams, RealPairSource> source;
    double seed_fraction = 0.9;
    std::vector<Method> methods{Method::overlap_hungarian, Method::overlap_greedy, Method::hop2, Method::fw_linear};
    int trials = 20;
    std::uint64_t rng_seed = 0;
    int fw_iterations = 30;
    int lp_max_unrevealed = 150;
    /// Report the mean largest-component size of the intersection graph.
    bool giant_size = true;
    /// Run each method once before timing.
    bool warmup = true;
    /// Zero means worker_count().
    int workers = 0;
    /// Per-trial progress lines; null silences them.
    std::ostream* log = nullptr;

    void validate() const {
        if (!(seed_fraction >= 0.0 && seed_fraction < 1.0)) throw std::invalid_argument("seed_fraction must lie in [0, 1)");
        if (trials < 1) throw std::invalid_argument("trials must be at least 1");
        if (fw_iterations < 1) throw std::invalid_argument("fw_iterations must be positive");
        if (methods.empty()) throw std::invalid_argument("at least one method is required");
        if (const auto* p = std::get_if<CsbmParams>(&source)) p->validate();
    }
};

struct SweepRow {
    Method method = Method::overlap_hungarian;
    double param = 0.0;
    double mean_acc = 0.0;
    double sd_acc = 0.0;
    double mean_runtime_s = 0.0;
    double sd_runtime_s = 0.0;
    int trials = 0;
    int u_size = 0;
    std::optional<double> giant_size;
    /// Per-trial accuracies in trial order.
    std::vector<double> accuracies;
    /// Fraction of trials with accuracy exactly 1.
    double exact_rate = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Sample standard deviation, (k - 1) denominator; 0 for fewer than two values.
inline double sd_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

struct TrialInstance {
    Graph A;
    Graph B;
    Permutation truth;
    SeedMap seeds;
};

inline AlignedPair load_real_pair(const RealPairSource& src) {
    LoadOptions opts;
    opts.max_vertices = src.max_vertices;
    auto [ga, map_a] = load_edgelist(src.path_a, opts);
    auto [gb, map_b] = load_edgelist(src.path_b, opts);
    AlignedPair pair = src.correspondence
                           ? align_pair(ga, gb, map_a, map_b, read_correspondence_csv(*src.correspondence))
                           : align_pair(ga, gb, map_a, map_b);
    if (src.largest_component) {
        const auto lcc = largest_connected_component(intersect(pair.a, pair.b, pair.truth));
        AlignedPair cut;
        cut.a = induced_subgraph(pair.a, lcc.vertices);
        std::vector<int> images;
        for (int v : lcc.vertices) images.push_back(pair.truth[static_cast<std::size_t>(v)]);
        // Keep B's order aligned with A's so the truth stays the identity.
        cut.b = induced_subgraph(pair.b, images);
        for (int v : lcc.vertices) cut.labels.add(pair.labels.label(v));
        cut.truth.resize(lcc.vertices.size());
        for (std::size_t i = 0; i < cut.truth.size(); ++i) cut.truth[i] = static_cast<int>(i);
        pair = std::move(cut);
    }
    return pair;
}

/// Trial t of a real pair: B is relabelled by a random permutation so that
/// no matcher profits from index order, and a uniform random seed set of
/// floor(delta*n) vertices is revealed.
inline TrialInstance real_trial(const AlignedPair& pair, double delta, Rng rng) {
    const int n = pair.a.n();
    const int k = static_cast<int>(std::floor(delta * n + 1e-9));
    if (k >= n) throw std::invalid_argument("seed fraction leaves no unrevealed vertex");
    TrialInstance t;
    Rng relabel_rng = rng.stream(1);
    const Permutation tau = relabel_rng.permutation(n);
    t.A = pair.a;
    t.B = pair.b.relabeled(tau);
    t.truth.resize(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) t.truth[static_cast<std::size_t>(u)] = tau[static_cast<std::size_t>(pair.truth[static_cast<std::size_t>(u)])];
    Rng seed_rng = rng.stream(2);
    t.seeds.vertices = seed_rng.sample_without_replacement(n, k);
    for (int r : t.seeds.vertices) t.seeds.images.push_back(t.truth[static_cast<std::size_t>(r)]);
    return t;
}

inline TrialInstance synthetic_trial(CsbmParams params, double delta, Rng rng) {
    params.rng_seed = rng();
    Instance inst = sample_instance(params, delta, SampleOptions{false, nullptr});
    if (inst.seeds.size() >= static_cast<std::size_t>(params.n))
        throw std::invalid_argument("seed fraction leaves no unrevealed vertex");
    return {std::move(inst.A), std::move(inst.B), std::move(inst.pi_star), std::move(inst.seeds)};
}

}  // namespace detail

/// Runs every configured method on `trials` independent instances. Trial t
/// draws its instance from Rng(rng_seed).stream(t), so results do not depend
/// on scheduling. Runtime is wall-clock around the matcher call.
inline SweepResult run_trials(const TrialConfig& cfg) {
    cfg.validate();
    std::optional<AlignedPair> pair;
    if (const auto* real = std::get_if<RealPairSource>(&cfg.source)) pair = detail::load_real_pair(*real);

    const auto make = [&](int t) {
        const Rng rng = Rng(cfg.rng_seed).stream(static_cast<std::uint64_t>(t));
        if (pair) return detail::real_trial(*pair, cfg.seed_fraction, rng);
        return detail::synthetic_trial(std::get<CsbmParams>(cfg.source), cfg.seed_fraction, rng);
    };

    MatchOptions opts;
    opts.fw_iterations = cfg.fw_iterations;
    opts.lp_max_unrevealed = cfg.lp_max_unrevealed;

    if (cfg.warmup) {
        const auto inst = make(0);
        for (Method m : cfg.methods) run_matcher(m, inst.A, inst.B, inst.seeds, opts);
    }

    const std::size_t methods = cfg.methods.size();
    const auto trials = static_cast<std::size_t>(cfg.trials);
    std::vector<std::vector<double>> acc(methods, std::vector<double>(trials)), secs(acc);
    std::vector<double> giant(trials, 0.0);
    std::vector<int> u_sizes(trials, 0);
    std::mutex log_mutex;

    parallel_for(
        cfg.trials,
        [&](int t) {
            const auto inst = make(t);
            const int n = inst.A.n();
            const auto unrevealed = inst.seeds.unrevealed(n);
            u_sizes[static_cast<std::size_t>(t)] = static_cast<int>(unrevealed.size());
            if (cfg.giant_size)
                giant[static_cast<std::size_t>(t)] = largest_component_size(intersect(inst.A, inst.B, inst.truth));
            for (std::size_t k = 0; k < methods; ++k) {
                const MatchResult r = run_matcher(cfg.methods[k], inst.A, inst.B, inst.seeds, opts);
                acc[k][static_cast<std::size_t>(t)] = accuracy(r.pi_hat, inst.truth, unrevealed);
                secs[k][static_cast<std::size_t>(t)] = r.elapsed_seconds;
            }
            if (cfg.log) {
                std::lock_guard lock(log_mutex);
                *cfg.log << "trial " << t << " delta=" << cfg.seed_fraction << " |U|=" << unrevealed.size();
                for (std::size_t k = 0; k < methods; ++k)
                    *cfg.log << ' ' << to_string(cfg.methods[k]) << '=' << acc[k][static_cast<std::size_t>(t)];
                *cfg.log << '\n';
            }
        },
        cfg.workers > 0 ? cfg.workers : worker_count());

    SweepResult out;
    for (std::size_t k = 0; k < methods; ++k) {
        SweepRow row;
        row.method = cfg.methods[k];
        row.param = cfg.seed_fraction;
        row.mean_acc = detail::mean_of(acc[k]);
        row.sd_acc = detail::sd_of(acc[k]);
        row.mean_runtime_s = detail::mean_of(secs[k]);
        row.sd_runtime_s = detail::sd_of(secs[k]);
        row.trials = cfg.trials;
        row.u_size = *std::max_element(u_sizes.begin(), u_sizes.end());
        if (cfg.giant_size) row.giant_size = detail::mean_of(giant);
        row.accuracies = acc[k];
        row.exact_rate = static_cast<double>(std::count(acc[k].begin(), acc[k].end(), 1.0)) / static_cast<double>(trials);
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// run_trials at each seed fraction. Trial t sees the same random stream at
/// every delta.
inline SweepResult sweep_seed_fraction(TrialConfig cfg, const std::vector<double>& deltas) {
    if (!std::is_sorted(deltas.begin(), deltas.end())) throw std::invalid_argument("deltas must be sorted ascending");
    SweepResult out;
    for (double d : deltas) {
        cfg.seed_fraction = d;
        auto part = run_trials(cfg);
        for (auto& row : part.rows) out.rows.push_back(std::move(row));
    }
    return out;
}

inline constexpr const char* csv_header = "method,param,mean_acc,sd_acc,mean_runtime_s,sd_runtime_s,trials,u_size,giant_size";

/// Rows sorted by method name, then param; floats with six decimals. An
/// absent giant size is an empty field.
inline void write_csv(std::ostream& out, const SweepResult& result) {
    std::vector<const SweepRow*> rows;
    for (const auto& r : result.rows) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow* x, const SweepRow* y) {
        const auto mx = to_string(x->method), my = to_string(y->method);
        if (mx != my) return mx < my;
        return x->param < y->param;
    });
    out << csv_header << '\n';
    out << std::fixed << std::setprecision(6);
    for (const SweepRow* r : rows) {
        out << to_string(r->method) << ',' << r->param << ',' << r->mean_acc << ',' << r->sd_acc << ','
            << r->mean_runtime_s << ',' << r->sd_runtime_s << ',' << r->trials << ',' << r->u_size << ',';
        if (r->giant_size) out << *r->giant_size;
        out << '\n';
    }
    out.unsetf(std::ios::floatfield);
}

inline void write_csv(const std::string& path, const SweepResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, result);
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Parses the output of write_csv. Per-trial fields are not stored in the
/// file and come back empty.
inline SweepResult read_csv(std::istream& in, const std::string& source = "<csv>") {
    SweepResult out;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || line != csv_header) throw ParseError(source, 1, "missing or unexpected header");
    ++line_no;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 9) throw ParseError(source, line_no, "expected 9 fields");
        SweepRow r;
        const auto m = parse_method(f[0]);
        if (!m) throw ParseError(source, line_no, "unknown method " + f[0]);
        try {
            r.method = *m;
            r.param = std::stod(f[1]);
            r.mean_acc = std::stod(f[2]);
            r.sd_acc = std::stod(f[3]);
            r.mean_runtime_s = std::stod(f[4]);
            r.sd_runtime_s = std::stod(f[5]);
            r.trials = std::stoi(f[6]);
            r.u_size = std::stoi(f[7]);
            if (!f[8].empty()) r.giant_size = std::stod(f[8]);
        } catch (const std::exception&) {
            throw ParseError(source, line_no, "malformed number");
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

/// Config file form:
///   {"source": {"type": "synthetic", "n": 1000, "a": 5, "b": 1, "s": 0.8}
///           or {"type": "real_pair", "path_a": ..., "path_b": ..., "correspondence": ...},
///    "seed_fraction": 0.9, "deltas": [...], "methods": ["hungarian", ...],
///    "trials": 20, "rng_seed": 1, "fw_iterations": 30, "lp_max_unrevealed": 150}
inline TrialConfig trial_config_from_json(const nlohmann::json& j) {
    TrialConfig cfg;
    const auto& src = j.at("source");
    const std::string type = src.value("type", "synthetic");
    if (type == "synthetic") {
        CsbmParams p;
        from_json(src, p);
        cfg.source = p;
    } else if (type == "real_pair") {
        RealPairSource r;
        r.path_a = src.at("path_a").get<std::string>();
        r.path_b = src.at("path_b").get<std::string>();
        if (src.contains("correspondence") && !src["correspondence"].is_null())
            r.correspondence = src["correspondence"].get<std::string>();
        r.largest_component = src.value("largest_component", false);
        r.max_vertices = src.value("max_vertices", 0);
        cfg.source = r;
    } else {
        throw std::invalid_argument("unknown source type: " + type);
    }
    cfg.seed_fraction = j.value("seed_fraction", cfg.seed_fraction);
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& name : j["methods"]) {
            const auto m = parse_method(name.get<std::string>());
            if (!m) throw std::invalid_argument("unknown method: " + name.get<std::string>());
            cfg.methods.push_back(*m);
        }
    }
    cfg.trials = j.value("trials", cfg.trials);
    cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
    cfg.fw_iterations = j.value("fw_iterations", cfg.fw_iterations);
    cfg.lp_max_unrevealed = j.value("lp_max_unrevealed", cfg.lp_max_unrevealed);
    cfg.giant_size = j.value("giant_size", cfg.giant_size);
    cfg.warmup = j.value("warmup", cfg.warmup);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.validate();
    return cfg;
}

inline nlohmann::json to_json(const TrialConfig& cfg) {
    nlohmann::json j;
    if (const auto* p = std::get_if<CsbmParams>(&cfg.source)) {
        nlohmann::json src;
        to_json(src, *p);
        src["type"] = "synthetic";
        j["source"] = src;
    } else {
        const auto& r = std::get<RealPairSource>(cfg.source);
        j["source"] = {{"type", "real_pair"}, {"path_a", r.path_a}, {"path_b", r.path_b},
                       {"largest_component", r.largest_component}, {"max_vertices", r.max_vertices}};
        if (r.correspondence) j["source"]["correspondence"] = *r.correspondence;
    }
    j["seed_fraction"] = cfg.seed_fraction;
    std::vector<std::string> names;
    for (Method m : cfg.methods) names.emplace_back(to_string(m));
    j["methods"] = names;
    j["trials"] = cfg.trials;
    j["rng_seed"] = cfg.rng_seed;
    j["fw_iterations"] = cfg.fw_iterations;
    j["lp_max_unrevealed"] = cfg.lp_max_unrevealed;
    j["giant_size"] = cfg.giant_size;
    j["warmup"] = cfg.warmup;
    return j;
}

}  // namespace sgm
