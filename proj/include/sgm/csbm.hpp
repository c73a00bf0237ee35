#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgm/graph.hpp"
#include "sgm/rng.hpp"

namespace sgm {

/// Parameters of the seeded correlated two-community block model.
///
/// Intra-community pairs connect with probability a*ln(n)/n and
/// inter-community pairs with b*ln(n)/n, each clamped to 1. Both observed
/// graphs keep every parent edge independently with probability s.
struct CsbmParams {
    int n = 0;
    double a = 0.0;
    double b = 0.0;
    double s = 0.0;
    std::uint64_t rng_seed = 0;
    /// Shuffle which vertices belong to which community. When false, vertices
    /// 0..n/2-1 carry label +1 and the rest -1.
    bool shuffle_labels = false;

    double lambda() const { return (a + b) / 2.0; }

    void validate() const {
        if (n <= 0 || n % 2 != 0) throw std::invalid_argument("csbm: n must be a positive even integer");
        if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("csbm: a and b must be positive and finite");
        if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("csbm: s must lie in [0, 1]");
    }
};

/// Edge probability c*ln(n)/n, clamped to [0, 1]. Sets `clamped` when the
/// raw value exceeded 1.
inline double edge_probability(double c, int n, bool* clamped = nullptr) {
    const double raw = n > 1 ? c * std::log(static_cast<double>(n)) / n : 0.0;
    if (clamped) *clamped = raw > 1.0;
    return std::min(1.0, std::max(0.0, raw));
}

inline void to_json(nlohmann::json& j, const CsbmParams& p) {
    j = nlohmann::json{{"n", p.n}, {"a", p.a}, {"b", p.b}, {"s", p.s}, {"rng_seed", p.rng_seed},
                       {"shuffle_labels", p.shuffle_labels}};
}

inline void from_json(const nlohmann::json& j, CsbmParams& p) {
    j.at("n").get_to(p.n);
    j.at("a").get_to(p.a);
    j.at("b").get_to(p.b);
    j.at("s").get_to(p.s);
    p.rng_seed = j.value("rng_seed", std::uint64_t{0});
    p.shuffle_labels = j.value("shuffle_labels", false);
}

/// One draw of the model: the two observed graphs and the hidden truth.
struct Instance {
    Graph A;
    Graph B;
    /// Community label (+1 or -1) of every vertex of A.
    std::vector<int> sigma_star;
    /// Vertex u of A is vertex pi_star[u] of B.
    Permutation pi_star;
    /// Revealed vertices with their images pi_star restricted to them.
    SeedMap seeds;
    /// sigma_star restricted to seeds.vertices, in the same order. Carried for
    /// completeness; no matcher reads it.
    std::vector<int> sigma_R;
    /// Parent graph, kept only when requested.
    std::optional<Graph> parent;

    int n() const { return A.n(); }
    std::vector<int> unrevealed() const { return seeds.unrevealed(n()); }
};

/// Number of revealed vertices for seed fraction `delta`: floor(delta*n),
/// rounded down to an even count so both communities contribute equally.
inline int balanced_seed_count(int n, double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("seed fraction must lie in [0, 1)");
    int k = static_cast<int>(std::floor(delta * n + 1e-9));
    k -= k % 2;
    return std::min(k, n);
}

struct SampleOptions {
    bool keep_parent = false;
    /// Receives clamping warnings; null silences them.
    std::ostream* log = &std::clog;
};

/// RNG stream keys used by `sample_instance`. Each stage draws from its own
/// child stream of Rng(params.rng_seed):
///   labels  - Fisher-Yates shuffle of the community assignment (only when shuffle_labels)
///   pi      - Fisher-Yates permutation pi_star
///   parent  - one uniform per pair u < v in row-major order
///   keep_a  - one uniform per parent edge, row-major (X)
///   keep_b  - one uniform per parent edge, row-major (Y)
///   seeds   - community +1 seeds, then community -1 seeds, each a uniform subset
enum class SampleStream : std::uint64_t { labels = 1, pi = 2, parent = 3, keep_a = 4, keep_b = 5, seeds = 6 };

inline Rng stage_rng(std::uint64_t seed, SampleStream stage) {
    return Rng(seed).stream(static_cast<std::uint64_t>(stage));
}

/// Samples an instance with exactly `seed_count` revealed vertices, half
/// from each community.
inline Instance sample_instance_with_seeds(const CsbmParams& params, int seed_count, const SampleOptions& options = {}) {
    params.validate();
    const int n = params.n;
    if (seed_count < 0 || seed_count > n || seed_count % 2 != 0)
        throw std::invalid_argument("csbm: seed count must be even and lie in [0, n]");

    bool clamped_in = false, clamped_out = false;
    const double p_in = edge_probability(params.a, n, &clamped_in);
    const double p_out = edge_probability(params.b, n, &clamped_out);
    if ((clamped_in || clamped_out) && options.log)
        *options.log << "warning: csbm edge probability exceeds 1 at n=" << n << "; clamped to 1\n";

    Instance inst;
    inst.sigma_star.assign(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n / 2; ++i) inst.sigma_star[static_cast<std::size_t>(i)] = 1;
    if (params.shuffle_labels) {
        Rng rng = stage_rng(params.rng_seed, SampleStream::labels);
        rng.shuffle(inst.sigma_star);
    }

    {
        Rng rng = stage_rng(params.rng_seed, SampleStream::pi);
        inst.pi_star = rng.permutation(n);
    }

    std::vector<std::pair<int, int>> parent_edges;
    {
        Rng rng = stage_rng(params.rng_seed, SampleStream::parent);
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v) {
                const double p = inst.sigma_star[static_cast<std::size_t>(u)] == inst.sigma_star[static_cast<std::size_t>(v)] ? p_in : p_out;
                if (rng.uniform() < p) parent_edges.emplace_back(u, v);
            }
        }
    }

    std::vector<std::pair<int, int>> a_edges, b_prime_edges;
    {
        Rng keep_a = stage_rng(params.rng_seed, SampleStream::keep_a);
        Rng keep_b = stage_rng(params.rng_seed, SampleStream::keep_b);
        for (const auto& e : parent_edges)
            if (keep_a.uniform() < params.s) a_edges.push_back(e);
        for (const auto& e : parent_edges)
            if (keep_b.uniform() < params.s) b_prime_edges.push_back(e);
    }

    inst.A = Graph(n, a_edges);
    inst.B = Graph(n, b_prime_edges).relabeled(inst.pi_star);
    if (options.keep_parent) inst.parent = Graph(n, parent_edges);

    {
        Rng rng = stage_rng(params.rng_seed, SampleStream::seeds);
        std::vector<int> plus, minus;
        for (int v = 0; v < n; ++v) (inst.sigma_star[static_cast<std::size_t>(v)] > 0 ? plus : minus).push_back(v);
        std::vector<int> revealed;
        for (const auto* community : {&plus, &minus}) {
            for (int idx : rng.sample_without_replacement(static_cast<int>(community->size()), seed_count / 2))
                revealed.push_back((*community)[static_cast<std::size_t>(idx)]);
        }
        std::sort(revealed.begin(), revealed.end());
        inst.seeds.vertices = revealed;
        for (int r : revealed) {
            inst.seeds.images.push_back(inst.pi_star[static_cast<std::size_t>(r)]);
            inst.sigma_R.push_back(inst.sigma_star[static_cast<std::size_t>(r)]);
        }
    }
    return inst;
}

inline Instance sample_instance(const CsbmParams& params, double seed_fraction, const SampleOptions& options = {}) {
    params.validate();
    return sample_instance_with_seeds(params, balanced_seed_count(params.n, seed_fraction), options);
}

/// alpha such that u_size = n^(1 - alpha).
inline double alpha_from_unrevealed(int n, int u_size) {
    if (n < 2) throw std::invalid_argument("alpha_from_unrevealed: n must be at least 2");
    if (u_size < 1 || u_size > n) throw std::invalid_argument("alpha_from_unrevealed: need 1 <= u_size <= n");
    return 1.0 - std::log(static_cast<double>(u_size)) / std::log(static_cast<double>(n));
}

enum class Regime { achievable, impossible, critical };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::achievable: return "achievable";
        case Regime::impossible: return "impossible";
        case Regime::critical: return "critical";
    }
    return "?";
}

/// Compares lambda*s^2 against 1 - alpha with lambda = (a+b)/2.
inline Regime threshold_predicate(double a, double b, double s, double alpha, double tolerance = 1e-12) {
    const double signal = (a + b) / 2.0 * s * s;
    const double bar = 1.0 - alpha;
    if (std::abs(signal - bar) <= tolerance) return Regime::critical;
    return signal > bar ? Regime::achievable : Regime::impossible;
}

/// Writes A.edges, B.edges, seeds.csv and truth.csv into `dir`.
/// Vertex labels are the integer indices. CSV rows are `u,pi_u,sigma_u`.
inline void write_instance(const std::filesystem::path& dir, const Instance& inst) {
    std::filesystem::create_directories(dir);
    const auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("A.edges");
        out << "# n=" << inst.n() << '\n';
        write_edgelist(out, inst.A);
    }
    {
        auto out = open("B.edges");
        out << "# n=" << inst.n() << '\n';
        write_edgelist(out, inst.B);
    }
    {
        auto out = open("seeds.csv");
        out << "u,pi_u,sigma_u\n";
        for (std::size_t i = 0; i < inst.seeds.size(); ++i)
            out << inst.seeds.vertices[i] << ',' << inst.seeds.images[i] << ',' << inst.sigma_R[i] << '\n';
    }
    {
        auto out = open("truth.csv");
        out << "u,pi_u,sigma_u\n";
        for (int u = 0; u < inst.n(); ++u)
            out << u << ',' << inst.pi_star[static_cast<std::size_t>(u)] << ',' << inst.sigma_star[static_cast<std::size_t>(u)] << '\n';
    }
}

}  // namespace sgm
