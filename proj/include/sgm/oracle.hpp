#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "sgm/assign.hpp"
#include "sgm/csbm.hpp"
#include "sgm/graph.hpp"
#include "sgm/parallel.hpp"
#include "sgm/rng.hpp"
#include "sgm/scores.hpp"

namespace sgm {

struct IsolationReport {
    std::vector<int> isolated;
    std::vector<int> hard_isolated;
    double expected_isolated = 0.0;
};

/// Unrevealed vertices with no edge in the intersection graph under the
/// true alignment.
inline std::vector<int> isolated_set(const Instance& inst) {
    std::vector<int> out;
    for (int u : inst.unrevealed()) {
        const int bu = inst.pi_star[static_cast<std::size_t>(u)];
        const auto& nb = inst.A.neighbors(u);
        const bool lonely = std::none_of(nb.begin(), nb.end(), [&](int v) {
            return inst.B.has_edge(bu, inst.pi_star[static_cast<std::size_t>(v)]);
        });
        if (lonely) out.push_back(u);
    }
    return out;
}

/// Isolated vertices u that additionally have no A-edge into the unrevealed
/// set, whose image has no B-edge into the unmatched B vertices, and whose
/// every seed neighbour r has an image with no B-neighbour among the
/// unmatched B vertices.
inline std::vector<int> hard_isolated_set(const Instance& inst) {
    const int n = inst.n();
    SeedMap seeds = inst.seeds;
    seeds.normalize(n);
    std::vector<char> a_unrevealed(static_cast<std::size_t>(n), 1), b_unmatched(static_cast<std::size_t>(n), 1);
    std::vector<int> image(static_cast<std::size_t>(n), -1);
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        a_unrevealed[static_cast<std::size_t>(seeds.vertices[k])] = 0;
        b_unmatched[static_cast<std::size_t>(seeds.images[k])] = 0;
        image[static_cast<std::size_t>(seeds.vertices[k])] = seeds.images[k];
    }
    const auto touches = [](std::span<const int> nb, const std::vector<char>& set) {
        return std::any_of(nb.begin(), nb.end(), [&](int w) { return set[static_cast<std::size_t>(w)] != 0; });
    };

    std::vector<int> out;
    for (int u : isolated_set(inst)) {
        const int bu = inst.pi_star[static_cast<std::size_t>(u)];
        if (touches(inst.A.neighbors(u), a_unrevealed)) continue;
        if (touches(inst.B.neighbors(bu), b_unmatched)) continue;
        bool ok = true;
        for (int r : inst.A.neighbors(u)) {
            // Every A-neighbour is a seed here.
            if (touches(inst.B.neighbors(image[static_cast<std::size_t>(r)]), b_unmatched)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(u);
    }
    return out;
}

/// |U| (1 - s^2 p_in)^(n/2) (1 - s^2 p_out)^(n/2), with p clamped as in the
/// sampler.
inline double expected_isolated_count(const CsbmParams& params, int u_size) {
    params.validate();
    const double p_in = edge_probability(params.a, params.n);
    const double p_out = edge_probability(params.b, params.n);
    const double s2 = params.s * params.s;
    const double half = params.n / 2.0;
    return u_size * std::pow(1.0 - s2 * p_in, half) * std::pow(1.0 - s2 * p_out, half);
}

inline IsolationReport isolation_report(const Instance& inst, const CsbmParams& params) {
    IsolationReport r;
    r.isolated = isolated_set(inst);
    r.hard_isolated = hard_isolated_set(inst);
    r.expected_isolated = expected_isolated_count(params, static_cast<int>(inst.unrevealed().size()));
    return r;
}

/// True when two members of `vertices` share a community label.
inline bool has_same_community_pair(const std::vector<int>& vertices, const std::vector<int>& sigma) {
    int plus = 0, minus = 0;
    for (int v : vertices) (sigma[static_cast<std::size_t>(v)] > 0 ? plus : minus) += 1;
    return plus >= 2 || minus >= 2;
}

/// Exhaustive maximum-trace assignment. Ties resolve to the lexicographically
/// smallest mapping, as in hungarian_max.
template <typename Derived>
Assignment brute_force_best_trace(const Eigen::MatrixBase<Derived>& values) {
    if (values.rows() != values.cols()) throw std::invalid_argument("brute force: matrix must be square");
    const int m = static_cast<int>(values.rows());
    if (m > 9) throw std::invalid_argument("brute force: at most 9 rows");
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    Assignment best;
    best.mapping = perm;
    best.total = detail::total_of(values, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double t = detail::total_of(values, perm);
        if (t > best.total) {
            best.total = t;
            best.mapping = perm;
        }
    }
    return best;
}

inline Assignment brute_force_best_trace(const ScoreMatrix& scores) { return brute_force_best_trace(scores.values); }

/// Mean of a 0/1 or real sample and its standard error.
struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

inline Estimate estimate(const std::vector<double>& xs) {
    Estimate e;
    if (xs.empty()) return e;
    const double n = static_cast<double>(xs.size());
    e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - e.mean) * (x - e.mean);
        e.standard_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

inline void to_json(nlohmann::json& j, const Estimate& e) {
    j = nlohmann::json{{"mean", e.mean}, {"standard_error", e.standard_error}};
}

namespace detail {

inline void check_monte_carlo(const CsbmParams& params, int u_size, int trials) {
    params.validate();
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (u_size < 1 || u_size > params.n || (params.n - u_size) % 2 != 0)
        throw std::invalid_argument("u_size must lie in [1, n] with n - u_size even");
}

inline Instance trial_instance(CsbmParams params, int u_size, std::uint64_t seed, int trial) {
    params.rng_seed = Rng(seed).stream(static_cast<std::uint64_t>(trial))();
    return sample_instance_with_seeds(params, params.n - u_size, SampleOptions{false, nullptr});
}

}  // namespace detail

struct IsolatedCountStudy {
    int trials = 0;
    Estimate isolated;
    Estimate hard_isolated;
    double expected_isolated = 0.0;
    /// Fraction of trials whose hard isolated set holds two vertices of one community.
    Estimate same_community_pair;
};

inline void to_json(nlohmann::json& j, const IsolatedCountStudy& s) {
    j = nlohmann::json{{"trials", s.trials},
                       {"isolated", s.isolated},
                       {"hard_isolated", s.hard_isolated},
                       {"expected_isolated", s.expected_isolated},
                       {"same_community_pair_in_hard_isolated", s.same_community_pair}};
}

/// Monte-Carlo over independent instances with |U| = u_size. Trial t uses
/// the instance seed Rng(seed).stream(t)().
inline IsolatedCountStudy isolated_count_study(const CsbmParams& params, int u_size, int trials, std::uint64_t seed) {
    detail::check_monte_carlo(params, u_size, trials);
    std::vector<double> iso(static_cast<std::size_t>(trials)), hard(iso.size()), pair(iso.size());
    parallel_for(trials, [&](int t) {
        const Instance inst = detail::trial_instance(params, u_size, seed, t);
        const auto i_set = isolated_set(inst);
        const auto j_set = hard_isolated_set(inst);
        iso[static_cast<std::size_t>(t)] = static_cast<double>(i_set.size());
        hard[static_cast<std::size_t>(t)] = static_cast<double>(j_set.size());
        pair[static_cast<std::size_t>(t)] = has_same_community_pair(j_set, inst.sigma_star) ? 1.0 : 0.0;
    });
    IsolatedCountStudy out;
    out.trials = trials;
    out.isolated = estimate(iso);
    out.hard_isolated = estimate(hard);
    out.same_community_pair = estimate(pair);
    out.expected_isolated = expected_isolated_count(params, u_size);
    return out;
}

struct ScoreTailPoint {
    double epsilon = 0.0;
    double threshold = 0.0;
    /// P(Score(u, v) >= threshold) for a fixed false pair.
    Estimate false_pair_high;
    /// P(Score(u, pi*(u)) <= threshold).
    Estimate true_pair_low;
};

struct ScoreTailReport {
    int trials = 0;
    std::vector<ScoreTailPoint> points;
};

inline void to_json(nlohmann::json& j, const ScoreTailPoint& p) {
    j = nlohmann::json{{"epsilon", p.epsilon},
                       {"threshold", p.threshold},
                       {"false_pair_high", p.false_pair_high},
                       {"true_pair_low", p.true_pair_low}};
}

inline void to_json(nlohmann::json& j, const ScoreTailReport& r) {
    j = nlohmann::json{{"trials", r.trials}, {"points", r.points}};
}

/// Empirical tails of the seed-overlap score with thresholds epsilon*ln(n).
/// Each trial uses the first two unrevealed vertices u1 < u2: the true pair
/// is (u1, pi*(u1)) and the false pair (u1, pi*(u2)).
inline ScoreTailReport score_tail_estimate(const CsbmParams& params, int u_size, int trials,
                                           const std::vector<double>& epsilons, std::uint64_t seed) {
    detail::check_monte_carlo(params, u_size, trials);
    if (u_size < 2) throw std::invalid_argument("score tails need at least two unrevealed vertices");
    std::vector<std::int64_t> true_score(static_cast<std::size_t>(trials)), false_score(true_score.size());
    parallel_for(trials, [&](int t) {
        const Instance inst = detail::trial_instance(params, u_size, seed, t);
        const auto u = inst.unrevealed();
        const auto score = [&](int a_vertex, int b_vertex) {
            std::int64_t count = 0;
            for (std::size_t k = 0; k < inst.seeds.size(); ++k)
                if (inst.A.has_edge(a_vertex, inst.seeds.vertices[k]) && inst.B.has_edge(b_vertex, inst.seeds.images[k]))
                    ++count;
            return count;
        };
        true_score[static_cast<std::size_t>(t)] = score(u[0], inst.pi_star[static_cast<std::size_t>(u[0])]);
        false_score[static_cast<std::size_t>(t)] = score(u[0], inst.pi_star[static_cast<std::size_t>(u[1])]);
    });
    ScoreTailReport out;
    out.trials = trials;
    const double log_n = std::log(static_cast<double>(params.n));
    for (double eps : epsilons) {
        ScoreTailPoint p;
        p.epsilon = eps;
        p.threshold = eps * log_n;
        std::vector<double> hi, lo;
        for (std::size_t t = 0; t < true_score.size(); ++t) {
            hi.push_back(static_cast<double>(false_score[t]) >= p.threshold ? 1.0 : 0.0);
            lo.push_back(static_cast<double>(true_score[t]) <= p.threshold ? 1.0 : 0.0);
        }
        p.false_pair_high = estimate(hi);
        p.true_pair_low = estimate(lo);
        out.points.push_back(p);
    }
    return out;
}

}  // namespace sgm
