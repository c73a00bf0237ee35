#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sgm/assign.hpp"
#include "sgm/graph.hpp"
#include "sgm/relax.hpp"
#include "sgm/scores.hpp"

namespace sgm {

enum class Method { overlap_hungarian, overlap_greedy, lp_exact, fw_linear, hop2 };

inline constexpr Method all_methods[] = {Method::overlap_hungarian, Method::overlap_greedy, Method::lp_exact,
                                         Method::fw_linear, Method::hop2};

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::overlap_hungarian: return "overlap_hungarian";
        case Method::overlap_greedy: return "overlap_greedy";
        case Method::lp_exact: return "lp_exact";
        case Method::fw_linear: return "fw_linear";
        case Method::hop2: return "hop2";
    }
    return "?";
}

/// Accepts the canonical names and the short forms hungarian, greedy, lp, fw.
inline std::optional<Method> parse_method(std::string_view name) {
    if (name == "overlap_hungarian" || name == "hungarian") return Method::overlap_hungarian;
    if (name == "overlap_greedy" || name == "greedy") return Method::overlap_greedy;
    if (name == "lp_exact" || name == "lp") return Method::lp_exact;
    if (name == "fw_linear" || name == "fw") return Method::fw_linear;
    if (name == "hop2") return Method::hop2;
    return std::nullopt;
}

struct MatchDiagnostics {
    /// Total score of the chosen assignment (overlap and Hop2 methods).
    std::optional<double> score_total;
    /// Reduced LP objective (constant dropped).
    std::optional<double> lp_objective;
    std::optional<std::string> lp_status;
    std::optional<int> lp_iterations;
    std::optional<double> lp_vertex_distance;
    /// fw_objective at D(0), ..., D(T).
    std::vector<double> fw_objective_trace;
};

struct MatchResult {
    Permutation pi_hat;
    Method method = Method::overlap_hungarian;
    double elapsed_seconds = 0.0;
    MatchDiagnostics diagnostics;
};

struct MatchOptions {
    int fw_iterations = 30;
    /// Largest unrevealed block the LP matcher accepts.
    int lp_max_unrevealed = 150;
    lp::Options lp;
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline Permutation combine(const SeedMap& seeds, const ScoreMatrix& scores, std::span<const int> mapping) {
    const std::size_t n = seeds.size() + scores.u_vertices.size();
    Permutation pi(n, -1);
    for (std::size_t k = 0; k < seeds.size(); ++k) pi[static_cast<std::size_t>(seeds.vertices[k])] = seeds.images[k];
    for (std::size_t i = 0; i < mapping.size(); ++i)
        pi[static_cast<std::size_t>(scores.u_vertices[i])] = scores.v_vertices[static_cast<std::size_t>(mapping[i])];
    return pi;
}

}  // namespace detail

/// Seed-neighbourhood overlap scores, then maximum-weight assignment.
inline MatchResult match_overlap_hungarian(const Graph& A, const Graph& B, const SeedMap& seeds) {
    detail::Stopwatch clock;
    const ScoreMatrix scores = build_scores(A, B, seeds);
    const Assignment best = hungarian_max(scores.values);
    MatchResult out;
    out.method = Method::overlap_hungarian;
    out.pi_hat = detail::combine(seeds, scores, best.mapping);
    out.diagnostics.score_total = best.total;
    out.elapsed_seconds = clock.seconds();
    return out;
}

/// Seed-neighbourhood overlap scores, then greedy assignment.
inline MatchResult match_overlap_greedy(const Graph& A, const Graph& B, const SeedMap& seeds) {
    detail::Stopwatch clock;
    const ScoreMatrix scores = build_scores(A, B, seeds);
    const Assignment chosen = greedy_match(scores.values);
    MatchResult out;
    out.method = Method::overlap_greedy;
    out.pi_hat = detail::combine(seeds, scores, chosen.mapping);
    out.diagnostics.score_total = chosen.total;
    out.elapsed_seconds = clock.seconds();
    return out;
}

/// Two-hop signature overlap, then maximum-weight assignment.
inline MatchResult match_hop2(const Graph& A, const Graph& B, const SeedMap& seeds) {
    detail::Stopwatch clock;
    const ScoreMatrix scores = build_hop2_scores(A, B, seeds);
    const Assignment best = hungarian_max(scores.values);
    MatchResult out;
    out.method = Method::hop2;
    out.pi_hat = detail::combine(seeds, scores, best.mapping);
    out.diagnostics.score_total = best.total;
    out.elapsed_seconds = clock.seconds();
    return out;
}

/// Bistochastic l1 LP on the unrevealed block, projected to a permutation.
/// Throws std::invalid_argument when the block exceeds `lp_max_unrevealed`.
inline MatchResult match_lp(const Graph& A, const Graph& B, const SeedMap& seeds, const MatchOptions& options = {}) {
    detail::Stopwatch clock;
    const SeededBlocks blocks(A, B, seeds);
    const int m = blocks.unrevealed_count();
    MatchResult out;
    out.method = Method::lp_exact;
    if (m > options.lp_max_unrevealed)
        throw std::invalid_argument("lp: unrevealed block of size " + std::to_string(m) + " exceeds the LP cap of " +
                                    std::to_string(options.lp_max_unrevealed));
    if (m == 0) {
        out.pi_hat = blocks.combine({});
    } else {
        const LpSolution sol = solve_reduced_lp(blocks, options.lp);
        out.pi_hat = blocks.combine(project_to_permutation(sol.D));
        out.diagnostics.lp_objective = sol.objective;
        out.diagnostics.lp_status = lp::to_string(sol.status);
        out.diagnostics.lp_iterations = sol.iterations;
        out.diagnostics.lp_vertex_distance = sol.vertex_distance;
    }
    out.elapsed_seconds = clock.seconds();
    return out;
}

/// Frank-Wolfe on the l1 objective from the uniform matrix, `iterations`
/// steps, then projection.
inline MatchResult match_fw(const Graph& A, const Graph& B, const SeedMap& seeds, int iterations = 30) {
    if (iterations < 0) throw std::invalid_argument("fw: iteration count must be nonnegative");
    detail::Stopwatch clock;
    const SeededBlocks blocks(A, B, seeds);
    MatchResult out;
    out.method = Method::fw_linear;
    if (blocks.unrevealed_count() == 0) {
        out.pi_hat = blocks.combine({});
    } else {
        FwState state = fw_init(blocks);
        for (int t = 0; t < iterations; ++t) state = fw_step(std::move(state), blocks);
        // D is indexed (B vertex, A vertex); the projection maps A to B.
        out.pi_hat = blocks.combine(project_to_permutation(Eigen::MatrixXd(state.D.transpose())));
        out.diagnostics.fw_objective_trace = std::move(state.objective_trace);
    }
    out.elapsed_seconds = clock.seconds();
    return out;
}

inline MatchResult run_matcher(Method method, const Graph& A, const Graph& B, const SeedMap& seeds,
                               const MatchOptions& options = {}) {
    switch (method) {
        case Method::overlap_hungarian: return match_overlap_hungarian(A, B, seeds);
        case Method::overlap_greedy: return match_overlap_greedy(A, B, seeds);
        case Method::lp_exact: return match_lp(A, B, seeds, options);
        case Method::fw_linear: return match_fw(A, B, seeds, options.fw_iterations);
        case Method::hop2: return match_hop2(A, B, seeds);
    }
    throw std::invalid_argument("unknown method");
}

/// {method, accuracy?, elapsed_seconds, permutation, diagnostics}
inline nlohmann::json to_json(const MatchResult& r, std::optional<double> accuracy = std::nullopt) {
    nlohmann::json j;
    j["method"] = std::string(to_string(r.method));
    if (accuracy) j["accuracy"] = *accuracy;
    j["elapsed_seconds"] = r.elapsed_seconds;
    j["permutation"] = r.pi_hat;
    nlohmann::json d = nlohmann::json::object();
    if (r.diagnostics.score_total) d["score_total"] = *r.diagnostics.score_total;
    if (r.diagnostics.lp_objective) d["reduced_objective"] = *r.diagnostics.lp_objective;
    if (r.diagnostics.lp_status) d["lp_status"] = *r.diagnostics.lp_status;
    if (r.diagnostics.lp_iterations) d["lp_iterations"] = *r.diagnostics.lp_iterations;
    if (r.diagnostics.lp_vertex_distance) d["lp_vertex_distance"] = *r.diagnostics.lp_vertex_distance;
    if (!r.diagnostics.fw_objective_trace.empty()) d["fw_objective_trace"] = r.diagnostics.fw_objective_trace;
    j["diagnostics"] = std::move(d);
    return j;
}

}  // namespace sgm
