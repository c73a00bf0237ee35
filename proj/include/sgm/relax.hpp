#pragma once

#include <cmath>
#include <ostream>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sgm/assign.hpp"
#include "sgm/graph.hpp"
#include "sgm/lp_solver.hpp"
#include "sgm/scores.hpp"

namespace sgm {

/// Square matrix with nonnegative entries and unit row and column sums.
struct DoublyStochastic {
    Eigen::MatrixXd values;

    int size() const { return static_cast<int>(values.rows()); }

    static DoublyStochastic uniform(int m) {
        return {Eigen::MatrixXd::Constant(m, m, m > 0 ? 1.0 / m : 0.0)};
    }

    /// Permutation matrix with a one at (i, mapping[i]).
    static DoublyStochastic from_permutation(std::span<const int> mapping) {
        const auto m = static_cast<Eigen::Index>(mapping.size());
        DoublyStochastic out{Eigen::MatrixXd::Zero(m, m)};
        for (Eigen::Index i = 0; i < m; ++i) out.values(i, mapping[static_cast<std::size_t>(i)]) = 1.0;
        return out;
    }

    bool feasible(double tolerance = 1e-9) const {
        if (values.rows() != values.cols()) return false;
        if (values.size() == 0) return true;
        if (values.minCoeff() < -1e-12) return false;
        return (values.rowwise().sum().array() - 1.0).abs().maxCoeff() <= tolerance &&
               (values.colwise().sum().array() - 1.0).abs().maxCoeff() <= tolerance;
    }
};

namespace detail {

inline lp::SparseMatrix sparse_block(const Graph& g, std::span<const int> rows, std::span<const int> cols) {
    std::vector<int> col_pos(static_cast<std::size_t>(g.n()), -1);
    for (std::size_t j = 0; j < cols.size(); ++j) col_pos[static_cast<std::size_t>(cols[j])] = static_cast<int>(j);
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int w : g.neighbors(rows[i]))
            if (int j = col_pos[static_cast<std::size_t>(w)]; j >= 0) triplets.emplace_back(static_cast<int>(i), j, 1.0);
    lp::SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

}  // namespace detail

/// A seeded pair split along the revealed/unrevealed partition.
///
/// Rows on the A side are ordered seeds first (ascending), then unrevealed
/// vertices (ascending). The seed-aligned B~ lists the seed images in the
/// same order as their seeds, then the B vertices that are not seed images
/// (ascending). With this ordering the seed block of every feasible
/// alignment is the identity and only the unrevealed block is free.
class SeededBlocks {
public:
    SeededBlocks(const Graph& A, const Graph& B, const SeedMap& seed_map)
        : seeds_(detail::checked_seeds(A, B, seed_map)),
          scores_(build_scores(A, B, seeds_)) {
        const auto& u = scores_.u_vertices;
        const auto& v = scores_.v_vertices;
        a_ru_ = detail::sparse_block(A, seeds_.vertices, u);
        a_uu_ = detail::sparse_block(A, u, u);
        bt_ru_ = detail::sparse_block(B, seeds_.images, v);
        bt_uu_ = detail::sparse_block(B, v, v);
        score_ = scores_.values.cast<double>();
    }

    int unrevealed_count() const { return scores_.size(); }
    int seed_count() const { return static_cast<int>(seeds_.size()); }
    const SeedMap& seeds() const { return seeds_; }
    const ScoreMatrix& scores() const { return scores_; }
    const Eigen::MatrixXd& score_values() const { return score_; }
    const std::vector<int>& u_vertices() const { return scores_.u_vertices; }
    const std::vector<int>& v_vertices() const { return scores_.v_vertices; }

    /// A restricted to (seeds, unrevealed).
    const lp::SparseMatrix& a_ru() const { return a_ru_; }
    const lp::SparseMatrix& a_uu() const { return a_uu_; }
    /// B~ restricted to (seed images, unmatched B vertices).
    const lp::SparseMatrix& bt_ru() const { return bt_ru_; }
    const lp::SparseMatrix& bt_uu() const { return bt_uu_; }

    /// Full permutation: seeds to their images, unrevealed row i to
    /// v_vertices[mapping[i]].
    Permutation combine(std::span<const int> mapping) const {
        const int n = static_cast<int>(seeds_.size() + scores_.u_vertices.size());
        Permutation pi(static_cast<std::size_t>(n), -1);
        for (std::size_t k = 0; k < seeds_.size(); ++k) pi[static_cast<std::size_t>(seeds_.vertices[k])] = seeds_.images[k];
        for (std::size_t i = 0; i < mapping.size(); ++i)
            pi[static_cast<std::size_t>(scores_.u_vertices[i])] = scores_.v_vertices[static_cast<std::size_t>(mapping[i])];
        return pi;
    }

private:
    SeedMap seeds_;
    ScoreMatrix scores_;
    Eigen::MatrixXd score_;
    lp::SparseMatrix a_ru_, a_uu_, bt_ru_, bt_uu_;
};

// ---------------------------------------------------------------------------
// Reduced LP over the unrevealed block.
//
// With the seed rows and columns of D fixed, ||A D - D B||_1 equals
//     C - 4 <Score, D_UU> + sum_{u,v in U} |(A_UU D_UU - D_UU B~_UU)_{uv}|
// for a constant C. Each of the two seed/unrevealed cross blocks is linear in
// D_UU on the polytope and contributes -2 <Score, D_UU>. The LP below
// minimises the D-dependent part.

/// Unrevealed-block objective without the constant: Phi(D) - 4 <Score, D>,
/// where D is indexed (unrevealed A vertex, unmatched B vertex).
inline double reduced_objective(const SeededBlocks& blocks, const Eigen::MatrixXd& D) {
    const int m = blocks.unrevealed_count();
    if (D.rows() != m || D.cols() != m) throw std::invalid_argument("reduced_objective: block size mismatch");
    if (m == 0) return 0.0;
    const Eigen::MatrixXd residual = blocks.a_uu() * D - D * blocks.bt_uu();
    return residual.cwiseAbs().sum() - 4.0 * blocks.score_values().cwiseProduct(D).sum();
}

struct ReducedLp {
    lp::Problem problem;
    /// (u, v) positions of the residual rows, in constraint order.
    std::vector<std::pair<int, int>> residual_pairs;
    int block_size = 0;
};

/// Standard-form LP over x = (vec(D), p, q):
///   min  -4 <Score, D> + sum (p + q)
///   s.t. D 1 = 1, 1'D = 1 (last column sum dropped as redundant),
///        (A_UU D - D B~_UU)_{uv} - p_uv + q_uv = 0,   x >= 0.
/// Residual entries that vanish identically (u has no unrevealed neighbour in
/// A and v none in B~) are omitted.
inline ReducedLp build_reduced_lp(const SeededBlocks& blocks) {
    const int m = blocks.unrevealed_count();
    if (m < 1) throw std::invalid_argument("reduced LP needs at least one unrevealed vertex");
    ReducedLp out;
    out.block_size = m;

    std::vector<std::vector<int>> a_adj(static_cast<std::size_t>(m)), b_adj(static_cast<std::size_t>(m));
    for (int k = 0; k < blocks.a_uu().outerSize(); ++k)
        for (lp::SparseMatrix::InnerIterator it(blocks.a_uu(), k); it; ++it) a_adj[static_cast<std::size_t>(it.row())].push_back(static_cast<int>(it.col()));
    for (int k = 0; k < blocks.bt_uu().outerSize(); ++k)
        for (lp::SparseMatrix::InnerIterator it(blocks.bt_uu(), k); it; ++it) b_adj[static_cast<std::size_t>(it.row())].push_back(static_cast<int>(it.col()));

    for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v)
            if (!a_adj[static_cast<std::size_t>(u)].empty() || !b_adj[static_cast<std::size_t>(v)].empty()) out.residual_pairs.emplace_back(u, v);

    const auto k = static_cast<int>(out.residual_pairs.size());
    const int d_vars = m * m;
    const int cols = d_vars + 2 * k;
    const int rows = 2 * m - 1 + k;
    const auto var = [m](int u, int v) { return u * m + v; };

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(2 * d_vars) + static_cast<std::size_t>(k) * 8);
    for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v) {
            triplets.emplace_back(u, var(u, v), 1.0);
            if (v < m - 1) triplets.emplace_back(m + v, var(u, v), 1.0);
        }
    for (int idx = 0; idx < k; ++idx) {
        const auto [u, v] = out.residual_pairs[static_cast<std::size_t>(idx)];
        const int row = 2 * m - 1 + idx;
        for (int w : a_adj[static_cast<std::size_t>(u)]) triplets.emplace_back(row, var(w, v), 1.0);
        for (int w : b_adj[static_cast<std::size_t>(v)]) triplets.emplace_back(row, var(u, w), -1.0);
        triplets.emplace_back(row, d_vars + 2 * idx, -1.0);
        triplets.emplace_back(row, d_vars + 2 * idx + 1, 1.0);
    }
    out.problem.A.resize(rows, cols);
    out.problem.A.setFromTriplets(triplets.begin(), triplets.end());

    out.problem.b = lp::Vector::Zero(rows);
    out.problem.b.head(2 * m - 1).setOnes();
    out.problem.c = lp::Vector::Ones(cols);
    for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v) out.problem.c[var(u, v)] = -4.0 * blocks.score_values()(u, v);
    return out;
}

/// Writes an LP in CPLEX LP text format (all variables nonnegative).
inline void write_lp_format(std::ostream& out, const ReducedLp& lp) {
    const int m = lp.block_size;
    const int d_vars = m * m;
    const auto name = [&](Eigen::Index j) {
        if (j < d_vars) return "d_" + std::to_string(j / m) + "_" + std::to_string(j % m);
        const auto idx = (j - d_vars) / 2;
        const auto [u, v] = lp.residual_pairs[static_cast<std::size_t>(idx)];
        return std::string((j - d_vars) % 2 == 0 ? "p_" : "q_") + std::to_string(u) + "_" + std::to_string(v);
    };
    const auto term = [&](double coef, Eigen::Index j, bool first) {
        std::string s;
        if (coef < 0)
            s = " - ";
        else if (!first)
            s = " + ";
        else
            s = " ";
        const double mag = std::abs(coef);
        if (mag != 1.0) {
            std::ostringstream num;
            num.precision(17);
            num << mag;
            s += num.str() + " ";
        }
        return s + name(j);
    };

    out << "\\ seeded matching: reduced bistochastic L1 LP over the unrevealed block\n";
    out << "Minimize\n obj:";
    int on_line = 0;
    bool first = true;
    for (Eigen::Index j = 0; j < lp.problem.c.size(); ++j) {
        if (lp.problem.c[j] == 0.0) continue;
        out << term(lp.problem.c[j], j, first);
        first = false;
        if (++on_line % 8 == 0) out << "\n";
    }
    if (first) out << " 0 d_0_0";
    out << "\nSubject To\n";
    const lp::SparseMatrix rows = lp.problem.A.transpose();
    for (Eigen::Index i = 0; i < rows.outerSize(); ++i) {
        if (i < m)
            out << " row_" << i << ":";
        else if (i < 2 * m - 1)
            out << " col_" << (i - m) << ":";
        else {
            const auto [u, v] = lp.residual_pairs[static_cast<std::size_t>(i - (2 * m - 1))];
            out << " res_" << u << "_" << v << ":";
        }
        first = true;
        on_line = 0;
        for (lp::SparseMatrix::InnerIterator it(rows, i); it; ++it) {
            out << term(it.value(), it.index(), first);
            first = false;
            if (++on_line % 8 == 0) out << "\n";
        }
        out << " = " << lp.problem.b[i] << "\n";
    }
    out << "End\n";
}

struct LpSolution {
    DoublyStochastic D;
    /// Reduced objective at D (constant of the full objective dropped).
    double objective = 0.0;
    lp::Status status = lp::Status::iteration_limit;
    int iterations = 0;
    /// Max-entry distance between the interior-point solution and the
    /// permutation it projects to. Near zero when the optimum is a unique
    /// vertex; the interior-point iterates approach the centre of the optimal
    /// face otherwise.
    double vertex_distance = 0.0;
    /// True when D was replaced by an optimal permutation matrix.
    bool vertex = false;
};

namespace detail {

// Restores unit row/column sums after clamping small negatives.
inline void balance(Eigen::MatrixXd& D) {
    D = D.cwiseMax(0.0);
    for (int iter = 0; iter < 100; ++iter) {
        const Eigen::VectorXd rs = D.rowwise().sum();
        for (Eigen::Index i = 0; i < D.rows(); ++i)
            if (rs[i] > 0) D.row(i) /= rs[i];
        const Eigen::RowVectorXd cs = D.colwise().sum();
        for (Eigen::Index j = 0; j < D.cols(); ++j)
            if (cs[j] > 0) D.col(j) /= cs[j];
        if ((D.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-13) break;
    }
}

}  // namespace detail

/// Map of the unrevealed block given by the maximum-weight assignment on D.
inline std::vector<int> project_to_permutation(const Eigen::MatrixXd& D) { return hungarian_max(D).mapping; }

inline std::vector<int> project_to_permutation(const DoublyStochastic& D) { return project_to_permutation(D.values); }

/// Solves the reduced LP with the interior-point backend. If the projection
/// of the interior solution attains the LP optimum (within the solver
/// tolerance) that permutation matrix is returned as an optimal vertex.
inline LpSolution solve_reduced_lp(const SeededBlocks& blocks, const lp::Options& options = {}) {
    const int m = blocks.unrevealed_count();
    if (m < 1) throw std::invalid_argument("solve_reduced_lp: no unrevealed vertices");
    LpSolution out;
    if (m == 1) {
        out.D = DoublyStochastic::uniform(1);
        out.objective = reduced_objective(blocks, out.D.values);
        out.status = lp::Status::optimal;
        out.vertex = true;
        return out;
    }
    const ReducedLp lp = build_reduced_lp(blocks);
    lp::InteriorPoint solver(options);
    const lp::Result res = solver.solve(lp.problem);
    if (res.status == lp::Status::numerical_failure)
        throw std::runtime_error("reduced LP: interior point method failed numerically");
    out.status = res.status;
    out.iterations = res.iterations;

    Eigen::MatrixXd D(m, m);
    for (int u = 0; u < m; ++u)
        for (int v = 0; v < m; ++v) D(u, v) = res.x[u * m + v];
    detail::balance(D);

    const auto mapping = project_to_permutation(D);
    const DoublyStochastic P = DoublyStochastic::from_permutation(mapping);
    out.vertex_distance = (D - P.values).cwiseAbs().maxCoeff();
    const double interior_obj = reduced_objective(blocks, D);
    const double vertex_obj = reduced_objective(blocks, P.values);
    const double slack = 1e-6 * (1.0 + std::abs(res.objective));
    if (vertex_obj <= std::max(res.objective, interior_obj) + slack) {
        out.D = P;
        out.objective = vertex_obj;
        out.vertex = true;
    } else {
        out.D = DoublyStochastic{std::move(D)};
        out.objective = interior_obj;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Frank-Wolfe on the l1 objective.
//
// The decision block D is indexed (unmatched B vertex, unrevealed A vertex),
// the orientation in which the residual blocks below vanish at the true
// alignment. Its transpose is the (A, B)-indexed block used by the LP.

struct FwResiduals {
    Eigen::MatrixXd ru;  // B~_RU D - A_RU
    Eigen::MatrixXd ur;  // B~_UR - D A_UR
    Eigen::MatrixXd uu;  // B~_UU D - D A_UU
};

inline FwResiduals fw_residuals(const SeededBlocks& blocks, const Eigen::MatrixXd& D) {
    const int m = blocks.unrevealed_count();
    if (D.rows() != m || D.cols() != m) throw std::invalid_argument("fw: block size mismatch");
    FwResiduals r;
    r.ru = blocks.bt_ru() * D - Eigen::MatrixXd(blocks.a_ru());
    r.ur = Eigen::MatrixXd(blocks.bt_ru().transpose()) - D * blocks.a_ru().transpose();
    r.uu = blocks.bt_uu() * D - D * blocks.a_uu();
    return r;
}

/// Sum of the l1 norms of the three residual blocks.
inline double fw_objective(const SeededBlocks& blocks, const Eigen::MatrixXd& D) {
    const FwResiduals r = fw_residuals(blocks, D);
    return r.ru.cwiseAbs().sum() + r.ur.cwiseAbs().sum() + r.uu.cwiseAbs().sum();
}

/// Entrywise sign; magnitudes at or below `zero` count as 0.
inline Eigen::MatrixXd sign_of(const Eigen::MatrixXd& R, double zero = 1e-9) {
    return R.unaryExpr([zero](double x) { return x > zero ? 1.0 : (x < -zero ? -1.0 : 0.0); });
}

/// Subgradient of fw_objective with respect to D.
inline Eigen::MatrixXd fw_gradient(const SeededBlocks& blocks, const Eigen::MatrixXd& D) {
    const FwResiduals r = fw_residuals(blocks, D);
    const Eigen::MatrixXd g_ru = sign_of(r.ru);
    const Eigen::MatrixXd g_ur = sign_of(r.ur);
    const Eigen::MatrixXd g_uu = sign_of(r.uu);
    Eigen::MatrixXd grad = blocks.bt_ru().transpose() * g_ru;
    grad.noalias() -= g_ur * blocks.a_ru();
    grad.noalias() += blocks.bt_uu().transpose() * g_uu;
    grad.noalias() -= g_uu * blocks.a_uu().transpose();
    return grad;
}

inline double fw_step_size(int t) { return 1.0 / (t + 2.0); }

struct FwState {
    int t = 0;
    Eigen::MatrixXd D;
    std::vector<double> objective_trace;
};

inline FwState fw_init(const SeededBlocks& blocks) {
    FwState state;
    state.D = DoublyStochastic::uniform(blocks.unrevealed_count()).values;
    state.objective_trace.push_back(fw_objective(blocks, state.D));
    return state;
}

/// One Frank-Wolfe iteration: the linear minimisation oracle is the
/// assignment maximising <-grad, S>; step size 1/(t+2).
inline FwState fw_step(FwState state, const SeededBlocks& blocks) {
    const Eigen::MatrixXd grad = fw_gradient(blocks, state.D);
    const auto vertex = hungarian_max(-grad).mapping;
    const double gamma = fw_step_size(state.t);
    state.D *= 1.0 - gamma;
    for (std::size_t i = 0; i < vertex.size(); ++i) state.D(static_cast<Eigen::Index>(i), vertex[i]) += gamma;
    ++state.t;
    state.objective_trace.push_back(fw_objective(blocks, state.D));
    return state;
}

}  // namespace sgm
