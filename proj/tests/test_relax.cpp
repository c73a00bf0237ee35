#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sgm/oracle.hpp"
#include "sgm/relax.hpp"

using Eigen::MatrixXd;
using sgm::Graph;
using sgm::SeedMap;
using Edges = std::vector<std::pair<int, int>>;

namespace {

SeedMap identity_seeds(const std::vector<int>& vs) { return SeedMap{vs, vs}; }

MatrixXd permutation_matrix(const std::vector<int>& map) {
    return sgm::DoublyStochastic::from_permutation(map).values;
}

// Minimum reduced objective over all permutation matrices of the block.
double best_permutation_objective(const sgm::SeededBlocks& blocks) {
    std::vector<int> perm(static_cast<std::size_t>(blocks.unrevealed_count()));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        best = std::min(best, sgm::reduced_objective(blocks, permutation_matrix(perm)));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST(ReducedObjective, IdenticalGraphsAtIdentity) {
    std::mt19937_64 rng(20);
    const Graph g = oracle::random_graph(15, 0.3, rng);
    const sgm::SeededBlocks blocks(g, g, identity_seeds({0, 2, 4, 6, 8, 10, 12}));
    const int m = blocks.unrevealed_count();
    const double expected = -4.0 * static_cast<double>(blocks.scores().values.diagonal().sum());
    EXPECT_DOUBLE_EQ(sgm::reduced_objective(blocks, MatrixXd::Identity(m, m)), expected);
}

TEST(ReducedObjective, EdgelessIsZero) {
    std::mt19937_64 rng(21);
    const sgm::SeededBlocks blocks(Graph(9), Graph(9), identity_seeds({1, 5}));
    EXPECT_EQ(sgm::reduced_objective(blocks, oracle::random_doubly_stochastic(7, rng)), 0.0);
}

TEST(ReducedObjective, ThreeVertexHandInstance) {
    // Seed 0 -> 0. A: 0-1, 1-2. B: 0-2, 1-2. Score(1, 2) = 1, all else 0.
    const Graph a(3, Edges{{0, 1}, {1, 2}});
    const Graph b(3, Edges{{0, 2}, {1, 2}});
    const sgm::SeededBlocks blocks(a, b, identity_seeds({0}));
    EXPECT_EQ(blocks.scores().values(0, 1), 1);
    EXPECT_DOUBLE_EQ(sgm::reduced_objective(blocks, MatrixXd::Identity(2, 2)), 0.0);
    MatrixXd swap(2, 2);
    swap << 0, 1, 1, 0;
    EXPECT_DOUBLE_EQ(sgm::reduced_objective(blocks, swap), -4.0);
    MatrixXd half = MatrixXd::Constant(2, 2, 0.5);
    EXPECT_DOUBLE_EQ(sgm::reduced_objective(blocks, half), -2.0);
    // Full objective: 4 at the identity, 0 at the swap.
    EXPECT_DOUBLE_EQ(oracle::decomposition_constant(a, b, {0}, {0}), 4.0);
    EXPECT_DOUBLE_EQ(oracle::dense_l1(a, b, oracle::embed(3, {0}, {0}, MatrixXd::Identity(2, 2))), 4.0);
    EXPECT_DOUBLE_EQ(oracle::dense_l1(a, b, oracle::embed(3, {0}, {0}, swap)), 0.0);
}

TEST(ReducedObjective, PlusConstantEqualsDenseEvaluation) {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 29);
        const int k = static_cast<int>(rng() % n);
        const double p = 0.1 + 0.4 * (rng() % 10) / 10.0;
        const Graph a = oracle::random_graph(n, p, rng), b = oracle::random_graph(n, p, rng);
        const SeedMap seeds = oracle::random_seeds(n, k, rng);
        const sgm::SeededBlocks blocks(a, b, seeds);
        const int m = blocks.unrevealed_count();
        const double c = oracle::decomposition_constant(a, b, seeds.vertices, seeds.images);
        for (int rep = 0; rep < 3; ++rep) {
            const MatrixXd d = oracle::random_doubly_stochastic(m, rng, rep + 1);
            const double dense = oracle::dense_l1(a, b, oracle::embed(n, seeds.vertices, seeds.images, d));
            EXPECT_NEAR(sgm::reduced_objective(blocks, d) + c, dense, 1e-8) << "trial " << trial;
        }
    }
}

TEST(ReducedObjective, DimensionMismatch) {
    const sgm::SeededBlocks blocks(Graph(5), Graph(5), identity_seeds({0}));
    EXPECT_THROW(sgm::reduced_objective(blocks, MatrixXd::Identity(3, 3)), std::invalid_argument);
}

TEST(ReducedLp, IdenticalGraphsOptimumAtIdentity) {
    std::mt19937_64 rng(23);
    const Graph g = oracle::random_graph(30, 0.25, rng);
    std::vector<int> seeds;
    for (int v = 0; v < 30; v += 3) seeds.push_back(v);
    const sgm::SeededBlocks blocks(g, g, identity_seeds(seeds));
    const auto sol = sgm::solve_reduced_lp(blocks);
    const int m = blocks.unrevealed_count();
    EXPECT_EQ(sol.status, sgm::lp::Status::optimal);
    EXPECT_NEAR(sol.objective, sgm::reduced_objective(blocks, MatrixXd::Identity(m, m)), 1e-6);
    std::vector<int> id(static_cast<std::size_t>(m));
    std::iota(id.begin(), id.end(), 0);
    EXPECT_EQ(sgm::project_to_permutation(sol.D), id);
}

TEST(ReducedLp, SingletonBlock) {
    const Graph a(4, Edges{{0, 3}, {1, 3}});
    const Graph b(4, Edges{{0, 3}});
    const sgm::SeededBlocks blocks(a, b, identity_seeds({0, 1, 2}));
    const auto sol = sgm::solve_reduced_lp(blocks);
    EXPECT_EQ(sol.D.values, MatrixXd::Ones(1, 1));
    EXPECT_DOUBLE_EQ(sol.objective, -4.0);
}

TEST(ReducedLp, LowerBoundsEveryPermutation) {
    std::mt19937_64 rng(24);
    int vertex_solutions = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 40;
        const int m = 2 + trial % 5;
        const Graph a = oracle::random_graph(n, 0.15, rng), b = oracle::random_graph(n, 0.15, rng);
        const sgm::SeededBlocks blocks(a, b, oracle::random_seeds(n, n - m, rng));
        const auto sol = sgm::solve_reduced_lp(blocks);
        EXPECT_TRUE(sol.D.feasible(1e-7));
        const double best = best_permutation_objective(blocks);
        EXPECT_LE(sol.objective, best + 1e-6);
        if (sol.vertex) {
            ++vertex_solutions;
            EXPECT_NEAR(sol.objective, best, 1e-6);
        }
    }
    EXPECT_GT(vertex_solutions, 0);
}

TEST(ReducedLp, MatchesBruteForceOnCorrelatedPairs) {
    // Correlated pairs usually have an integral optimum.
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 30, m = 6;
        const Graph parent = oracle::random_graph(n, 0.3, rng);
        std::bernoulli_distribution keep(0.8);
        Edges ea, eb;
        for (auto e : parent.edges()) {
            if (keep(rng)) ea.push_back(e);
            if (keep(rng)) eb.push_back(e);
        }
        const Graph a(n, ea), b(n, eb);
        std::vector<int> seeds(n - m);
        std::iota(seeds.begin(), seeds.end(), m);
        const sgm::SeededBlocks blocks(a, b, identity_seeds(seeds));
        const auto sol = sgm::solve_reduced_lp(blocks);
        EXPECT_LE(sol.objective, best_permutation_objective(blocks) + 1e-6);
    }
}

TEST(LpFormat, WritesAllSections) {
    const Graph a(4, Edges{{0, 2}, {2, 3}, {1, 3}});
    const Graph b(4, Edges{{0, 3}, {2, 3}});
    const sgm::SeededBlocks blocks(a, b, identity_seeds({0, 1}));
    const auto lp = sgm::build_reduced_lp(blocks);
    EXPECT_EQ(lp.problem.A.rows(), 2 * 2 - 1 + static_cast<int>(lp.residual_pairs.size()));
    std::ostringstream out;
    sgm::write_lp_format(out, lp);
    const std::string text = out.str();
    EXPECT_NE(text.find("Minimize"), std::string::npos);
    EXPECT_NE(text.find("Subject To"), std::string::npos);
    EXPECT_NE(text.find("row_0:"), std::string::npos);
    EXPECT_NE(text.find("col_0:"), std::string::npos);
    EXPECT_NE(text.find("res_0_0:"), std::string::npos);
    EXPECT_EQ(text.substr(text.size() - 4), "End\n");
}

TEST(Projection, Examples) {
    const std::vector<int> p1{2, 0, 1}, p2{1, 2, 0};
    EXPECT_EQ(sgm::project_to_permutation(permutation_matrix(p1)), p1);
    EXPECT_EQ(sgm::project_to_permutation(sgm::DoublyStochastic::uniform(4)), (std::vector<int>{0, 1, 2, 3}));
    const MatrixXd mix = 0.6 * permutation_matrix(p1) + 0.4 * permutation_matrix(p2);
    EXPECT_EQ(sgm::project_to_permutation(mix), p1);
}

TEST(Projection, IdempotentOnPermutations) {
    std::mt19937_64 rng(26);
    for (int t = 0; t < 20; ++t) {
        std::vector<int> p(9);
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        const auto q = sgm::project_to_permutation(permutation_matrix(p));
        EXPECT_EQ(q, p);
        EXPECT_EQ(sgm::project_to_permutation(permutation_matrix(q)), p);
    }
}

TEST(FrankWolfe, StepSize) {
    EXPECT_DOUBLE_EQ(sgm::fw_step_size(0), 0.5);
    EXPECT_DOUBLE_EQ(sgm::fw_step_size(2), 0.25);
}

TEST(FrankWolfe, ZeroResidualMovesTowardIdentity) {
    // Edgeless graphs: all residuals vanish, the gradient is zero and the
    // oracle returns the identity.
    const sgm::SeededBlocks blocks(Graph(6), Graph(6), identity_seeds({0, 1, 2}));
    auto state = sgm::fw_init(blocks);
    EXPECT_EQ(sgm::fw_gradient(blocks, state.D), MatrixXd::Zero(3, 3));
    state = sgm::fw_step(std::move(state), blocks);
    MatrixXd expected = MatrixXd::Constant(3, 3, 0.5 / 3.0);
    expected.diagonal().array() += 0.5;
    EXPECT_TRUE(state.D.isApprox(expected, 1e-15));
    EXPECT_EQ(state.t, 1);
    EXPECT_EQ(state.objective_trace.size(), 2u);
}

TEST(FrankWolfe, SingletonStaysFixed) {
    const Graph a(3, Edges{{0, 2}});
    const sgm::SeededBlocks blocks(a, a, identity_seeds({0, 1}));
    auto state = sgm::fw_init(blocks);
    for (int t = 0; t < 5; ++t) state = sgm::fw_step(std::move(state), blocks);
    EXPECT_EQ(state.D, MatrixXd::Ones(1, 1));
}

TEST(FrankWolfe, IteratesStayDoublyStochastic) {
    std::mt19937_64 rng(27);
    const Graph a = oracle::random_graph(40, 0.2, rng), b = oracle::random_graph(40, 0.2, rng);
    const sgm::SeededBlocks blocks(a, b, oracle::random_seeds(40, 28, rng));
    auto state = sgm::fw_init(blocks);
    for (int t = 0; t < 50; ++t) {
        state = sgm::fw_step(std::move(state), blocks);
        EXPECT_TRUE(sgm::DoublyStochastic{state.D}.feasible(1e-9)) << "iteration " << t;
    }
}

TEST(FrankWolfe, ObjectiveIsTransposedReducedObjectivePlusConstant) {
    std::mt19937_64 rng(28);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 10 + trial;
        const Graph a = oracle::random_graph(n, 0.25, rng), b = oracle::random_graph(n, 0.25, rng);
        const SeedMap seeds = oracle::random_seeds(n, n / 2, rng);
        const sgm::SeededBlocks blocks(a, b, seeds);
        const int m = blocks.unrevealed_count();
        const double c = oracle::decomposition_constant(a, b, seeds.vertices, seeds.images);
        for (int rep = 0; rep < 3; ++rep) {
            const MatrixXd d = oracle::random_doubly_stochastic(m, rng, rep + 1);
            const double full = oracle::dense_l1(a, b, oracle::embed(n, seeds.vertices, seeds.images, d));
            // The seed-seed block is not part of the Frank-Wolfe objective.
            double rr = 0.0;
            for (std::size_t i = 0; i < seeds.size(); ++i)
                for (std::size_t j = 0; j < seeds.size(); ++j)
                    rr += std::abs(a.has_edge(seeds.vertices[i], seeds.vertices[j]) - b.has_edge(seeds.images[i], seeds.images[j]));
            EXPECT_NEAR(sgm::fw_objective(blocks, d.transpose()), full - rr, 1e-8);
            EXPECT_NEAR(sgm::fw_objective(blocks, d.transpose()) - sgm::reduced_objective(blocks, d), c - rr, 1e-8);
        }
    }
}

TEST(FrankWolfe, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(29);
    const double h = 1e-6;
    int checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const Graph a = oracle::random_graph(24, 0.3, rng), b = oracle::random_graph(24, 0.3, rng);
        const sgm::SeededBlocks blocks(a, b, oracle::random_seeds(24, 16, rng));
        const int m = blocks.unrevealed_count();
        // Dense generic point: no residual vanishes unless it is identically zero.
        std::uniform_real_distribution<double> w(0.1, 1.0);
        MatrixXd d = MatrixXd::NullaryExpr(m, m, [&] { return w(rng); });
        for (int it = 0; it < 200; ++it) {
            d = (d.array().colwise() / d.rowwise().sum().array()).matrix();
            d = (d.array().rowwise() / d.colwise().sum().array()).matrix();
        }
        const auto r = sgm::fw_residuals(blocks, d);
        // Skip points close to a kink.
        double gap = std::numeric_limits<double>::infinity();
        for (const MatrixXd* block : {&r.ru, &r.ur, &r.uu})
            for (double x : block->reshaped())
                if (x != 0.0) gap = std::min(gap, std::abs(x));
        if (gap < 1e-3) continue;
        const MatrixXd grad = sgm::fw_gradient(blocks, d);
        const double f0 = sgm::fw_objective(blocks, d);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                MatrixXd e = d;
                e(i, j) += h;
                EXPECT_NEAR((sgm::fw_objective(blocks, e) - f0) / h, grad(i, j), 1e-4);
            }
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(DoublyStochastic, Feasibility) {
    EXPECT_TRUE(sgm::DoublyStochastic::uniform(5).feasible());
    EXPECT_TRUE(sgm::DoublyStochastic::from_permutation(std::vector<int>{1, 0, 2}).feasible());
    sgm::DoublyStochastic bad{MatrixXd::Ones(2, 2)};
    EXPECT_FALSE(bad.feasible());
}
