#include <random>

#include <gtest/gtest.h>

#include "sgm/assign.hpp"
#include "sgm/oracle.hpp"

using Eigen::MatrixXd;
using Eigen::MatrixXi;

namespace {

MatrixXi random_int(int m, int hi, std::mt19937_64& rng) {
    MatrixXi w(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) w(i, j) = static_cast<int>(rng() % static_cast<unsigned>(hi + 1));
    return w;
}

bool is_bijection(const std::vector<int>& map) {
    std::vector<char> seen(map.size(), 0);
    for (int c : map) {
        if (c < 0 || static_cast<std::size_t>(c) >= map.size() || seen[c]) return false;
        seen[c] = 1;
    }
    return true;
}

}  // namespace

TEST(Hungarian, TwoByTwo) {
    MatrixXd w(2, 2);
    w << 3, 1, 0, 2;
    const auto a = sgm::hungarian_max(w);
    EXPECT_EQ(a.mapping, (std::vector<int>{0, 1}));
    EXPECT_DOUBLE_EQ(a.total, 5.0);
}

TEST(Hungarian, DiagonalDominant) {
    const MatrixXd w = 10.0 * MatrixXd::Identity(6, 6);
    EXPECT_EQ(sgm::hungarian_max(w).mapping, (std::vector<int>{0, 1, 2, 3, 4, 5}));
}

TEST(Hungarian, AllEqualTieBreaksToIdentity) {
    const auto a = sgm::hungarian_max(MatrixXd::Constant(5, 5, 2.5));
    EXPECT_EQ(a.mapping, (std::vector<int>{0, 1, 2, 3, 4}));
    EXPECT_DOUBLE_EQ(a.total, 12.5);
}

TEST(Hungarian, TieBreakPrefersSmallerRowThenColumn) {
    MatrixXi w(3, 3);
    w << 0, 1, 1,
         1, 0, 1,
         1, 1, 0;
    // Optimal total 3 by the two 3-cycles; (1, 2, 0) is lexicographically smaller.
    EXPECT_EQ(sgm::hungarian_max(w).mapping, (std::vector<int>{1, 2, 0}));
}

TEST(Hungarian, EmptyAndErrors) {
    EXPECT_TRUE(sgm::hungarian_max(MatrixXd(0, 0)).mapping.empty());
    EXPECT_THROW(sgm::hungarian_max(MatrixXd::Zero(2, 3)), std::invalid_argument);
    MatrixXd bad = MatrixXd::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(sgm::hungarian_max(bad), std::invalid_argument);
    bad(0, 1) = std::nan("");
    EXPECT_THROW(sgm::greedy_match(bad), std::invalid_argument);
}

TEST(Hungarian, MatchesBruteForceExactly) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 500; ++trial) {
        const int m = 1 + trial % 7;
        // Small ranges create many ties.
        const MatrixXi w = random_int(m, trial % 3 == 0 ? 2 : 20, rng);
        const auto h = sgm::hungarian_max(w);
        const auto b = sgm::brute_force_best_trace(w);
        EXPECT_EQ(h.total, b.total);
        EXPECT_EQ(h.mapping, b.mapping) << "trial " << trial;
    }
}

TEST(Hungarian, RealValuedAgainstBruteForce) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + trial % 6;
        MatrixXd w(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) w(i, j) = u(rng);
        EXPECT_NEAR(sgm::hungarian_max(w).total, sgm::brute_force_best_trace(w).total, 1e-9);
    }
}

TEST(Hungarian, ConstantShiftKeepsMapping) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 2 + trial % 8;
        const MatrixXi w = random_int(m, 3, rng);
        const auto a = sgm::hungarian_max(w);
        const auto b = sgm::hungarian_max((w.array() + 7).matrix());
        EXPECT_EQ(a.mapping, b.mapping);
        EXPECT_EQ(b.total, a.total + 7.0 * m);
    }
}

TEST(Hungarian, LargerRandomIsBijectiveAndBeatsGreedy) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const MatrixXi w = random_int(60, 5, rng);
        const auto h = sgm::hungarian_max(w);
        const auto g = sgm::greedy_match(w);
        EXPECT_TRUE(is_bijection(h.mapping));
        EXPECT_TRUE(is_bijection(g.mapping));
        EXPECT_GE(h.total, g.total);
    }
}

TEST(Greedy, Examples) {
    MatrixXd w(2, 2);
    w << 3, 1, 0, 2;
    auto g = sgm::greedy_match(w);
    EXPECT_EQ(g.mapping, (std::vector<int>{0, 1}));
    EXPECT_DOUBLE_EQ(g.total, 5.0);
    w << 2, 2, 2, 2;
    EXPECT_EQ(sgm::greedy_match(w).mapping, (std::vector<int>{0, 1}));
    w << 0, 5, 5, 0;
    EXPECT_EQ(sgm::greedy_match(w).mapping, (std::vector<int>{1, 0}));
}

TEST(Greedy, SuboptimalExample) {
    MatrixXd w(2, 2);
    w << 3, 2, 2, 0;
    EXPECT_DOUBLE_EQ(sgm::greedy_match(w).total, 3.0);
    EXPECT_DOUBLE_EQ(sgm::hungarian_max(w).total, 4.0);
}

TEST(Greedy, DependsOnlyOnValues) {
    // Same matrix stored with different scalar types gives the same result.
    std::mt19937_64 rng(15);
    const MatrixXi w = random_int(12, 4, rng);
    EXPECT_EQ(sgm::greedy_match(w).mapping, sgm::greedy_match(w.cast<double>()).mapping);
    EXPECT_EQ(sgm::greedy_match(w).mapping, sgm::greedy_match(w.cast<long long>()).mapping);
}

TEST(BruteForce, Examples) {
    MatrixXd w(2, 2);
    w << 3, 1, 0, 2;
    EXPECT_DOUBLE_EQ(sgm::brute_force_best_trace(w).total, 5.0);
    const auto z = sgm::brute_force_best_trace(MatrixXd::Zero(4, 4));
    EXPECT_DOUBLE_EQ(z.total, 0.0);
    EXPECT_EQ(z.mapping, (std::vector<int>{0, 1, 2, 3}));
    EXPECT_THROW(sgm::brute_force_best_trace(MatrixXd::Zero(10, 10)), std::invalid_argument);
}
