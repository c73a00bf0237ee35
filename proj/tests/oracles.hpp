#pragma once

// Independent reference implementations used only by the tests. They work on
// dense 0/1 matrices and plain loops and share no code with the library
// beyond the Graph accessors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sgm/graph.hpp"

namespace oracle {

inline Eigen::MatrixXi dense(const sgm::Graph& g) {
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(g.n(), g.n());
    for (auto [u, v] : g.edges()) m(u, v) = m(v, u) = 1;
    return m;
}

inline std::vector<int> complement(const std::vector<int>& taken, int n) {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (std::find(taken.begin(), taken.end(), v) == taken.end()) out.push_back(v);
    return out;
}

/// Score(u, v) = #{r : A(u, r) = 1 and B(v, image(r)) = 1}, triple loop.
inline Eigen::MatrixXi triple_loop_scores(const sgm::Graph& A, const sgm::Graph& B, const std::vector<int>& seeds,
                                          const std::vector<int>& images) {
    const auto a = dense(A), b = dense(B);
    const auto us = complement(seeds, A.n()), vs = complement(images, B.n());
    Eigen::MatrixXi s = Eigen::MatrixXi::Zero(static_cast<int>(us.size()), static_cast<int>(vs.size()));
    for (std::size_t i = 0; i < us.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j)
            for (std::size_t k = 0; k < seeds.size(); ++k)
                if (a(us[i], seeds[k]) && b(vs[j], images[k])) ++s(static_cast<int>(i), static_cast<int>(j));
    return s;
}

/// Binary two-hop signature overlap via BFS to depth 2.
inline Eigen::MatrixXi bfs_hop2_scores(const sgm::Graph& A, const sgm::Graph& B, const std::vector<int>& seeds,
                                       const std::vector<int>& images) {
    const auto within2 = [](const sgm::Graph& g, int start) {
        std::vector<int> dist(static_cast<std::size_t>(g.n()), -1);
        std::queue<int> q;
        dist[static_cast<std::size_t>(start)] = 0;
        q.push(start);
        while (!q.empty()) {
            const int x = q.front();
            q.pop();
            if (dist[static_cast<std::size_t>(x)] == 2) continue;
            for (int y : g.neighbors(x))
                if (dist[static_cast<std::size_t>(y)] < 0) {
                    dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
                    q.push(y);
                }
        }
        return dist;
    };
    const auto us = complement(seeds, A.n()), vs = complement(images, B.n());
    Eigen::MatrixXi s = Eigen::MatrixXi::Zero(static_cast<int>(us.size()), static_cast<int>(vs.size()));
    for (std::size_t i = 0; i < us.size(); ++i) {
        const auto da = within2(A, us[i]);
        for (std::size_t j = 0; j < vs.size(); ++j) {
            const auto db = within2(B, vs[j]);
            for (std::size_t k = 0; k < seeds.size(); ++k) {
                const int x = da[static_cast<std::size_t>(seeds[k])], y = db[static_cast<std::size_t>(images[k])];
                if (x >= 1 && x <= 2 && y >= 1 && y <= 2) ++s(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    return s;
}

/// Full n x n matrix: seeds to images, unrevealed block from `block` with rows
/// the ascending unrevealed A vertices and columns the ascending unmatched B
/// vertices.
inline Eigen::MatrixXd embed(int n, const std::vector<int>& seeds, const std::vector<int>& images,
                             const Eigen::MatrixXd& block) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < seeds.size(); ++k) d(seeds[k], images[k]) = 1.0;
    const auto us = complement(seeds, n), vs = complement(images, n);
    for (std::size_t i = 0; i < us.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) d(us[i], vs[j]) = block(static_cast<int>(i), static_cast<int>(j));
    return d;
}

/// ||A D - D B||_1 with D the full correspondence matrix (A-rows, B-columns):
/// (A D)(u, y) counts A-neighbours of u mapped onto y; (D B)(u, y) counts B-
/// neighbours of u's image at y.
inline double dense_l1(const sgm::Graph& A, const sgm::Graph& B, const Eigen::MatrixXd& D) {
    const Eigen::MatrixXd a = dense(A).cast<double>(), b = dense(B).cast<double>();
    return (a * D - D * b).cwiseAbs().sum();
}

/// Constant of the decomposition: ||A_RR - B~_RR||_1 + 2 (e_A(R, U) + e_B(image(R), V)).
inline double decomposition_constant(const sgm::Graph& A, const sgm::Graph& B, const std::vector<int>& seeds,
                                     const std::vector<int>& images) {
    const auto a = dense(A), b = dense(B);
    const auto us = complement(seeds, A.n()), vs = complement(images, B.n());
    double c = 0.0;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = 0; j < seeds.size(); ++j) c += std::abs(a(seeds[i], seeds[j]) - b(images[i], images[j]));
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        for (int u : us) c += 2.0 * a(seeds[k], u);
        for (int v : vs) c += 2.0 * b(images[k], v);
    }
    return c;
}

/// Component sizes via union-find.
inline std::vector<int> component_sizes(const sgm::Graph& g) {
    std::vector<int> parent(static_cast<std::size_t>(g.n()));
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    for (auto [u, v] : g.edges()) parent[static_cast<std::size_t>(find(u))] = find(v);
    std::vector<int> size(static_cast<std::size_t>(g.n()), 0);
    for (int v = 0; v < g.n(); ++v) ++size[static_cast<std::size_t>(find(v))];
    std::vector<int> out;
    for (int s : size)
        if (s > 0) out.push_back(s);
    return out;
}

/// Erdos-Renyi graph for fixtures.
inline sgm::Graph random_graph(int n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng)) edges.emplace_back(u, v);
    return sgm::Graph(n, edges);
}

/// Random seed map with `k` seeds on n vertices; images drawn by a random
/// permutation.
inline sgm::SeedMap random_seeds(int n, int k, std::mt19937_64& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n)), pick(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::iota(pick.begin(), pick.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::shuffle(pick.begin(), pick.end(), rng);
    sgm::SeedMap s;
    for (int i = 0; i < k; ++i) {
        s.vertices.push_back(pick[static_cast<std::size_t>(i)]);
        s.images.push_back(perm[static_cast<std::size_t>(i)]);
    }
    s.normalize(n);
    return s;
}

/// Random doubly stochastic matrix as a convex combination of permutations.
inline Eigen::MatrixXd random_doubly_stochastic(int m, std::mt19937_64& rng, int parts = 4) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    std::uniform_real_distribution<double> w(0.1, 1.0);
    std::vector<double> weights;
    for (int k = 0; k < parts; ++k) weights.push_back(w(rng));
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = 0; k < parts; ++k) {
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < m; ++i) d(i, perm[static_cast<std::size_t>(i)]) += weights[static_cast<std::size_t>(k)] / total;
    }
    return d;
}

}  // namespace oracle
