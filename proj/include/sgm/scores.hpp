#pragma once

#include <bit>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sgm/graph.hpp"

namespace sgm {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Integer scores between the unrevealed vertices of A (rows) and the
/// vertices of B outside the seed images (columns), both ascending.
struct ScoreMatrix {
    std::vector<int> u_vertices;
    std::vector<int> v_vertices;
    IntMatrix values;

    int size() const { return static_cast<int>(u_vertices.size()); }
};

namespace detail {

inline SeedMap checked_seeds(const Graph& A, const Graph& B, SeedMap seeds) {
    if (A.n() != B.n()) throw std::invalid_argument("graphs must have the same number of vertices");
    seeds.normalize(A.n());
    return seeds;
}

inline std::vector<int> positions(std::span<const int> items, int n) {
    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < items.size(); ++i) pos[static_cast<std::size_t>(items[i])] = static_cast<int>(i);
    return pos;
}

}  // namespace detail

/// Score(u, v) = number of seeds r with A(u, r) = 1 and B(v, pi_R(r)) = 1.
inline ScoreMatrix build_scores(const Graph& A, const Graph& B, const SeedMap& seed_map) {
    const SeedMap seeds = detail::checked_seeds(A, B, seed_map);
    const int n = A.n();
    ScoreMatrix out{seeds.unrevealed(n), seeds.unmatched_images(n), {}};
    const auto m = static_cast<Eigen::Index>(out.u_vertices.size());
    out.values = IntMatrix::Zero(m, m);
    const auto row_of = detail::positions(out.u_vertices, n);
    const auto col_of = detail::positions(out.v_vertices, n);

    std::vector<int> rows, cols;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        rows.clear();
        cols.clear();
        for (int w : A.neighbors(seeds.vertices[k]))
            if (int i = row_of[static_cast<std::size_t>(w)]; i >= 0) rows.push_back(i);
        if (rows.empty()) continue;
        for (int w : B.neighbors(seeds.images[k]))
            if (int j = col_of[static_cast<std::size_t>(w)]; j >= 0) cols.push_back(j);
        for (int i : rows)
            for (int j : cols) ++out.values(i, j);
    }
    return out;
}

namespace detail {

/// Bitset over seed indices marking seeds within distance two of `start`.
inline void two_hop_signature(const Graph& g, int start, std::span<const int> seed_pos, std::vector<std::uint64_t>& bits) {
    std::fill(bits.begin(), bits.end(), 0);
    const auto mark = [&](int x) {
        if (int k = seed_pos[static_cast<std::size_t>(x)]; k >= 0) bits[static_cast<std::size_t>(k) / 64] |= std::uint64_t{1} << (k % 64);
    };
    for (int w : g.neighbors(start)) {
        mark(w);
        for (int x : g.neighbors(w))
            if (x != start) mark(x);
    }
}

}  // namespace detail

/// Hop2 baseline scores: each vertex gets the 0/1 signature of seeds it
/// reaches by a path of length one or two (through any vertex), and the
/// score of (u, v) is the size of the intersection of the signatures, with
/// B's signature read through the seed correspondence.
inline ScoreMatrix build_hop2_scores(const Graph& A, const Graph& B, const SeedMap& seed_map) {
    const SeedMap seeds = detail::checked_seeds(A, B, seed_map);
    const int n = A.n();
    ScoreMatrix out{seeds.unrevealed(n), seeds.unmatched_images(n), {}};
    const auto m = static_cast<Eigen::Index>(out.u_vertices.size());
    out.values = IntMatrix::Zero(m, m);
    const auto seed_pos_a = detail::positions(seeds.vertices, n);
    const auto seed_pos_b = detail::positions(seeds.images, n);
    const std::size_t words = (seeds.size() + 63) / 64;
    if (words == 0) return out;

    std::vector<std::uint64_t> sig_b(static_cast<std::size_t>(m) * words);
    std::vector<std::uint64_t> scratch(words);
    for (Eigen::Index j = 0; j < m; ++j) {
        detail::two_hop_signature(B, out.v_vertices[static_cast<std::size_t>(j)], seed_pos_b, scratch);
        std::copy(scratch.begin(), scratch.end(), sig_b.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(j) * words));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        detail::two_hop_signature(A, out.u_vertices[static_cast<std::size_t>(i)], seed_pos_a, scratch);
        for (Eigen::Index j = 0; j < m; ++j) {
            const std::uint64_t* other = sig_b.data() + static_cast<std::size_t>(j) * words;
            std::int64_t count = 0;
            for (std::size_t w = 0; w < words; ++w) count += std::popcount(scratch[w] & other[w]);
            out.values(i, j) = count;
        }
    }
    return out;
}

/// CSV with a header row of column vertex indices and one row per u vertex.
inline void write_scores_csv(std::ostream& out, const ScoreMatrix& scores) {
    out << "u\\v";
    for (int v : scores.v_vertices) out << ',' << v;
    out << '\n';
    for (int i = 0; i < scores.size(); ++i) {
        out << scores.u_vertices[static_cast<std::size_t>(i)];
        for (int j = 0; j < scores.size(); ++j) out << ',' << scores.values(i, j);
        out << '\n';
    }
}

}  // namespace sgm
