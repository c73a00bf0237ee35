#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sgm {

/// Bijection row -> column over a square matrix, with its total weight.
struct Assignment {
    std::vector<int> mapping;
    double total = 0.0;
};

namespace detail {

template <typename Derived>
Eigen::MatrixXd checked_square(const Eigen::MatrixBase<Derived>& values) {
    if (values.rows() != values.cols()) throw std::invalid_argument("assignment: matrix must be square");
    Eigen::MatrixXd out = values.template cast<double>();
    if (!out.allFinite()) throw std::invalid_argument("assignment: matrix entries must be finite");
    return out;
}

template <typename Derived>
double total_of(const Eigen::MatrixBase<Derived>& values, const std::vector<int>& mapping) {
    using Scalar = typename Derived::Scalar;
    Scalar sum{0};
    for (std::size_t i = 0; i < mapping.size(); ++i) sum += values(static_cast<Eigen::Index>(i), mapping[i]);
    return static_cast<double>(sum);
}

/// Rewrites `row_to_col`, a perfect matching inside the bipartite graph
/// `tight`, into the lexicographically smallest perfect matching of that
/// graph. Row i is fixed in turn to the smallest column that still admits
/// a completion; completions are found as alternating cycles through the
/// unfixed rows.
inline void lexicographic_min_matching(const std::vector<std::vector<char>>& tight, std::vector<int>& row_to_col) {
    const int m = static_cast<int>(row_to_col.size());
    std::vector<int> col_to_row(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) col_to_row[static_cast<std::size_t>(row_to_col[static_cast<std::size_t>(r)])] = r;

    std::vector<std::vector<int>> rows_of_col(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            if (tight[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) rows_of_col[static_cast<std::size_t>(c)].push_back(r);

    std::vector<int> next(static_cast<std::size_t>(m));
    std::vector<char> reach(static_cast<std::size_t>(m));
    std::vector<int> queue;
    queue.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const int target = row_to_col[static_cast<std::size_t>(i)];
        // Columns from which `target` is reachable along alternating paths.
        std::fill(reach.begin(), reach.end(), 0);
        queue.clear();
        reach[static_cast<std::size_t>(target)] = 1;
        queue.push_back(target);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int col = queue[head];
            for (int r : rows_of_col[static_cast<std::size_t>(col)]) {
                if (r <= i) continue;
                const int c = row_to_col[static_cast<std::size_t>(r)];
                if (!reach[static_cast<std::size_t>(c)]) {
                    reach[static_cast<std::size_t>(c)] = 1;
                    next[static_cast<std::size_t>(c)] = col;
                    queue.push_back(c);
                }
            }
        }
        int best = target;
        for (int c = 0; c < target; ++c) {
            if (tight[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] && reach[static_cast<std::size_t>(c)]) {
                best = c;
                break;
            }
        }
        if (best == target) continue;
        int row = i;
        int col = best;
        while (true) {
            const int displaced = col_to_row[static_cast<std::size_t>(col)];
            row_to_col[static_cast<std::size_t>(row)] = col;
            col_to_row[static_cast<std::size_t>(col)] = row;
            if (col == target) break;
            row = displaced;
            col = next[static_cast<std::size_t>(col)];
        }
    }
}

}  // namespace detail

/// Maximum-weight perfect assignment (Hungarian method, shortest augmenting
/// paths with potentials, O(m^3)).
///
/// Among all optimal assignments the lexicographically smallest mapping is
/// returned: row 0 takes the smallest column it can, then row 1, and so on.
/// Optimal assignments are exactly the perfect matchings on edges with zero
/// reduced cost under the final potentials, so the tie-break is computed on
/// that graph. Integer-valued inputs are handled exactly; real inputs treat
/// reduced costs within `1e-9 * max|w|` as zero.
template <typename Derived>
Assignment hungarian_max(const Eigen::MatrixBase<Derived>& values) {
    const Eigen::MatrixXd w = detail::checked_square(values);
    const int m = static_cast<int>(w.rows());
    Assignment out;
    if (m == 0) return out;

    // 1-based arrays; column 0 is the virtual start of each augmenting path.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(m) + 1, 0.0), v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> owner(static_cast<std::size_t>(m) + 1, 0), way(static_cast<std::size_t>(m) + 1, 0);
    std::vector<double> minv(static_cast<std::size_t>(m) + 1);
    std::vector<char> used(static_cast<std::size_t>(m) + 1);
    const auto cost = [&](int i, int j) { return -w(i - 1, j - 1); };

    for (int i = 1; i <= m; ++i) {
        owner[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = owner[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0, j) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (owner[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            owner[static_cast<std::size_t>(j0)] = owner[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    out.mapping.assign(static_cast<std::size_t>(m), 0);
    for (int j = 1; j <= m; ++j) out.mapping[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)] - 1)] = j - 1;

    const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
    const bool integral = (w.array() == w.array().round()).all() && scale < 0x1.0p52;
    const double eps = integral ? 0.5 : 1e-9 * scale;
    std::vector<std::vector<char>> tight(static_cast<std::size_t>(m), std::vector<char>(static_cast<std::size_t>(m), 0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            tight[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                cost(i + 1, j + 1) - u[static_cast<std::size_t>(i) + 1] - v[static_cast<std::size_t>(j) + 1] <= eps;
    for (int i = 0; i < m; ++i) tight[static_cast<std::size_t>(i)][static_cast<std::size_t>(out.mapping[static_cast<std::size_t>(i)])] = 1;
    detail::lexicographic_min_matching(tight, out.mapping);

    out.total = detail::total_of(values, out.mapping);
    return out;
}

/// Greedy assignment: pairs are visited by (value descending, row ascending,
/// column ascending) and taken whenever both endpoints are still free.
template <typename Derived>
Assignment greedy_match(const Eigen::MatrixBase<Derived>& values) {
    detail::checked_square(values);
    const auto m = static_cast<int>(values.rows());
    Assignment out;
    if (m == 0) return out;

    std::vector<int> order(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        const auto vx = values(x / m, x % m);
        const auto vy = values(y / m, y % m);
        if (vx != vy) return vx > vy;
        return x < y;  // row-major index orders by row, then column
    });

    out.mapping.assign(static_cast<std::size_t>(m), -1);
    std::vector<char> col_used(static_cast<std::size_t>(m), 0);
    int matched = 0;
    for (int idx : order) {
        const int r = idx / m, c = idx % m;
        if (out.mapping[static_cast<std::size_t>(r)] >= 0 || col_used[static_cast<std::size_t>(c)]) continue;
        out.mapping[static_cast<std::size_t>(r)] = c;
        col_used[static_cast<std::size_t>(c)] = 1;
        if (++matched == m) break;
    }
    out.total = detail::total_of(values, out.mapping);
    return out;
}

}  // namespace sgm
