#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace sgm::lp {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// min c'x  s.t.  A x = b,  x >= 0.
struct Problem {
    SparseMatrix A;
    Vector b;
    Vector c;
};

enum class Status { optimal, iteration_limit, numerical_failure };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::iteration_limit: return "iteration_limit";
        case Status::numerical_failure: return "numerical_failure";
    }
    return "?";
}

struct Result {
    Vector x;
    Vector y;
    Vector s;
    double objective = 0.0;
    Status status = Status::iteration_limit;
    int iterations = 0;
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    double relative_gap = 0.0;
};

struct Options {
    int max_iterations = 200;
    /// Relative primal infeasibility, dual infeasibility and duality gap.
    double tolerance = 1e-9;
    double step_fraction = 0.995;
};

/// Mehrotra predictor-corrector primal-dual interior point method for
/// standard-form LPs. Normal equations A diag(x/s) A' are factored with a
/// sparse LDL' (AMD ordering).
/// `A` must have full row rank.
///
/// On problems with several optimal solutions the iterates converge to the
/// analytic centre of the optimal face.
class InteriorPoint {
public:
    explicit InteriorPoint(Options options = {}) : options_(options) {}

    Result solve(const Problem& problem) {
        const SparseMatrix& A = problem.A;
        const Vector& b = problem.b;
        const Vector& c = problem.c;
        const Eigen::Index rows = A.rows();
        const Eigen::Index cols = A.cols();
        if (b.size() != rows || c.size() != cols) throw std::invalid_argument("lp: dimension mismatch");

        const SparseMatrix At = A.transpose();
        const double b_norm = 1.0 + b.norm();
        const double c_norm = 1.0 + c.norm();

        Result res;
        Vector d = Vector::Ones(cols);
        if (!factor(A, At, d)) {
            res.status = Status::numerical_failure;
            return res;
        }

        // Starting point (Mehrotra): least-squares primal/dual estimates
        // shifted into the positive orthant.
        Vector x = At * solver_.solve(b);
        Vector y = solver_.solve(A * c);
        Vector s = c - At * y;
        {
            const double dx = std::max(-1.5 * x.minCoeff(), 0.0);
            const double ds = std::max(-1.5 * s.minCoeff(), 0.0);
            x.array() += dx;
            s.array() += ds;
            const double xs = x.dot(s);
            const double shift_x = 0.5 * xs / std::max(s.sum(), 1e-300);
            const double shift_s = 0.5 * xs / std::max(x.sum(), 1e-300);
            x.array() += shift_x;
            s.array() += shift_s;
            if (!(x.minCoeff() > 0.0) || !(s.minCoeff() > 0.0)) {
                x.setOnes();
                s.setOnes();
                y.setZero();
            }
        }

        const auto max_step = [](const Vector& v, const Vector& dv) {
            double alpha = 1.0;
            for (Eigen::Index i = 0; i < v.size(); ++i)
                if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
            return alpha;
        };

        Vector rb, rc, rxs, dx(cols), dy(rows), ds(cols), dx_aff, ds_aff;
        for (int iter = 0; iter < options_.max_iterations; ++iter) {
            rb = A * x - b;
            rc = At * y + s - c;
            const double mu = x.dot(s) / static_cast<double>(cols);
            const double primal_obj = c.dot(x);
            const double dual_obj = b.dot(y);
            res.primal_infeasibility = rb.norm() / b_norm;
            res.dual_infeasibility = rc.norm() / c_norm;
            res.relative_gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
            res.iterations = iter;
            if (res.primal_infeasibility < options_.tolerance && res.dual_infeasibility < options_.tolerance &&
                res.relative_gap < options_.tolerance) {
                res.status = Status::optimal;
                break;
            }

            d = x.cwiseQuotient(s);
            if (!factor(A, At, d)) {
                res.status = Status::numerical_failure;
                break;
            }

            // Predictor.
            rxs = -x.cwiseProduct(s);
            solve_newton(A, At, s, d, rb, rc, rxs, dx, dy, ds);
            const double ap_aff = max_step(x, dx);
            const double ad_aff = max_step(s, ds);
            const double mu_aff = (x + ap_aff * dx).dot(s + ad_aff * ds) / static_cast<double>(cols);
            const double sigma = std::pow(mu_aff / mu, 3.0);
            dx_aff = dx;
            ds_aff = ds;

            // Corrector.
            rxs = (-x.cwiseProduct(s) - dx_aff.cwiseProduct(ds_aff)).array() + sigma * mu;
            solve_newton(A, At, s, d, rb, rc, rxs, dx, dy, ds);
            const double ap = std::min(1.0, options_.step_fraction * max_step(x, dx));
            const double ad = std::min(1.0, options_.step_fraction * max_step(s, ds));
            x += ap * dx;
            y += ad * dy;
            s += ad * ds;
            if (!x.allFinite() || !y.allFinite() || !s.allFinite()) {
                res.status = Status::numerical_failure;
                break;
            }
            res.iterations = iter + 1;
        }
        res.x = std::move(x);
        res.y = std::move(y);
        res.s = std::move(s);
        res.objective = c.dot(res.x);
        return res;
    }

private:
    bool factor(const SparseMatrix& A, const SparseMatrix& At, const Vector& d) {
        normal_ = A * d.asDiagonal() * At;
        double max_diag = 0.0;
        for (Eigen::Index i = 0; i < normal_.rows(); ++i) max_diag = std::max(max_diag, normal_.coeff(i, i));
        const double reg = 1e-14 * std::max(1.0, max_diag);
        for (Eigen::Index i = 0; i < normal_.rows(); ++i) normal_.coeffRef(i, i) += reg;
        solver_.compute(normal_);
        return solver_.info() == Eigen::Success;
    }

    // Solves A dx = -rb, A' dy + ds = -rc, S dx + X ds = rxs using the current
    // factorisation of A diag(d) A'.
    void solve_newton(const SparseMatrix& A, const SparseMatrix& At, const Vector& s, const Vector& d,
                      const Vector& rb, const Vector& rc, const Vector& rxs, Vector& dx, Vector& dy, Vector& ds) {
        const Vector t = rxs.cwiseQuotient(s) + d.cwiseProduct(rc);
        const Vector rhs = -rb - A * t;
        dy = solver_.solve(rhs);
        // One step of iterative refinement against the unregularised system.
        const Vector residual = rhs - A * (d.cwiseProduct(At * dy));
        dy += solver_.solve(residual);
        ds = -rc - At * dy;
        dx = t + d.cwiseProduct(At * dy);
    }

    Options options_;
    SparseMatrix normal_;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> solver_;
};

}  // namespace sgm::lp
