#pragma once

// Independent linear-programming oracle for the worst-case expectation over
// an L1 ball around a reference distribution. Dense two-phase primal simplex
// with Bland's rule; intended for small cross-check instances, not production.

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace drccbo::oracle {

struct LpResult {
    double objective;
    std::vector<double> x;
};

namespace detail {

inline void pivot(Eigen::MatrixXd& t, std::vector<int>& basis, int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i < t.rows(); ++i)
        if (i != row && t(i, col) != 0.0)
            t.row(i) -= t(i, col) * t.row(row);
    basis[static_cast<std::size_t>(row)] = col;
}

/// Simplex iterations on a tableau whose last row is the reduced-cost row and
/// last column the right-hand side. Entering columns are restricted to
/// [0, n_enter). Returns false when the problem is unbounded.
inline bool iterate(Eigen::MatrixXd& t, std::vector<int>& basis, int n_enter) {
    const double tol = 1e-9;
    const int m = static_cast<int>(t.rows()) - 1;
    const int rhs = static_cast<int>(t.cols()) - 1;
    for (long iter = 0; iter < 100000; ++iter) {
        int col = -1;
        for (int j = 0; j < n_enter; ++j)
            if (t(m, j) < -tol) {
                col = j;  // Bland's rule: lowest eligible index
                break;
            }
        if (col < 0)
            return true;
        int row = -1;
        double best = 0.0;
        for (int i = 0; i < m; ++i) {
            if (t(i, col) > tol) {
                const double ratio = t(i, rhs) / t(i, col);
                if (row < 0 || ratio < best - tol ||
                    (ratio < best + tol &&
                     basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(row)]))
                    row = i, best = ratio;
            }
        }
        if (row < 0)
            return false;
        pivot(t, basis, row, col);
    }
    throw std::runtime_error("lp_oracle: iteration limit exceeded");
}

}  // namespace detail

/// min c^T x subject to A x = b, x >= 0, with b >= 0 componentwise.
inline LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& c) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    for (int i = 0; i < m; ++i)
        if (b(i) < 0.0)
            throw std::invalid_argument("lp_oracle: negative right-hand side");

    // Phase 1: artificial basis, minimize the artificial mass.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    t.block(0, 0, m, n) = a;
    t.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    t.block(0, n + m, m, 1) = b;
    for (int j = 0; j <= n + m; ++j)
        t(m, j) = -t.block(0, j, m, 1).sum();
    for (int j = n; j < n + m; ++j)
        t(m, j) = 0.0;
    std::vector<int> basis(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        basis[static_cast<std::size_t>(i)] = n + i;

    if (!detail::iterate(t, basis, n + m))
        throw std::runtime_error("lp_oracle: phase 1 unbounded");
    if (std::abs(t(m, n + m)) > 1e-7)
        throw std::runtime_error("lp_oracle: infeasible");

    // Drive remaining artificials out of the basis (or drop redundant rows).
    for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
        if (basis[static_cast<std::size_t>(i)] < n)
            continue;
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(t(i, j)) > 1e-9) {
                col = j;
                break;
            }
        if (col >= 0) {
            detail::pivot(t, basis, i, col);
        } else {
            // Redundant constraint: remove the row.
            const int rows = static_cast<int>(t.rows());
            t.block(i, 0, rows - 1 - i, t.cols()) =
                t.block(i + 1, 0, rows - 1 - i, t.cols()).eval();
            t.conservativeResize(rows - 1, Eigen::NoChange);
            basis.erase(basis.begin() + i);
            --i;
        }
    }

    // Phase 2: rebuild the reduced-cost row from the true objective.
    const int m2 = static_cast<int>(basis.size());
    t.row(m2).setZero();
    for (int j = 0; j < n; ++j)
        t(m2, j) = c(j);
    for (int i = 0; i < m2; ++i) {
        const int bj = basis[static_cast<std::size_t>(i)];
        if (bj < n)
            t.row(m2) -= c(bj) * t.row(i);
    }
    if (!detail::iterate(t, basis, n))
        throw std::runtime_error("lp_oracle: phase 2 unbounded");

    LpResult res;
    res.x.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m2; ++i) {
        const int bj = basis[static_cast<std::size_t>(i)];
        if (bj < n)
            res.x[static_cast<std::size_t>(bj)] = t(i, t.cols() - 1);
    }
    res.objective = 0.0;
    for (int j = 0; j < n; ++j)
        res.objective += c(j) * res.x[static_cast<std::size_t>(j)];
    return res;
}

/// Worst-case expectation via the epigraph LP
///   min c^T p  s.t.  sum p = 1, |p - r| <= s, sum s <= radius, p >= 0.
inline double wce_lp(std::span<const double> costs, std::span<const double> reference,
                     double radius) {
    const int n = static_cast<int>(costs.size());
    if (static_cast<int>(reference.size()) != n)
        throw std::invalid_argument("wce_lp: size mismatch");
    // Variables: p (n), s (n), slack u for p - s <= r (n),
    // surplus v for p + s >= r (n), slack t for the L1 budget (1).
    const int nv = 4 * n + 1;
    const int m = 2 * n + 2;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, nv);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < n; ++i)
        c(i) = costs[static_cast<std::size_t>(i)];
    // Row 0: sum p = 1.
    for (int i = 0; i < n; ++i)
        a(0, i) = 1.0;
    b(0) = 1.0;
    // Rows 1..n: p_i - s_i + u_i = r_i.
    for (int i = 0; i < n; ++i) {
        a(1 + i, i) = 1.0;
        a(1 + i, n + i) = -1.0;
        a(1 + i, 2 * n + i) = 1.0;
        b(1 + i) = reference[static_cast<std::size_t>(i)];
    }
    // Rows n+1..2n: p_i + s_i - v_i = r_i.
    for (int i = 0; i < n; ++i) {
        a(1 + n + i, i) = 1.0;
        a(1 + n + i, n + i) = 1.0;
        a(1 + n + i, 3 * n + i) = -1.0;
        b(1 + n + i) = reference[static_cast<std::size_t>(i)];
    }
    // Row 2n+1: sum s + t = radius.
    for (int i = 0; i < n; ++i)
        a(2 * n + 1, n + i) = 1.0;
    a(2 * n + 1, 4 * n) = 1.0;
    b(2 * n + 1) = radius;
    return solve_lp(a, b, c).objective;
}

}  // namespace drccbo::oracle
