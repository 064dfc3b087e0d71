#include "simplex.hpp"

#include <cmath>
#include <limits>

namespace expwalk::detail {

namespace {

struct Tableau {
    Mat T;                  // rows: constraints, then objective; last column is rhs
    std::vector<int> basis;
    int rows = 0;
    int cols = 0;           // number of variables

    void pivot(int r, int c) {
        T.row(r) /= T(r, c);
        for (int i = 0; i < T.rows(); ++i)
            if (i != r && T(i, c) != 0.0) T.row(i) -= T(i, c) * T.row(r);
        basis[static_cast<std::size_t>(r)] = c;
    }

    // Objective row holds reduced costs of the minimization form: entering
    // columns have negative entries. Returns false when unbounded.
    bool run(int allowed_cols, double eps) {
        while (true) {
            int enter = -1;
            for (int j = 0; j < allowed_cols; ++j)
                if (T(rows, j) < -eps) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < rows; ++i) {
                if (T(i, enter) > eps) {
                    const double ratio = T(i, cols) / T(i, enter);
                    if (ratio < best - eps ||
                        (std::abs(ratio - best) <= eps && leave >= 0 &&
                         basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }
};

}  // namespace

LpResult lp_maximize(const Mat& A, const Vec& b, const Vec& c, double eps) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    // Phase 1 variables: n originals then m artificials.
    Tableau tab;
    tab.rows = m;
    tab.cols = n + m;
    tab.T = Mat::Zero(m + 1, n + m + 1);
    std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
    for (int i = 0; i < m; ++i) {
        if (b(i) < 0) sign[static_cast<std::size_t>(i)] = -1.0;
        tab.T.row(i).head(n) = sign[static_cast<std::size_t>(i)] * A.row(i);
        tab.T(i, n + i) = 1.0;
        tab.T(i, n + m) = sign[static_cast<std::size_t>(i)] * b(i);
        tab.basis.push_back(n + i);
    }
    // Minimize the sum of artificials.
    for (int i = 0; i < m; ++i) tab.T.row(m) -= tab.T.row(i);
    for (int i = 0; i < m; ++i) tab.T(m, n + i) = 0.0;

    LpResult res;
    tab.run(n + m, eps);
    if (-tab.T(m, n + m) > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
        res.status = LpResult::Status::Infeasible;
        return res;
    }
    // Drive artificials out of the basis.
    for (int i = 0; i < m; ++i) {
        if (tab.basis[static_cast<std::size_t>(i)] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(tab.T(i, j)) > 1e-9) {
                col = j;
                break;
            }
        if (col >= 0) tab.pivot(i, col);
    }

    // Phase 2: reduced costs for minimizing -c.x over the original columns.
    tab.T.row(m).setZero();
    for (int j = 0; j < n; ++j) tab.T(m, j) = -c(j);
    for (int i = 0; i < m; ++i) {
        const int bj = tab.basis[static_cast<std::size_t>(i)];
        if (bj < n && tab.T(m, bj) != 0.0) tab.T.row(m) -= tab.T(m, bj) * tab.T.row(i);
    }
    if (!tab.run(n, eps)) {
        res.status = LpResult::Status::Unbounded;
        return res;
    }

    res.status = LpResult::Status::Optimal;
    res.x = Vec::Zero(n);
    for (int i = 0; i < m; ++i) {
        const int bj = tab.basis[static_cast<std::size_t>(i)];
        if (bj < n) res.x(bj) = tab.T(i, n + m);
    }
    res.value = c.dot(res.x);
    // Duals: y^T = c_B^T B^{-1}, read off the artificial columns (which
    // started as the identity in the sign-adjusted rows).
    res.y = Vec::Zero(m);
    for (int i = 0; i < m; ++i) res.y(i) = tab.T(m, n + i) * sign[static_cast<std::size_t>(i)];
    return res;
}

}  // namespace expwalk::detail
