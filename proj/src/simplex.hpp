#pragma once

#include "expwalk/linalg.hpp"

#include <vector>

namespace expwalk::detail {

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded } status = Status::Infeasible;
    Vec x;          // primal solution
    Vec y;          // duals of the equality rows
    double value = 0.0;
};

/// maximize c.x subject to A x = b, x >= 0. Two-phase tableau simplex with
/// Bland's rule; intended for the tiny programs of the cone test. Rows of A
/// must be linearly independent.
LpResult lp_maximize(const Mat& A, const Vec& b, const Vec& c, double eps = 1e-11);

}  // namespace expwalk::detail
