#pragma once

#include "expwalk/linalg.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace expwalk::detail {

struct NmResult {
    Vec x;
    double f = 0.0;
    int evals = 0;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
inline NmResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0, double step,
                            int max_evals, double ftol = 1e-13) {
    const auto n = x0.size();
    std::vector<Vec> pts(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> vals(static_cast<std::size_t>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)](i) += step;
    int evals = 0;
    auto eval = [&](const Vec& x) {
        ++evals;
        return f(x);
    };
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);
    std::vector<std::size_t> order(pts.size());

    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
        if (std::abs(vals[worst] - vals[best]) <= ftol * (1.0 + std::abs(vals[best]))) break;

        Vec centroid = Vec::Zero(n);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != worst) centroid += pts[i];
        centroid /= static_cast<double>(n);

        const Vec xr = centroid + (centroid - pts[worst]);
        const double fr = eval(xr);
        if (fr < vals[best]) {
            const Vec xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid)) : Vec(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(xc);
        if (fc < std::min(fr, vals[worst])) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == best) continue;
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    const auto idx = static_cast<std::size_t>(it - vals.begin());
    return {pts[idx], *it, evals};
}

}  // namespace expwalk::detail
