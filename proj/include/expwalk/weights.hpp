#pragma once

#include "expwalk/linalg.hpp"

#include <vector>

namespace expwalk {

/// Weights (r, s) of the diagonal flow a(t) = diag(e^{r_1 t}.., e^{-s_1 t}..).
struct WeightPair {
    std::vector<double> r;
    std::vector<double> s;

    WeightPair() = default;
    WeightPair(std::vector<double> r_, std::vector<double> s_);

    /// Unit weights r = (1/m, ...), s = (1/n, ...).
    static WeightPair uniform(int m, int n);

    int m() const { return static_cast<int>(r.size()); }
    int n() const { return static_cast<int>(s.size()); }
    int dim() const { return m() + n(); }

    /// Diagonal of a(t) in log scale.
    std::vector<double> logs(double t) const;
    Mat a(double t) const;
    /// a_r(t) = diag(e^{r_i t}) and a_s(t) = diag(e^{s_j t}), the two halves.
    Mat a_r(double t) const;
    Mat a_s(double t) const;
    /// Weights of a(1) on the unipotent block: r_i + s_j.
    double min_root_weight() const;
    double max_root_weight() const;
};

/// Block sizes (m, n) with flow weights; describes the parabolic P = K'A'U.
struct ParabolicProfile {
    int m = 0;
    int n = 0;
    WeightPair weights;

    ParabolicProfile() = default;
    explicit ParabolicProfile(WeightPair w);

    int dim() const { return m + n; }
};

/// u_M = [[I, -M], [0, I]].
Mat unipotent(const Mat& M);

/// Checks that g is block upper triangular for (m, n) within `tol`.
bool is_block_upper(const Mat& g, int m, double tol = 1e-9);

}  // namespace expwalk
