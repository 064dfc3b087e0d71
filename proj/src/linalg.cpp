#include "expwalk/linalg.hpp"

#include "expwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace expwalk {

const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

bool all_finite(const Mat& m) {
    return m.allFinite();
}

SquareMatrix::SquareMatrix(Mat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw DomainError("linalg", "SquareMatrix", "matrix must be square and non-empty");
    if (!all_finite(m_))
        throw DomainError("linalg", "SquareMatrix", "non-finite entry");
}

SquareMatrix SquareMatrix::identity(int d) {
    return SquareMatrix(Mat::Identity(d, d));
}

SquareMatrix SquareMatrix::special_linear(Mat m) {
    SquareMatrix s(std::move(m));
    if (!s.is_special_linear())
        throw DomainError("linalg", "SquareMatrix", "determinant is not +-1");
    return s;
}

SquareMatrix SquareMatrix::diagonal(std::span<const double> entries) {
    Mat m = Mat::Zero(static_cast<Eigen::Index>(entries.size()),
                      static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = entries[i];
    return SquareMatrix(std::move(m));
}

bool SquareMatrix::is_special_linear(double tol) const {
    return std::abs(std::abs(det()) - 1.0) < tol;
}

CartanVector::CartanVector(std::vector<double> logs) : logs_(std::move(logs)) {
    if (logs_.empty())
        throw DomainError("linalg", "CartanVector", "empty");
    double sum = 0.0, scale = 1.0;
    for (double x : logs_) {
        if (!std::isfinite(x))
            throw DomainError("linalg", "CartanVector", "non-finite entry");
        sum += x;
        scale = std::max(scale, std::abs(x));
    }
    if (std::abs(sum) >= default_tolerances().abs * scale)
        throw DomainError("linalg", "CartanVector",
                          "entries must sum to zero (got " + std::to_string(sum) + ")");
}

std::size_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::size_t r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
    return r;
}

std::vector<std::vector<int>> k_subsets(int d, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > d) return out;
    std::vector<int> s(static_cast<std::size_t>(k));
    std::iota(s.begin(), s.end(), 0);
    while (true) {
        out.push_back(s);
        int i = k - 1;
        while (i >= 0 && s[static_cast<std::size_t>(i)] == d - k + i) --i;
        if (i < 0) break;
        ++s[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

double laplace_det(const Mat& a) {
    const auto n = a.rows();
    if (n == 0) return 1.0;
    if (n == 1) return a(0, 0);
    if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    double det = 0.0;
    Mat minor(n - 1, n - 1);
    for (Eigen::Index c = 0; c < n; ++c) {
        if (a(0, c) == 0.0) continue;
        for (Eigen::Index i = 1; i < n; ++i) {
            Eigen::Index cc = 0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == c) continue;
                minor(i - 1, cc++) = a(i, j);
            }
        }
        const double sign = (c % 2 == 0) ? 1.0 : -1.0;
        det += sign * a(0, c) * laplace_det(minor);
    }
    return det;
}

namespace {

Mat submatrix(const Mat& g, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g(rows[i], cols[j]);
    return s;
}

}  // namespace

ExteriorVector wedge(const Mat& vectors) {
    const int d = static_cast<int>(vectors.rows());
    const int k = static_cast<int>(vectors.cols());
    if (k < 0 || k > d)
        throw DomainError("linalg", "wedge", "grade out of range");
    const auto subsets = k_subsets(d, k);
    std::vector<int> cols(static_cast<std::size_t>(k));
    std::iota(cols.begin(), cols.end(), 0);
    ExteriorVector v{d, k, Vec(static_cast<Eigen::Index>(subsets.size()))};
    for (std::size_t i = 0; i < subsets.size(); ++i)
        v.coords(static_cast<Eigen::Index>(i)) = laplace_det(submatrix(vectors, subsets[i], cols));
    return v;
}

Mat wedge_power(const Mat& g, int k) {
    const int d = static_cast<int>(g.rows());
    if (g.rows() != g.cols())
        throw DomainError("linalg", "wedge_power", "matrix must be square");
    if (k < 1 || k > d)
        throw DomainError("linalg", "wedge_power",
                          "grade " + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
    const auto subsets = k_subsets(d, k);
    const auto n = static_cast<Eigen::Index>(subsets.size());
    Mat w(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            w(i, j) = laplace_det(submatrix(g, subsets[static_cast<std::size_t>(i)],
                                            subsets[static_cast<std::size_t>(j)]));
    return w;
}

std::vector<WeightSpace> weight_decomposition(const CartanVector& a, int k, const Tolerances& tol) {
    const int d = a.dim();
    if (k < 0 || k > d)
        throw DomainError("linalg", "weight_decomposition", "grade out of range");
    std::vector<std::pair<double, std::vector<int>>> entries;
    for (auto& s : k_subsets(d, k)) {
        double w = 0.0;
        for (int i : s) w += a[static_cast<std::size_t>(i)];
        entries.emplace_back(w, std::move(s));
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<WeightSpace> out;
    for (auto& [w, s] : entries) {
        if (!out.empty() && std::abs(out.back().weight - w) <= tol.abs * std::max(1.0, std::abs(w))) {
            out.back().basis.push_back(std::move(s));
        } else {
            out.push_back({w, {std::move(s)}});
        }
    }
    // Snap exact zero sums so that the identity reports weight 0.
    for (auto& ws : out)
        if (std::abs(ws.weight) <= tol.abs) ws.weight = 0.0;
    return out;
}

double spectral_norm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

OperatorNorms operator_norms(const Mat& g) {
    if (g.rows() != g.cols())
        throw DomainError("linalg", "operator_norms", "matrix must be square");
    if (std::abs(g.determinant()) <= 1e-12)
        throw DomainError("linalg", "operator_norms", "matrix is not invertible");
    Eigen::JacobiSVD<Mat> svd(g);
    const auto& sv = svd.singularValues();
    OperatorNorms n;
    n.norm = sv(0);
    n.inv_norm = 1.0 / sv(sv.size() - 1);
    n.N = std::max(n.norm, n.inv_norm);
    return n;
}

std::vector<Mat> sl_basis(int d) {
    std::vector<Mat> basis;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            Mat e = Mat::Zero(d, d);
            e(i, j) = 1.0;
            basis.push_back(std::move(e));
        }
    for (int k = 1; k < d; ++k) {
        Mat h = Mat::Zero(d, d);
        const double c = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
        for (int i = 0; i < k; ++i) h(i, i) = c;
        h(k, k) = -k * c;
        basis.push_back(std::move(h));
    }
    return basis;
}

Mat adjoint_matrix(const Mat& g) {
    const int d = static_cast<int>(g.rows());
    const auto basis = sl_basis(d);
    const Mat ginv = g.inverse();
    const auto n = static_cast<Eigen::Index>(basis.size());
    Mat ad(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const Mat y = g * basis[static_cast<std::size_t>(c)] * ginv;
        for (Eigen::Index r = 0; r < n; ++r)
            ad(r, c) = (basis[static_cast<std::size_t>(r)].array() * y.array()).sum();
    }
    return ad;
}

Mat null_space(const Mat& a, double rel_threshold) {
    const auto cols = a.cols();
    if (a.rows() == 0) return Mat::Identity(cols, cols);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = rel_threshold * std::max(1.0, sv.size() ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    return svd.matrixV().rightCols(cols - rank);
}

Mat orthogonal_complement(const Mat& q, int ambient_dim) {
    if (q.cols() == 0) return Mat::Identity(ambient_dim, ambient_dim);
    return null_space(q.transpose());
}

}  // namespace expwalk
