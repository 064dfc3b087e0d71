#pragma once

// Small-dimension dense linear algebra: exterior powers of the standard
// representation, the adjoint representation of sl_d, weight spaces of
// diagonal elements and operator norms.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace expwalk {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Module-wide numerical tolerances.
struct Tolerances {
    double rel = 1e-9;   // relative agreement (functoriality, determinants)
    double abs = 1e-12;  // absolute (trace-zero, weight grouping)
};

const Tolerances& default_tolerances();

/// A d x d real matrix with finite entries. Construction validates; the
/// special-linear variant additionally requires |det| = 1 within 1e-9.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(Mat m);

    static SquareMatrix identity(int d);
    static SquareMatrix special_linear(Mat m);
    static SquareMatrix diagonal(std::span<const double> entries);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Mat& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    double det() const { return m_.determinant(); }
    bool is_special_linear(double tol = 1e-9) const;

    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
        return SquareMatrix(a.m_ * b.m_);
    }

private:
    Mat m_;
};

/// Trace-zero diagonal element of sl_d, stored as its diagonal in log scale.
class CartanVector {
public:
    explicit CartanVector(std::vector<double> logs);

    int dim() const { return static_cast<int>(logs_.size()); }
    const std::vector<double>& logs() const { return logs_; }
    double operator[](std::size_t i) const { return logs_[i]; }

private:
    std::vector<double> logs_;
};

/// Lexicographically sorted k-subsets of {0, ..., d-1}; this ordering indexes
/// the coordinates of the k-th exterior power throughout the library.
std::vector<std::vector<int>> k_subsets(int d, int k);

/// Binomial coefficient as a size.
std::size_t binomial(int n, int k);

/// Determinant by Laplace expansion along the first row.
double laplace_det(const Mat& a);

/// A vector in the k-th exterior power of R^d.
struct ExteriorVector {
    int dim = 0;
    int grade = 0;
    Vec coords;

    double norm() const { return coords.norm(); }
};

/// Pure wedge v_1 ^ ... ^ v_k of the columns of `vectors` (d x k).
ExteriorVector wedge(const Mat& vectors);

/// Matrix of g acting on the k-th exterior power; entries are k x k minors.
Mat wedge_power(const Mat& g, int k);
inline Mat wedge_power(const SquareMatrix& g, int k) { return wedge_power(g.mat(), k); }

/// One weight of exp(a) on the k-th exterior power, with the standard wedge
/// basis elements (as index subsets) spanning its weight space.
struct WeightSpace {
    double weight = 0.0;
    std::vector<std::vector<int>> basis;
};

/// Weights in log scale, sorted descending.
std::vector<WeightSpace> weight_decomposition(const CartanVector& a, int k,
                                              const Tolerances& tol = default_tolerances());

struct OperatorNorms {
    double norm = 0.0;      // largest singular value of g
    double inv_norm = 0.0;  // largest singular value of g^{-1}
    double N = 0.0;         // max of the two
};

OperatorNorms operator_norms(const Mat& g);
inline OperatorNorms operator_norms(const SquareMatrix& g) { return operator_norms(g.mat()); }

/// Spectral norm.
double spectral_norm(const Mat& a);

/// Frobenius-orthonormal basis of sl_d: E_ij (i != j, row-major order), then
/// the Helmert basis of trace-zero diagonals.
std::vector<Mat> sl_basis(int d);

/// Matrix of Ad(g): X -> g X g^{-1} on sl_d in the sl_basis coordinates.
Mat adjoint_matrix(const Mat& g);

/// Orthonormal basis (columns) of the kernel of `a`, singular values below
/// `rel_threshold * max(1, sigma_max)` counted as zero.
Mat null_space(const Mat& a, double rel_threshold = 1e-8);

/// Orthonormal basis of the orthogonal complement of span(columns of q).
Mat orthogonal_complement(const Mat& q, int ambient_dim);

bool all_finite(const Mat& m);

}  // namespace expwalk
