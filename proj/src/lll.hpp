#pragma once

// LLL over an arbitrary real type. Columns are stored as separate vectors
// so the same code runs on double and on the extended-precision type.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace expwalk::detail {

template <class Real>
using Columns = std::vector<std::vector<Real>>;

template <class Real>
Real dot(const std::vector<Real>& a, const std::vector<Real>& b) {
    Real s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <class Real>
void gram_schmidt(const Columns<Real>& b, Columns<Real>& mu, std::vector<Real>& B) {
    const std::size_t n = b.size();
    Columns<Real> bstar(b);
    mu.assign(n, std::vector<Real>(n, Real(0)));
    B.assign(n, Real(0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            mu[i][j] = dot(b[i], bstar[j]) / B[j];
            for (std::size_t r = 0; r < bstar[i].size(); ++r) bstar[i][r] -= mu[i][j] * bstar[j][r];
        }
        B[i] = dot(bstar[i], bstar[i]);
    }
}

/// Reduces `b` in place with Lovasz parameter `delta`. When `T` is given it
/// receives the integral transform (column j of T expresses new b_j in the
/// input basis). Returns false if a Gram-Schmidt norm vanished.
template <class Real>
bool lll(Columns<Real>& b, double delta, Columns<double>* T = nullptr, long max_iter = 1'000'000) {
    using std::round;
    const std::size_t n = b.size();
    if (T) {
        T->assign(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) (*T)[i][i] = 1.0;
    }
    if (n < 2) return true;
    Columns<Real> mu;
    std::vector<Real> B;
    gram_schmidt(b, mu, B);
    for (const auto& x : B)
        if (!(x > 0)) return false;
    std::size_t k = 1;
    long iter = 0;
    while (k < n) {
        if (++iter > max_iter) return false;
        for (std::size_t jj = k; jj-- > 0;) {
            const Real q = round(mu[k][jj]);
            if (q == 0) continue;
            for (std::size_t r = 0; r < b[k].size(); ++r) b[k][r] -= q * b[jj][r];
            if (T) {
                const double qd = static_cast<double>(q);
                for (std::size_t r = 0; r < n; ++r) (*T)[k][r] -= qd * (*T)[jj][r];
            }
            for (std::size_t l = 0; l < jj; ++l) mu[k][l] -= q * mu[jj][l];
            mu[k][jj] -= q;
        }
        const Real lhs = B[k];
        const Real rhs = (Real(delta) - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1];
        if (lhs >= rhs) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            if (T) std::swap((*T)[k], (*T)[k - 1]);
            gram_schmidt(b, mu, B);
            for (const auto& x : B)
                if (!(x > 0)) return false;
            k = k > 1 ? k - 1 : 1;
        }
    }
    return true;
}

}  // namespace expwalk::detail
