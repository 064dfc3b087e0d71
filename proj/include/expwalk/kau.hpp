#pragma once

// Factorization of block upper-triangular elements as g = k a(t) u_M with k
// in the compact centralizer K', a(t) the weighted diagonal flow and u_M
// unipotent, together with the dynamics of these factors along words.

#include "expwalk/error.hpp"
#include "expwalk/linalg.hpp"
#include "expwalk/measures.hpp"
#include "expwalk/weights.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace expwalk {

struct KAUFactors {
    Mat k;          // block-diagonal orthogonal, constant on weight groups
    double t = 0.0; // a = a(t); also lambda(g)
    Mat M;          // m x n unipotent parameter

    Mat reconstruct(const WeightPair& w) const;
};

/// Coordinates of a(t) sharing one weight; K' is orthogonal on each group.
struct WeightGroup {
    int begin = 0;
    int size = 0;
    double weight = 0.0;  // r_i on the first block, -s_j on the second
};

std::vector<WeightGroup> weight_groups(const WeightPair& w, double tol = 1e-12);

/// Raised when g is not in P = K'A'U.
class FactorizationError : public DomainError {
public:
    FactorizationError(const std::string& op, const std::string& what, long index = -1)
        : DomainError("kau", op, index >= 0 ? what + " (word index " + std::to_string(index) + ")" : what),
          index_(index) {}
    long index() const noexcept { return index_; }

private:
    long index_;
};

/// Raised by u_limit; carries the last partial product parameter.
class LimitConvergenceError : public ConvergenceError {
public:
    LimitConvergenceError(const std::string& what, Mat partial, long steps)
        : ConvergenceError("kau", "u_limit", what, "steps=" + std::to_string(steps)),
          partial_M(std::move(partial)), steps_used(steps) {}
    Mat partial_M;
    long steps_used;
};

KAUFactors kau_factorize(const Mat& g, const ParabolicProfile& profile, double tol = 1e-7);

/// Factors of g * (k a(T) u_M) given factors of g and of the right operand;
/// avoids forming long products explicitly.
KAUFactors compose(const KAUFactors& left, const KAUFactors& right, const WeightPair& w);

/// The conjugated unipotent term P^{-1} u_{M'} P contributed by a new left
/// factor with parameter M' on top of prefix factors `prefix`.
Mat conjugated_term(const Mat& M_new, const KAUFactors& prefix, const WeightPair& w);

/// Factors of the prefix products g_1, g_2 g_1, ..., g_n ... g_1.
std::vector<KAUFactors> word_factors(const std::vector<Mat>& word, const ParabolicProfile& profile);

struct ULimit {
    Mat M;
    long n_used = 0;
};

/// Generic driver: `next(i)` returns the i-th word element (0-based).
/// Stops once the conjugated tail term has Frobenius norm < tol for 10
/// consecutive steps.
ULimit u_limit(const std::function<Mat(long)>& next, const ParabolicProfile& profile, double tol,
               long n_max);

/// Random word from mu with the given seed.
ULimit u_limit(const GroupMeasure& mu, std::uint64_t seed, const ParabolicProfile& profile,
               double tol, long n_max);

/// max over n of the relative residual of a_{w,n} u_w = k_{w,n}^{-1} u_{T^n w} g_{w,n},
/// with u_w and u_{T^n w} the parameters of the full and shifted finite words.
double equivariance_residual(const std::vector<Mat>& word, const ParabolicProfile& profile);

/// Upper bound for the tail term at total flow time T: ||M|| * max_{i,j} exp(-(r_i+s_j) T).
double tail_bound(double M_norm, double T, const WeightPair& w);

}  // namespace expwalk
