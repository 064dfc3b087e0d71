#include "expwalk/weights.hpp"

#include "expwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace expwalk {

namespace {

void check_side(const std::vector<double>& w, const char* name) {
    if (w.empty())
        throw DomainError("dioph", "WeightPair", std::string(name) + " is empty");
    for (double x : w)
        if (!(x > 0.0 && x <= 1.0 + 1e-12))
            throw DomainError("dioph", "WeightPair", std::string(name) + " entries must lie in (0,1]");
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12)
        throw DomainError("dioph", "WeightPair", std::string(name) + " must sum to 1");
}

}  // namespace

WeightPair::WeightPair(std::vector<double> r_, std::vector<double> s_)
    : r(std::move(r_)), s(std::move(s_)) {
    check_side(r, "r");
    check_side(s, "s");
}

WeightPair WeightPair::uniform(int m, int n) {
    if (m < 1 || n < 1)
        throw DomainError("dioph", "WeightPair", "block sizes must be positive");
    return WeightPair(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m),
                      std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

std::vector<double> WeightPair::logs(double t) const {
    std::vector<double> out;
    out.reserve(r.size() + s.size());
    for (double x : r) out.push_back(x * t);
    for (double x : s) out.push_back(-x * t);
    return out;
}

Mat WeightPair::a(double t) const {
    const auto l = logs(t);
    Mat out = Mat::Zero(dim(), dim());
    for (int i = 0; i < dim(); ++i) out(i, i) = std::exp(l[static_cast<std::size_t>(i)]);
    return out;
}

Mat WeightPair::a_r(double t) const {
    Mat out = Mat::Zero(m(), m());
    for (int i = 0; i < m(); ++i) out(i, i) = std::exp(r[static_cast<std::size_t>(i)] * t);
    return out;
}

Mat WeightPair::a_s(double t) const {
    Mat out = Mat::Zero(n(), n());
    for (int j = 0; j < n(); ++j) out(j, j) = std::exp(s[static_cast<std::size_t>(j)] * t);
    return out;
}

double WeightPair::min_root_weight() const {
    return *std::min_element(r.begin(), r.end()) + *std::min_element(s.begin(), s.end());
}

double WeightPair::max_root_weight() const {
    return *std::max_element(r.begin(), r.end()) + *std::max_element(s.begin(), s.end());
}

ParabolicProfile::ParabolicProfile(WeightPair w) : m(w.m()), n(w.n()), weights(std::move(w)) {}

Mat unipotent(const Mat& M) {
    const auto m = M.rows(), n = M.cols();
    Mat u = Mat::Identity(m + n, m + n);
    u.topRightCorner(m, n) = -M;
    return u;
}

bool is_block_upper(const Mat& g, int m, double tol) {
    const auto d = g.rows();
    const auto n = d - m;
    if (n <= 0 || m <= 0) return false;
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    return g.bottomLeftCorner(n, m).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace expwalk
