#include "expwalk/kau.hpp"

#include <algorithm>
#include <cmath>

namespace expwalk {

Mat KAUFactors::reconstruct(const WeightPair& w) const {
    return k * w.a(t) * unipotent(M);
}

std::vector<WeightGroup> weight_groups(const WeightPair& w, double tol) {
    std::vector<WeightGroup> groups;
    const auto logs = w.logs(1.0);
    for (int i = 0; i < w.dim(); ++i) {
        const double x = logs[static_cast<std::size_t>(i)];
        // Groups never straddle the two blocks since r > 0 > -s.
        if (!groups.empty() && i != w.m() && std::abs(groups.back().weight - x) <= tol) {
            ++groups.back().size;
        } else {
            groups.push_back({i, 1, x});
        }
    }
    return groups;
}

KAUFactors kau_factorize(const Mat& g, const ParabolicProfile& profile, double tol) {
    const auto& w = profile.weights;
    const int m = profile.m, n = profile.n, d = m + n;
    if (g.rows() != d || g.cols() != d)
        throw FactorizationError("kau_factorize", "dimension does not match the profile");
    if (!all_finite(g))
        throw FactorizationError("kau_factorize", "non-finite entry");
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if (g.bottomLeftCorner(n, m).cwiseAbs().maxCoeff() > tol * scale)
        throw FactorizationError("kau_factorize", "element is not block upper triangular");

    const auto groups = weight_groups(w);
    std::vector<double> t_est;
    for (const auto& G : groups) {
        // The diagonal block containing G: [0, m) or [m, d).
        const int lo = G.begin < m ? 0 : m;
        const int hi = G.begin < m ? m : d;
        for (int i = G.begin; i < G.begin + G.size; ++i)
            for (int j = lo; j < hi; ++j) {
                if (j >= G.begin && j < G.begin + G.size) continue;
                if (std::abs(g(i, j)) > tol * scale)
                    throw FactorizationError("kau_factorize",
                                             "diagonal block mixes weight groups at (" + std::to_string(i) +
                                                 "," + std::to_string(j) + ")");
            }
        const Mat block = g.block(G.begin, G.begin, G.size, G.size);
        Eigen::JacobiSVD<Mat> svd(block);
        const Vec sv = svd.singularValues();
        if (sv.minCoeff() <= 0.0)
            throw FactorizationError("kau_factorize", "singular diagonal block");
        const Vec logs = sv.array().log().matrix();
        const double mean = logs.mean();
        if ((logs.array() - mean).abs().maxCoeff() > tol)
            throw FactorizationError("kau_factorize",
                                     "diagonal block is not a scalar times an orthogonal matrix");
        t_est.push_back(mean / G.weight);
    }
    double t = 0.0;
    for (double x : t_est) t += x;
    t /= static_cast<double>(t_est.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const double expected = t * groups[i].weight;
        const double got = t_est[i] * groups[i].weight;
        if (std::abs(expected - got) > tol * std::max(1.0, std::abs(got)))
            throw FactorizationError("kau_factorize",
                                     "weight groups disagree on t (" + std::to_string(t_est[i]) + " vs " +
                                         std::to_string(t) + ")");
    }

    KAUFactors f;
    f.t = t;
    f.k = Mat::Zero(d, d);
    const auto logs = w.logs(t);
    for (const auto& G : groups)
        for (int i = G.begin; i < G.begin + G.size; ++i)
            for (int j = G.begin; j < G.begin + G.size; ++j)
                f.k(i, j) = g(i, j) * std::exp(-logs[static_cast<std::size_t>(j)]);
    const Mat P1 = g.topLeftCorner(m, m);
    f.M = -P1.partialPivLu().solve(Mat(g.topRightCorner(m, n)));
    return f;
}

Mat conjugated_term(const Mat& M_new, const KAUFactors& prefix, const WeightPair& w) {
    const int m = w.m(), n = w.n();
    const Mat P1inv = w.a_r(-prefix.t) * prefix.k.topLeftCorner(m, m).transpose();
    const Mat P2 = prefix.k.bottomRightCorner(n, n) * w.a_s(-prefix.t);
    return P1inv * M_new * P2;
}

KAUFactors compose(const KAUFactors& left, const KAUFactors& right, const WeightPair& w) {
    KAUFactors out;
    out.k = left.k * right.k;
    out.t = left.t + right.t;
    out.M = conjugated_term(left.M, right, w) + right.M;
    return out;
}

std::vector<KAUFactors> word_factors(const std::vector<Mat>& word, const ParabolicProfile& profile) {
    std::vector<KAUFactors> out;
    out.reserve(word.size());
    for (std::size_t i = 0; i < word.size(); ++i) {
        KAUFactors f;
        try {
            f = kau_factorize(word[i], profile);
        } catch (const FactorizationError& e) {
            throw FactorizationError("word_factors", e.what(), static_cast<long>(i));
        }
        out.push_back(out.empty() ? f : compose(f, out.back(), profile.weights));
    }
    return out;
}

double tail_bound(double M_norm, double T, const WeightPair& w) {
    double worst = 0.0;
    for (double r : w.r)
        for (double s : w.s) worst = std::max(worst, std::exp(-(r + s) * T));
    return M_norm * worst;
}

namespace {

constexpr int kConsecutive = 10;

template <class Next>
ULimit run_limit(Next&& next, const ParabolicProfile& profile, double tol, long n_max) {
    if (!(tol > 0.0) || n_max < 1)
        throw DomainError("kau", "u_limit", "tol must be positive and n_max >= 1");
    KAUFactors prefix;
    int quiet = 0;
    for (long i = 0; i < n_max; ++i) {
        const KAUFactors f = next(i);
        Mat term;
        if (i == 0) {
            term = f.M;
            prefix = f;
        } else {
            term = conjugated_term(f.M, prefix, profile.weights);
            prefix.k = f.k * prefix.k;
            prefix.t += f.t;
            prefix.M += term;
        }
        quiet = term.norm() < tol ? quiet + 1 : 0;
        if (quiet >= kConsecutive) return {prefix.M, i + 1};
    }
    throw LimitConvergenceError("tail terms did not fall below tol within " + std::to_string(n_max) + " steps",
                                prefix.M, n_max);
}

}  // namespace

ULimit u_limit(const std::function<Mat(long)>& next, const ParabolicProfile& profile, double tol,
               long n_max) {
    return run_limit(
        [&](long i) {
            try {
                return kau_factorize(next(i), profile);
            } catch (const FactorizationError& e) {
                throw FactorizationError("u_limit", e.what(), i);
            }
        },
        profile, tol, n_max);
}

ULimit u_limit(const GroupMeasure& mu, std::uint64_t seed, const ParabolicProfile& profile, double tol,
               long n_max) {
    CounterRng rng(seed);
    if (!mu.is_atomic())
        return u_limit([&](long) { return mu.draw(rng); }, profile, tol, n_max);
    std::vector<KAUFactors> atoms;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        try {
            atoms.push_back(kau_factorize(mu.atoms()[i].g, profile));
        } catch (const FactorizationError& e) {
            throw FactorizationError("u_limit", std::string("atom: ") + e.what(), static_cast<long>(i));
        }
    }
    return run_limit([&](long) { return atoms[mu.draw_index(rng)]; }, profile, tol, n_max);
}

double equivariance_residual(const std::vector<Mat>& word, const ParabolicProfile& profile) {
    const auto& w = profile.weights;
    const auto factors = word_factors(word, profile);
    if (factors.empty()) return 0.0;
    const Mat u_full = unipotent(factors.back().M);
    const int d = profile.dim();
    Mat g = Mat::Identity(d, d);
    double worst = 0.0;
    for (std::size_t n = 1; n <= word.size(); ++n) {
        g = word[n - 1] * g;
        const auto& f = factors[n - 1];
        Mat tail = Mat::Zero(profile.m, profile.n);
        if (n < word.size()) {
            const std::vector<Mat> shifted(word.begin() + static_cast<std::ptrdiff_t>(n), word.end());
            tail = word_factors(shifted, profile).back().M;
        }
        const Mat lhs = w.a(f.t) * u_full;
        const Mat rhs = f.k.transpose() * unipotent(tail) * g;
        const double rel = (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1.0, lhs.cwiseAbs().maxCoeff());
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace expwalk
