#include "expwalk/fractal.hpp"

#include "expwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>

namespace expwalk {

MatrixAffinity::MatrixAffinity(Mat a1, Mat a2, Mat b) : A1(std::move(a1)), A2(std::move(a2)), B(std::move(b)) {
    if (A1.rows() != A1.cols() || A2.rows() != A2.cols() || A1.rows() == 0 || A2.rows() == 0)
        throw DomainError("fractal", "MatrixAffinity", "linear parts must be square and non-empty");
    if (B.rows() != A1.rows() || B.cols() != A2.rows())
        throw DomainError("fractal", "MatrixAffinity", "translation must be m x n");
    if (!all_finite(A1) || !all_finite(A2) || !all_finite(B))
        throw DomainError("fractal", "MatrixAffinity", "non-finite entry");
    if (std::abs(A1.determinant()) <= 1e-300 || std::abs(A2.determinant()) <= 1e-300)
        throw DomainError("fractal", "MatrixAffinity", "linear parts must be invertible");
}

MatrixAffinity MatrixAffinity::identity(int m, int n) {
    return MatrixAffinity(Mat::Identity(m, m), Mat::Identity(n, n), Mat::Zero(m, n));
}

AffineIFS::AffineIFS(std::vector<MatrixAffinity> syms, std::vector<double> w, std::optional<WeightPair> wp)
    : symbols(std::move(syms)), weights(std::move(w)), weightpair(std::move(wp)) {
    if (symbols.empty())
        throw DomainError("fractal", "AffineIFS", "no symbols");
    if (weights.empty()) weights.assign(symbols.size(), 1.0 / static_cast<double>(symbols.size()));
    if (weights.size() != symbols.size())
        throw DomainError("fractal", "AffineIFS", "one weight per symbol required");
    double total = 0.0;
    for (double x : weights) {
        if (!(x > 0.0)) throw DomainError("fractal", "AffineIFS", "weights must be positive");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("fractal", "AffineIFS", "weights must sum to 1");
    for (const auto& s : symbols)
        if (s.m() != symbols.front().m() || s.n() != symbols.front().n())
            throw DomainError("fractal", "AffineIFS", "symbols have inconsistent shapes");
    if (weightpair) {
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            const auto c = sponge_check(symbols[i], *weightpair);
            if (!c.ok)
                throw DomainError("fractal", "AffineIFS",
                                  "symbol " + std::to_string(i) + " is not a sponge affinity: " + c.failure);
        }
    }
}

Mat affinity_apply(const MatrixAffinity& phi, const Mat& M) {
    if (M.rows() != phi.m() || M.cols() != phi.n())
        throw DomainError("fractal", "affinity_apply", "shape mismatch");
    return phi.A1 * M * phi.A2 + phi.B;
}

MatrixAffinity affinity_compose(const MatrixAffinity& phi, const MatrixAffinity& psi) {
    return MatrixAffinity(phi.A1 * psi.A1, psi.A2 * phi.A2, phi.A1 * psi.B * phi.A2 + phi.B);
}

namespace {

// Checks that `A` is, group by group, e^{t w} times an orthogonal block and
// appends the per-group t estimates; false on failure.
bool weighted_blocks(const Mat& A, const std::vector<double>& weights, double tol, std::vector<double>& t_out,
                     std::string& failure, const char* label) {
    const int k = static_cast<int>(weights.size());
    int begin = 0;
    while (begin < k) {
        int end = begin + 1;
        while (end < k && std::abs(weights[static_cast<std::size_t>(end)] - weights[static_cast<std::size_t>(begin)]) <= 1e-12)
            ++end;
        for (int i = begin; i < end; ++i)
            for (int j = 0; j < k; ++j) {
                if (j >= begin && j < end) continue;
                if (std::abs(A(i, j)) > tol * std::max(1.0, A.cwiseAbs().maxCoeff())) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "%s entry (%d,%d) couples different weights", label, i, j);
                    failure = buf;
                    return false;
                }
            }
        Eigen::JacobiSVD<Mat> svd(Mat(A.block(begin, begin, end - begin, end - begin)));
        const Vec logs = svd.singularValues().array().log().matrix();
        const double mean = logs.mean();
        if ((logs.array() - mean).abs().maxCoeff() > tol) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s block [%d,%d) has unequal singular values", label, begin, end);
            failure = buf;
            return false;
        }
        t_out.push_back(mean / weights[static_cast<std::size_t>(begin)]);
        begin = end;
    }
    return true;
}

}  // namespace

SpongeCheck sponge_check(const MatrixAffinity& phi, const WeightPair& weights, double tol) {
    SpongeCheck res;
    if (phi.m() != weights.m() || phi.n() != weights.n()) {
        res.failure = "shape does not match the weights";
        return res;
    }
    std::vector<double> ts;
    if (!weighted_blocks(phi.A1, weights.r, tol, ts, res.failure, "A1")) return res;
    if (!weighted_blocks(phi.A2, weights.s, tol, ts, res.failure, "A2")) return res;
    const double t = std::accumulate(ts.begin(), ts.end(), 0.0) / static_cast<double>(ts.size());
    for (double x : ts)
        if (std::abs(x - t) > tol * std::max(1.0, std::abs(t))) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "blocks disagree on t (%.12g vs %.12g)", x, t);
            res.failure = buf;
            return res;
        }
    res.ok = true;
    res.t = t;
    return res;
}

Vec vec_of(const Mat& M) {
    Vec v(M.size());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) v(i * M.cols() + j) = M(i, j);
    return v;
}

Mat mat_of(const Vec& v, int m, int n) {
    Mat M(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = v(i * n + j);
    return M;
}

Mat linear_part_matrix(const MatrixAffinity& phi) {
    const int m = phi.m(), n = phi.n();
    Mat L(m * n, m * n);
    const Mat A2t = phi.A2.transpose();
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) L.block(i * n, k * n, n, n) = phi.A1(i, k) * A2t;
    return L;
}

IfsValidation ifs_validate(const AffineIFS& ifs, int N_max, std::size_t cap, long mc_words, std::uint64_t seed) {
    if (N_max < 1)
        throw DomainError("fractal", "ifs_validate", "N_max must be >= 1");
    IfsValidation res;
    const std::size_t k = ifs.size();
    std::vector<double> cumulative(k);
    std::partial_sum(ifs.weights.begin(), ifs.weights.end(), cumulative.begin());
    for (int N = 1; N <= N_max; ++N) {
        double value = 0.0;
        if (word_count(k, N) <= cap) {
            // Depth-first over words; the norm of M -> X M Y is ||X|| ||Y||.
            std::function<void(int, const Mat&, const Mat&, double)> rec = [&](int depth, const Mat& X,
                                                                                 const Mat& Y, double w) {
                if (depth == N) {
                    value += w * (std::log(spectral_norm(X)) + std::log(spectral_norm(Y)));
                    return;
                }
                for (std::size_t i = 0; i < k; ++i)
                    rec(depth + 1, ifs.symbols[i].A1 * X, Y * ifs.symbols[i].A2, w * ifs.weights[i]);
            };
            rec(0, Mat::Identity(ifs.m(), ifs.m()), Mat::Identity(ifs.n(), ifs.n()), 1.0);
        } else {
            res.monte_carlo = true;
            CounterRng rng(subseed(seed, static_cast<std::uint64_t>(N)));
            for (long s = 0; s < mc_words; ++s) {
                Mat X = Mat::Identity(ifs.m(), ifs.m()), Y = Mat::Identity(ifs.n(), ifs.n());
                for (int d = 0; d < N; ++d) {
                    const double u = rng.uniform() * cumulative.back();
                    const auto i = std::min<std::size_t>(
                        static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                 cumulative.begin()),
                        k - 1);
                    X = ifs.symbols[i].A1 * X;
                    Y = Y * ifs.symbols[i].A2;
                }
                value += std::log(spectral_norm(X)) + std::log(spectral_norm(Y));
            }
            value /= static_cast<double>(mc_words);
        }
        res.values.push_back(value);
        if (value < 0.0 && !res.contracting_on_average) {
            res.contracting_on_average = true;
            res.N_witness = N;
        }
    }
    return res;
}

namespace {

std::size_t draw_symbol(CounterRng& rng, const std::vector<double>& cumulative) {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

double linear_norm(const MatrixAffinity& c) {
    return spectral_norm(c.A1) * spectral_norm(c.A2);
}

}  // namespace

Mat coding_point(const AffineIFS& ifs, const std::vector<std::size_t>& word, double tol, bool periodic) {
    if (word.empty())
        throw DomainError("fractal", "coding_point", "empty word");
    for (auto i : word)
        if (i >= ifs.size()) throw DomainError("fractal", "coding_point", "symbol out of range");
    MatrixAffinity c = MatrixAffinity::identity(ifs.m(), ifs.n());
    for (long depth = 0; depth < kCodingDepthCap; ++depth) {
        if (!periodic && depth >= static_cast<long>(word.size())) return c.B;
        c = affinity_compose(c, ifs.symbols[word[static_cast<std::size_t>(depth) % word.size()]]);
        if (linear_norm(c) < tol) return c.B;
    }
    throw ConvergenceError("fractal", "coding_point", "depth cap reached before the linear part fell below tol");
}

std::vector<Mat> coding_sample(const AffineIFS& ifs, long n_points, double tol, std::uint64_t seed) {
    if (n_points < 0 || !(tol > 0.0))
        throw DomainError("fractal", "coding_sample", "need n_points >= 0 and tol > 0");
    std::vector<double> cumulative(ifs.size());
    std::partial_sum(ifs.weights.begin(), ifs.weights.end(), cumulative.begin());
    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(n_points));
    for (long p = 0; p < n_points; ++p) {
        CounterRng rng(subseed(seed, static_cast<std::uint64_t>(p)));
        MatrixAffinity c = MatrixAffinity::identity(ifs.m(), ifs.n());
        long depth = 0;
        while (linear_norm(c) >= tol) {
            if (++depth > kCodingDepthCap)
                throw ConvergenceError("fractal", "coding_sample", "depth cap 10^4 exceeded");
            c = affinity_compose(c, ifs.symbols[draw_symbol(rng, cumulative)]);
        }
        out.push_back(c.B);
    }
    return out;
}

std::vector<HpMatrix> coding_sample_hp(const AffineIFS& ifs, long n_points, double tol, std::uint64_t seed) {
    if (!ifs.grid)
        throw DomainError("fractal", "coding_sample_hp", "IFS has no exact grid description");
    if (n_points < 0 || !(tol > 0.0))
        throw DomainError("fractal", "coding_sample_hp", "need n_points >= 0 and tol > 0");
    const auto& grid = *ifs.grid;
    const int m = static_cast<int>(grid.bases.size());
    std::vector<double> cumulative(ifs.size());
    std::partial_sum(ifs.weights.begin(), ifs.weights.end(), cumulative.begin());
    // Linear part after k symbols is diag(a_i^{-k}); it is below tol once
    // the largest factor is.
    const int amin = *std::min_element(grid.bases.begin(), grid.bases.end());
    const long depth = static_cast<long>(std::ceil(-std::log(tol) / std::log(static_cast<double>(amin))));
    if (depth > kCodingDepthCap)
        throw ConvergenceError("fractal", "coding_sample_hp", "depth cap 10^4 exceeded");
    std::vector<HpMatrix> out;
    out.reserve(static_cast<std::size_t>(n_points));
    for (long p = 0; p < n_points; ++p) {
        CounterRng rng(subseed(seed, static_cast<std::uint64_t>(p)));
        HpMatrix x(m, 1);
        std::vector<hp_real> scale(static_cast<std::size_t>(m), hp_real(1));
        for (long k = 0; k < depth; ++k) {
            const auto& cell = grid.cells[draw_symbol(rng, cumulative)];
            for (int i = 0; i < m; ++i) {
                scale[static_cast<std::size_t>(i)] /= grid.bases[static_cast<std::size_t>(i)];
                x(i, 0) += scale[static_cast<std::size_t>(i)] * cell[static_cast<std::size_t>(i)];
            }
        }
        out.push_back(std::move(x));
    }
    return out;
}

Admissibility admissibility(const std::vector<int>& bases) {
    Admissibility res;
    const int m = static_cast<int>(bases.size());
    if (m == 0) {
        res.ok = false;
        res.failing = "no bases given";
        return res;
    }
    double total = 0.0;
    for (int a : bases) total += std::log(static_cast<double>(a));
    for (int i = 0; i < m; ++i) {
        const double la = std::log(static_cast<double>(bases[static_cast<std::size_t>(i)]));
        const double others = total - la;
        res.r.push_back((m * la - others) / total);
        if (!res.ok || m == 1) continue;
        const double lower = others / m;
        const double upper = 2.0 * others / (m - 1);
        char buf[256];
        if (!(lower < la)) {
            std::snprintf(buf, sizeof buf,
                          "(1/m) sum_{j!=%d} log a_j < log a_%d fails: %.6f >= %.6f", i + 1, i + 1, lower, la);
            res.ok = false;
            res.failing = buf;
        } else if (!(la < upper)) {
            std::snprintf(buf, sizeof buf,
                          "log a_%d < (2/(m-1)) sum_{j!=%d} log a_j fails: %.6f >= %.6f", i + 1, i + 1, la, upper);
            res.ok = false;
            res.failing = buf;
        }
    }
    return res;
}

AffineIFS sponge_builder(const std::vector<int>& bases, const std::vector<std::vector<int>>& pattern,
                         WeightsMode mode, const std::vector<double>& symbol_weights) {
    const int m = static_cast<int>(bases.size());
    if (m == 0)
        throw DomainError("fractal", "sponge_builder", "no bases");
    for (int a : bases)
        if (a < 2) throw DomainError("fractal", "sponge_builder", "bases must be >= 2");
    if (std::set<int>(bases.begin(), bases.end()).size() != bases.size() && mode == WeightsMode::Corollary)
        throw DomainError("fractal", "sponge_builder", "bases must be pairwise distinct");
    if (pattern.empty())
        throw DomainError("fractal", "sponge_builder", "empty pattern");
    for (const auto& cell : pattern) {
        if (static_cast<int>(cell.size()) != m)
            throw DomainError("fractal", "sponge_builder", "cell dimension does not match the bases");
        for (int i = 0; i < m; ++i)
            if (cell[static_cast<std::size_t>(i)] < 0 || cell[static_cast<std::size_t>(i)] >= bases[static_cast<std::size_t>(i)])
                throw DomainError("fractal", "sponge_builder", "cell digit outside [0, a_i)");
    }
    const auto adm = admissibility(bases);
    if (mode == WeightsMode::Corollary && !adm.ok)
        throw DomainError("fractal", "sponge_builder", "admissibility violated: " + adm.failing);

    double total = 0.0;
    for (int a : bases) total += std::log(static_cast<double>(a));
    const double t = -total / (m + 1);
    std::vector<MatrixAffinity> syms;
    for (const auto& cell : pattern) {
        Mat A1 = Mat::Zero(m, m), B(m, 1);
        for (int i = 0; i < m; ++i) {
            const double a = bases[static_cast<std::size_t>(i)];
            A1(i, i) = std::exp(-t) / a;
            B(i, 0) = cell[static_cast<std::size_t>(i)] / a;
        }
        Mat A2(1, 1);
        A2(0, 0) = std::exp(t);
        syms.emplace_back(std::move(A1), std::move(A2), std::move(B));
    }
    std::optional<WeightPair> wp;
    bool valid = true;
    for (double r : adm.r) valid = valid && r > 0.0 && r <= 1.0;
    if (valid) {
        // Renormalize rounding so the pair validates at 1e-12.
        std::vector<double> r = adm.r;
        const double sum = std::accumulate(r.begin(), r.end(), 0.0);
        for (auto& x : r) x /= sum;
        wp = WeightPair(std::move(r), {1.0});
    }
    AffineIFS ifs(std::move(syms), symbol_weights, wp);
    ifs.grid = GridData{bases, pattern};
    return ifs;
}

Mat ahat(const MatrixAffinity& phi) {
    const int m = phi.m(), n = phi.n();
    Mat A = Mat::Zero(m + n, m + n);
    A.topLeftCorner(m, m) = phi.A1;
    A.bottomRightCorner(n, n) = phi.A2.inverse();
    return A;
}

Mat embed_to_pgl(const MatrixAffinity& phi) {
    const int m = phi.m(), n = phi.n();
    Mat inv = Mat::Zero(m + n, m + n);
    inv.topLeftCorner(m, m) = phi.A1.inverse();
    inv.bottomRightCorner(n, n) = phi.A2;
    Mat g = inv * unipotent(phi.B);
    const double det = g.determinant();
    return g / std::pow(std::abs(det), 1.0 / (m + n));
}

GroupMeasure ifs_to_measure(const AffineIFS& ifs) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < ifs.size(); ++i) atoms.push_back({embed_to_pgl(ifs.symbols[i]), ifs.weights[i]});
    GroupMeasure mu(std::move(atoms));
    if (ifs.weightpair) mu.set_profile(ParabolicProfile(*ifs.weightpair));
    return mu;
}

namespace {

// Smallest subspace containing the columns of V and invariant under all Ls.
Mat krylov_closure(Mat V, const std::vector<Mat>& Ls, int D) {
    auto orth = [&](const Mat& X) -> Mat {
        if (X.cols() == 0) return Mat(D, 0);
        Eigen::JacobiSVD<Mat> svd(X, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-9 * std::max(1.0, sv(0))) ++rank;
        return svd.matrixU().leftCols(rank);
    };
    V = orth(V);
    while (true) {
        Mat ext(D, V.cols() * (1 + static_cast<Eigen::Index>(Ls.size())));
        ext.leftCols(V.cols()) = V;
        for (std::size_t i = 0; i < Ls.size(); ++i)
            ext.middleCols(V.cols() * (1 + static_cast<Eigen::Index>(i)), V.cols()) = Ls[i] * V;
        Mat next = orth(ext);
        if (next.cols() == V.cols()) return V;
        V = next;
    }
}

}  // namespace

Irreducibility irreducibility_check(const AffineIFS& ifs) {
    const int D = ifs.m() * ifs.n();
    std::vector<Mat> Ls;
    std::vector<Vec> bs;
    for (const auto& s : ifs.symbols) {
        Ls.push_back(linear_part_matrix(s));
        bs.push_back(vec_of(s.B));
    }
    const Mat I = Mat::Identity(D, D);
    // Fixed points of symbols and of length-two words; every invariant
    // affine subspace contains them.
    std::vector<Vec> fixed;
    auto add_fixed = [&](const Mat& L, const Vec& b) {
        Eigen::FullPivLU<Mat> lu(I - L);
        if (lu.rank() == D) fixed.push_back(lu.solve(b));
    };
    for (std::size_t i = 0; i < Ls.size(); ++i) add_fixed(Ls[i], bs[i]);
    for (std::size_t i = 0; i < Ls.size(); ++i)
        for (std::size_t j = 0; j < Ls.size(); ++j)
            if (i != j) add_fixed(Ls[i] * Ls[j], Ls[i] * bs[j] + bs[i]);

    Irreducibility res;
    if (fixed.empty()) {
        res.verdict = Irreducibility::Verdict::Inconclusive;
        res.detail = "no symbol has an isolated fixed point";
        return res;
    }
    const Vec p = fixed.front();
    Mat V(D, static_cast<Eigen::Index>(fixed.size()) - 1);
    for (std::size_t k = 1; k < fixed.size(); ++k) V.col(static_cast<Eigen::Index>(k) - 1) = fixed[k] - p;
    V = krylov_closure(V, Ls, D);
    while (V.cols() < D) {
        // p + V is invariant iff each image of p stays in it.
        Mat extra(D, static_cast<Eigen::Index>(Ls.size()));
        for (std::size_t i = 0; i < Ls.size(); ++i) extra.col(static_cast<Eigen::Index>(i)) = Ls[i] * p + bs[i] - p;
        const Mat residual = extra - V * (V.transpose() * extra);
        if (residual.cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, extra.cwiseAbs().maxCoeff())) break;
        Mat joined(D, V.cols() + extra.cols());
        joined << V, extra;
        V = krylov_closure(joined, Ls, D);
    }
    if (V.cols() == D) {
        res.verdict = Irreducibility::Verdict::Irreducible;
        res.detail = "smallest invariant affine subspace through the fixed points is the whole space";
        return res;
    }
    res.verdict = Irreducibility::Verdict::Reducible;
    res.point = p;
    res.basis = V;
    res.detail = "invariant affine subspace of dimension " + std::to_string(V.cols());
    return res;
}

std::string to_string(Irreducibility::Verdict v) {
    switch (v) {
    case Irreducibility::Verdict::Irreducible: return "irreducible";
    case Irreducibility::Verdict::Reducible: return "reducible";
    case Irreducibility::Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

nlohmann::json ifs_to_json(const AffineIFS& ifs) {
    nlohmann::json j;
    j["m"] = ifs.m();
    j["n"] = ifs.n();
    j["symbols"] = nlohmann::json::array();
    for (const auto& s : ifs.symbols)
        j["symbols"].push_back({{"A1", matrix_to_json(s.A1)}, {"A2", matrix_to_json(s.A2)}, {"B", matrix_to_json(s.B)}});
    j["weights"] = nlohmann::json::array();
    for (double w : ifs.weights) j["weights"].push_back(exact_decimal(w));
    if (ifs.weightpair) j["weightpair"] = {{"r", ifs.weightpair->r}, {"s", ifs.weightpair->s}};
    if (ifs.grid) j["grid"] = {{"bases", ifs.grid->bases}, {"cells", ifs.grid->cells}};
    return j;
}

AffineIFS ifs_from_json(const nlohmann::json& j) {
    if (!j.contains("symbols") || !j["symbols"].is_array())
        throw DomainError("fractal", "ifs_from_json", "missing symbols array");
    std::vector<MatrixAffinity> syms;
    for (const auto& s : j["symbols"])
        syms.emplace_back(matrix_from_json(s.at("A1")), matrix_from_json(s.at("A2")), matrix_from_json(s.at("B")));
    std::vector<double> w;
    if (j.contains("weights"))
        for (const auto& x : j["weights"]) w.push_back(matrix_from_json(x)(0, 0));
    std::optional<WeightPair> wp;
    if (j.contains("weightpair"))
        wp = WeightPair(j["weightpair"].at("r").get<std::vector<double>>(),
                        j["weightpair"].at("s").get<std::vector<double>>());
    AffineIFS ifs(std::move(syms), std::move(w), std::move(wp));
    if (j.contains("m") && j["m"].get<int>() != ifs.m())
        throw DomainError("fractal", "ifs_from_json", "m does not match the symbols");
    if (j.contains("n") && j["n"].get<int>() != ifs.n())
        throw DomainError("fractal", "ifs_from_json", "n does not match the symbols");
    if (j.contains("grid"))
        ifs.grid = GridData{j["grid"].at("bases").get<std::vector<int>>(),
                            j["grid"].at("cells").get<std::vector<std::vector<int>>>()};
    return ifs;
}

AffineIFS load_ifs(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DomainError("fractal", "load_ifs", "cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("fractal", "load_ifs", std::string("invalid JSON: ") + e.what());
    }
    return ifs_from_json(j);
}

}  // namespace expwalk
