#include "expwalk/dioph.hpp"

#include "expwalk/error.hpp"
#include "expwalk/lattices.hpp"
#include "lll.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace expwalk {

HpMatrix to_hp(const Mat& M) {
    HpMatrix h(static_cast<int>(M.rows()), static_cast<int>(M.cols()));
    for (int i = 0; i < h.rows; ++i)
        for (int j = 0; j < h.cols; ++j) h(i, j) = M(i, j);
    return h;
}

Mat to_double(const HpMatrix& M) {
    Mat d(M.rows, M.cols);
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j) d(i, j) = static_cast<double>(M(i, j));
    return d;
}

namespace {

void check_shape(int rows, int cols, const WeightPair& w, const char* op) {
    if (rows != w.m() || cols != w.n())
        throw DomainError("dioph", op, "M must be m x n for the weights");
}

template <class Entry>
BruteQuality brute_impl(int m, int n, Entry&& entry, const WeightPair& w, double T_max, double T_min) {
    using std::abs;
    using std::round;
    using std::pow;
    if (!(T_max >= 1.0))
        throw DomainError("dioph", "brute_force_quality", "T_max must be >= 1");
    if (T_min < 0.0) T_min = std::sqrt(T_max);
    std::vector<long> bound(static_cast<std::size_t>(n));
    double space = 1.0;
    for (int j = 0; j < n; ++j) {
        bound[static_cast<std::size_t>(j)] =
            static_cast<long>(std::floor(std::pow(T_max, w.s[static_cast<std::size_t>(j)]) + 1e-9));
        space *= 2.0 * static_cast<double>(bound[static_cast<std::size_t>(j)]) + 1.0;
    }
    if (space > kBruteCap)
        throw CapError("dioph", "brute_force_quality", "search space exceeds 10^8 integer vectors");

    BruteQuality best;
    best.quality = std::numeric_limits<double>::infinity();
    std::vector<long> q(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) q[static_cast<std::size_t>(j)] = -bound[static_cast<std::size_t>(j)];
    while (true) {
        double H = 0.0;
        bool zero = true;
        for (int j = 0; j < n; ++j) {
            const long qj = q[static_cast<std::size_t>(j)];
            if (qj != 0) zero = false;
            H = std::max(H, std::pow(std::abs(static_cast<double>(qj)), 1.0 / w.s[static_cast<std::size_t>(j)]));
        }
        if (!zero && H >= T_min * (1.0 - 1e-12) && H <= T_max * (1.0 + 1e-12)) {
            double err = 0.0;
            std::vector<long> p(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) {
                auto x = entry(i, 0) * q[0];
                for (int j = 1; j < n; ++j) x += entry(i, j) * q[static_cast<std::size_t>(j)];
                const auto pi = round(x);
                p[static_cast<std::size_t>(i)] = static_cast<long>(pi);
                const double e = static_cast<double>(abs(x - pi));
                err = std::max(err, std::pow(e, 1.0 / w.r[static_cast<std::size_t>(i)]));
            }
            const double val = err * H;
            if (val < best.quality) {
                best.quality = val;
                best.q = q;
                best.p = p;
            }
        }
        int j = n - 1;
        while (j >= 0 && q[static_cast<std::size_t>(j)] == bound[static_cast<std::size_t>(j)]) {
            q[static_cast<std::size_t>(j)] = -bound[static_cast<std::size_t>(j)];
            --j;
        }
        if (j < 0) break;
        ++q[static_cast<std::size_t>(j)];
    }
    if (!std::isfinite(best.quality))
        throw DomainError("dioph", "brute_force_quality", "the height window contains no integer vector");
    return best;
}

}  // namespace

BruteQuality brute_force_quality(const Mat& M, const WeightPair& w, double T_max, double T_min) {
    check_shape(static_cast<int>(M.rows()), static_cast<int>(M.cols()), w, "brute_force_quality");
    return brute_impl(static_cast<int>(M.rows()), static_cast<int>(M.cols()),
                      [&](int i, int j) { return M(i, j); }, w, T_max, T_min);
}

BruteQuality brute_force_quality(const HpMatrix& M, const WeightPair& w, double T_max, double T_min) {
    check_shape(M.rows, M.cols, w, "brute_force_quality");
    return brute_impl(M.rows, M.cols, [&](int i, int j) { return M(i, j); }, w, T_max, T_min);
}

double FlowTrace::inf_minima(double t_lo, double t_hi) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] >= t_lo - 1e-12 && t[k] <= t_hi + 1e-12) best = std::min(best, minima[k]);
    return best;
}

namespace {

// Systole of a reduced basis; for nearly degenerate lattices (where exact
// enumeration refuses) the shortest reduced vector is used instead.
double systole_sup(const Mat& reduced) {
    try {
        return shortest_vector_of(reduced, Norm::Sup).length;
    } catch (const ConditioningError&) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < reduced.cols(); ++j) best = std::min(best, reduced.col(j).cwiseAbs().maxCoeff());
        return best;
    }
}

constexpr long kFlowSiegelCap = 1'000'000;

// Siegel count, saturating at the cap; tiny systoles give a lower bound
// from the multiples of the shortest vector.
double siegel_saturating(const Mat& reduced, double R, double systole) {
    const double d = static_cast<double>(reduced.rows());
    if (systole < 1e-3) return std::min<double>(kFlowSiegelCap, 2.0 * std::floor(R / (std::sqrt(d) * systole)));
    try {
        return static_cast<double>(siegel_count_of(reduced, R, kFlowSiegelCap));
    } catch (const Error&) {
        return static_cast<double>(kFlowSiegelCap);
    }
}

}  // namespace

FlowTrace flow_trace(const HpMatrix& M, const WeightPair& w, double t_max, double dt, const FlowOptions& opts) {
    check_shape(M.rows, M.cols, w, "flow_trace");
    if (!(dt > 0.0) || !(t_max >= 0.0))
        throw DomainError("dioph", "flow_trace", "need dt > 0 and t_max >= 0");
    const int m = w.m(), n = w.n(), d = m + n;
    // Columns of u_M: e_j for j < m, and (-M e_k, e_k) for the last n.
    detail::Columns<hp_real> cols(static_cast<std::size_t>(d), std::vector<hp_real>(static_cast<std::size_t>(d), hp_real(0)));
    for (int j = 0; j < d; ++j) cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < m; ++i) cols[static_cast<std::size_t>(m + k)][static_cast<std::size_t>(i)] = -M(i, k);
    std::vector<hp_real> step(static_cast<std::size_t>(d));
    const auto logs = w.logs(1.0);
    for (int i = 0; i < d; ++i) step[static_cast<std::size_t>(i)] = exp(hp_real(logs[static_cast<std::size_t>(i)]) * hp_real(dt));

    FlowTrace tr;
    tr.M = to_double(M);
    tr.siegel_R = opts.siegel_R;
    const long K = static_cast<long>(std::floor(t_max / dt + 1e-9));
    for (long k = 0; k <= K; ++k) {
        if (k > 0)
            for (auto& c : cols)
                for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(i)] *= step[static_cast<std::size_t>(i)];
        if (!detail::lll(cols, kLovasz))
            throw ConditioningError("dioph", "flow_trace", "reduction failed at t = " + std::to_string(k * dt));
        Mat B(d, d);
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i)
                B(i, j) = static_cast<double>(cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        const double sys = systole_sup(B);
        tr.t.push_back(static_cast<double>(k) * dt);
        tr.minima.push_back(sys);
        if (opts.record_siegel) tr.siegel.push_back(siegel_saturating(B, opts.siegel_R, sys));
    }
    return tr;
}

FlowTrace flow_trace(const Mat& M, const WeightPair& w, double t_max, double dt, const FlowOptions& opts) {
    return flow_trace(to_hp(M), w, t_max, dt, opts);
}

ClassifyReport classify_point(const HpMatrix& M, const WeightPair& w, double t_max,
                              const std::vector<double>& eps_grid, const ClassifyOptions& opts) {
    FlowOptions fo;
    fo.record_siegel = true;
    fo.siegel_R = opts.siegel_R;
    const FlowTrace tr = flow_trace(M, w, t_max, opts.dt, fo);
    ClassifyReport rep;
    rep.badly_approx_proxy = tr.inf_minima();
    rep.badly_evidence = rep.badly_approx_proxy >= opts.badly_threshold;

    const std::size_t N = tr.t.size();
    for (double eps : eps_grid) {
        bool returns = false;
        for (std::size_t k = 0; k < N; ++k)
            if (tr.t[k] >= t_max / 2 && tr.minima[k] >= eps) returns = true;
        if (!returns) rep.dirichlet_proxy = std::max(rep.dirichlet_proxy, eps);
    }
    rep.dirichlet_evidence = rep.dirichlet_proxy > 0.0;

    double sum = 0.0;
    for (double s : tr.siegel) sum += s;
    rep.siegel_average = N ? sum / static_cast<double>(N) : 0.0;
    const double vol = ball_volume(w.dim(), opts.siegel_R);
    const double rel = std::abs(rep.siegel_average / vol - 1.0);
    rep.generic_proxy = std::max(0.0, 1.0 - rel);
    const std::size_t half = N / 2;
    for (double eps : eps_grid) {
        double a = 0.0, b = 0.0;
        for (std::size_t k = 0; k < N; ++k) (k < half ? a : b) += tr.minima[k] >= eps ? 1.0 : 0.0;
        const double fa = half ? a / static_cast<double>(half) : 0.0;
        const double fb = N > half ? b / static_cast<double>(N - half) : 0.0;
        rep.occupation_drift = std::max(rep.occupation_drift, std::abs(fa - fb));
    }
    rep.generic_evidence = rel <= opts.generic_tol && rep.occupation_drift <= 0.2;
    return rep;
}

ClassifyReport classify_point(const Mat& M, const WeightPair& w, double t_max, const std::vector<double>& eps_grid,
                              const ClassifyOptions& opts) {
    return classify_point(to_hp(M), w, t_max, eps_grid, opts);
}

double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("dioph", "kendall_tau_b", "need two equal-length samples of size >= 2");
    double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0 && dy == 0) continue;
            if (dx == 0) {
                ++ties_x;
            } else if (dy == 0) {
                ++ties_y;
            } else if ((dx > 0) == (dy > 0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    const double denom = std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
    return denom > 0 ? (concordant - discordant) / denom : 0.0;
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

FractalSummary fractal_experiment(const AffineIFS& ifs, const WeightPair& w, long n_points, double t_max,
                                  std::uint64_t seed, const FractalOptions& opts) {
    if (n_points < 1)
        throw DomainError("dioph", "fractal_experiment", "n_points must be >= 1");
    if (ifs.m() != w.m() || ifs.n() != w.n())
        throw DomainError("dioph", "fractal_experiment", "IFS shape does not match the weights");
    if (!ifs_validate(ifs, 4, kDefaultWordCap, 20000, seed).contracting_on_average)
        throw DomainError("dioph", "fractal_experiment", "precondition failed: IFS is not contracting on average");
    const auto irr = irreducibility_check(ifs);
    if (irr.verdict == Irreducibility::Verdict::Reducible)
        throw DomainError("dioph", "fractal_experiment", "precondition failed: IFS is reducible (" + irr.detail + ")");
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        const auto c = sponge_check(ifs.symbols[i], w);
        if (!c.ok)
            throw DomainError("dioph", "fractal_experiment",
                              "precondition failed: symbol " + std::to_string(i) + " is not a sponge affinity for the weights: " +
                                  c.failure);
    }

    std::vector<HpMatrix> pts;
    if (ifs.grid) {
        pts = coding_sample_hp(ifs, n_points, opts.coding_tol, seed);
    } else {
        for (const auto& p : coding_sample(ifs, n_points, 1e-16, seed)) pts.push_back(to_hp(p));
    }

    FractalSummary sum;
    sum.irreducibility = to_string(irr.verdict);
    sum.thresholds = opts.thresholds;
    sum.points.resize(static_cast<std::size_t>(n_points));
    detail::parallel_for(n_points, [&](long i) {
        auto& fp = sum.points[static_cast<std::size_t>(i)];
        const auto& M = pts[static_cast<std::size_t>(i)];
        fp.id = i;
        fp.M = to_double(M);
        fp.report = classify_point(M, w, t_max, opts.eps_grid, opts.classify);
        fp.inf_minima = fp.report.badly_approx_proxy;
        fp.quality = brute_force_quality(M, w, opts.brute_T).quality;
    });
    for (double thr : opts.thresholds) {
        long c = 0;
        for (const auto& p : sum.points) c += p.inf_minima >= thr ? 1 : 0;
        sum.fraction_badly.push_back(static_cast<double>(c) / static_cast<double>(n_points));
    }
    std::vector<double> gen, qual;
    for (const auto& p : sum.points) {
        gen.push_back(p.report.generic_proxy);
        qual.push_back(p.quality);
    }
    sum.median_generic = quantile(gen, 0.5);
    for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) sum.quality_quantiles.push_back(quantile(qual, q));
    return sum;
}

}  // namespace expwalk
