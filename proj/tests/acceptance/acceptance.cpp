// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "expwalk/dioph.hpp"
#include "expwalk/error.hpp"
#include "expwalk/expansion.hpp"
#include "expwalk/fractal.hpp"
#include "expwalk/kau.hpp"
#include "expwalk/lattices.hpp"
#include "expwalk/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace expwalk;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d: %s -- %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
}

Mat diag(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v.asDiagonal();
}

Mat mat2(double a, double b, double c, double d) {
    Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

Mat scalar(double x) {
    Mat a(1, 1);
    a << x;
    return a;
}

Mat embed4(const Mat& g) {
    Mat out = Mat::Identity(4, 4);
    out.topLeftCorner(2, 2) = g;
    return out;
}

GroupMeasure positive_pair() { return GroupMeasure::uniform({mat2(2, 1, 1, 1), mat2(1, 1, 1, 2)}); }

GroupMeasure sl4_five() {
    Mat u23 = Mat::Identity(4, 4), u34 = Mat::Identity(4, 4);
    u23(1, 2) = 1;
    u34(2, 3) = 1;
    return GroupMeasure::uniform(
        {diag({2, 2, 1, 0.25}), embed4(mat2(2, 1, 1, 1)), embed4(mat2(1, 1, 1, 2)), u23, u34});
}

AffineIFS cantor() { return sponge_builder({3}, {{0}, {2}}); }
AffineIFS carpet() { return sponge_builder({2, 3}, {{0, 0}, {1, 1}, {0, 2}}); }

Mat random_mat(int r, int c, CounterRng& rng) {
    Mat a(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) a(i, j) = rng.uniform(-1, 1);
    return a;
}

double max_abs(const Mat& a) { return a.cwiseAbs().maxCoeff(); }

/// Scales to |det| = 1 so that PGL representatives compare entrywise.
Mat projective(const Mat& g) { return g / std::pow(std::abs(g.determinant()), 1.0 / static_cast<double>(g.rows())); }

// ---------------------------------------------------------------------------

Outcome cone_closed_form() {
    CounterRng rng(101);
    long agree = 0;
    const long total = 1000;
    for (long trial = 0; trial < total; ++trial) {
        const int d = 2 + static_cast<int>(rng.below(5));
        const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - 1)));
        std::vector<double> x(static_cast<std::size_t>(d));
        double mean = 0;
        for (auto& v : x) mean += (v = rng.uniform(-1, 1)) / d;
        for (auto& v : x) v -= mean;
        bool expect = true;
        for (int i = 0; i < d; ++i) expect = expect && (i < m ? x[i] > 0 : x[i] < 0);
        agree += expanding_cone_membership(ConeSpec({m, d - m}), CartanVector(x)).inside == expect;
    }
    return {agree == total, fmt("%ld/%ld agree", agree, total)};
}

Outcome cone_intersection() {
    const ConeSpec spec({2, 1, 1});
    long agree = 0, total = 0, inside = 0;
    // log alpha, log beta on a 40 x 25 grid over [-2, 2]^2, offset off the boundary lines
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 25; ++j) {
            const double la = -2 + 4 * (i + 0.37) / 40, lb = -2 + 4 * (j + 0.61) / 25;
            const CartanVector d({-(la + lb) / 2, -(la + lb) / 2, la, lb});
            const bool expect = std::exp(lb) < 1 && std::exp(la + lb) < 1;
            const bool got = expanding_cone_membership(spec, d).inside;
            agree += got == expect;
            inside += got;
            ++total;
        }
    return {agree == total, fmt("%ld/%ld agree, %ld inside", agree, total, inside)};
}

Outcome certificates() {
    const auto t0 = Clock::now();
    const auto a = expansion_certificate(GroupMeasure::dirac(diag({3, 1.0 / 3})), Representation{}, 1);
    const double wit = certificate_objective(GroupMeasure::dirac(diag({3, 1.0 / 3})), Representation{}, 1, a.witness);
    const bool ok_a = !a.pass() && std::abs(wit + std::log(3.0)) <= 1e-6 && std::abs(a.C_lower + std::log(3.0)) <= 1e-6;

    int pass_b = -1;
    for (int N = 1; N <= 6 && pass_b < 0; ++N) {
        const auto c = expansion_certificate(positive_pair(), Representation{}, N);
        if (c.mode == CertMode::Exact && c.pass()) pass_b = N;
    }

    CertificateOptions mc;
    mc.force_monte_carlo = true;
    mc.confidence = 0.95;
    mc.seed = 11;
    int pass_c = -1;
    double c_lower = 0;
    for (int N : {1, 2, 4, 8, 16, 32}) {
        const auto c = expansion_certificate(sl4_five(), Representation{}, N, mc);
        c_lower = c.C_lower;
        if (c.mode == CertMode::MonteCarlo && c.pass()) {
            pass_c = N;
            break;
        }
    }
    const double elapsed = seconds_since(t0);
    return {ok_a && pass_b > 0 && pass_c > 0 && elapsed < 600,
            fmt("diag(3,1/3): %s, witness integral %.9f (target %.9f); positive pair passes at N=%d (exact); "
                "SL4 five-matrix measure passes at N=%d with 95%% lower bound %.4f",
                a.pass() ? "PASS" : "FAIL", wit, -std::log(3.0), pass_b, pass_c, c_lower)};
}

Outcome fk_exponents() {
    const auto mu = GroupMeasure::uniform({diag({4, 0.5, 0.5}), diag({0.25, 2, 2})});
    const auto e = fk_exponent_estimate(mu, Vec::Unit(3, 0), 10000, 100, 7);
    return {std::abs(e.mean) <= 3 * e.stderr_ && e.stderr_ < 0.01,
            fmt("exponent %.3e, stderr %.3e", e.mean, e.stderr_)};
}

Outcome siegel_oracle() {
    const long exact = siegel_count(UnimodularLattice::standard(2), 3.0);
    Observable sieg;
    sieg.param = 3.0;
    double avg = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto rec = walk_simulate(positive_pair(), random_lattice(2, 0.5, 1000 + seed), 100000, {sieg}, seed);
        avg += rec.running[0].back() / 5;
    }
    const double target = ball_volume(2, 3.0);
    const double rel = std::abs(avg / target - 1);
    return {exact == 28 && rel < 0.10,
            fmt("count(Z^2, 3) = %ld; Birkhoff average %.4f vs pi R^2 = %.4f (rel err %.4f)", exact, avg, target, rel)};
}

Outcome height_and_recurrence() {
    const double h0 = margulis_height(UnimodularLattice::standard(2), HeightSpec::standard(2, 0.1, 1.0));
    const auto mu = positive_pair();
    const auto h = HeightSpec::standard(2, 0.1, 0.3);
    const auto pts = sample_walk_points(mu, 200, 20, 2.0, 21);
    const auto fit = contraction_search(mu, h, 8, pts, 200, 22);
    std::string detail = fmt("height(Z^2) = %.15g; fit m=%d a_hat=%.4f b_hat=%.4f violations=%ld over %zu points", h0,
                             fit.m, fit.a_hat, fit.b_hat, fit.violations, pts.size());
    bool ok = std::abs(h0 - 0.01) <= 1e-12 && fit.success && fit.a_hat < 1 && fit.violations == 0;
    if (!fit.success) return {false, detail};

    std::vector<long> grid;
    for (long n = 0; n <= 30; ++n) grid.push_back(n);
    for (long n = 35; n <= 120; n += 5) grid.push_back(n);
    detail += "; burn-in (bound) by j:";
    for (int j = 1; j <= 6; ++j) {
        const double s = std::pow(10.0, j);
        const auto x0 = lll_reduce(diag({s, 1 / s}));
        const auto r = recurrence_experiment(mu, h, 0.1, x0, grid, 300, 30 + j, fit);
        // Iterating the drift inequality and applying Markov: past m k steps the
        // mass outside {beta <= level} is at most (a^k beta(x0) + b/(1-a)) / level,
        // and the second term is below delta/2, so a^k beta(x0) <= level delta / 2
        // suffices. The resulting step count is affine in log beta(x0).
        const double excess = std::log(std::max(1.0, 2 * r.beta_x0 / (r.level * 0.1)));
        const long bound = fit.m * static_cast<long>(std::ceil(excess / std::log(1 / fit.a_hat)));
        detail += fmt(" %d:%ld(%ld)", j, r.burn_in, bound);
        ok = ok && r.burn_in >= 0 && r.burn_in <= bound;
    }
    return {ok, detail};
}

Outcome kau_identities() {
    const auto c = cantor(), sp = carpet();
    double eq = 0, add = 0;
    for (const AffineIFS* ifs : {&c, &sp}) {
        const ParabolicProfile prof(*ifs->weightpair);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            CounterRng rng(seed + 500);
            std::vector<Mat> word;
            for (int i = 0; i < 20; ++i) word.push_back(embed_to_pgl(ifs->symbols[rng.below(ifs->size())]));
            eq = std::max(eq, equivariance_residual(word, prof));
            const auto f = word_factors(word, prof);
            double sum = 0;
            for (std::size_t i = 0; i < word.size(); ++i) {
                sum += kau_factorize(word[i], prof).t;
                add = std::max(add, std::abs(f[i].t - sum));
            }
        }
    }
    const Mat g = embed_to_pgl(c.symbols[1]);
    const auto lim = u_limit([&](long) { return g; }, ParabolicProfile(*c.weightpair), 1e-14, 10000);
    const double ud = std::abs(lim.M(0, 0) - 1.0);
    return {eq < 1e-8 && add < 1e-10 && ud < 1e-9,
            fmt("equivariance residual %.2e, additivity residual %.2e, |u_limit - 1| = %.2e", eq, add, ud)};
}

Outcome embedding_identities() {
    CounterRng rng(808);
    double key = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int m = 1 + static_cast<int>(rng.below(3)), n = 1 + static_cast<int>(rng.below(3));
        const MatrixAffinity phi(random_mat(m, m, rng) + 2 * Mat::Identity(m, m),
                                 random_mat(n, n, rng) + 2 * Mat::Identity(n, n), random_mat(m, n, rng));
        const Mat M = random_mat(m, n, rng);
        const Mat A = ahat(phi);
        key = std::max(key, max_abs(A * unipotent(M) * A.inverse() * unipotent(phi.B) - unipotent(affinity_apply(phi, M))));
    }
    double iter = 0;
    const auto c = cantor(), sp = carpet();
    for (const AffineIFS* ifs : {&c, &sp})
        for (int len = 1; len <= 30; ++len) {
            std::vector<std::size_t> w;
            for (int i = 0; i < len; ++i) w.push_back(rng.below(ifs->size()));
            const int d = ifs->m() + ifs->n();
            Mat lhs = Mat::Identity(d, d), Ainv = Mat::Identity(d, d);
            MatrixAffinity comp = MatrixAffinity::identity(ifs->m(), ifs->n());
            for (auto i : w) {
                lhs = embed_to_pgl(ifs->symbols[i]) * lhs;
                Ainv = ahat(ifs->symbols[i]).inverse() * Ainv;
                comp = affinity_compose(comp, ifs->symbols[i]);
            }
            const Mat rhs = projective(Ainv * unipotent(comp.B));
            iter = std::max(iter, max_abs(projective(lhs) - rhs) / std::max(1.0, max_abs(rhs)));
        }
    return {key < 1e-10 && iter < 1e-9, fmt("conjugation residual %.2e, iterated residual %.2e", key, iter)};
}

Outcome weights_pipeline() {
    const auto ifs = sponge_builder({2, 3}, {{0, 0}, {1, 1}});
    const double l2 = std::log(2.0), l3 = std::log(3.0);
    const double f1 = (2 * l2 - l3) / (l2 + l3), f2 = (2 * l3 - l2) / (l2 + l3);
    const auto& r = ifs.weightpair->r;
    const bool ok_r = std::abs(r[0] - 0.16056) <= 1e-5 && std::abs(r[1] - 0.83944) <= 1e-5 &&
                      std::abs(r[0] - f1) < 1e-14 && std::abs(r[1] - f2) < 1e-14;
    std::string msg = "not rejected";
    bool ok_reject = false;
    try {
        (void)sponge_builder({2, 5}, {{0, 0}});
    } catch (const DomainError& e) {
        msg = e.what();
        ok_reject = msg.find("(1/m) sum_{j!=1} log a_j < log a_1 fails: 0.804719 >= 0.693147") != std::string::npos;
    }
    return {ok_r && ok_reject, fmt("r = (%.6f, %.6f); (2,5): %s", r[0], r[1], msg.c_str())};
}

Outcome fractal_coding() {
    const double x = coding_point(cantor(), {1, 0}, 1e-15)(0, 0);
    const auto pts = coding_sample(cantor(), 10000, 1e-14, 1234);
    long gap = 0;
    for (const auto& p : pts) gap += p(0, 0) > 1.0 / 3 && p(0, 0) < 2.0 / 3;
    const double frac = static_cast<double>(gap) / pts.size();
    return {std::abs(x - 0.75) <= 1e-14 && frac < 0.005,
            fmt("pi(1010...) = %.17g; mass in (1/3, 2/3) = %.4f", x, frac)};
}

Outcome diophantine_oracles() {
    const WeightPair flat({1.0}, {1.0});
    HpMatrix golden(1, 1);
    golden(0, 0) = (sqrt(hp_real(5)) - 1) / 2;
    const double q = brute_force_quality(golden, flat, 1000).quality;
    const double inf = flow_trace(golden, flat, 30.0, 0.05).inf_minima(0, 30);
    const auto zero = flow_trace(scalar(0), flat, 30.0, 0.05);
    double zdev = 0;
    for (std::size_t k = 0; k < zero.t.size(); ++k) zdev = std::max(zdev, std::abs(zero.minima[k] - std::exp(-zero.t[k])));

    // 50 points: rationals, quadratic irrationals, uniform random.
    std::vector<HpMatrix> set;
    for (auto [p, den] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 5}, {3, 7}, {5, 8}, {4, 11}, {7, 13},
                                                          {9, 17}, {11, 19}, {13, 23}, {5, 29}, {17, 30}, {1, 7},
                                                          {3, 10}, {8, 21}}) {
        HpMatrix M(1, 1);
        M(0, 0) = hp_real(p) / den;
        set.push_back(M);
    }
    for (int k : {2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23}) {
        HpMatrix M(1, 1);
        const hp_real s = sqrt(hp_real(k));
        M(0, 0) = s - floor(s);
        set.push_back(M);
    }
    CounterRng rng(2024);
    while (set.size() < 50) {
        HpMatrix M(1, 1);
        M(0, 0) = hp_real(rng.uniform());
        set.push_back(M);
    }
    // A vector (q, p) with |q| delta = Q is shortest near t = log|q| + log(1/Q)/2, so the
    // window sqrt(T) <= |q| <= T maps to t in [log T / 2, log T + log(1/Q0) / 2]. With
    // that upper end every point of brute quality <= Q0 has squared flow minimum <= Q0.
    const double T = 1000, Q0 = std::exp(-3.0);
    const double t_lo = 0.5 * std::log(T), t_hi = std::log(T) + 0.5 * std::log(1 / Q0);
    std::vector<double> brute, flow;
    for (const auto& M : set) {
        brute.push_back(brute_force_quality(M, flat, T).quality);
        flow.push_back(flow_trace(M, flat, t_hi, 0.01).inf_minima(t_lo, t_hi));
    }
    const double tau = kendall_tau_b(brute, flow);
    return {q >= 0.44 && q <= 0.46 && inf >= 0.4 && zdev <= 1e-9 && tau >= 0.8,
            fmt("golden quality %.6f, golden flow inf %.6f, zero-flow deviation %.1e, Kendall tau %.4f", q, inf, zdev,
                tau)};
}

Outcome end_to_end() {
    const auto t0 = Clock::now();
    const auto ifs = carpet();
    FractalOptions o;
    o.thresholds = {0.15};
    std::vector<double> frac;
    for (double t_max : {10.0, 20.0, 40.0})
        frac.push_back(fractal_experiment(ifs, *ifs.weightpair, 100, t_max, 77, o).fraction_badly[0]);
    const bool mono = frac[1] <= frac[0] && frac[2] <= frac[1];
    const double elapsed = seconds_since(t0);
    return {mono && elapsed < 1800,
            fmt("fraction with inf-minima >= 0.15 at t_max 10/20/40: %.2f / %.2f / %.2f", frac[0], frac[1], frac[2])};
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    report(1, "cone closed form for two blocks", [] {
        const auto t = Clock::now();
        auto o = cone_closed_form();
        const double s = seconds_since(t);
        o.pass = o.pass && s < 5;
        o.detail += fmt(", %.2fs", s);
        return o;
    });
    report(2, "cone intersection with the centre of the Levi", cone_intersection);
    report(3, "expansion certificates", certificates);
    report(4, "Furstenberg-Kifer exponent of commuting diagonals", fk_exponents);
    report(5, "Siegel average along the walk", siegel_oracle);
    report(6, "height, contraction and recurrence", height_and_recurrence);
    report(7, "K'A'U identities", kau_identities);
    report(8, "embedding identities", embedding_identities);
    report(9, "sponge weights and admissibility", weights_pipeline);
    report(10, "coding map of the Cantor set", fractal_coding);
    report(11, "Diophantine oracles", diophantine_oracles);
    report(12, "carpet badly-approximable fraction across horizons", end_to_end);
    std::printf("%d of 12 criteria failed (%.1fs total)\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
