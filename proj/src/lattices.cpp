#include "expwalk/lattices.hpp"

#include "expwalk/error.hpp"
#include "expwalk/hp.hpp"
#include "lll.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace expwalk {

namespace {

detail::Columns<double> to_columns(const Mat& b) {
    detail::Columns<double> cols(static_cast<std::size_t>(b.cols()));
    for (Eigen::Index j = 0; j < b.cols(); ++j)
        cols[static_cast<std::size_t>(j)].assign(b.col(j).data(), b.col(j).data() + b.rows());
    return cols;
}

Mat from_columns(const detail::Columns<double>& cols) {
    const auto n = static_cast<Eigen::Index>(cols.size());
    const auto d = n ? static_cast<Eigen::Index>(cols.front().size()) : 0;
    Mat b(d, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < d; ++i) b(i, j) = cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    return b;
}

double condition_number(const Mat& b) {
    Eigen::JacobiSVD<Mat> svd(b);
    const auto& sv = svd.singularValues();
    return sv(0) / sv(sv.size() - 1);
}

void canonical_sign(Vec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) != 0.0) {
            if (v(i) < 0.0) v = -v;
            return;
        }
    }
}

constexpr long kNodeCap = 50'000'000;

// Fincke-Pohst enumeration of integer x with ||B x||^2 <= bound. The visitor
// returns the (possibly smaller) bound to continue with.
void enumerate(const Mat& B, double bound, const std::function<double(const Vec&, double)>& visit,
               const char* op) {
    const auto n = B.cols();
    const Mat G = B.transpose() * B;
    Eigen::LLT<Mat> llt(G);
    if (llt.info() != Eigen::Success)
        throw ConditioningError("lattices", op, "Gram matrix is not positive definite");
    const Mat R = llt.matrixU();
    // q(i,j) = R(i,j)/R(i,i) for j > i; diag(i) = R(i,i)^2.
    Vec diag(n);
    Mat q = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        diag(i) = R(i, i) * R(i, i);
        for (Eigen::Index j = i + 1; j < n; ++j) q(i, j) = R(i, j) / R(i, i);
    }
    Vec x = Vec::Zero(n);
    std::vector<double> partial(static_cast<std::size_t>(n + 1), 0.0);  // partial[i] = sum over levels >= i
    long nodes = 0;
    double cur_bound = bound;
    std::function<void(Eigen::Index)> rec = [&](Eigen::Index i) {
        double c = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) c -= q(i, j) * x(j);
        const double rest = cur_bound - partial[static_cast<std::size_t>(i + 1)];
        if (rest < 0.0) return;
        const double half = std::sqrt(rest / diag(i));
        const double lo = std::ceil(c - half - 1e-12);
        const double hi = std::floor(c + half + 1e-12);
        for (double xi = lo; xi <= hi; xi += 1.0) {
            if (++nodes > kNodeCap)
                throw ConditioningError("lattices", op, "enumeration exceeded the node cap");
            const double t = xi - c;
            const double contrib = diag(i) * t * t;
            if (partial[static_cast<std::size_t>(i + 1)] + contrib > cur_bound * (1.0 + 1e-12) + 1e-300) continue;
            x(i) = xi;
            partial[static_cast<std::size_t>(i)] = partial[static_cast<std::size_t>(i + 1)] + contrib;
            if (i == 0) {
                cur_bound = visit(x, partial[0]);
            } else {
                rec(i - 1);
            }
        }
        x(i) = 0.0;
    };
    rec(n - 1);
}

}  // namespace

UnimodularLattice::UnimodularLattice(Mat basis, Mat reduced, Mat transform)
    : basis_(std::move(basis)), reduced_(std::move(reduced)), transform_(std::move(transform)) {
    sup_ = shortest_vector_of(reduced_, Norm::Sup);
    euclid_ = shortest_vector_of(reduced_, Norm::Euclid);
}

UnimodularLattice UnimodularLattice::standard(int d) {
    return lll_reduce(Mat::Identity(d, d));
}

Mat lll_columns(Mat& b, double delta) {
    auto cols = to_columns(b);
    detail::Columns<double> T;
    if (!detail::lll(cols, delta, &T))
        throw ConditioningError("lattices", "lll_reduce", "degenerate Gram-Schmidt norm during reduction");
    b = from_columns(cols);
    return from_columns(T);
}

UnimodularLattice lll_reduce(const Mat& basis, double delta) {
    if (basis.rows() != basis.cols() || basis.rows() == 0)
        throw DomainError("lattices", "lll_reduce", "basis must be square");
    if (!all_finite(basis))
        throw DomainError("lattices", "lll_reduce", "non-finite basis entry");
    const double det = basis.determinant();
    if (std::abs(std::abs(det) - 1.0) > 1e-6)
        throw DomainError("lattices", "lll_reduce", "basis determinant " + std::to_string(det) + " is not +-1");
    const int d = static_cast<int>(basis.rows());
    Mat b = basis / std::pow(std::abs(det), 1.0 / d);
    Mat start = b;
    Mat T;
    if (condition_number(b) > 1e8) {
        // Skewed input: reduce in extended precision so the short reduced
        // vectors survive the cancellation; the reduced basis is guarded below.
        detail::Columns<hp_real> cols(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) cols[static_cast<std::size_t>(j)].push_back(hp_real(b(i, j)));
        detail::Columns<double> Tc;
        if (!detail::lll(cols, delta, &Tc))
            throw ConditioningError("lattices", "lll_reduce", "degenerate Gram-Schmidt norm during reduction");
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i)
                b(i, j) = static_cast<double>(cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
        T = from_columns(Tc);
    } else {
        T = lll_columns(b, delta);
    }
    return UnimodularLattice(std::move(start), std::move(b), std::move(T));
}

ShortVector shortest_vector_of(const Mat& reduced, Norm norm) {
    const auto n = reduced.cols();
    if (condition_number(reduced) > 1e12)
        throw ConditioningError("lattices", "shortest_vector", "reduced basis condition number exceeds 1e12");
    ShortVector best;
    double bound = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
        const Vec v = reduced.col(j);
        const double len = norm == Norm::Sup ? v.cwiseAbs().maxCoeff() : v.norm();
        if (len < best.length || j == 0) {
            best.v = v;
            best.length = len;
        }
    }
    // A vector of sup-norm L has Euclidean norm at most sqrt(d) L.
    const double dd = static_cast<double>(reduced.rows());
    bound = norm == Norm::Sup ? dd * best.length * best.length : best.length * best.length;
    enumerate(
        reduced, bound,
        [&](const Vec& x, double sq) {
            if (sq <= 0.0) return norm == Norm::Sup ? dd * best.length * best.length : best.length * best.length;
            const Vec v = reduced * x;
            const double len = norm == Norm::Sup ? v.cwiseAbs().maxCoeff() : std::sqrt(sq);
            if (len < best.length * (1.0 - 1e-14)) {
                best.v = v;
                best.length = len;
            }
            return norm == Norm::Sup ? dd * best.length * best.length : best.length * best.length;
        },
        "shortest_vector");
    canonical_sign(best.v);
    return best;
}

ShortVector shortest_vector(const UnimodularLattice& x, Norm norm) {
    return x.shortest(norm);
}

bool mahler_member(const UnimodularLattice& x, double epsilon) {
    if (!(epsilon > 0.0))
        throw DomainError("lattices", "mahler_member", "epsilon must be positive");
    return x.shortest(Norm::Sup).length >= epsilon;
}

long siegel_count_of(const Mat& reduced, double R, long cap) {
    if (!(R > 0.0))
        throw DomainError("lattices", "siegel_count", "radius must be positive");
    long count = 0;
    const double bound = R * R;
    enumerate(
        reduced, bound * (1.0 + 1e-12),
        [&](const Vec&, double sq) {
            if (sq > 0.0 && sq <= bound * (1.0 + 1e-12)) {
                if (++count > cap)
                    throw CapError("lattices", "siegel_count", "count exceeds the cap " + std::to_string(cap));
            }
            return bound * (1.0 + 1e-12);
        },
        "siegel_count");
    return count;
}

long siegel_count(const UnimodularLattice& x, double R, long cap) {
    return siegel_count_of(x.reduced(), R, cap);
}

double ball_volume(int d, double R) {
    return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(R, d);
}

HeightSpec::HeightSpec(double eps, double delta_, std::vector<double> s0_)
    : epsilon(eps), delta(delta_), s0(std::move(s0_)) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw DomainError("lattices", "HeightSpec", "epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta <= 1.0))
        throw DomainError("lattices", "HeightSpec", "delta must lie in (0,1]");
    if (s0.size() < 2)
        throw DomainError("lattices", "HeightSpec", "dimension must be at least 2");
    CartanVector check(s0);
    for (std::size_t i = 1; i < s0.size(); ++i)
        if (!(s0[i] < s0[i - 1]))
            throw DomainError("lattices", "HeightSpec", "s0 must be strictly decreasing");
}

HeightSpec HeightSpec::standard(int d, double eps, double delta) {
    std::vector<double> s0;
    for (int i = 0; i < d; ++i) s0.push_back((d - 1) / 2.0 - i);
    return HeightSpec(eps, delta, std::move(s0));
}

double HeightSpec::delta_i(int i) const {
    const int d = static_cast<int>(s0.size());
    return static_cast<double>(i) * (d - i);
}

double HeightSpec::delta_lambda(int i) const {
    return std::accumulate(s0.begin(), s0.begin() + i, 0.0);
}

double HeightSpec::kappa() const {
    const int d = static_cast<int>(s0.size());
    double worst = 0.0;
    for (int i = 1; i < d; ++i) worst = std::max(worst, 1.0 / delta_lambda(i));
    return 2.0 * worst * delta;
}

double margulis_height(const UnimodularLattice& x, const HeightSpec& spec) {
    const int d = x.dim();
    if (static_cast<int>(spec.s0.size()) != d)
        throw DomainError("lattices", "margulis_height", "height dimension does not match the lattice");
    const Mat& B = x.reduced();
    std::vector<double> min_norm(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
    // Reduced-basis subset wedges: covolume of the spanned sublattice.
    for (int i = 1; i < d; ++i)
        for (const auto& S : k_subsets(d, i)) {
            Mat sub(d, i);
            for (int c = 0; c < i; ++c) sub.col(c) = B.col(S[static_cast<std::size_t>(c)]);
            const double cov = std::sqrt(std::max(0.0, (sub.transpose() * sub).determinant()));
            min_norm[static_cast<std::size_t>(i)] = std::min(min_norm[static_cast<std::size_t>(i)], cov);
        }
    min_norm[1] = std::min(min_norm[1], x.shortest(Norm::Euclid).length);
    if (d > 2) {
        // Primitive (d-1)-sublattices have covolume equal to the length of
        // the corresponding primitive dual vector.
        Mat dual = B.inverse().transpose();
        lll_columns(dual);
        const double len = shortest_vector_of(dual, Norm::Euclid).length;
        min_norm[static_cast<std::size_t>(d - 1)] = std::min(min_norm[static_cast<std::size_t>(d - 1)], len);
    }
    double best = 0.0;
    for (int i = 1; i < d; ++i) {
        const double dl = spec.delta_lambda(i);
        const double phi = std::pow(spec.epsilon, spec.delta_i(i) / dl) *
                           std::pow(min_norm[static_cast<std::size_t>(i)], -1.0 / dl);
        best = std::max(best, phi);
    }
    return std::pow(best, spec.delta);
}

std::string Observable::name() const {
    char buf[64];
    switch (kind) {
    case Kind::Height: return "height";
    case Kind::Mahler:
        std::snprintf(buf, sizeof buf, "mahler(%g)", param);
        return buf;
    case Kind::Siegel:
        std::snprintf(buf, sizeof buf, "siegel(%g)", param);
        return buf;
    case Kind::ShortestSup: return "shortest_sup";
    case Kind::ShortestEuclid: return "shortest_euclid";
    }
    return "?";
}

double Observable::evaluate(const UnimodularLattice& x) const {
    switch (kind) {
    case Kind::Height:
        return margulis_height(x, height ? *height : HeightSpec::standard(x.dim()));
    case Kind::Mahler: return mahler_member(x, param) ? 1.0 : 0.0;
    case Kind::Siegel: return static_cast<double>(siegel_count(x, param));
    case Kind::ShortestSup: return x.shortest(Norm::Sup).length;
    case Kind::ShortestEuclid: return x.shortest(Norm::Euclid).length;
    }
    return 0.0;
}

UnimodularLattice act(const Mat& g, const UnimodularLattice& x) {
    return lll_reduce(g * x.reduced());
}

TrajectoryRecord walk_simulate(const GroupMeasure& mu, const UnimodularLattice& x0, long n_steps,
                               const std::vector<Observable>& observables, std::uint64_t seed) {
    if (n_steps < 1)
        throw DomainError("lattices", "walk_simulate", "n_steps must be >= 1");
    if (mu.dim() != x0.dim())
        throw DomainError("lattices", "walk_simulate", "measure and lattice dimensions differ");
    TrajectoryRecord rec;
    for (const auto& o : observables) rec.names.push_back(o.name());
    rec.values.assign(observables.size(), {});
    rec.running.assign(observables.size(), {});
    std::vector<double> sums(observables.size(), 0.0);
    CounterRng rng(seed);
    UnimodularLattice x = x0;
    for (long step = 1; step <= n_steps; ++step) {
        try {
            x = act(mu.draw(rng), x);
        } catch (const ConditioningError& e) {
            throw ConditioningError("lattices", "walk_simulate",
                                    std::string(e.what()) + " at step " + std::to_string(step));
        }
        rec.steps.push_back(step);
        for (std::size_t k = 0; k < observables.size(); ++k) {
            const double v = observables[k].evaluate(x);
            sums[k] += v;
            rec.values[k].push_back(v);
            rec.running[k].push_back(sums[k] / static_cast<double>(step));
        }
    }
    return rec;
}

UnimodularLattice random_lattice(int d, double log_spread, std::uint64_t seed) {
    CounterRng rng(seed);
    Mat gauss(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) gauss(i, j) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(gauss);
    Mat Q = qr.householderQ();
    std::vector<double> logs(static_cast<std::size_t>(d));
    double mean = 0.0;
    for (auto& l : logs) {
        l = rng.uniform(-log_spread, log_spread);
        mean += l / d;
    }
    Mat a = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) a(i, i) = std::exp(logs[static_cast<std::size_t>(i)] - mean);
    Mat g = a * Q;
    if (g.determinant() < 0) g.col(0) = -g.col(0);
    return lll_reduce(g);
}

std::vector<UnimodularLattice> sample_walk_points(const GroupMeasure& mu, int n_points, int max_burst,
                                                  double log_spread, std::uint64_t seed) {
    std::vector<UnimodularLattice> pts;
    pts.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const auto s = subseed(seed, static_cast<std::uint64_t>(i));
        CounterRng rng(s);
        const double spread = log_spread * rng.uniform();
        UnimodularLattice x = random_lattice(mu.dim(), spread, subseed(s, 1));
        const long burst = static_cast<long>(rng.below(static_cast<std::uint64_t>(max_burst) + 1));
        for (long k = 0; k < burst; ++k) x = act(mu.draw(rng), x);
        pts.push_back(std::move(x));
    }
    return pts;
}

ContractionFit contraction_fit(const GroupMeasure& mu, const HeightSpec& height, int m,
                               const std::vector<UnimodularLattice>& points, int mc_trials, std::uint64_t seed,
                               const ContractionOptions& opts) {
    if (m < 1)
        throw DomainError("lattices", "contraction_fit", "m must be >= 1");
    if (points.empty())
        throw DomainError("lattices", "contraction_fit", "no sample points");
    ContractionFit fit;
    fit.m = m;
    fit.exact = mu.is_atomic() && word_count(mu.size(), m) <= opts.exact_word_cap;
    std::optional<GroupMeasure> conv;
    if (fit.exact) conv = convolution_support(mu, m, opts.exact_word_cap);
    else if (mc_trials < 1)
        throw DomainError("lattices", "contraction_fit", "mc_trials must be >= 1");

    const auto n = static_cast<long>(points.size());
    fit.beta.assign(static_cast<std::size_t>(n), 0.0);
    fit.a_beta.assign(static_cast<std::size_t>(n), 0.0);
    detail::parallel_for(n, [&](long i) {
        const auto& x = points[static_cast<std::size_t>(i)];
        const auto idx = static_cast<std::size_t>(i);
        fit.beta[idx] = margulis_height(x, height);
        double acc = 0.0;
        if (conv) {
            for (const auto& a : conv->atoms()) acc += a.weight * margulis_height(act(a.g, x), height);
        } else {
            CounterRng rng(subseed(seed, static_cast<std::uint64_t>(i)));
            for (int t = 0; t < mc_trials; ++t) {
                Mat g = Mat::Identity(mu.dim(), mu.dim());
                for (int k = 0; k < m; ++k) g = mu.draw(rng) * g;
                acc += margulis_height(act(g, x), height);
            }
            acc /= mc_trials;
        }
        fit.a_beta[idx] = acc;
    });

    double a_hat = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (fit.beta[idx] < opts.cusp_level) continue;
        ++fit.cusp_points;
        const double ratio = fit.a_beta[idx] / fit.beta[idx];
        a_hat = std::max(a_hat, ratio);
        if (ratio >= 1.0) ++fit.violations;
    }
    fit.a_hat = a_hat;
    double b_hat = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        b_hat = std::max(b_hat, fit.a_beta[idx] - a_hat * fit.beta[idx]);
    }
    fit.b_hat = b_hat;
    fit.success = fit.cusp_points > 0 && fit.a_hat < 1.0 && fit.violations == 0;
    return fit;
}

ContractionFit contraction_search(const GroupMeasure& mu, const HeightSpec& height, int m_max,
                                  const std::vector<UnimodularLattice>& points, int mc_trials, std::uint64_t seed,
                                  const ContractionOptions& opts) {
    ContractionFit fit;
    for (int m = 1; m <= m_max; ++m) {
        fit = contraction_fit(mu, height, m, points, mc_trials, seed, opts);
        if (fit.success) break;
    }
    return fit;
}

double recurrence_level(double a, double b, double delta) {
    return (2.0 * b + 2.0) / ((1.0 - a) * delta);
}

RecurrenceResult recurrence_experiment(const GroupMeasure& mu, const HeightSpec& height, double delta,
                                       const UnimodularLattice& x0, const std::vector<long>& n_grid,
                                       int mc_trials, std::uint64_t seed, const ContractionFit& fit) {
    if (!fit.success)
        throw DomainError("lattices", "recurrence_experiment",
                          "precondition unmet: no successful contraction fit for this measure and height");
    if (!(delta > 0.0 && delta < 1.0))
        throw DomainError("lattices", "recurrence_experiment", "delta must lie in (0,1)");
    if (n_grid.empty() || mc_trials < 1)
        throw DomainError("lattices", "recurrence_experiment", "need a grid and at least one trial");
    for (std::size_t i = 0; i < n_grid.size(); ++i)
        if (n_grid[i] < 0 || (i > 0 && n_grid[i] <= n_grid[i - 1]))
            throw DomainError("lattices", "recurrence_experiment", "grid must be non-negative and increasing");

    RecurrenceResult res;
    res.level = recurrence_level(fit.a_hat, fit.b_hat, delta);
    res.n = n_grid;
    res.beta_x0 = margulis_height(x0, height);
    const std::size_t G = n_grid.size();
    std::vector<std::vector<char>> inside(static_cast<std::size_t>(mc_trials), std::vector<char>(G, 0));
    detail::parallel_for(mc_trials, [&](long t) {
        CounterRng rng(subseed(seed, static_cast<std::uint64_t>(t)));
        UnimodularLattice x = x0;
        long step = 0;
        for (std::size_t k = 0; k < G; ++k) {
            while (step < n_grid[k]) {
                x = act(mu.draw(rng), x);
                ++step;
            }
            inside[static_cast<std::size_t>(t)][k] = margulis_height(x, height) <= res.level;
        }
    });
    res.mass.assign(G, 0.0);
    for (const auto& row : inside)
        for (std::size_t k = 0; k < G; ++k) res.mass[k] += row[k];
    for (auto& m : res.mass) m /= mc_trials;
    for (std::size_t k = G; k-- > 0;) {
        if (res.mass[k] < 1.0 - delta) break;
        res.burn_in = n_grid[k];
    }
    return res;
}

}  // namespace expwalk
