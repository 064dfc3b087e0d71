#include "expwalk/expansion.hpp"

#include "expwalk/error.hpp"
#include "nelder_mead.hpp"
#include "simplex.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace expwalk {

Representation Representation::parse(const std::string& text) {
    Representation r;
    auto grade = [&](const std::string& tail) {
        try {
            std::size_t used = 0;
            const int k = std::stoi(tail, &used);
            if (used != tail.size() || k < 1) throw std::invalid_argument("grade");
            return k;
        } catch (const std::exception&) {
            throw DomainError("expansion", "Representation", "bad grade in '" + text + "'");
        }
    };
    if (text == "std") {
        r.kind = Kind::Standard;
    } else if (text == "adj") {
        r.kind = Kind::Adjoint;
    } else if (text.rfind("wedge:", 0) == 0) {
        r.kind = Kind::Wedge;
        r.k = grade(text.substr(6));
    } else if (text.rfind("adjwedge:", 0) == 0) {
        r.kind = Kind::AdjointWedge;
        r.k = grade(text.substr(9));
    } else {
        throw DomainError("expansion", "Representation", "unknown representation '" + text + "'");
    }
    return r;
}

std::string Representation::name() const {
    switch (kind) {
    case Kind::Standard: return "std";
    case Kind::Adjoint: return "adj";
    case Kind::Wedge: return "wedge:" + std::to_string(k);
    case Kind::AdjointWedge: return "adjwedge:" + std::to_string(k);
    }
    return "?";
}

int Representation::dim(int d) const {
    switch (kind) {
    case Kind::Standard: return d;
    case Kind::Adjoint: return d * d - 1;
    case Kind::Wedge: return static_cast<int>(binomial(d, k));
    case Kind::AdjointWedge: return static_cast<int>(binomial(d * d - 1, k));
    }
    return 0;
}

Mat Representation::apply(const Mat& g) const {
    switch (kind) {
    case Kind::Standard: return g;
    case Kind::Adjoint: return adjoint_matrix(g);
    case Kind::Wedge: return wedge_power(g, k);
    case Kind::AdjointWedge: return wedge_power(adjoint_matrix(g), k);
    }
    return g;
}

FkEstimate fk_exponent_estimate(const GroupMeasure& mu, const Vec& v, int n_steps, int n_trials,
                                std::uint64_t seed) {
    if (v.size() != mu.dim())
        throw DomainError("expansion", "fk_exponent_estimate", "vector dimension mismatch");
    if (!(v.norm() > 0.0))
        throw DomainError("expansion", "fk_exponent_estimate", "zero vector");
    if (n_steps < 10 || n_trials < 1)
        throw DomainError("expansion", "fk_exponent_estimate", "need n_steps >= 10 and n_trials >= 1");
    std::vector<double> slopes(static_cast<std::size_t>(n_trials));
    for (int trial = 0; trial < n_trials; ++trial) {
        CounterRng rng(subseed(seed, static_cast<std::uint64_t>(trial)));
        Vec x = v.normalized();
        double sum = 0.0;
        for (int i = 0; i < n_steps; ++i) {
            x = mu.draw(rng) * x;
            const double nx = x.norm();
            sum += std::log(nx);
            x /= nx;
        }
        slopes[static_cast<std::size_t>(trial)] = sum / n_steps;
    }
    FkEstimate est;
    est.mean = std::accumulate(slopes.begin(), slopes.end(), 0.0) / n_trials;
    if (n_trials > 1) {
        double var = 0.0;
        for (double s : slopes) var += (s - est.mean) * (s - est.mean);
        var /= (n_trials - 1);
        est.stderr_ = std::sqrt(var / n_trials);
    }
    return est;
}

std::string ExpansionCertificate::verdict() const {
    return pass() ? "PASS (heuristic min > 0)" : "FAIL (witness v with non-positive integral)";
}

namespace {

// Weighted family of matrices stacked vertically for fast evaluation of
// sum_w weight_w * log ||R_w x||.
struct WordSet {
    int dim = 0;
    Mat stack;
    Vec weights;

    void build(const std::vector<Mat>& mats, std::vector<double> w) {
        dim = mats.empty() ? 0 : static_cast<int>(mats.front().cols());
        stack.resize(static_cast<Eigen::Index>(mats.size()) * dim, dim);
        for (std::size_t i = 0; i < mats.size(); ++i)
            stack.middleRows(static_cast<Eigen::Index>(i) * dim, dim) = mats[i];
        weights = Eigen::Map<Vec>(w.data(), static_cast<Eigen::Index>(w.size()));
    }

    Vec values(const Vec& x) const {
        const double nx = x.norm();
        const Vec y = stack * (x / nx);
        Vec out(weights.size());
        for (Eigen::Index i = 0; i < weights.size(); ++i)
            out(i) = std::log(y.segment(i * dim, dim).norm());
        return out;
    }

    double objective(const Vec& x) const {
        const double nx = x.norm();
        if (!(nx > 1e-150)) return std::numeric_limits<double>::max();
        const Vec y = stack * (x / nx);
        double s = 0.0;
        for (Eigen::Index i = 0; i < weights.size(); ++i)
            s += weights(i) * std::log(y.segment(i * dim, dim).norm());
        return s;
    }
};

Mat word_product(const GroupMeasure& mu, int N, CounterRng& rng) {
    Mat g = Mat::Identity(mu.dim(), mu.dim());
    for (int i = 0; i < N; ++i) g = mu.draw(rng) * g;
    return g;
}

struct SphereMin {
    Vec x;
    double f = 0.0;
    long samples = 0;
};

SphereMin minimize_on_sphere(const WordSet& ws, const CertificateOptions& opts) {
    const int D = ws.dim;
    SphereMin best;
    std::vector<std::pair<double, Vec>> cand;
    if (D == 1) {
        Vec x = Vec::Ones(1);
        return {x, ws.objective(x), 1};
    }
    const long S = std::max<long>(opts.sphere_samples, 1);
    if (D == 2) {
        for (long i = 0; i < S; ++i) {
            const double th = M_PI * static_cast<double>(i) / static_cast<double>(S);
            Vec x(2);
            x << std::cos(th), std::sin(th);
            cand.emplace_back(ws.objective(x), x);
        }
    } else {
        CounterRng rng(subseed(opts.seed, 3));
        for (long i = 0; i < S; ++i) {
            Vec x(D);
            for (int j = 0; j < D; ++j) x(j) = rng.normal();
            x.normalize();
            cand.emplace_back(ws.objective(x), x);
        }
    }
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    best.x = cand.front().second;
    best.f = cand.front().first;
    best.samples = S;
    const int starts = std::min<int>(opts.n_starts, static_cast<int>(cand.size()));
    auto f = [&](const Vec& x) { return ws.objective(x); };
    for (int s = 0; s < starts; ++s) {
        const auto r = detail::nelder_mead(f, cand[static_cast<std::size_t>(s)].second, 0.1, opts.nm_max_evals);
        if (r.f < best.f) {
            best.f = r.f;
            best.x = r.x.normalized();
        }
    }
    return best;
}

}  // namespace

ExpansionCertificate expansion_certificate_on(const GroupMeasure& mu, const Representation& rep, const Mat& q,
                                              int N, const CertificateOptions& opts) {
    if (N < 1)
        throw DomainError("expansion", "expansion_certificate", "N must be >= 1");
    const int D = rep.dim(mu.dim());
    if (q.rows() != D)
        throw DomainError("expansion", "expansion_certificate", "quotient basis has wrong ambient dimension");
    ExpansionCertificate cert;
    cert.N = N;
    cert.rep_dim = static_cast<int>(q.cols());
    if (q.cols() == 0) {
        cert.mode = CertMode::Exact;
        cert.confidence = 1.0;
        cert.witness = Vec();
        return cert;
    }
    auto project = [&](const Mat& g) -> Mat { return q.transpose() * rep.apply(g) * q; };

    const bool exact = !opts.force_monte_carlo && mu.is_atomic() && word_count(mu.size(), N) <= opts.cap;
    WordSet ws;
    if (exact) {
        const auto conv = convolution_support(mu, N, opts.cap);
        std::vector<Mat> mats;
        std::vector<double> w;
        for (const auto& a : conv.atoms()) {
            mats.push_back(project(a.g));
            w.push_back(a.weight);
        }
        ws.build(mats, std::move(w));
        const auto m = minimize_on_sphere(ws, opts);
        cert.mode = CertMode::Exact;
        cert.confidence = 1.0;
        cert.C_lower = m.f;
        cert.C_estimate = m.f;
        cert.witness = m.x;
        cert.sphere_samples = m.samples;
        cert.words = static_cast<long>(conv.size());
        return cert;
    }

    if (opts.mc_words < 2 || !(opts.confidence > 0.0 && opts.confidence < 1.0))
        throw DomainError("expansion", "expansion_certificate", "Monte Carlo needs >= 2 words and confidence in (0,1)");
    const auto n = opts.mc_words;
    auto sample_set = [&](std::uint64_t stream) {
        CounterRng rng(subseed(opts.seed, stream));
        std::vector<Mat> mats;
        mats.reserve(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) mats.push_back(project(word_product(mu, N, rng)));
        WordSet s;
        s.build(mats, std::vector<double>(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n)));
        return s;
    };
    // Common random words locate the minimizer; an independent batch bounds it.
    ws = sample_set(1);
    const auto m = minimize_on_sphere(ws, opts);
    const WordSet fresh = sample_set(2);
    const Vec vals = fresh.values(m.x);
    const double mean = vals.mean();
    const double var = (vals.array() - mean).square().sum() / static_cast<double>(n - 1);
    const double z = boost::math::quantile(boost::math::normal(), opts.confidence);
    cert.mode = CertMode::MonteCarlo;
    cert.confidence = opts.confidence;
    cert.C_estimate = mean;
    cert.C_lower = mean - z * std::sqrt(var / static_cast<double>(n));
    cert.witness = m.x;
    cert.sphere_samples = m.samples;
    cert.words = n;
    return cert;
}

ExpansionCertificate expansion_certificate(const GroupMeasure& mu, const Representation& rep, int N,
                                           const CertificateOptions& opts) {
    const int D = rep.dim(mu.dim());
    return expansion_certificate_on(mu, rep, Mat::Identity(D, D), N, opts);
}

double certificate_objective(const GroupMeasure& mu, const Representation& rep, int N, const Vec& v) {
    const auto conv = convolution_support(mu, N);
    double s = 0.0;
    for (const auto& a : conv.atoms()) s += a.weight * std::log((rep.apply(a.g) * v).norm() / v.norm());
    return s;
}

Mat fixed_subspace(const GroupMeasure& mu, const Representation& rep, int n_words, std::uint64_t seed,
                   double threshold) {
    const int D = rep.dim(mu.dim());
    std::vector<Mat> blocks;
    if (mu.is_atomic())
        for (const auto& a : mu.atoms()) blocks.push_back(rep.apply(a.g) - Mat::Identity(D, D));
    CounterRng rng(subseed(seed, 7));
    for (int i = 0; i < n_words; ++i) blocks.push_back(rep.apply(word_product(mu, 4, rng)) - Mat::Identity(D, D));
    Mat stacked(static_cast<Eigen::Index>(blocks.size()) * D, D);
    for (std::size_t i = 0; i < blocks.size(); ++i) stacked.middleRows(static_cast<Eigen::Index>(i) * D, D) = blocks[i];
    return null_space(stacked, threshold);
}

std::vector<ExpansionCertificate> relative_expansion_sweep(const GroupMeasure& mu, int k_max,
                                                           const SweepOptions& opts) {
    if (k_max < 1)
        throw DomainError("expansion", "relative_expansion_sweep", "k_max must be >= 1");
    std::vector<ExpansionCertificate> out;
    for (int k = 1; k <= k_max; ++k) {
        Representation rep;
        rep.kind = k == 1 ? Representation::Kind::Adjoint : Representation::Kind::AdjointWedge;
        rep.k = k;
        const int d = mu.dim();
        const std::size_t D = binomial(d * d - 1, k);
        if (D == 0 || D > static_cast<std::size_t>(opts.dim_cap))
            throw CapError("expansion", "relative_expansion_sweep",
                           "wedge^" + std::to_string(k) + " of the adjoint has dimension " + std::to_string(D) +
                               " beyond the cap " + std::to_string(opts.dim_cap));
        const Mat fixed = fixed_subspace(mu, rep, opts.n_words, opts.cert.seed);
        const Mat q = orthogonal_complement(fixed, static_cast<int>(D));
        out.push_back(expansion_certificate_on(mu, rep, q, opts.N, opts.cert));
    }
    return out;
}

ConeSpec::ConeSpec(std::vector<int> block_sizes) : blocks(std::move(block_sizes)) {
    if (blocks.empty())
        throw DomainError("expansion", "ConeSpec", "no blocks");
    for (int b : blocks)
        if (b < 1) throw DomainError("expansion", "ConeSpec", "block sizes must be positive");
    d = std::accumulate(blocks.begin(), blocks.end(), 0);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (block_of(i) < block_of(j)) roots.emplace_back(i, j);
}

int ConeSpec::block_of(int i) const {
    int acc = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        acc += blocks[b];
        if (i < acc) return static_cast<int>(b);
    }
    throw DomainError("expansion", "ConeSpec", "index outside the blocks");
}

ConeResult expanding_cone_membership(const ConeSpec& spec, const CartanVector& a) {
    if (a.dim() != spec.d)
        throw DomainError("expansion", "expanding_cone_membership", "dimension mismatch");
    ConeResult res;
    const int d = spec.d;
    res.separator = Vec::Zero(d);
    const int R = static_cast<int>(spec.roots.size());
    if (R == 0) {
        res.tau = -std::numeric_limits<double>::infinity();
        return res;
    }
    // Variables: s_alpha = t_alpha - tau >= 0, then tau = tau+ - tau-.
    // The last coordinate row is the negative sum of the others and is dropped.
    Mat A = Mat::Zero(d - 1, R + 2);
    Vec sum_roots = Vec::Zero(d);
    for (int c = 0; c < R; ++c) {
        const auto [i, j] = spec.roots[static_cast<std::size_t>(c)];
        Vec col = Vec::Zero(d);
        col(i) = 1.0;
        col(j) = -1.0;
        A.col(c) = col.head(d - 1);
        sum_roots += col;
    }
    A.col(R) = sum_roots.head(d - 1);
    A.col(R + 1) = -sum_roots.head(d - 1);
    Vec b(d - 1);
    for (int i = 0; i < d - 1; ++i) b(i) = a[static_cast<std::size_t>(i)];
    Vec c = Vec::Zero(R + 2);
    c(R) = 1.0;
    c(R + 1) = -1.0;

    const auto lp = detail::lp_maximize(A, b, c);
    if (lp.status != detail::LpResult::Status::Optimal)
        throw ConvergenceError("expansion", "expanding_cone_membership", "cone program did not reach an optimum");
    res.tau = lp.x(R) - lp.x(R + 1);
    res.inside = res.tau > 1e-9;
    for (int k = 0; k < R; ++k) {
        const auto [i, j] = spec.roots[static_cast<std::size_t>(k)];
        res.coefficients.emplace_back(i, j, lp.x(k) + res.tau);
    }
    res.separator.head(d - 1) = lp.y;
    return res;
}

bool a_expanding_check(const ConeSpec& spec, const CartanVector& a, int k) {
    const int d = spec.d;
    if (a.dim() != d)
        throw DomainError("expansion", "a_expanding_check", "dimension mismatch");
    if (k < 1 || k > d - 1)
        throw DomainError("expansion", "a_expanding_check", "grade must lie in [1, d-1]");
    const auto D = static_cast<Eigen::Index>(binomial(d, k));
    std::vector<Mat> gens;
    for (const auto& [i, j] : spec.roots) {
        Mat u = Mat::Identity(d, d);
        u(i, j) = 1.0;
        gens.push_back(wedge_power(u, k) - Mat::Identity(D, D));
    }
    Mat Z;
    if (gens.empty()) {
        Z = Mat::Identity(D, D);
    } else {
        Mat stacked(static_cast<Eigen::Index>(gens.size()) * D, D);
        for (std::size_t g = 0; g < gens.size(); ++g) stacked.middleRows(static_cast<Eigen::Index>(g) * D, D) = gens[g];
        Z = null_space(stacked, 1e-8);
    }
    if (Z.cols() == 0) return true;
    const auto subsets = k_subsets(d, k);
    Vec w(D);
    for (Eigen::Index s = 0; s < D; ++s) {
        double x = 0.0;
        for (int i : subsets[static_cast<std::size_t>(s)]) x += a[static_cast<std::size_t>(i)];
        w(s) = x;
    }
    const Mat restricted = Z.transpose() * w.asDiagonal() * Z;
    Eigen::SelfAdjointEigenSolver<Mat> eig(restricted);
    return eig.eigenvalues().minCoeff() > 1e-12;
}

}  // namespace expwalk
