#pragma once

// Expansion diagnostics for random matrix products: Lyapunov growth along a
// vector, the finite-N integral certificate of uniform expansion, and the
// expanding cone of a block unipotent subgroup.

#include "expwalk/linalg.hpp"
#include "expwalk/measures.hpp"

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace expwalk {

/// Representation of SL_d used by the certificates.
struct Representation {
    enum class Kind { Standard, Wedge, Adjoint, AdjointWedge };
    Kind kind = Kind::Standard;
    int k = 1;

    /// "std", "wedge:k", "adj" or "adjwedge:k".
    static Representation parse(const std::string& text);
    std::string name() const;
    int dim(int d) const;
    Mat apply(const Mat& g) const;
};

struct FkEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Mean over trials of (1/n) log ||g_n ... g_1 v||, renormalizing each step.
FkEstimate fk_exponent_estimate(const GroupMeasure& mu, const Vec& v, int n_steps, int n_trials,
                                std::uint64_t seed);

enum class CertMode { Exact, MonteCarlo };

struct ExpansionCertificate {
    int N = 0;
    double C_lower = 0.0;     // exact min, or one-sided lower confidence bound
    double C_estimate = 0.0;  // point estimate at the witness
    CertMode mode = CertMode::Exact;
    long sphere_samples = 0;
    double confidence = 1.0;
    long words = 0;           // distinct words (exact) or sampled words per batch
    int rep_dim = 0;
    Vec witness;              // minimizing unit vector found

    bool pass() const { return C_lower > 0.0; }
    std::string verdict() const;
};

struct CertificateOptions {
    std::size_t cap = kDefaultWordCap;  // exact enumeration allowed up to this many words
    bool force_monte_carlo = false;
    long sphere_samples = 1000;
    int n_starts = 20;
    int nm_max_evals = 600;
    long mc_words = 20000;
    double confidence = 0.95;
    std::uint64_t seed = 0;
};

/// min over unit v of the mu^{*N}-average of log(||rho(g)v|| / ||v||).
ExpansionCertificate expansion_certificate(const GroupMeasure& mu, const Representation& rep, int N,
                                           const CertificateOptions& opts = {});

/// As above, acting on the quotient rho / W presented on the orthogonal
/// complement, whose orthonormal basis is the columns of q.
ExpansionCertificate expansion_certificate_on(const GroupMeasure& mu, const Representation& rep,
                                              const Mat& q, int N, const CertificateOptions& opts = {});

/// Direct evaluation of the certificate integrand at v (exact mode only).
double certificate_objective(const GroupMeasure& mu, const Representation& rep, int N, const Vec& v);

/// Joint fixed space of rho(atoms) and rho of `n_words` random words.
Mat fixed_subspace(const GroupMeasure& mu, const Representation& rep, int n_words, std::uint64_t seed,
                   double threshold = 1e-8);

struct SweepOptions {
    CertificateOptions cert;
    int N = 1;
    int n_words = 25;
    int dim_cap = 400;
};

/// One certificate per wedge^k of the adjoint, k = 1..k_max, on the quotient
/// by the numerically fixed subspace.
std::vector<ExpansionCertificate> relative_expansion_sweep(const GroupMeasure& mu, int k_max,
                                                           const SweepOptions& opts = {});

/// Standard parabolic of sl_d with the given block sizes.
struct ConeSpec {
    int d = 0;
    std::vector<int> blocks;
    std::vector<std::pair<int, int>> roots;  // (i, j) with block(i) < block(j)

    explicit ConeSpec(std::vector<int> block_sizes);
    int block_of(int i) const;
};

struct ConeResult {
    bool inside = false;
    double tau = 0.0;  // optimal min coefficient
    std::vector<std::tuple<int, int, double>> coefficients;  // witness t_ij
    Vec separator;     // functional >= 0 on every root with value tau at logs
};

/// Decides a in the open cone of positive combinations of e_i - e_j over roots.
ConeResult expanding_cone_membership(const ConeSpec& spec, const CartanVector& a);

/// Whether every weight of exp(a) on the U-fixed vectors of wedge^k exceeds 1.
bool a_expanding_check(const ConeSpec& spec, const CartanVector& a, int k);

}  // namespace expwalk
