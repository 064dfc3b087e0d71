#pragma once

// Matrix affinities M -> A1 M A2 + B on m x n matrices, affine IFSs and their
// self-affine measures, sponge/carpet builders, and the embedding of a
// sponge affinity into PGL_{m+n}.

#include "expwalk/hp.hpp"
#include "expwalk/linalg.hpp"
#include "expwalk/measures.hpp"
#include "expwalk/weights.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace expwalk {

struct MatrixAffinity {
    Mat A1;  // m x m
    Mat A2;  // n x n
    Mat B;   // m x n

    MatrixAffinity() = default;
    MatrixAffinity(Mat a1, Mat a2, Mat b);

    int m() const { return static_cast<int>(A1.rows()); }
    int n() const { return static_cast<int>(A2.rows()); }
    static MatrixAffinity identity(int m, int n);
};

/// Exact description of grid-aligned affinities x -> (x + cell) / a
/// (coordinatewise, n = 1), used for extended-precision coding.
struct GridData {
    std::vector<int> bases;               // a_1..a_m
    std::vector<std::vector<int>> cells;  // one digit vector per symbol
};

struct AffineIFS {
    std::vector<MatrixAffinity> symbols;
    std::vector<double> weights;
    std::optional<WeightPair> weightpair;
    std::optional<GridData> grid;

    AffineIFS() = default;
    AffineIFS(std::vector<MatrixAffinity> syms, std::vector<double> w, std::optional<WeightPair> wp = {});

    int m() const { return symbols.front().m(); }
    int n() const { return symbols.front().n(); }
    std::size_t size() const { return symbols.size(); }
};

Mat affinity_apply(const MatrixAffinity& phi, const Mat& M);
/// phi o psi.
MatrixAffinity affinity_compose(const MatrixAffinity& phi, const MatrixAffinity& psi);

struct SpongeCheck {
    bool ok = false;
    double t = 0.0;
    std::string failure;  // names the failing block when !ok
};

/// Tests A1 in a_r(t) K_r and A2 in a_s(t) K_s for one common t.
SpongeCheck sponge_check(const MatrixAffinity& phi, const WeightPair& weights, double tol = 1e-8);

struct IfsValidation {
    bool contracting_on_average = false;
    int N_witness = 0;
    std::vector<double> values;  // expected log norm for N = 1..N_max
    bool monte_carlo = false;
};

/// Expected log operator norm of N-fold products of M -> A1 M A2.
IfsValidation ifs_validate(const AffineIFS& ifs, int N_max, std::size_t cap = kDefaultWordCap,
                           long mc_words = 20000, std::uint64_t seed = 0);

/// Matrix of M -> A1 M A2 on row-major vec(M).
Mat linear_part_matrix(const MatrixAffinity& phi);

constexpr long kCodingDepthCap = 10'000;

/// Coding-map image of a word: phi_{w_1} o ... o phi_{w_k}(0), extended
/// periodically until the composed linear part has norm < tol.
Mat coding_point(const AffineIFS& ifs, const std::vector<std::size_t>& word, double tol, bool periodic = true);

std::vector<Mat> coding_sample(const AffineIFS& ifs, long n_points, double tol, std::uint64_t seed);
/// Same word stream as coding_sample, evaluated exactly in extended
/// precision; requires grid data.
std::vector<HpMatrix> coding_sample_hp(const AffineIFS& ifs, long n_points, double tol, std::uint64_t seed);

struct Admissibility {
    bool ok = true;
    std::string failing;  // the violated inequality, spelled out
    std::vector<double> r;
};

/// Corollary weights r_i = (m log a_i - sum_{j != i} log a_j) / sum_j log a_j,
/// admissible when (1/m) S_i < log a_i < (2/(m-1)) S_i with S_i = sum_{j != i} log a_j.
Admissibility admissibility(const std::vector<int>& bases);

enum class WeightsMode { Corollary, Custom };

/// Grid IFS x -> diag(1/a) (x + cell) realized as (r,1)-sponge affinities
/// with A2 = e^t, t = -(sum log a_j)/(m+1). Corollary mode enforces the
/// admissibility gate; custom mode skips it and attaches the weight pair
/// only when the formula yields valid weights.
AffineIFS sponge_builder(const std::vector<int>& bases, const std::vector<std::vector<int>>& pattern,
                         WeightsMode mode = WeightsMode::Corollary,
                         const std::vector<double>& symbol_weights = {});

/// g_phi = Ahat^{-1} u_B with Ahat = blockdiag(A1, A2^{-1}), scaled to |det| = 1.
Mat embed_to_pgl(const MatrixAffinity& phi);
Mat ahat(const MatrixAffinity& phi);

/// The embedded random walk measure of an IFS.
GroupMeasure ifs_to_measure(const AffineIFS& ifs);

struct Irreducibility {
    enum class Verdict { Irreducible, Reducible, Inconclusive } verdict = Verdict::Inconclusive;
    Vec point;    // a point of the invariant affine subspace (vec form)
    Mat basis;    // its direction space (columns, vec form)
    std::string detail;
};

Irreducibility irreducibility_check(const AffineIFS& ifs);
std::string to_string(Irreducibility::Verdict v);

nlohmann::json ifs_to_json(const AffineIFS& ifs);
AffineIFS ifs_from_json(const nlohmann::json& j);
AffineIFS load_ifs(const std::string& path);

/// Row-major vectorization of an m x n matrix and back.
Vec vec_of(const Mat& M);
Mat mat_of(const Vec& v, int m, int n);

}  // namespace expwalk
