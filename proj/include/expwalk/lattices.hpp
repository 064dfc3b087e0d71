#pragma once

// Unimodular lattices g Z^d (basis vectors are the columns of g), their
// reduction and short vectors, the Margulis height, and random walks on the
// space of lattices.

#include "expwalk/linalg.hpp"
#include "expwalk/measures.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace expwalk {

enum class Norm { Sup, Euclid };

struct ShortVector {
    Vec v;
    double length = 0.0;
};

class UnimodularLattice {
public:
    /// Wraps an already reduced basis; use lll_reduce for arbitrary input.
    UnimodularLattice(Mat basis, Mat reduced, Mat transform);

    int dim() const { return static_cast<int>(basis_.rows()); }
    const Mat& basis() const { return basis_; }
    const Mat& reduced() const { return reduced_; }
    /// Integral unimodular T with reduced = basis * T.
    const Mat& transform() const { return transform_; }

    const ShortVector& shortest(Norm norm) const { return norm == Norm::Sup ? sup_ : euclid_; }

    static UnimodularLattice standard(int d);

private:
    Mat basis_;
    Mat reduced_;
    Mat transform_;
    ShortVector sup_;
    ShortVector euclid_;
};

constexpr double kLovasz = 0.99;

/// LLL reduction (Lovasz parameter 0.99) after rescaling to |det| = 1.
UnimodularLattice lll_reduce(const Mat& basis, double delta = kLovasz);

/// Reduces the columns of `b` in place; returns the integral transform.
Mat lll_columns(Mat& b, double delta = kLovasz);

/// Exact shortest nonzero vector by Fincke-Pohst enumeration.
ShortVector shortest_vector(const UnimodularLattice& x, Norm norm);
/// Same, for any reduced basis (columns), not necessarily unimodular.
ShortVector shortest_vector_of(const Mat& reduced, Norm norm);

bool mahler_member(const UnimodularLattice& x, double epsilon);

constexpr long kSiegelCap = 10'000'000;

/// Number of nonzero lattice vectors with Euclidean norm <= R.
long siegel_count(const UnimodularLattice& x, double R, long cap = kSiegelCap);
long siegel_count_of(const Mat& reduced, double R, long cap = kSiegelCap);

/// Volume of the Euclidean ball of radius R in R^d.
double ball_volume(int d, double R);

struct HeightSpec {
    double epsilon = 0.1;
    double delta = 0.3;
    std::vector<double> s0;  // strictly decreasing, trace zero

    HeightSpec(double eps, double delta_, std::vector<double> s0_);
    /// s0 = ((d-1)/2, (d-3)/2, ..., -(d-1)/2).
    static HeightSpec standard(int d, double eps = 0.1, double delta = 0.3);

    /// delta_i = i(d-i) and delta_{lambda_i} = s0_1 + ... + s0_i.
    double delta_i(int i) const;
    double delta_lambda(int i) const;
    /// Exponent of the equivariance bound beta(hx) <= N(h)^kappa beta(x).
    double kappa() const;
};

/// (max over x-integral monomials v of eps^{delta_i/delta_lambda_i} ||v||^{-1/delta_lambda_i})^delta.
/// Grade 1 and grade d-1 use exact minima; middle grades use the wedges of
/// reduced-basis subsets.
double margulis_height(const UnimodularLattice& x, const HeightSpec& spec);

struct Observable {
    enum class Kind { Height, Mahler, Siegel, ShortestSup, ShortestEuclid };
    Kind kind = Kind::Siegel;
    double param = 0.0;                 // epsilon for Mahler, R for Siegel
    std::optional<HeightSpec> height;  // for Height

    std::string name() const;
    double evaluate(const UnimodularLattice& x) const;
};

/// Per-observable series of a run; steps are 1-based.
struct TrajectoryRecord {
    std::vector<std::string> names;
    std::vector<long> steps;
    std::vector<std::vector<double>> values;    // [observable][step]
    std::vector<std::vector<double>> running;   // Birkhoff averages
};

UnimodularLattice act(const Mat& g, const UnimodularLattice& x);

TrajectoryRecord walk_simulate(const GroupMeasure& mu, const UnimodularLattice& x0, long n_steps,
                               const std::vector<Observable>& observables, std::uint64_t seed);

/// Lattice a k Z^d with a random orthogonal k and log-diagonal spread up to
/// `log_spread`; a generic starting point.
UnimodularLattice random_lattice(int d, double log_spread, std::uint64_t seed);

/// Points from short walk bursts started at random lattices.
std::vector<UnimodularLattice> sample_walk_points(const GroupMeasure& mu, int n_points, int max_burst,
                                                  double log_spread, std::uint64_t seed);

struct ContractionOptions {
    double cusp_level = 1.0;             // points with beta >= level must contract
    std::size_t exact_word_cap = 4096;   // enumerate mu^{*m} exactly up to this size
};

struct ContractionFit {
    int m = 0;
    double a_hat = 0.0;
    double b_hat = 0.0;
    long violations = 0;
    long cusp_points = 0;
    bool exact = false;
    bool success = false;
    std::vector<double> beta;    // per sample point
    std::vector<double> a_beta;  // estimated A^m beta
};

/// Fits A^m beta <= a beta + b on the samples: a_hat is the largest ratio
/// A^m beta / beta over points with beta >= cusp_level, b_hat the least b
/// covering every sample.
ContractionFit contraction_fit(const GroupMeasure& mu, const HeightSpec& height, int m,
                               const std::vector<UnimodularLattice>& points, int mc_trials, std::uint64_t seed,
                               const ContractionOptions& opts = {});

/// Tries m = 1..m_max and returns the first successful fit (or the last).
ContractionFit contraction_search(const GroupMeasure& mu, const HeightSpec& height, int m_max,
                                  const std::vector<UnimodularLattice>& points, int mc_trials, std::uint64_t seed,
                                  const ContractionOptions& opts = {});

struct RecurrenceResult {
    double level = 0.0;  // R_delta = {beta <= level}
    std::vector<long> n;
    std::vector<double> mass;
    long burn_in = -1;   // first grid n after which mass >= 1 - delta holds; -1 if none
    double beta_x0 = 0.0;
};

/// Sublevel set threshold (2b + 2) / ((1 - a) delta).
double recurrence_level(double a, double b, double delta);

RecurrenceResult recurrence_experiment(const GroupMeasure& mu, const HeightSpec& height, double delta,
                                       const UnimodularLattice& x0, const std::vector<long>& n_grid,
                                       int mc_trials, std::uint64_t seed, const ContractionFit& fit);

}  // namespace expwalk
