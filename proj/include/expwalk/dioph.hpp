#pragma once

// Weighted Diophantine approximation of m x n matrices M through the orbit
// a(t) u_M Z^d of the diagonal flow, and the brute-force approximation
// quality it mirrors.

#include "expwalk/fractal.hpp"
#include "expwalk/hp.hpp"
#include "expwalk/linalg.hpp"
#include "expwalk/weights.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace expwalk {

struct BruteQuality {
    double quality = 0.0;
    std::vector<long> q;  // argmin
    std::vector<long> p;
};

constexpr double kBruteCap = 1e8;

/// min over integer q != 0 with T_min <= max_j |q_j|^{1/s_j} <= T_max of
/// max_i |M_i q - p_i|^{1/r_i} * max_j |q_j|^{1/s_j}, p = round(M q).
/// A negative T_min selects the default window T_min = sqrt(T_max).
BruteQuality brute_force_quality(const Mat& M, const WeightPair& w, double T_max, double T_min = -1.0);
BruteQuality brute_force_quality(const HpMatrix& M, const WeightPair& w, double T_max, double T_min = -1.0);

struct FlowTrace {
    Mat M;
    std::vector<double> t;
    std::vector<double> minima;   // sup-norm shortest vector of a(t) u_M Z^d
    std::vector<double> siegel;   // nonzero vectors of Euclidean norm <= siegel_R
    double siegel_R = 1.0;

    /// inf of minima over grid points with t_lo <= t <= t_hi.
    double inf_minima(double t_lo = 0.0, double t_hi = 1e300) const;
};

struct FlowOptions {
    bool record_siegel = false;
    double siegel_R = 1.0;
};

/// Flowed lattices on the grid 0, dt, 2dt, ... <= t_max, computed
/// incrementally in extended precision.
FlowTrace flow_trace(const HpMatrix& M, const WeightPair& w, double t_max, double dt = 0.05,
                     const FlowOptions& opts = {});
FlowTrace flow_trace(const Mat& M, const WeightPair& w, double t_max, double dt = 0.05,
                     const FlowOptions& opts = {});

HpMatrix to_hp(const Mat& M);
Mat to_double(const HpMatrix& M);

struct ClassifyOptions {
    double dt = 0.05;
    double badly_threshold = 0.1;
    double siegel_R = 1.0;
    double generic_tol = 0.25;  // relative tolerance on the Siegel average
};

struct ClassifyReport {
    double badly_approx_proxy = 0.0;    // inf of minima over [0, t_max]
    bool badly_evidence = false;
    double dirichlet_proxy = 0.0;       // largest eps never regained after t_max/2 (0 if none)
    bool dirichlet_evidence = false;
    double generic_proxy = 0.0;         // in [0,1]; 1 = Siegel average matches Haar exactly
    bool generic_evidence = false;
    double siegel_average = 0.0;
    double occupation_drift = 0.0;      // max |first-half - second-half| K_eps occupation
};

ClassifyReport classify_point(const HpMatrix& M, const WeightPair& w, double t_max,
                              const std::vector<double>& eps_grid, const ClassifyOptions& opts = {});
ClassifyReport classify_point(const Mat& M, const WeightPair& w, double t_max,
                              const std::vector<double>& eps_grid, const ClassifyOptions& opts = {});

struct FractalOptions {
    ClassifyOptions classify;
    std::vector<double> eps_grid{0.05, 0.1, 0.2};
    std::vector<double> thresholds{0.1, 0.15, 0.2, 0.3};
    double brute_T = 1000.0;
    double coding_tol = 1e-45;
};

struct FractalPoint {
    long id = 0;
    Mat M;
    double quality = 0.0;
    double inf_minima = 0.0;
    ClassifyReport report;
};

struct FractalSummary {
    std::vector<FractalPoint> points;
    std::vector<double> thresholds;
    std::vector<double> fraction_badly;   // per threshold: fraction with inf_minima >= threshold
    double median_generic = 0.0;
    std::vector<double> quality_quantiles;  // 0, 0.25, 0.5, 0.75, 1
    std::string irreducibility;
};

/// Samples the self-affine measure and classifies each point; refuses
/// non-contracting, reducible or weight-incompatible inputs.
FractalSummary fractal_experiment(const AffineIFS& ifs, const WeightPair& w, long n_points, double t_max,
                                  std::uint64_t seed, const FractalOptions& opts = {});

/// Kendall tau-b rank correlation.
double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace expwalk
