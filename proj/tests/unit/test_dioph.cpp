#include <doctest.h>

#include "expwalk/dioph.hpp"
#include "expwalk/error.hpp"
#include "expwalk/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace expwalk;

namespace {

Mat scalar(double x) {
    Mat a(1, 1);
    a << x;
    return a;
}

const WeightPair kFlat({1.0}, {1.0});

double golden() { return (std::sqrt(5.0) - 1) / 2; }

// Sup-norm systole of a(t) u_M Z^2 for 1x1 M by direct enumeration.
double systole_oracle(double M, double t, long Q) {
    double best = 1e300;
    for (long q = -Q; q <= Q; ++q) {
        const long p0 = std::lround(M * q);
        for (long p = p0 - 2; p <= p0 + 2; ++p) {
            if (p == 0 && q == 0) continue;
            best = std::min(best, std::max(std::exp(t) * std::abs(p - M * q), std::exp(-t) * std::abs(double(q))));
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("dioph") {

TEST_CASE("brute force quality examples") {
    CHECK(brute_force_quality(scalar(0), kFlat, 100).quality == 0.0);
    CHECK(brute_force_quality(scalar(0.5), kFlat, 100).quality == 0.0);
    const auto g = brute_force_quality(scalar(golden()), kFlat, 1000);
    CHECK(std::abs(g.quality - 0.4472) < 1e-3);
    REQUIRE(g.q.size() == 1);
    CHECK(std::abs(g.q[0]) >= std::sqrt(1000.0));
    // the argmin attains the reported value
    const double q = std::abs(double(g.q[0]));
    CHECK(std::abs(golden() * g.q[0] - g.p[0]) * q == doctest::Approx(g.quality).epsilon(1e-9));
}

TEST_CASE("brute force in extended precision agrees") {
    HpMatrix M(1, 1);
    M(0, 0) = (sqrt(hp_real(5)) - 1) / 2;
    const auto hp = brute_force_quality(M, kFlat, 1000);
    const auto d = brute_force_quality(scalar(golden()), kFlat, 1000);
    CHECK(hp.quality == doctest::Approx(d.quality).epsilon(1e-9));
    CHECK(std::abs(hp.q[0]) == std::abs(d.q[0]));
}

TEST_CASE("brute force guards") {
    CHECK_THROWS_AS(brute_force_quality(scalar(0.3), kFlat, 1e9), CapError);
    CHECK_THROWS_AS(brute_force_quality(scalar(0.3), kFlat, 10, 20), DomainError);
    Mat M(1, 2);
    M << 0.3, 0.7;
    CHECK_THROWS_AS(brute_force_quality(M, kFlat, 10), DomainError);
}

TEST_CASE("flow of the zero matrix") {
    const auto tr = flow_trace(scalar(0), kFlat, 4.0, 0.5);
    REQUIRE(tr.t.size() == 9);
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        CHECK(tr.t[k] == doctest::Approx(0.5 * k));
        CHECK(tr.minima[k] == doctest::Approx(std::exp(-tr.t[k])).epsilon(1e-12));
    }
}

TEST_CASE("flow minima agree with enumeration") {
    const auto tr = flow_trace(scalar(golden()), kFlat, 8.0, 0.25);
    for (std::size_t k = 0; k < tr.t.size(); ++k)
        CHECK(tr.minima[k] == doctest::Approx(systole_oracle(golden(), tr.t[k], 20000)).epsilon(1e-9));
    CHECK(tr.inf_minima() >= 0.4);
}

TEST_CASE("rational rows collapse") {
    const auto tr = flow_trace(scalar(0.5), kFlat, 6.0, 0.5);
    CHECK(tr.minima.back() == doctest::Approx(2 * std::exp(-6.0)).epsilon(1e-9));
    CHECK(tr.inf_minima(3.0) < 0.01);
}

TEST_CASE("minima never exceed one") {
    CounterRng rng(12);
    const WeightPair w({0.4, 0.6}, {1.0});
    for (int trial = 0; trial < 5; ++trial) {
        Mat M(2, 1);
        M << rng.uniform(0, 1), rng.uniform(0, 1);
        const auto tr = flow_trace(M, w, 6.0, 0.1);
        for (double v : tr.minima) CHECK(v <= 1 + 1e-12);
    }
}

TEST_CASE("siegel counts along the flow stay even") {
    FlowOptions o;
    o.record_siegel = true;
    o.siegel_R = 2.0;
    const auto tr = flow_trace(scalar(golden()), kFlat, 3.0, 0.5, o);
    REQUIRE(tr.siegel.size() == tr.t.size());
    for (double c : tr.siegel) CHECK(std::fmod(c, 2.0) == 0.0);
}

TEST_CASE("classification examples") {
    const std::vector<double> eps{0.05, 0.1, 0.2};
    const auto zero = classify_point(scalar(0), kFlat, 6.0, eps);
    CHECK_FALSE(zero.badly_evidence);
    CHECK(zero.badly_approx_proxy == doctest::Approx(std::exp(-6.0)).epsilon(1e-9));
    const auto gold = classify_point(scalar(golden()), kFlat, 6.0, eps);
    CHECK(gold.badly_evidence);
    CHECK(gold.badly_approx_proxy >= 0.4);
    CHECK(gold.generic_proxy >= 0.0);
    CHECK(gold.generic_proxy <= 1.0);
}

TEST_CASE("kendall tau-b") {
    CHECK(kendall_tau_b({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0));
    CHECK(kendall_tau_b({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // one tie in y: nc = 2, nd = 0, tau_b = 2 / sqrt(3 * 2)
    CHECK(kendall_tau_b({1, 2, 3}, {1, 1, 2}) == doctest::Approx(2 / std::sqrt(6.0)));
}

TEST_CASE("fractal experiment on the Cantor set") {
    const auto ifs = sponge_builder({3}, {{0}, {2}});
    FractalOptions o;
    o.brute_T = 200;
    const auto s = fractal_experiment(ifs, *ifs.weightpair, 6, 4.0, 3, o);
    REQUIRE(s.points.size() == 6);
    CHECK(s.irreducibility == "irreducible");
    for (const auto& p : s.points) {
        CHECK(p.inf_minima <= 1 + 1e-12);
        CHECK(p.M(0, 0) >= 0);
        CHECK(p.M(0, 0) <= 1);
    }
    REQUIRE(s.fraction_badly.size() == o.thresholds.size());
    for (std::size_t i = 1; i < s.fraction_badly.size(); ++i) CHECK(s.fraction_badly[i] <= s.fraction_badly[i - 1]);
}

TEST_CASE("fractal experiment refuses bad inputs") {
    const auto column = sponge_builder({2, 3}, {{0, 0}, {0, 1}, {0, 2}});
    CHECK_THROWS_AS(fractal_experiment(column, *column.weightpair, 4, 3.0, 1), DomainError);
    const auto carpet = sponge_builder({2, 3}, {{0, 0}, {1, 1}, {0, 2}});
    CHECK_THROWS_AS(fractal_experiment(carpet, WeightPair({0.5, 0.5}, {1.0}), 4, 3.0, 1), DomainError);
}

}  // TEST_SUITE
