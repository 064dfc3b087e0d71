#include <doctest.h>

#include "expwalk/error.hpp"
#include "expwalk/fractal.hpp"
#include "expwalk/kau.hpp"
#include "expwalk/rng.hpp"

#include <cmath>

using namespace expwalk;

namespace {

Mat rot(double th) {
    Mat r(2, 2);
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return r;
}

Mat scalar(double x) {
    Mat a(1, 1);
    a << x;
    return a;
}

AffineIFS cantor() { return sponge_builder({3}, {{0}, {2}}); }

// 2x1 sponge with rotation parts: A1 = e^{t/2} R, A2 = e^t, r = (1/2, 1/2), s = 1.
AffineIFS rotating_sponge() {
    const double t = -std::log(2.0);
    std::vector<MatrixAffinity> syms;
    const double angles[3] = {0.3, -1.1, 2.0};
    const double offs[3][2] = {{0.0, 0.0}, {0.5, 0.1}, {0.2, 0.7}};
    for (int i = 0; i < 3; ++i) {
        Mat B(2, 1);
        B << offs[i][0], offs[i][1];
        syms.emplace_back(std::exp(t / 2) * rot(angles[i]), scalar(std::exp(t)), B);
    }
    return AffineIFS(std::move(syms), {}, WeightPair({0.5, 0.5}, {1.0}));
}

std::vector<Mat> embedded_word(const AffineIFS& ifs, int len, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<Mat> w;
    for (int i = 0; i < len; ++i) w.push_back(embed_to_pgl(ifs.symbols[rng.below(ifs.size())]));
    return w;
}

}  // namespace

TEST_SUITE("kau") {

TEST_CASE("factorization of a(t) u_M") {
    const WeightPair w({0.3, 0.7}, {1.0});
    const ParabolicProfile prof(w);
    Mat M(2, 1);
    M << 0.4, -1.3;
    const auto f = kau_factorize(w.a(0.9) * unipotent(M), prof);
    CHECK((f.k - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK(f.t == doctest::Approx(0.9).epsilon(1e-12));
    CHECK((f.M - M).norm() < 1e-12);
}

TEST_CASE("factorization of the Cantor element") {
    const Mat g = embed_to_pgl(cantor().symbols[1]);
    Mat expect(2, 2);
    expect << std::sqrt(3.0), -std::sqrt(3.0) * 2.0 / 3.0, 0, 1 / std::sqrt(3.0);
    CHECK((g - expect).cwiseAbs().maxCoeff() < 1e-14);
    const auto f = kau_factorize(g, ParabolicProfile(WeightPair({1.0}, {1.0})));
    CHECK((f.k - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK(f.t == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-12));
    CHECK(f.M(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("factorization recovers a rotation block") {
    const WeightPair w({0.5, 0.5}, {1.0});
    const ParabolicProfile prof(w);
    Mat M(2, 1);
    M << 0.2, 0.9;
    Mat k = Mat::Identity(3, 3);
    k.topLeftCorner(2, 2) = rot(0.7);
    const Mat g = k * w.a(1.4) * unipotent(M);
    const auto f = kau_factorize(g, prof);
    CHECK((f.k - k).norm() < 1e-9);
    CHECK((f.k.transpose() * f.k - Mat::Identity(3, 3)).norm() < 1e-9);
    CHECK((f.reconstruct(w) - g).norm() < 1e-9);
    // refactorizing the reconstruction is the identity on factors
    const auto f2 = kau_factorize(f.reconstruct(w), prof);
    CHECK((f2.k - f.k).norm() < 1e-9);
    CHECK(std::abs(f2.t - f.t) < 1e-9);
    CHECK((f2.M - f.M).norm() < 1e-9);
}

TEST_CASE("elements outside P are rejected") {
    const ParabolicProfile prof(WeightPair({0.5, 0.5}, {1.0}));
    Mat g = Mat::Identity(3, 3);
    g(2, 0) = 0.1;
    CHECK_THROWS_AS(kau_factorize(g, prof), FactorizationError);
    Mat h = Mat::Zero(3, 3);
    h.diagonal() << 2, 3, 1.0 / 6;
    CHECK_THROWS_AS(kau_factorize(h, prof), FactorizationError);
}

TEST_CASE("word_factors examples") {
    const WeightPair w({1.0}, {1.0});
    const ParabolicProfile prof(w);
    const std::vector<Mat> diag_word(5, w.a(1.0));
    const auto f = word_factors(diag_word, prof);
    REQUIRE(f.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(f[i].t == doctest::Approx(i + 1.0));
        CHECK(f[i].M.norm() == 0.0);
    }
    CHECK(word_factors({}, prof).empty());

    const Mat g1 = embed_to_pgl(cantor().symbols[1]);
    const auto c = word_factors({g1, g1}, prof);
    CHECK(c[0].t == doctest::Approx(0.5 * std::log(3.0)));
    CHECK(c[1].t == doctest::Approx(std::log(3.0)));
    CHECK(c[0].M(0, 0) == doctest::Approx(2.0 / 3));
    CHECK(c[1].M(0, 0) == doctest::Approx(2.0 / 3 + 2.0 / 9));
}

TEST_CASE("lambda is additive along words") {
    const auto ifs = rotating_sponge();
    const ParabolicProfile prof(*ifs.weightpair);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto word = embedded_word(ifs, 20, seed);
        const auto f = word_factors(word, prof);
        double sum = 0;
        for (std::size_t i = 0; i < word.size(); ++i) {
            sum += kau_factorize(word[i], prof).t;
            CHECK(std::abs(f[i].t - sum) < 1e-10);
        }
    }
}

TEST_CASE("conjugated tail terms obey the exponential bound") {
    const auto ifs = rotating_sponge();
    const WeightPair& w = *ifs.weightpair;
    const ParabolicProfile prof(w);
    const double alpha = w.min_root_weight();
    const auto word = embedded_word(ifs, 30, 5);
    const auto f = word_factors(word, prof);
    for (std::size_t k = 1; k < word.size(); ++k) {
        const auto fk = kau_factorize(word[k], prof);
        const Mat term = conjugated_term(fk.M, f[k - 1], w);
        CHECK(spectral_norm(term) <= spectral_norm(fk.M) * std::exp(-alpha * f[k - 1].t) * (1 + 1e-12));
    }
}

TEST_CASE("u_limit examples") {
    const WeightPair w({1.0}, {1.0});
    const ParabolicProfile prof(w);
    const auto flat = u_limit([&](long) { return w.a(0.5); }, prof, 1e-12, 1000);
    CHECK(flat.M.norm() == 0.0);

    const Mat g1 = embed_to_pgl(cantor().symbols[1]);
    const auto fixed = u_limit([&](long) { return g1; }, prof, 1e-14, 10000);
    CHECK(std::abs(fixed.M(0, 0) - 1.0) < 1e-9);

    auto mu = ifs_to_measure(cantor());
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const double x = u_limit(mu, seed, prof, 1e-13, 10000).M(0, 0);
        CHECK(x >= -1e-12);
        CHECK(x <= 1 + 1e-12);
        CHECK_FALSE((x > 1.0 / 3 + 1e-9 && x < 2.0 / 3 - 1e-9));
    }
}

TEST_CASE("u_limit reports non-convergence with the partial value") {
    const ParabolicProfile prof(WeightPair({1.0}, {1.0}));
    Mat M(1, 1);
    M << 1.0;
    const Mat u = unipotent(M);
    try {
        (void)u_limit([&](long) { return u; }, prof, 1e-12, 50);
        FAIL("expected LimitConvergenceError");
    } catch (const LimitConvergenceError& e) {
        CHECK(e.steps_used == 50);
        CHECK(e.partial_M(0, 0) == doctest::Approx(50.0));
    }
}

TEST_CASE("u_limit agrees with the coding map") {
    const auto ifs = rotating_sponge();
    const ParabolicProfile prof(*ifs.weightpair);
    CounterRng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> word;
        for (int i = 0; i < 200; ++i) word.push_back(rng.below(ifs.size()));
        const auto lim = u_limit([&](long i) { return embed_to_pgl(ifs.symbols[word[static_cast<std::size_t>(i)]]); }, prof,
                                 1e-14, 200);
        const Mat pi = coding_point(ifs, word, 1e-16, false);
        CHECK((lim.M - pi).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("equivariance residual") {
    const WeightPair w({1.0}, {1.0});
    CHECK(equivariance_residual(std::vector<Mat>(10, w.a(1.0)), ParabolicProfile(w)) < 1e-14);
    for (std::uint64_t seed = 0; seed < 10; ++seed)
        CHECK(equivariance_residual(embedded_word(cantor(), 20, seed), ParabolicProfile(w)) < 1e-9);
    const auto ifs = rotating_sponge();
    for (std::uint64_t seed = 0; seed < 10; ++seed)
        CHECK(equivariance_residual(embedded_word(ifs, 20, seed), ParabolicProfile(*ifs.weightpair)) < 1e-8);
}

}  // TEST_SUITE
