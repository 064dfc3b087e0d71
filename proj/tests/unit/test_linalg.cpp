#include <doctest.h>

#include "expwalk/error.hpp"
#include "expwalk/linalg.hpp"
#include "expwalk/rng.hpp"

#include <cmath>

using namespace expwalk;

namespace {

Mat random_matrix(int d, CounterRng& rng) {
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.uniform(-2.0, 2.0);
    return g;
}

// Minor of g on rows I and columns J via Eigen's LU determinant.
double minor_oracle(const Mat& g, const std::vector<int>& I, const std::vector<int>& J) {
    Mat s(I.size(), J.size());
    for (std::size_t a = 0; a < I.size(); ++a)
        for (std::size_t b = 0; b < J.size(); ++b) s(a, b) = g(I[a], J[b]);
    return s.determinant();
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("wedge_power entries are minors in lexicographic order") {
    CounterRng rng(11);
    for (int d = 2; d <= 4; ++d) {
        const Mat g = random_matrix(d, rng);
        for (int k = 1; k <= d; ++k) {
            const Mat W = wedge_power(g, k);
            const auto subs = k_subsets(d, k);
            REQUIRE(W.rows() == static_cast<Eigen::Index>(binomial(d, k)));
            for (std::size_t a = 0; a < subs.size(); ++a)
                for (std::size_t b = 0; b < subs.size(); ++b)
                    CHECK(W(a, b) == doctest::Approx(minor_oracle(g, subs[a], subs[b])).epsilon(1e-12));
        }
    }
}

TEST_CASE("wedge_power worked cases") {
    CHECK(wedge_power(Mat::Identity(3, 3), 2).isApprox(Mat::Identity(3, 3)));
    Mat d2 = Mat::Zero(2, 2);
    d2.diagonal() << 2, 0.5;
    CHECK(wedge_power(d2, 2)(0, 0) == doctest::Approx(1.0));
    Mat d3 = Mat::Zero(3, 3);
    d3.diagonal() << 3, 1, 1.0 / 3;
    Mat expect = Mat::Zero(3, 3);
    expect.diagonal() << 3, 1, 1.0 / 3;  // subsets 12, 13, 23
    CHECK((wedge_power(d3, 2) - expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(wedge_power(d3, 0), DomainError);
    CHECK_THROWS_AS(wedge_power(d3, 4), DomainError);
}

TEST_CASE("wedge_power is functorial") {
    CounterRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 3;
        const Mat g = random_matrix(d, rng), h = random_matrix(d, rng);
        for (int k = 1; k <= d; ++k) {
            const Mat lhs = wedge_power(g * h, k);
            const Mat rhs = wedge_power(g, k) * wedge_power(h, k);
            CHECK((lhs - rhs).norm() <= 1e-9 * std::max(1.0, rhs.norm()));
        }
    }
}

TEST_CASE("top wedge of a special linear matrix is +-1") {
    CounterRng rng(8);
    for (int d = 2; d <= 4; ++d) {
        Mat g = random_matrix(d, rng);
        const double det = g.determinant();
        g /= std::pow(std::abs(det), 1.0 / d);
        CHECK(std::abs(std::abs(wedge_power(g, d)(0, 0)) - 1.0) < 1e-9);
    }
}

TEST_CASE("pure wedge of standard basis vectors has unit norm") {
    Mat v = Mat::Zero(4, 2);
    v(0, 0) = 1;
    v(2, 1) = 1;
    const auto w = wedge(v);
    CHECK(w.coords.size() == 6);
    CHECK(w.norm() == doctest::Approx(1.0));
}

TEST_CASE("weight_decomposition examples") {
    auto w1 = weight_decomposition(CartanVector({1.0, -1.0}), 1);
    REQUIRE(w1.size() == 2);
    CHECK(w1[0].weight == doctest::Approx(1.0));
    CHECK(w1[0].basis == std::vector<std::vector<int>>{{0}});
    CHECK(w1[1].weight == doctest::Approx(-1.0));

    auto w2 = weight_decomposition(CartanVector({1.0, 1.0, -2.0}), 2);
    REQUIRE(w2.size() == 2);
    CHECK(w2[0].weight == doctest::Approx(2.0));
    CHECK(w2[0].basis == std::vector<std::vector<int>>{{0, 1}});
    CHECK(w2[1].weight == doctest::Approx(-1.0));
    CHECK(w2[1].basis.size() == 2);

    for (int k = 1; k <= 3; ++k) {
        auto w0 = weight_decomposition(CartanVector({0.0, 0.0, 0.0, 0.0}), k);
        REQUIRE(w0.size() == 1);
        CHECK(w0[0].weight == 0.0);
        CHECK(w0[0].basis.size() == binomial(4, k));
    }
}

TEST_CASE("weight space dimensions sum to the binomial") {
    CounterRng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> logs(5);
        double s = 0;
        for (int i = 0; i < 4; ++i) s += logs[i] = std::round(rng.uniform(-3, 3));
        logs[4] = -s;
        for (int k = 1; k <= 4; ++k) {
            std::size_t total = 0;
            for (const auto& ws : weight_decomposition(CartanVector(logs), k)) total += ws.basis.size();
            CHECK(total == binomial(5, k));
        }
    }
}

TEST_CASE("CartanVector rejects nonzero trace") {
    CHECK_THROWS_AS(CartanVector({1.0, 0.5}), DomainError);
}

TEST_CASE("operator_norms examples") {
    Mat d = Mat::Zero(2, 2);
    d.diagonal() << 2, 0.5;
    auto n = operator_norms(d);
    CHECK(n.norm == doctest::Approx(2.0));
    CHECK(n.inv_norm == doctest::Approx(2.0));
    CHECK(n.N == doctest::Approx(2.0));
    n = operator_norms(Mat::Identity(3, 3));
    CHECK(n.N == doctest::Approx(1.0));
    Mat g(2, 2);
    g << 2, 1, 1, 1;
    // sigma_max^2 is the larger root of x^2 - 7x + 1.
    const double oracle = std::sqrt((7.0 + std::sqrt(45.0)) / 2.0);
    CHECK(operator_norms(g).norm == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(oracle == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0));
    CHECK_THROWS_AS(operator_norms(Mat::Zero(2, 2)), DomainError);
}

TEST_CASE("N(g) >= 1 on SL_d") {
    CounterRng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 4;
        Mat g = random_matrix(d, rng);
        g /= std::pow(std::abs(g.determinant()), 1.0 / d);
        CHECK(operator_norms(g).N >= 1.0 - 1e-12);
    }
}

TEST_CASE("SquareMatrix validation") {
    Mat bad = Mat::Identity(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(SquareMatrix{bad}, DomainError);
    CHECK_THROWS_AS(SquareMatrix::special_linear(2.0 * Mat::Identity(2, 2)), DomainError);
    CHECK(SquareMatrix::identity(3).is_special_linear());
}

TEST_CASE("adjoint representation is a homomorphism and preserves sl_d") {
    CounterRng rng(9);
    const Mat g = random_matrix(3, rng), h = random_matrix(3, rng);
    CHECK((adjoint_matrix(g * h) - adjoint_matrix(g) * adjoint_matrix(h)).norm() < 1e-9 * adjoint_matrix(g * h).norm());
    const auto basis = sl_basis(3);
    CHECK(basis.size() == 8);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        CHECK(std::abs(basis[a].trace()) < 1e-14);
        for (std::size_t b = 0; b < basis.size(); ++b)
            CHECK(std::abs((basis[a].transpose() * basis[b]).trace() - (a == b ? 1.0 : 0.0)) < 1e-14);
    }
}

}  // TEST_SUITE
