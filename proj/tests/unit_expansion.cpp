#include <doctest.h>

#include <cmath>

#include "projcond/clones.hpp"
#include "projcond/error.hpp"
#include "projcond/expansion.hpp"
#include "projcond/oracles.hpp"

using namespace projcond;

namespace {

MatrixXd unit_symmetric(int k, Rng& rng) {
    MatrixXd a = rng.normal_matrix(k, k);
    a = (0.5 * (a + a.transpose())).eval();
    return a / spectral_norm(a);
}

}  // namespace

TEST_CASE("taylor_p1 examples") {
    const auto zero = taylor_p1(0.0, 3);
    CHECK(zero[0] == 1.0);
    for (std::size_t j = 1; j < zero.size(); ++j) CHECK(zero[j] == 0.0);
    const auto c = taylor_p1(1.0, 2);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == -0.5);
    CHECK(c[2] == 0.125);
}

TEST_CASE("taylor_r1 examples") {
    for (double v : taylor_r1(1000, 1, 3, 0.0)) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
    const int d = 10000, p = 1, k = 2;
    const auto p1 = taylor_p1(1.0, k);
    const auto r1 = taylor_r1(d, p, k, 1.0);
    CHECK(std::abs(p1[0] + r1[0] - taylor_g1(k, d, p, k, 1.0)) < 1e-12);
}

TEST_CASE("taylor_p2 examples") {
    CHECK(taylor_p2(3, 1)[1] == -1.5);
    const auto c = taylor_p2(2, 2);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == -1.0);
    CHECK(c[2] == doctest::Approx(1.0).epsilon(1e-15));
    for (double v : taylor_p2(1, 4)) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("psi at S = I is exact") {
    const int d = 500, p = 1, k = 2;
    VectorXd x(1);
    x << 0.5;
    const double xs = x.squaredNorm();
    const MatrixXd I = MatrixXd::Identity(k, k);
    const double expect = eta_norm_const(d, p, k) * std::pow(1.0 - k * xs / d, 0.5 * (d - p - k - 1)) *
                          std::exp(0.5 * k * xs);
    CHECK(psi_eval(x, I, d, p) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(remainder_diagnostic(x, I, d, p).remainder == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(psi_eval(VectorXd::Zero(1), I, d, p) == doctest::Approx(eta_norm_const(d, p, k)).epsilon(1e-12));
}

TEST_CASE("psi_poly structure") {
    VectorXd x(1);
    x << 0.5;
    const auto poly = psi_poly(x, 2, 1, 500);
    CHECK(poly.coefficient(MonomialKey{}) ==
          doctest::Approx(psi_eval(x, MatrixXd::Identity(2, 2), 500, 1)).epsilon(1e-12));
    CHECK(poly.coefficient(MonomialKey::canonical({{1, 1}})) ==
          doctest::Approx(poly.coefficient(MonomialKey::canonical({{2, 2}}))).epsilon(1e-13));
}

TEST_CASE("psi_poly agrees with psi_eval") {
    Rng rng(1);
    for (int k : {1, 2, 3, 4}) {
        VectorXd x(2);
        x << 0.4, 0.2;
        const int d = 20000;
        const auto poly = psi_poly(x, k, 2, d);
        for (int trial = 0; trial < 25; ++trial) {
            const MatrixXd S = MatrixXd::Identity(k, k) + 0.02 * unit_symmetric(k, rng);
            CHECK(std::abs(poly.evaluate(S) - psi_eval(x, S, d, 2)) < 1e-10);
        }
    }
}

TEST_CASE("psi matches the series oracle through order k") {
    Rng rng(2);
    const int d = 10000, p = 1;
    VectorXd x(1);
    x << 0.5;
    for (int k : {1, 2, 4}) {
        const MatrixXd A = unit_symmetric(k, rng);
        const auto c = oracle::ratio_series(x.squaredNorm(), A, d, p, k);
        const double eps = 0.01;
        long double truncated = 0.0L;
        for (int j = k; j >= 0; --j) truncated = truncated * eps + c[static_cast<std::size_t>(j)];
        const MatrixXd S = MatrixXd::Identity(k, k) + eps * A;
        CHECK(std::abs(psi_eval(x, S, d, p) - static_cast<double>(truncated)) < 1e-12);
    }
}

TEST_CASE("remainder shrinks at order k + 1") {
    Rng rng(3);
    const int d = 500, p = 1, k = 2;
    VectorXd x(1);
    x << 0.5;
    const MatrixXd A = unit_symmetric(k, rng);
    const double r1 = std::abs(remainder_diagnostic(x, MatrixXd::Identity(k, k) + 0.02 * A, d, p).remainder);
    const double r2 = std::abs(remainder_diagnostic(x, MatrixXd::Identity(k, k) + 0.01 * A, d, p).remainder);
    const double ratio = r1 / r2;
    CHECK(ratio > std::pow(2.0, k + 1) / 1.5);
    CHECK(ratio < std::pow(2.0, k + 1) * 1.5);
}

TEST_CASE("remainder_diagnostic refuses large perturbations") {
    Rng rng(4);
    VectorXd x(1);
    x << 0.5;
    const MatrixXd S = MatrixXd::Identity(2, 2) + 0.3 * unit_symmetric(2, rng);
    CHECK_THROWS_AS(remainder_diagnostic(x, S, 500, 1), Error);
}

TEST_CASE("psi rejects a non-symmetric S") {
    VectorXd x(1);
    x << 0.5;
    MatrixXd S = MatrixXd::Identity(2, 2);
    S(0, 1) = 0.01;
    CHECK_THROWS_AS(psi_eval(x, S, 500, 1), Error);
    CHECK_THROWS_AS(remainder_diagnostic(x, S, 500, 1), Error);
}

TEST_CASE("psi threshold precondition") {
    CHECK_NOTHROW(check_psi_threshold(1.0, 2, 1, 100));
    CHECK_THROWS_AS(check_psi_threshold(1.0, 2, 1, 16), Error);
    CHECK_THROWS_AS(check_psi_threshold(0.0, 1, 5, 25), Error);
}

TEST_CASE("MonomialKey canonical form") {
    const auto a = MonomialKey::canonical({{2, 1}, {1, 1}});
    const auto b = MonomialKey::canonical({{1, 1}, {1, 2}});
    CHECK(a == b);
    CHECK(a.degree() == 2);
    MatrixXd E(2, 2);
    E << 2.0, 3.0, 3.0, 5.0;
    CHECK(a.evaluate(E) == 6.0);
}
