#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include <Eigen/Eigenvalues>

#include "projcond/conditional.hpp"
#include "projcond/error.hpp"
#include "projcond/oracles.hpp"

using namespace projcond;

namespace {

StiefelMatrix oblique() {
    MatrixXd b(2, 1);
    b << 1.0, 2.0;
    return StiefelMatrix{MatrixXd(b / std::sqrt(5.0))};
}

}  // namespace

TEST_CASE("gaussian conditional moments are exact") {
    Rng rng(1);
    const auto B = haar_stiefel(12, 2, rng);
    VectorXd x(2);
    x << 0.7, -0.4;
    const auto e = estimate_conditional(DistributionSpec::gaussian(12), B, x, 2000, rng);
    CHECK(e.h.value == 1.0);
    CHECK(e.h.se == 0.0);
    CHECK((e.mu - B.matrix() * x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(e.delta.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("axis-aligned B leaves other coordinates mean zero") {
    Rng rng(2);
    const int d = 6;
    MatrixXd e1 = MatrixXd::Zero(d, 1);
    e1(0, 0) = 1.0;
    const StiefelMatrix B{e1};
    VectorXd x(1);
    x << 0.4;
    const auto [mu, se] = estimate_mu(DistributionSpec::iid(Marginal::Uniform, d), B, x, 40000, rng);
    CHECK(std::abs(mu[0] - 0.4) <= 4.0 * se[0] + 1e-12);
    for (int i = 1; i < d; ++i) CHECK(std::abs(mu[i]) <= 4.0 * se[i]);
}

TEST_CASE("importance sampling matches the fiber quadrature at d = 2") {
    const auto B = oblique();
    const auto spec = DistributionSpec::iid(Marginal::Uniform, 2);
    const Eigen::Vector2d b = B.matrix().col(0);
    for (double x : {0.0, 0.3, -0.8}) {
        const auto q = oracle::fiber_quadrature(Marginal::Uniform, b, x);
        Rng rng(3);
        VectorXd xv(1);
        xv << x;
        const auto e = estimate_conditional(spec, B, xv, 50000, rng);
        CHECK(std::abs(e.h.value - q.h) <= 4.0 * e.h.se);
        for (int i = 0; i < 2; ++i) CHECK(std::abs(e.mu[i] - q.mu[i]) <= 4.0 * e.mu_se[i]);
        CHECK(std::abs(e.delta_op_norm.value - q.delta_op_norm) <= 4.0 * e.delta_op_norm.se);
    }
}

TEST_CASE("Fourier route is exact for the gaussian spec") {
    Rng rng(11);
    const auto B = haar_stiefel(40, 1, rng);
    const VectorXd b = B.matrix().col(0);
    const auto f = fourier_conditional(DistributionSpec::gaussian(40), b, 0.7);
    CHECK(f.h.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((f.mu - 0.7 * b).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(f.delta.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Fourier route refuses slowly decaying characteristic functions") {
    // Two uniform coordinates: |phi| decays like 1/s^2, the inversion grid cannot reach the envelope floor.
    const Eigen::Vector2d b = oblique().matrix().col(0);
    CHECK_THROWS_AS(fourier_conditional(DistributionSpec::iid(Marginal::Uniform, 2), VectorXd(b), 0.3), Error);
}

TEST_CASE("Fourier route agrees with importance sampling") {
    Rng rng(10);
    const int d = 10;
    const auto spec = DistributionSpec::iid(Marginal::Uniform, d);
    const auto B = haar_stiefel(d, 1, rng);
    VectorXd x(1);
    x << 0.6;
    const auto f = fourier_conditional(spec, B.matrix().col(0), 0.6);
    const auto e = estimate_conditional(spec, B, x, 100000, rng);
    CHECK(std::abs(f.h.value - e.h.value) <= 4.0 * e.h.se);
    for (int i = 0; i < d; ++i) CHECK(std::abs(f.mu[i] - e.mu[i]) <= 4.0 * e.mu_se[i]);
    CHECK(std::abs(f.delta_op_norm.value - e.delta_op_norm.value) <= 4.0 * e.delta_op_norm.se);
}

TEST_CASE("h averages to one over the projected law") {
    Rng rng(4);
    const int d = 8;
    const auto spec = DistributionSpec::iid(Marginal::Uniform, d);
    const auto B = haar_stiefel(d, 1, rng);
    Moments m;
    for (int i = 0; i < 1000; ++i) {
        VectorXd x(1);
        x << rng.normal();
        m.add(estimate_h(spec, B, x, 500, rng).value);
    }
    CHECK(std::abs(m.mean - 1.0) <= 4.0 * m.se());
}

TEST_CASE("identity |mu - Bx|^2 = |mu|^2 - |x|^2 for the exact conditional mean") {
    // B'mu = x holds exactly on the fiber, so the cross term vanishes.
    Rng rng(12);
    const auto B = haar_stiefel(10, 1, rng);
    const auto f = fourier_conditional(DistributionSpec::iid(Marginal::Uniform, 10), B.matrix().col(0), 0.3);
    const VectorXd bx = 0.3 * B.matrix().col(0);
    CHECK(std::abs((f.mu - bx).squaredNorm() - (f.mu.squaredNorm() - 0.09)) < 1e-8);
}

TEST_CASE("deviation probability edge cases") {
    Rng rng(5);
    const int d = 8;
    const auto B = haar_stiefel(d, 1, rng);
    const auto g = deviation_probability(DistributionSpec::gaussian(d), B, 0.1, 50, 200, rng);
    CHECK(g.mean.value == 0.0);
    CHECK(g.variance.value == 0.0);
    const auto u = deviation_probability(DistributionSpec::iid(Marginal::Uniform, d), B, 0.0, 30, 500, rng,
                                         InnerMethod::Importance);
    CHECK(u.mean.value == 1.0);
    CHECK(u.variance.value == 1.0);
}

TEST_CASE("deviation probability is bit-identical serial vs parallel") {
    setenv("PROJCOND_THREADS", "3", 1);
    Rng r0(6);
    const int d = 16;
    const auto B = haar_stiefel(d, 1, r0);
    const auto spec = DistributionSpec::iid(Marginal::Uniform, d);
    Rng a(7), b(7);
    const auto s = deviation_probability(spec, B, 0.3, 40, 400, a, InnerMethod::Importance, Exec::Serial);
    const auto p = deviation_probability(spec, B, 0.3, 40, 400, b, InnerMethod::Importance, Exec::Parallel);
    CHECK(s.mean.value == p.mean.value);
    CHECK(s.inner_noise_mean == p.inner_noise_mean);
    CHECK(s.inner_noise_var == p.inner_noise_var);
    unsetenv("PROJCOND_THREADS");
}

TEST_CASE("symmetric_op_norm: Lanczos agrees with the dense solver") {
    Rng rng(8);
    for (int d : {50, 300}) {
        MatrixXd a = rng.normal_matrix(d, d);
        a = (0.5 * (a + a.transpose())).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
        const double ref = es.eigenvalues().cwiseAbs().maxCoeff();
        CHECK(symmetric_op_norm(a) == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("solve_tau") {
    const auto a = solve_tau(0.5, 1.0 / 6.0, 'A');
    CHECK(a.tau2 == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(a.tau1 == doctest::Approx(0.25).epsilon(1e-15));
    const auto b = solve_tau(0.25, 0.1, 'B');
    CHECK(b.tau2 == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(b.tau1 == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("gaussian projections are G members") {
    Rng rng(9);
    const auto B = haar_stiefel(64, 1, rng);
    const auto rep = g_membership(DistributionSpec::gaussian(64), B, solve_tau(0.5, 1.0 / 6.0, 'A'), 9.53, 200, 200,
                                  rng);
    CHECK(rep.member);
    if (!rep.trivial) CHECK(rep.integral.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("inner method names round-trip") {
    for (InnerMethod m : {InnerMethod::Importance, InnerMethod::Fourier, InnerMethod::Auto})
        CHECK(parse_inner_method(inner_method_name(m)) == m);
    CHECK_THROWS_AS(parse_inner_method("quadrature"), Error);
    CHECK(fourier_applicable(DistributionSpec::iid(Marginal::Uniform, 5), 1));
    CHECK_FALSE(fourier_applicable(DistributionSpec::iid(Marginal::Uniform, 5), 2));
}
