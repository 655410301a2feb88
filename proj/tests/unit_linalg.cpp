#include <doctest.h>

#include <cmath>

#include "projcond/clones.hpp"
#include "projcond/distributions.hpp"
#include "projcond/error.hpp"
#include "projcond/linalg.hpp"
#include "projcond/stats.hpp"

using namespace projcond;

namespace {

bool throws_code(ErrorCode code, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

}  // namespace

TEST_CASE("haar_stiefel returns orthonormal columns") {
    Rng rng(7);
    const auto B = haar_stiefel(5, 2, rng);
    const MatrixXd gram = B.matrix().transpose() * B.matrix();
    CHECK((gram - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(B.d() == 5);
    CHECK(B.p() == 2);
}

TEST_CASE("haar_stiefel rejects p >= d") {
    Rng rng(1);
    CHECK(throws_code(ErrorCode::InvalidDimension, [&] { haar_stiefel(3, 3, rng); }));
}

TEST_CASE("haar_stiefel second moment is I/d") {
    // Uniform direction on the sphere: E bb' = I/d. Diagonal entries and the trace.
    const int d = 50, n = 20000;
    Rng rng(11);
    std::vector<Moments> diag(d);
    for (int r = 0; r < n; ++r) {
        const VectorXd b = haar_stiefel(d, 1, rng).matrix().col(0);
        CHECK(std::abs(b.squaredNorm() - 1.0) < 1e-12);
        for (int i = 0; i < d; ++i) diag[i].add(b[i] * b[i]);
    }
    for (int i = 0; i < d; ++i) CHECK(std::abs(diag[i].mean - 1.0 / d) <= 4.5 * diag[i].se());
}

TEST_CASE("StiefelMatrix validates orthonormality") {
    MatrixXd a(3, 1);
    a << 1.0, 1.0, 0.0;
    CHECK(throws_code(ErrorCode::ConstraintViolated, [&] { StiefelMatrix{a}; }));
    CHECK_NOTHROW(StiefelMatrix{orthonormalize(a)});
}

TEST_CASE("gram_matrix examples") {
    const int d = 4;
    MatrixXd same(d, 2);
    same.setZero();
    same(0, 0) = same(0, 1) = std::sqrt(double(d));
    CHECK((gram_matrix(same, d).entries - MatrixXd::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    MatrixXd ortho = std::sqrt(double(d)) * MatrixXd::Identity(d, 3);
    CHECK((gram_matrix(ortho, d).entries - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("scaled off-diagonal Gram entry has mean 0 and variance 1") {
    const int d = 1000, n = 10000;
    Rng rng(3);
    Moments m;
    for (int r = 0; r < n; ++r) {
        const auto g = gram_matrix(rng.normal_matrix(d, 2), d);
        m.add(std::sqrt(double(d)) * g.entries(0, 1));
    }
    CHECK(std::abs(m.mean) <= 4.0 * m.se());
    CHECK(std::abs(m.variance() - 1.0) < 0.1);
}

TEST_CASE("frame_decompose: x = 0 gives det(Lambda Lambda') = 1") {
    Rng rng(5);
    const auto B = haar_stiefel(20, 2, rng);
    const VectorXd x = VectorXd::Zero(2);
    const auto draw = sample_clones(B, x, 3, rng);
    const auto f = frame_decompose(B, x, draw.W);
    const double det = (f.Lambda * f.Lambda.transpose()).determinant();
    CHECK(std::abs(det - 1.0) < 1e-8);
}

TEST_CASE("frame_decompose: k = 1 diagonal of T") {
    Rng rng(6);
    const auto B = haar_stiefel(12, 2, rng);
    VectorXd x(2);
    x << 0.4, -0.3;
    const auto draw = sample_clones(B, x, 1, rng);
    const auto f = frame_decompose(B, x, draw.W);
    const double s11 = f.s(1, 1);
    CHECK(std::abs(f.t(1, 1) - std::sqrt(x.squaredNorm() + s11 * s11)) < 1e-10);
    CHECK(std::abs(f.kappa_sq[0] - x.squaredNorm()) < 1e-12);
}

TEST_CASE("frame_decompose: Lambda determinant matches the dense solve") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto B = haar_stiefel(20, 2, rng);
        const VectorXd x = 0.7 * rng.normal_vector(2);
        const auto draw = sample_clones(B, x, 3, rng);
        const auto f = frame_decompose(B, x, draw.W);
        const double det = (f.Lambda * f.Lambda.transpose()).determinant();
        CHECK(std::abs(det - lambda_det_target(x, draw.W)) < 1e-8);
    }
}

TEST_CASE("frame_decompose: structural zeros below the diagonal") {
    Rng rng(9);
    const auto B = haar_stiefel(15, 2, rng);
    VectorXd x(2);
    x << 0.5, 0.0;
    const auto draw = sample_clones(B, x, 3, rng);
    const auto f = frame_decompose(B, x, draw.W);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j < i; ++j) CHECK(std::abs(f.s(i, j)) < 1e-12);
}

TEST_CASE("frame_decompose rejects vectors off the constraint") {
    Rng rng(10);
    const auto B = haar_stiefel(10, 1, rng);
    VectorXd x(1);
    x << 0.3;
    MatrixXd w = rng.normal_matrix(10, 2);
    CHECK(throws_code(ErrorCode::ConstraintViolated, [&] { frame_decompose(B, x, w); }));
}

TEST_CASE("spectral_norm of a diagonal matrix") {
    MatrixXd m = MatrixXd::Zero(3, 3);
    m.diagonal() << 1.0, -4.0, 2.0;
    CHECK(spectral_norm(m) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("standardize examples") {
    SUBCASE("identity covariance keeps an orthonormal A") {
        Rng rng(12);
        const MatrixXd A = haar_stiefel(5, 2, rng).matrix();
        const auto s = standardize(VectorXd::Zero(5), MatrixXd::Identity(5, 5), A);
        CHECK((s.B.matrix() - A).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("diagonal covariance along an axis") {
        MatrixXd sigma = MatrixXd::Zero(2, 2);
        sigma.diagonal() << 4.0, 1.0;
        MatrixXd A = MatrixXd::Zero(2, 1);
        A(0, 0) = 1.0;
        const auto s = standardize(VectorXd::Zero(2), sigma, A);
        CHECK(std::abs(s.B.matrix()(0, 0) - 1.0) < 1e-14);
        CHECK(std::abs(s.B.matrix()(1, 0)) < 1e-14);
        VectorXd y(2);
        y << 2.0, 3.0;
        CHECK(std::abs(s.whiten(y)(0) - 1.0) < 1e-14);
    }
    SUBCASE("random SPD covariance") {
        Rng rng(13);
        for (int trial = 0; trial < 50; ++trial) {
            const MatrixXd g = rng.normal_matrix(6, 6);
            const MatrixXd sigma = g * g.transpose() + 0.5 * MatrixXd::Identity(6, 6);
            const auto s = standardize(rng.normal_vector(6), sigma, rng.normal_matrix(6, 2));
            const MatrixXd gram = s.B.matrix().transpose() * s.B.matrix();
            CHECK((gram - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SUBCASE("non-SPD covariance is rejected") {
        MatrixXd sigma = MatrixXd::Identity(2, 2);
        sigma(1, 1) = -1.0;
        CHECK(throws_code(ErrorCode::NotSpd, [&] { standardize(VectorXd::Zero(2), sigma, MatrixXd::Identity(2, 1)); }));
    }
}

TEST_CASE("bartlett_distribution_check at a small size") {
    Rng rng(14);
    VectorXd x(2);
    x << 1.0, 0.0;
    const auto rep = bartlett_distribution_check(12, 2, 2, x, 4000, rng);
    CHECK(!rep.ks.empty());
    CHECK(rep.max_below_diagonal < 1e-12);
    for (const auto& t : rep.ks) CHECK_MESSAGE(t.p_value > 1e-4, t.name);
}
