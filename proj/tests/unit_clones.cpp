#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "projcond/clones.hpp"
#include "projcond/error.hpp"
#include "projcond/oracles.hpp"

using namespace projcond;

TEST_CASE("clones satisfy the projection constraint") {
    Rng rng(1);
    const auto B = haar_stiefel(30, 2, rng);
    VectorXd x(2);
    x << 0.6, -0.2;
    const auto c = sample_clones(B, x, 4, rng);
    for (int j = 0; j < 4; ++j) CHECK((B.matrix().transpose() * c.W.col(j) - x).cwiseAbs().maxCoeff() < 1e-10);
    const auto c0 = sample_clones(B, VectorXd::Zero(2), 2, rng);
    CHECK((B.matrix().transpose() * c0.W).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("clone squared norm has mean |x|^2 + d - p") {
    const int d = 100, p = 2;
    Rng rng(2);
    VectorXd x(2);
    x << 1.0, 0.0;
    Moments m;
    for (int r = 0; r < 20000; ++r) {
        const auto B = haar_stiefel(d, p, rng);
        m.add(sample_clones(B, x, 1, rng).W.col(0).squaredNorm());
    }
    CHECK(std::abs(m.mean - 99.0) <= 4.0 * m.se());
}

TEST_CASE("log ratio at S = I, x = 0 is log eta") {
    const int d = 40, p = 2, k = 3;
    const MatrixXd w = std::sqrt(double(d)) * MatrixXd::Identity(d, k);
    const auto r = clone_log_density_ratio(VectorXd::Zero(p), w, p);
    CHECK(r.in_domain);
    CHECK(r.log_ratio == doctest::Approx(log_eta(d, p, k)).epsilon(1e-13));
}

TEST_CASE("log ratio is -inf outside the domain") {
    const int d = 10;
    const MatrixXd w = std::sqrt(double(d)) * MatrixXd::Identity(d, 1);
    VectorXd x(1);
    x << std::sqrt(double(d));
    const auto r = clone_log_density_ratio(x, w, 1);
    CHECK_FALSE(r.in_domain);
    CHECK(r.log_ratio == -std::numeric_limits<double>::infinity());
}

TEST_CASE("eta examples") {
    CHECK(eta_norm_const(10, 0, 3) == 1.0);
    CHECK(eta_norm_const(10, 1, 1) == doctest::Approx(0.9227456080530874).epsilon(1e-13));
    CHECK_THROWS_AS(log_eta(10, 2, 9), Error);
}

TEST_CASE("log eta agrees with the long-double oracle") {
    for (int d : {5, 20, 300, 10000, 100000})
        for (int p : {1, 2, 3})
            for (int k : {1, 2, 4}) {
                if (k > d - p) continue;
                const double lib = log_eta(d, p, k);
                const double ref = static_cast<double>(oracle::log_eta(d, p, k));
                CHECK(std::abs(lib - ref) < 1e-13 * std::max(1.0, std::abs(ref)));
            }
}

TEST_CASE("eta never exceeds its upper bound") {
    for (int d : {10, 50, 200})
        for (int p : {1, 2, 3})
            for (int k : {1, 2, 4})
                if (k < d - p - 1) CHECK(eta_norm_const(d, p, k) <= eta_upper_bound(d, p, k));
}

TEST_CASE("density ratio integrates to one") {
    Rng rng(3);
    VectorXd x(1);
    x << 0.5;
    const auto e = clone_density_normalization(x, 30, 1, 2, 50000, rng);
    CHECK(std::abs(e.value - 1.0) <= 4.0 * e.se);
}

TEST_CASE("normalization is bit-identical serial vs parallel") {
    setenv("PROJCOND_THREADS", "4", 1);
    VectorXd x(2);
    x << 0.3, 0.1;
    Rng a(4), b(4);
    const auto s = clone_density_normalization(x, 20, 2, 2, 3000, a, Exec::Serial);
    const auto p = clone_density_normalization(x, 20, 2, 2, 3000, b, Exec::Parallel);
    CHECK(s.value == p.value);
    CHECK(s.se == p.se);
    unsetenv("PROJCOND_THREADS");
}

TEST_CASE("Gaussian chain identities vanish") {
    Rng rng(5);
    VectorXd x(1);
    x << 0.5;
    const auto chains = enumerate_chains(2, 1);
    REQUIRE(!chains.empty());
    for (const auto& c : chains) {
        const auto r = gaussian_chain_identity(x, 50, 1, 2, c, 20000, rng);
        CHECK(std::abs(r.estimate) <= 4.0 * r.se);
    }
    const auto alt = gaussian_alternating_sum(x, 60, 1, 2, 20000, rng);
    CHECK(std::abs(alt.estimate) <= 4.0 * alt.se);
}

TEST_CASE("chain targets and validation") {
    ChainSpec c;
    c.l = 2;
    c.j = {0, 2};
    CHECK(chain_target(c, 0.25) == doctest::Approx(0.25).epsilon(1e-15));
    MatrixXd w = MatrixXd::Zero(3, 2);
    w(0, 0) = 2.0;
    w(0, 1) = 3.0;
    CHECK(chain_product(c, w) == doctest::Approx(6.0).epsilon(1e-15));
    ChainSpec bad;
    bad.l = 1;
    bad.j = {0, 3};
    CHECK_THROWS_AS(validate_chain(bad, 2), Error);
}
