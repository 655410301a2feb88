#include <doctest.h>

#include <cmath>
#include <limits>

#include "projcond/distributions.hpp"
#include "projcond/error.hpp"
#include "projcond/stats.hpp"

using namespace projcond;

TEST_CASE("gaussian coordinates pass KS against N(0,1)") {
    Rng rng(1);
    const auto z = sample_z(DistributionSpec::gaussian(10), 20000, rng);
    for (int j = 0; j < 10; ++j) {
        std::vector<double> col(z.col(j).data(), z.col(j).data() + z.rows());
        CHECK(ks_one_sample(col, normal_cdf).p_value > 0.001);
    }
}

TEST_CASE("uniform marginal stays in its support") {
    Rng rng(2);
    const auto z = sample_z(DistributionSpec::iid(Marginal::Uniform, 5), 20000, rng);
    CHECK(z.maxCoeff() <= std::sqrt(3.0));
    CHECK(z.minCoeff() >= -std::sqrt(3.0));
}

TEST_CASE("uniform fourth moment is 9/5") {
    Rng rng(3);
    Moments m;
    for (int i = 0; i < 1000000; ++i) {
        const double v = sample_marginal(Marginal::Uniform, rng);
        m.add(v * v * v * v);
    }
    CHECK(std::abs(m.mean - 1.8) <= 4.0 * m.se());
}

TEST_CASE("every marginal is standardized") {
    for (Marginal mg : {Marginal::Normal, Marginal::Uniform, Marginal::Exponential, Marginal::Triangular}) {
        Rng rng(4);
        Moments m1, m2;
        for (int i = 0; i < 200000; ++i) {
            const double v = sample_marginal(mg, rng);
            m1.add(v);
            m2.add(v * v);
        }
        CHECK_MESSAGE(std::abs(m1.mean) <= 4.0 * m1.se(), marginal_name(mg));
        CHECK_MESSAGE(std::abs(m2.mean - 1.0) <= 4.0 * m2.se(), marginal_name(mg));
    }
}

TEST_CASE("log_density examples") {
    CHECK(log_density(DistributionSpec::gaussian(2), VectorXd::Zero(2)) ==
          doctest::Approx(-std::log(2.0 * M_PI)).epsilon(1e-15));
    const auto u3 = DistributionSpec::iid(Marginal::Uniform, 3);
    VectorXd out(3);
    out << 0.0, 2.0, 0.0;
    CHECK(log_density(u3, out) == -std::numeric_limits<double>::infinity());
    VectorXd in(3);
    in << 0.1, -1.2, 1.7;
    CHECK(log_density(u3, in) == doctest::Approx(-3.0 * std::log(2.0 * std::sqrt(3.0))).epsilon(1e-14));
}

TEST_CASE("marginal densities integrate to one") {
    for (Marginal mg : {Marginal::Normal, Marginal::Uniform, Marginal::Exponential, Marginal::Triangular}) {
        auto [lo, hi] = marginal_support(mg);
        lo = std::max(lo, -12.0);
        hi = std::min(hi, 40.0);
        const int n = 200000;
        const double h = (hi - lo) / n;
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::exp(marginal_log_density(mg, lo + (i + 0.5) * h)) * h;
        CHECK_MESSAGE(std::abs(s - 1.0) < 1e-4, marginal_name(mg));
    }
}

TEST_CASE("moment_oracle values") {
    const auto g = moment_oracle(DistributionSpec::gaussian(3));
    CHECK(g.m3 == 0.0);
    CHECK(g.m4 == 3.0);
    const auto u = moment_oracle(DistributionSpec::iid(Marginal::Uniform, 3));
    CHECK(u.m3 == 0.0);
    CHECK(u.m4 == doctest::Approx(1.8).epsilon(1e-15));
    const auto e = moment_oracle(DistributionSpec::iid(Marginal::Exponential, 3));
    CHECK(e.m3 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(e.m4 == doctest::Approx(9.0).epsilon(1e-15));
}

TEST_CASE("characteristic function at 0 and its derivatives") {
    for (Marginal mg : {Marginal::Normal, Marginal::Uniform, Marginal::Exponential, Marginal::Triangular}) {
        const auto c = marginal_charfn(mg, 0.0);
        CHECK(std::abs(c.f - 1.0) < 1e-12);
        CHECK(std::abs(c.f1) < 1e-12);             // i E Z = 0
        CHECK(std::abs(c.f2 + 1.0) < 1e-12);       // -E Z^2 = -1
    }
    // Uniform on [-sqrt3, sqrt3]: sin(sqrt3 s)/(sqrt3 s).
    const double s = 0.9;
    CHECK(marginal_charfn(Marginal::Uniform, s).f.real() ==
          doctest::Approx(std::sin(std::sqrt(3.0) * s) / (std::sqrt(3.0) * s)).epsilon(1e-14));
}

TEST_CASE("DistributionSpec::parse rejects unknown marginals") {
    CHECK(DistributionSpec::parse("iid-marginal", "uniform", 4).marginal == Marginal::Uniform);
    CHECK_THROWS_AS(DistributionSpec::parse("iid-marginal", "cauchy", 4), Error);
    CHECK_THROWS_AS(DistributionSpec::parse("mixture", "", 4), Error);
}
