#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "projcond/parallel.hpp"
#include "projcond/rng.hpp"
#include "projcond/stats.hpp"

using namespace projcond;

// Reference values frozen from scipy.stats (kstwobign, chi2, norm, chisquare).

TEST_CASE("kolmogorov_q matches the asymptotic survival function") {
    CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
    CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
    CHECK(kolmogorov_q(1.36) == doctest::Approx(0.049485876755377876).epsilon(1e-12));
}

TEST_CASE("ks_one_sample statistic and small-sample p-value") {
    const std::vector<double> x{-1.2, -0.4, 0.1, 0.3, 0.9, 1.7, 2.2, -0.8, 0.05, 0.6};
    const auto r = ks_one_sample(x, normal_cdf);
    CHECK(r.statistic == doctest::Approx(0.2199388058383725).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.6616439036356636).epsilon(1e-9));
}

TEST_CASE("ks_two_sample statistic") {
    const std::vector<double> a{0.1, 0.4, 0.35, 0.8, 0.9, 1.2};
    const std::vector<double> b{0.5, 1.1, 1.3, 1.6, 2.0, 0.95, 1.4};
    const auto r = ks_two_sample(a, b);
    CHECK(r.statistic == doctest::Approx(0.6904761904761905).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.047841414607146165).epsilon(1e-9));
}

TEST_CASE("chi-square helpers") {
    CHECK(chi_square_cdf(3.0, 2.0) == doctest::Approx(0.7768698398515702).epsilon(1e-12));
    CHECK(chi_square_cdf(7.5, 5.0) == doctest::Approx(0.813970166397133).epsilon(1e-12));
    CHECK(normal_cdf(1.3) == doctest::Approx(0.9031995154143897).epsilon(1e-12));
    const auto g = chi_square_gof({18, 22, 30, 30}, {25, 25, 25, 25});
    CHECK(g.statistic == doctest::Approx(4.32).epsilon(1e-14));
    CHECK(g.dof == 3.0);
    CHECK(g.p_value == doctest::Approx(0.22891886433610517).epsilon(1e-10));
}

TEST_CASE("Moments::merge agrees with sequential accumulation") {
    Rng rng(1);
    std::vector<double> xs(1000);
    for (auto& v : xs) v = rng.normal() * 3.0 + 1.0;
    Moments all, a, b;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        all.add(xs[i]);
        (i < 377 ? a : b).add(xs[i]);
    }
    a.merge(b);
    CHECK(a.n == all.n);
    CHECK(a.mean == doctest::Approx(all.mean).epsilon(1e-13));
    CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("JointMoments covariance") {
    Rng rng(2);
    JointMoments jm(2);
    Moments mx;
    for (int i = 0; i < 5000; ++i) {
        const double u = rng.normal(), v = rng.normal();
        jm.add({u, u + v});
        mx.add(u);
    }
    CHECK(jm.cov(0, 0) == doctest::Approx(mx.variance()).epsilon(1e-10));
    CHECK(jm.cov(0, 1) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(jm.cov(1, 1) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("substreams are reproducible and distinct") {
    auto a = Rng::substream(42, hash_name("x"), 3);
    auto b = Rng::substream(42, hash_name("x"), 3);
    auto c = Rng::substream(42, hash_name("x"), 4);
    const auto va = a(), vb = b(), vc = c();
    CHECK(va == vb);
    CHECK(va != vc);
    Rng parent(9);
    const Rng child = parent.split(1);
    Rng parent_copy(9);
    CHECK(parent() == parent_copy());
    (void)child;
}

TEST_CASE("chunked_reduce is bit-identical between serial and parallel") {
    setenv("PROJCOND_THREADS", "3", 1);
    auto chunk = [](std::size_t b, std::size_t e) {
        Moments m;
        for (std::size_t i = b; i < e; ++i) {
            Rng r = Rng::substream(5, 6, i);
            m.add(r.normal());
        }
        return m;
    };
    auto merge = [](Moments& acc, const Moments& part) { acc.merge(part); };
    const auto s = chunked_reduce<Moments>(10007, chunk, merge, Exec::Serial);
    const auto p = chunked_reduce<Moments>(10007, chunk, merge, Exec::Parallel);
    CHECK(s.n == p.n);
    CHECK(s.mean == p.mean);
    CHECK(s.m2 == p.m2);
    unsetenv("PROJCOND_THREADS");
}
