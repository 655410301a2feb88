#include <doctest.h>

#include <cmath>

#include "projcond/bounds.hpp"
#include "projcond/error.hpp"
#include "projcond/oracles.hpp"

using namespace projcond;

namespace {

TheoremBoundInputs desk_example(BoundPart part) {
    auto in = TheoremBoundInputs::with_d(1e6);
    in.p = 2;
    in.t = 1.0;
    in.tau = 0.5;
    in.part = part;
    return in;
}

}  // namespace

TEST_CASE("generic_bound examples") {
    CHECK(generic_bound(1, 2, 0.5, 1.0, 1.0, 1.0, 1e4, 0.5, 0.0) == 0.0);
    const double v = generic_bound(1, 2, 0.5, 1.0, 1.0, 1.0, 1e4, 0.5, 1.0);
    CHECK(v == doctest::Approx(std::exp(1.0) * 4.0 * M_PI * std::exp(1.0) / 100.0).epsilon(1e-12));
    for (double xi : {0.1, 0.3, 0.9}) {
        const double eps = 0.3;
        const double rate = std::min({xi, eps / 2 + 0.25, 0.5});
        const double a = generic_bound(2, 3, eps, 1.5, 1.2, 2.0, 5e3, xi, 1.0);
        const double b = generic_bound(2, 3, eps, 1.5, 1.2, 2.0, 1e4, xi, 1.0);
        CHECK(b / a == doctest::Approx(std::pow(2.0, -rate)).epsilon(1e-12));
    }
}

TEST_CASE("theorem_bound desk-scale example") {
    const auto a = theorem_bound(desk_example(BoundPart::A));
    CHECK(a.xi_eff == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(a.gamma == doctest::Approx(6.0 + 2.0 * std::log(2.0 * std::sqrt(M_PI * std::exp(1.0)))).epsilon(1e-14));
    CHECK(a.gamma == doctest::Approx(9.53).epsilon(1e-3));
    const double first = std::pow(1e6, -0.5 / 6.0);
    CHECK(first == doctest::Approx(0.316).epsilon(1e-3));
    CHECK(a.deviation_bound - first == doctest::Approx(5.52).epsilon(1e-3));
    CHECK(a.deviation_vacuous);

    const auto b = theorem_bound(desk_example(BoundPart::B));
    CHECK(b.xi_eff == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(b.xi_eff == doctest::Approx(0.6 * a.xi_eff).epsilon(1e-15));
    auto one = desk_example(BoundPart::B);
    auto two = one;
    two.kappa = 2.0;
    CHECK(theorem_bound(two).nu_gc_bound == doctest::Approx(2.0 * theorem_bound(one).nu_gc_bound).epsilon(1e-14));
}

TEST_CASE("theorem_bound matches the long-double oracle") {
    for (BoundPart part : {BoundPart::A, BoundPart::B})
        for (double d : {1e3, 1e6, 1e12})
            for (int p : {1, 3}) {
                auto in = TheoremBoundInputs::with_d(d);
                in.p = p;
                in.t = 0.7;
                in.tau = 0.4;
                in.part = part;
                const auto r = theorem_bound(in);
                const auto o = oracle::theorem_bound(part_char(part), d, p, 0.7L, 0.4L, in.constants.epsilon,
                                                     in.constants.xi, in.constants.D, 1.0L, 1.0L);
                CHECK(r.deviation_bound == doctest::Approx(double(o.deviation)).epsilon(1e-12));
                CHECK(r.nu_gc_bound == doctest::Approx(double(o.nu)).epsilon(1e-12));
            }
}

TEST_CASE("deviation bound tends to its second term as t grows") {
    auto in = desk_example(BoundPart::A);
    in.t = 1e300;
    const auto r = theorem_bound(in);
    const double second = r.gamma / (1.0 - in.tau) * in.p / (3.0 * r.xi_eff * in.log_d);
    CHECK(r.deviation_bound == doctest::Approx(second).epsilon(1e-12));
}

TEST_CASE("applicability thresholds") {
    const auto a = applicability_thresholds(200, 1, 2, 1.0);
    CHECK(a.required() == 196.0);
    CHECK(a.applicable);
    const auto b = applicability_thresholds(1300, 1, 4, 1.0);
    CHECK(b.expansion_threshold == 1288.0);
    CHECK(b.moment_threshold == 24.0);
    CHECK(b.applicable);
    CHECK_FALSE(applicability_thresholds(10000, 100, 1, 1.0).applicable);
    CHECK(applicability_thresholds(10001, 100, 1, 1.0).applicable);
}

TEST_CASE("asymptotic scan") {
    auto base = TheoremBoundInputs::with_d(10.0);
    base.tau = 0.5;
    std::vector<double> grid;
    for (double d : {1e6, 1e12, 1e24, 1e48, 1e96}) grid.push_back(std::log(d));

    SUBCASE("constant p decreases") {
        // nu stays vacuous on this grid, so only the raw log values are compared.
        const auto r = asymptotic_scan(base, [](double) { return 2; }, grid);
        CHECK(r.deviation_decreasing);
        for (std::size_t i = 1; i < r.rows.size(); ++i) {
            CHECK(r.rows[i].bound.log_deviation_bound < r.rows[i - 1].bound.log_deviation_bound);
            CHECK(r.rows[i].bound.log_nu_gc_bound < r.rows[i - 1].bound.log_nu_gc_bound);
        }
    }
    SUBCASE("p growing like log d is rejected") {
        try {
            asymptotic_scan(base, [](double ld) { return static_cast<int>(std::floor(ld)); }, grid);
            FAIL("expected growth-condition-violated");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::GrowthConditionViolated);
        }
    }
    SUBCASE("p growing like sqrt(log d) is accepted") {
        // gamma p dominates tau xi log d until log d >> (gamma / (tau xi))^2, hence the formula-level grid.
        const auto r = asymptotic_scan(
            base, [](double ld) { return static_cast<int>(std::floor(std::sqrt(ld))); }, {1e3, 1e4, 1e5, 1e6});
        CHECK(r.rows.size() == 4);
        CHECK(r.deviation_decreasing);
        CHECK(r.nu_decreasing);
    }
    SUBCASE("formula-level grid reaches below 1e-3") {
        const auto r = asymptotic_scan(base, [](double) { return 2; }, {1e3, 1e4, 1e5, 1e6});
        CHECK(r.final_below_1e3);
    }
}

TEST_CASE("bound input validation") {
    auto in = desk_example(BoundPart::A);
    in.tau = 1.5;
    CHECK_THROWS_AS(theorem_bound(in), Error);
    CHECK_THROWS_AS(parse_part("C"), Error);
}
