#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "projcond/error.hpp"
#include "projcond/harness.hpp"

using namespace projcond;
using namespace projcond::harness;
using nlohmann::json;

namespace {

std::string config_error(const json& j) {
    try {
        parse_config(j);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigInvalid) return e.what();
        return "wrong code";
    }
    return "";
}

ExperimentConfig small_density_config() {
    ExperimentConfig c;
    c.kind = "clone-density-check";
    c.d = 12;
    c.p = 1;
    c.k = 2;
    c.spec = DistributionSpec::gaussian(12);
    c.n = 3000;
    c.x_norms = {0.0, 0.5};
    return c;
}

}  // namespace

TEST_CASE("config validation names the field") {
    CHECK(config_error({{"experiment", "clone-density-check"}, {"d", 5}, {"p", 5}}).find("\"p\"") !=
          std::string::npos);
    CHECK(config_error({{"experiment", "clone-density-check"}, {"bogus", 1}}).find("bogus") != std::string::npos);
    CHECK(config_error({{"d", 5}}).find("experiment") != std::string::npos);
    CHECK(config_error({{"experiment", "nope"}}).find("experiment") != std::string::npos);
    CHECK(config_error({{"experiment", "theorem-bound"}, {"tau", 1.0}}).find("tau") != std::string::npos);
    CHECK(config_error({{"experiment", "prop5-cases"},
                        {"d", 10},
                        {"distribution", {{"family", "iid-marginal"}, {"marginal", "uniform"}, {"d", 11}}}})
              .find("distribution.d") != std::string::npos);
    CHECK(config_error({{"experiment", "theorem-bound"}, {"constants", {{"xi", -1.0}}}}).find("xi") !=
          std::string::npos);
    CHECK(config_error({{"experiment", "clone-density-check"}}).empty());
}

TEST_CASE("config parses a distribution") {
    const auto c = parse_config(
        {{"experiment", "prop5-cases"}, {"d", 40}, {"distribution", {{"family", "iid-marginal"}, {"marginal", "exponential"}}}});
    CHECK(c.spec.family == Family::IidMarginal);
    CHECK(c.spec.marginal == Marginal::Exponential);
    CHECK(c.spec.d == 40);
}

TEST_CASE("check evaluation") {
    CHECK(evaluate_check(Check::Within, 1.3, 0.1, 1.0, 4.0));
    CHECK_FALSE(evaluate_check(Check::Within, 1.5, 0.1, 1.0, 4.0));
    CHECK(evaluate_check(Check::AtMost, 1.0, 0.0, 1.0, 0.0));
    CHECK(evaluate_check(Check::AtMostSe, 1.2, 0.1, 1.0, 4.0));
    CHECK_FALSE(evaluate_check(Check::Above, 0.01, 0.0, 0.01, 0.0));
    CHECK(evaluate_check(Check::RelTol, 1.0 + 1e-13, 0.0, 1.0, 1e-12));
    CHECK(evaluate_check(Check::Info, 1e300, 0.0, 0.0, 0.0));
}

TEST_CASE("pass flags are recomputable from every row") {
    ExperimentConfig t;
    t.kind = "theorem-bound";
    t.d = 1000000;
    t.p = 2;
    t.t = 1.0;
    t.n_random = 5;
    auto rows = run_experiment(t);
    const auto more = run_experiment(small_density_config());
    rows.insert(rows.end(), more.begin(), more.end());
    REQUIRE(!rows.empty());
    for (const auto& r : rows) CHECK_MESSAGE(recompute_pass(r) == r.pass, r.params);
    auto tampered = rows.front();
    tampered.params = "d=3";
    CHECK_FALSE(recompute_pass(tampered));
}

TEST_CASE("reproducible CSV is byte-identical across runs and execution modes") {
    setenv("PROJCOND_THREADS", "3", 1);
    const auto cfg = small_density_config();
    std::ostringstream a, b, c;
    write_csv(a, run_experiment(cfg, Exec::Parallel), true);
    write_csv(b, run_experiment(cfg, Exec::Parallel), true);
    write_csv(c, run_experiment(cfg, Exec::Serial), true);
    CHECK(a.str() == b.str());
    CHECK(a.str() == c.str());
    CHECK(a.str().rfind(kCsvHeader, 0) == 0);
    unsetenv("PROJCOND_THREADS");
}

TEST_CASE("gaussian clone-density-check passes") {
    const auto rows = run_experiment(small_density_config());
    for (const auto& r : rows) CHECK_MESSAGE(r.pass, r.params);
    const auto s = summary_json(rows, "t");
    CHECK(s["pass"].get<bool>());
    CHECK(s["failed"].get<std::size_t>() == 0);
}

TEST_CASE("smoke suite passes") {
    const auto r = run_smoke(20240611);
    CHECK_MESSAGE(r.pass, r.detail);
    CHECK(format_result_line(r).find("PASS") != std::string::npos);
}

TEST_CASE("criterion ids are range-checked") {
    CHECK_THROWS_AS(run_criterion(0, 1), Error);
    CHECK_THROWS_AS(run_criterion(kCriteria + 1, 1), Error);
}
