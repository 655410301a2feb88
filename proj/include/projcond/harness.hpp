#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "projcond/bounds.hpp"
#include "projcond/conditional.hpp"
#include "projcond/distributions.hpp"
#include "projcond/moments.hpp"
#include "projcond/parallel.hpp"

namespace projcond::harness {

// How a row's pass flag follows from (estimate, se, target, tol).
enum class Check {
    Within,    // |estimate - target| <= tol * se
    AtMost,    // estimate <= target
    AtMostSe,  // estimate <= target + tol * se
    Above,     // estimate > target
    AbsTol,    // |estimate - target| <= tol
    RelTol,    // |estimate - target| <= tol * |target|
    Info,      // reported only
};

std::string check_name(Check c);
bool evaluate_check(Check c, double estimate, double se, double target, double tol);

struct ReportRow {
    std::string experiment;
    std::string params;  // ';'-separated key=value, ending with check=<name>:<tol>
    double estimate = 0.0;
    double se = 0.0;
    double target = 0.0;
    bool pass = true;
    double ms = 0.0;
};

ReportRow make_row(const std::string& experiment, std::string params, double estimate, double se, double target,
                   Check check, double tol = 0.0);
// Recomputes the pass flag from the row's own fields.
bool recompute_pass(const ReportRow& row);

inline const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds{
        "clone-density-check", "bartlett-check", "expansion-order", "moment-conditions", "prop5-cases",
        "conditional-linearity", "g-membership", "theorem-bound", "asymptotic-scan", "normalzero-check"};
    return kinds;
}

struct ExperimentConfig {
    std::string kind;
    DistributionSpec spec = DistributionSpec::gaussian(30);
    int d = 30, p = 1, k = 2;
    int n = 100000;
    int n_outer = 1000;
    int n_inner = 10000;
    int n_B = 20;
    std::uint64_t seed = 20240611;
    double z = 4.0;      // tolerance in standard errors
    double level = 0.01; // KS level
    std::string output;  // CSV path; the JSON summary goes next to it

    std::vector<double> x_norms{0.0, 0.5};
    std::vector<double> x_values{0.0, 0.3, -0.3, 0.8, -0.8};
    std::vector<int> k_list{1, 2, 4};
    std::vector<int> d_grid;
    std::vector<double> log_d_grid;
    std::string p_rule = "constant";
    std::string mode;  // empty: the kind's default mode
    InnerMethod inner = InnerMethod::Auto;
    std::vector<std::string> cases{"a", "b", "c"};
    int max_m = 2;
    int n_random = 20;

    double t = 0.5;
    double tau = 0.5;
    BoundPart part = BoundPart::A;
    double kappa = 1.0;
    double g = 1.0;
    double gamma = 0.0;  // <= 0: Lemma-final gamma from (g, D, part)
    MomentConditionConstants constants;
};

// Validates against the schema; throws Error(ConfigInvalid) naming the field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::Parallel);

inline constexpr const char* kCsvHeader = "experiment,params,estimate,se,target,pass,ms";
// reproducible: the ms column is written as 0 so reports are byte-identical.
void write_csv(std::ostream& os, const std::vector<ReportRow>& rows, bool reproducible);
nlohmann::json summary_json(const std::vector<ReportRow>& rows, const std::string& label);
// Writes <output> and <output>.json; returns the exit code (0 all pass, 1 otherwise).
int write_report(const std::vector<ReportRow>& rows, const std::string& output, const std::string& label,
                 bool reproducible);

// Acceptance suite.
enum class Profile { Smoke, Full };

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    std::vector<ReportRow> rows;
};

inline constexpr int kCriteria = 10;

CriterionResult run_criterion(int id, std::uint64_t seed, Exec exec = Exec::Parallel);
// Deterministic checks only; runs in seconds.
CriterionResult run_smoke(std::uint64_t seed, Exec exec = Exec::Parallel);
// Full: criteria `only` (all when empty). Smoke: the deterministic checks.
std::vector<CriterionResult> run_suite(Profile profile, std::uint64_t seed, const std::vector<int>& only = {},
                                       Exec exec = Exec::Parallel);
std::string format_result_line(const CriterionResult& r);

}  // namespace projcond::harness
