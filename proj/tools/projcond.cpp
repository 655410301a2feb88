#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "projcond/bounds.hpp"
#include "projcond/error.hpp"
#include "projcond/harness.hpp"

using namespace projcond;

namespace {

constexpr int kExitConfig = 2;

int cmd_run(const std::string& path, const std::string& output, bool reproducible, Exec exec) {
    const auto cfg = harness::load_config(path);
    const auto rows = harness::run_experiment(cfg, exec);
    return harness::write_report(rows, output.empty() ? cfg.output : output, cfg.kind, reproducible);
}

int cmd_verify(const std::string& profile, const std::vector<int>& criteria, std::uint64_t seed,
               const std::string& output, bool reproducible, Exec exec) {
    harness::Profile prof;
    if (profile == "smoke")
        prof = harness::Profile::Smoke;
    else if (profile == "full")
        prof = harness::Profile::Full;
    else
        throw Error(ErrorCode::ConfigInvalid, "field \"profile\" must be smoke or full");
    const auto results = harness::run_suite(prof, seed, criteria, exec);
    std::vector<harness::ReportRow> rows;
    bool all = true;
    for (const auto& r : results) {
        std::cout << harness::format_result_line(r) << std::endl;
        all = all && r.pass;
        rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    }
    if (!output.empty()) harness::write_report(rows, output, "verify-" + profile, reproducible);
    return all ? 0 : 1;
}

int cmd_bound(const std::string& part, double d, int p, double t, double tau, double kappa, double g, double epsilon,
              double xi, double D) {
    if (!(d > 1.0)) throw Error(ErrorCode::ConfigInvalid, "field \"d\" must exceed 1");
    TheoremBoundInputs in = TheoremBoundInputs::with_d(d);
    in.p = p;
    in.t = t;
    in.tau = tau;
    in.kappa = kappa;
    in.g = g;
    in.constants.epsilon = epsilon;
    in.constants.xi = xi;
    in.constants.D = D;
    in.part = parse_part(part);
    const auto r = theorem_bound(in);
    nlohmann::json j{{"part", part},
                     {"d", d},
                     {"p", p},
                     {"t", t},
                     {"tau", tau},
                     {"xi_eff", r.xi_eff},
                     {"gamma", r.gamma},
                     {"tau1", r.tau1},
                     {"tau2", r.tau2},
                     {"deviation_bound", r.deviation_bound},
                     {"nu_gc_bound", r.nu_gc_bound},
                     {"deviation_vacuous", r.deviation_vacuous},
                     {"nu_vacuous", r.nu_vacuous},
                     {"note", "up to the unspecified proof constants kappa and g"}};
    std::cout << j.dump(2) << std::endl;
    return 0;
}

int cmd_scan(const std::string& path, const std::string& output, bool reproducible) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::ConfigInvalid, "config file not readable: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "field \"<root>\" must be a JSON object");
    if (!j.contains("experiment")) j["experiment"] = "asymptotic-scan";
    const auto cfg = harness::parse_config(j);
    if (cfg.kind != "asymptotic-scan")
        throw Error(ErrorCode::ConfigInvalid, "field \"experiment\" must be asymptotic-scan for scan");
    const auto rows = harness::run_experiment(cfg, Exec::Serial);
    return harness::write_report(rows, output.empty() ? cfg.output : output, cfg.kind, reproducible);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"projcond: conditional moments of random vectors given low-dimensional projections"};
    app.require_subcommand(1);
    bool serial = false;
    app.add_flag("--serial", serial, "Run Monte Carlo loops on one thread (results are identical)");

    auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
    std::string run_path, run_output;
    bool run_repro = false;
    run->add_option("config", run_path, "Config JSON")->required();
    run->add_option("-o,--output", run_output, "CSV output path (overrides the config; '-' for stdout)");
    run->add_flag("--reproducible", run_repro, "Write 0 in the ms column so reports are byte-identical");

    auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
    std::string profile = "smoke", verify_output, mutate;
    std::vector<int> criteria;
    std::uint64_t seed = 20240611;
    bool verify_repro = false;
    verify->add_option("--profile", profile, "smoke or full")->check(CLI::IsMember({"smoke", "full"}));
    verify->add_option("--criteria", criteria, "Subset of criteria (full profile)")->delimiter(',');
    verify->add_option("--seed", seed, "Root seed");
    verify->add_option("-o,--output", verify_output, "CSV with every row");
    verify->add_flag("--reproducible", verify_repro, "Write 0 in the ms column");
    verify->add_option("--mutate", mutate, "Enable a deliberate formula fault (test hook), e.g. eta");

    auto* bound = app.add_subcommand("bound", "Evaluate the closed-form bounds");
    std::string part = "A";
    double d = 0.0, t = 1.0, tau = 0.5, kappa = 1.0, g = 1.0, epsilon = 0.5, xi = 0.5, D = 1.0;
    int p = 1;
    bound->add_option("--part", part)->check(CLI::IsMember({"A", "B"}));
    bound->add_option("--d", d)->required();
    bound->add_option("--p", p)->required();
    bound->add_option("--t", t)->required();
    bound->add_option("--tau", tau)->required();
    bound->add_option("--kappa", kappa);
    bound->add_option("--g", g);
    bound->add_option("--epsilon", epsilon);
    bound->add_option("--xi", xi);
    bound->add_option("--D", D);

    auto* scan = app.add_subcommand("scan", "Asymptotic scan of the bounds from a JSON config");
    std::string scan_path, scan_output;
    bool scan_repro = false;
    scan->add_option("config", scan_path, "Config JSON")->required();
    scan->add_option("-o,--output", scan_output, "CSV output path");
    scan->add_flag("--reproducible", scan_repro, "Write 0 in the ms column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const Exec exec = serial ? Exec::Serial : Exec::Parallel;
    try {
        if (*run) return cmd_run(run_path, run_output, run_repro, exec);
        if (*verify) {
            if (!mutate.empty()) setenv("PROJCOND_MUTATION", mutate.c_str(), 1);
            return cmd_verify(profile, criteria, seed, verify_output, verify_repro, exec);
        }
        if (*bound) return cmd_bound(part, d, p, t, tau, kappa, g, epsilon, xi, D);
        if (*scan) return cmd_scan(scan_path, scan_output, scan_repro);
    } catch (const Error& e) {
        std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << std::endl;
        return e.code() == ErrorCode::ConfigInvalid ? kExitConfig : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
