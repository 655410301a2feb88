#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "projcond/error.hpp"
#include "projcond/harness.hpp"

namespace projcond::harness {

std::string check_name(Check c) {
    switch (c) {
        case Check::Within: return "within";
        case Check::AtMost: return "at-most";
        case Check::AtMostSe: return "at-most-se";
        case Check::Above: return "above";
        case Check::AbsTol: return "abs";
        case Check::RelTol: return "rel";
        case Check::Info: return "info";
    }
    return "?";
}

bool evaluate_check(Check c, double estimate, double se, double target, double tol) {
    switch (c) {
        case Check::Within: return std::abs(estimate - target) <= tol * se;
        case Check::AtMost: return estimate <= target;
        case Check::AtMostSe: return estimate <= target + tol * se;
        case Check::Above: return estimate > target;
        case Check::AbsTol: return std::abs(estimate - target) <= tol;
        case Check::RelTol: return std::abs(estimate - target) <= tol * std::abs(target);
        case Check::Info: return true;
    }
    return false;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ReportRow make_row(const std::string& experiment, std::string params, double estimate, double se, double target,
                   Check check, double tol) {
    ReportRow r;
    r.experiment = experiment;
    if (!params.empty()) params += ';';
    params += "check=" + check_name(check) + ":" + fmt(tol);
    r.params = std::move(params);
    r.estimate = estimate;
    r.se = se;
    r.target = target;
    r.pass = evaluate_check(check, estimate, se, target, tol);
    return r;
}

bool recompute_pass(const ReportRow& row) {
    const auto pos = row.params.rfind("check=");
    if (pos == std::string::npos) return false;
    const std::string rule = row.params.substr(pos + 6);
    const auto colon = rule.find(':');
    const std::string name = rule.substr(0, colon);
    const double tol = std::stod(rule.substr(colon + 1));
    for (Check c : {Check::Within, Check::AtMost, Check::AtMostSe, Check::Above, Check::AbsTol, Check::RelTol,
                    Check::Info})
        if (check_name(c) == name) return evaluate_check(c, row.estimate, row.se, row.target, tol);
    return false;
}

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows, bool reproducible) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.experiment << ',' << r.params << ',' << fmt(r.estimate) << ',' << fmt(r.se) << ',' << fmt(r.target)
           << ',' << (r.pass ? "true" : "false") << ',' << (reproducible ? std::string("0") : fmt(std::round(r.ms)))
           << '\n';
    }
}

nlohmann::json summary_json(const std::vector<ReportRow>& rows, const std::string& label) {
    nlohmann::json j;
    j["label"] = label;
    j["rows"] = rows.size();
    std::size_t failed = 0;
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& r : rows)
        if (!r.pass) {
            ++failed;
            failures.push_back({{"experiment", r.experiment}, {"params", r.params}, {"estimate", r.estimate},
                                {"se", r.se}, {"target", r.target}});
        }
    j["failed"] = failed;
    j["pass"] = failed == 0;
    j["failures"] = failures;
    return j;
}

int write_report(const std::vector<ReportRow>& rows, const std::string& output, const std::string& label,
                 bool reproducible) {
    std::ostringstream csv;
    write_csv(csv, rows, reproducible);
    const auto summary = summary_json(rows, label);
    if (output.empty() || output == "-") {
        std::fputs(csv.str().c_str(), stdout);
    } else {
        std::ofstream f(output, std::ios::binary);
        if (!f) throw Error(ErrorCode::ConfigInvalid, "field \"output\" is not writable: " + output);
        f << csv.str();
        std::ofstream js(output + ".json", std::ios::binary);
        js << summary.dump(2) << '\n';
    }
    return summary["pass"].get<bool>() ? 0 : 1;
}

}  // namespace projcond::harness
