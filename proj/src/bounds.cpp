#include "projcond/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "projcond/conditional.hpp"
#include "projcond/error.hpp"

namespace projcond {

namespace {

constexpr double kPi = 3.14159265358979323846;

// log(2 D sqrt(pi e))
double log_density_factor(double D) { return std::log(2.0 * D) + 0.5 * (std::log(kPi) + 1.0); }

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

bool strictly_decreasing_from_nonvacuous(const std::vector<double>& logs) {
    std::size_t start = 0;
    while (start < logs.size() && logs[start] >= 0.0) ++start;
    for (std::size_t i = start + 1; i < logs.size(); ++i)
        if (!(logs[i] < logs[i - 1])) return false;
    return start < logs.size();
}

}  // namespace

double generic_bound(int p, int k, double epsilon, double g, double M, double D, double d, double xi, double kappa) {
    if (kappa == 0.0) return 0.0;
    const double rate = std::min({xi, epsilon / 2.0 + 0.25, 0.5});
    const double log_value = std::log(kappa) + (2.0 * k + 1.0 + epsilon) * std::log(static_cast<double>(p)) +
                             g * M * M + static_cast<double>(p) * k * log_density_factor(D) - rate * std::log(d);
    return std::exp(log_value);
}

BoundPart parse_part(const std::string& s) {
    if (s == "A" || s == "a") return BoundPart::A;
    if (s == "B" || s == "b") return BoundPart::B;
    throw Error(ErrorCode::ConfigInvalid, "field \"part\" must be A or B");
}

char part_char(BoundPart part) { return part == BoundPart::A ? 'A' : 'B'; }

void TheoremBoundInputs::validate() const {
    constants.validate();
    if (p < 1) throw Error(ErrorCode::ConfigInvalid, "field \"p\" must be >= 1");
    if (!(log_d > std::log(static_cast<double>(p)))) throw Error(ErrorCode::ConfigInvalid, "field \"p\" must be < d");
    if (!(t > 0.0)) throw Error(ErrorCode::ConfigInvalid, "field \"t\" must be > 0");
    if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::ConfigInvalid, "field \"tau\" must lie in (0, 1)");
    if (!(kappa >= 1.0)) throw Error(ErrorCode::ConfigInvalid, "field \"kappa\" must be >= 1");
    if (!(g > 0.0)) throw Error(ErrorCode::ConfigInvalid, "field \"g\" must be > 0");
}

double xi_effective(const MomentConditionConstants& c, BoundPart part) {
    const double base = std::min({c.xi, c.epsilon / 2.0 + 0.25, 0.5});
    return part == BoundPart::A ? base / 3.0 : base / 5.0;
}

double gamma_constant(double g, double D, BoundPart part) {
    const double lf = log_density_factor(D);
    return part == BoundPart::A ? std::max(g, 6.0 + 2.0 * lf) : std::max(g, 10.0 + 4.0 * lf);
}

TheoremBoundResult theorem_bound(const TheoremBoundInputs& in) {
    in.validate();
    TheoremBoundResult r;
    r.xi_eff = xi_effective(in.constants, in.part);
    r.gamma = gamma_constant(in.g, in.constants.D, in.part);
    const TauParams tp = solve_tau(in.tau, r.xi_eff, part_char(in.part));
    r.tau1 = tp.tau1;
    r.tau2 = tp.tau2;
    const double c = in.part == BoundPart::A ? 3.0 : 5.0;
    const double p = in.p;

    const double log_first = -std::log(in.t) - in.tau * r.xi_eff * in.log_d;
    const double second = r.gamma / (1.0 - in.tau) * p / (c * r.xi_eff * in.log_d);
    r.log_deviation_bound = log_add(log_first, std::log(second));
    r.deviation_bound = std::exp(log_first) + second;

    const double exponent = -in.tau * r.xi_eff * in.log_d * (1.0 - (r.gamma / in.tau) * p / (r.xi_eff * in.log_d));
    const double lead = in.part == BoundPart::A ? in.kappa : 2.0 * in.kappa;
    r.log_nu_gc_bound = std::log(lead) + exponent;
    r.nu_gc_bound = lead * std::exp(exponent);

    r.deviation_vacuous = r.deviation_bound >= 1.0;
    r.nu_vacuous = r.nu_gc_bound >= 1.0;
    return r;
}

double ThresholdReport::required() const {
    return std::max({moment_threshold, expansion_threshold, dimension_threshold});
}

ThresholdReport applicability_thresholds(double d, int p, int k, double M) {
    ThresholdReport r;
    r.d = d;
    r.moment_threshold = 4.0 * (k + p + 1) * std::pow(M, 4);
    r.expansion_threshold = 2.0 * k + p * (2.0 * k + 2.0) * std::ldexp(1.0, k + 3);
    r.dimension_threshold = static_cast<double>(p) * p;
    r.applicable = d > r.moment_threshold && d > r.expansion_threshold && d > r.dimension_threshold;
    return r;
}

ScanResult asymptotic_scan(const TheoremBoundInputs& base, const PRule& p_rule, const std::vector<double>& log_d_grid) {
    if (log_d_grid.size() < 2) throw Error(ErrorCode::ConfigInvalid, "field \"log_d_grid\" needs at least two points");
    ScanResult out;
    const double xi = xi_effective(base.constants, base.part);
    for (const double ld : log_d_grid) {
        TheoremBoundInputs in = base;
        in.log_d = ld;
        in.p = p_rule(ld);
        if (!(ld > std::log(static_cast<double>(std::max(in.p, 1)))))
            throw Error(ErrorCode::GrowthConditionViolated, "p_d must stay below d on the grid");
        out.growth_ratio.push_back(in.p / (xi * ld));
    }
    const auto& gr = out.growth_ratio;
    bool shrinking = gr.back() <= 0.5 * gr.front();
    for (std::size_t i = 1; i < gr.size(); ++i) shrinking = shrinking && gr[i] <= gr[i - 1];
    if (!shrinking) throw Error(ErrorCode::GrowthConditionViolated, "p_d / (xi log d) does not vanish along the grid");

    std::vector<double> log_dev, log_nu;
    for (std::size_t i = 0; i < log_d_grid.size(); ++i) {
        TheoremBoundInputs in = base;
        in.log_d = log_d_grid[i];
        in.p = p_rule(in.log_d);
        ScanRow row{in.log_d, in.p, theorem_bound(in)};
        log_dev.push_back(row.bound.log_deviation_bound);
        log_nu.push_back(row.bound.log_nu_gc_bound);
        out.rows.push_back(row);
    }
    out.deviation_decreasing = strictly_decreasing_from_nonvacuous(log_dev);
    out.nu_decreasing = strictly_decreasing_from_nonvacuous(log_nu);
    const double lim = std::log(1e-3);
    out.final_below_1e3 = log_dev.back() < lim && log_nu.back() < lim;
    return out;
}

}  // namespace projcond
