#pragma once

#include <functional>
#include <string>
#include <vector>

#include "projcond/moments.hpp"

namespace projcond {

// p^{2k+1+eps} e^{g M^2} (2D sqrt(pi e))^{pk} d^{-min{xi, eps/2 + 1/4, 1/2}} kappa
double generic_bound(int p, int k, double epsilon, double g, double M, double D, double d, double xi, double kappa);

enum class BoundPart { A, B };  // k = 2 and k = 4
BoundPart parse_part(const std::string& s);
char part_char(BoundPart part);

struct TheoremBoundInputs {
    double log_d = 0.0;  // log d, so the formula-level grid can go far beyond double range for d
    int p = 1;
    double t = 1.0;
    double tau = 0.5;
    MomentConditionConstants constants;
    double kappa = 1.0;
    double g = 1.0;
    BoundPart part = BoundPart::A;

    static TheoremBoundInputs with_d(double d) {
        TheoremBoundInputs in;
        in.log_d = std::log(d);
        return in;
    }
    void validate() const;
};

struct TheoremBoundResult {
    double xi_eff = 0.0;
    double gamma = 0.0;
    double tau1 = 0.0, tau2 = 0.0;
    double deviation_bound = 0.0;
    double nu_gc_bound = 0.0;
    double log_deviation_bound = 0.0;
    double log_nu_gc_bound = 0.0;
    bool deviation_vacuous = false;  // value >= 1
    bool nu_vacuous = false;
};

double xi_effective(const MomentConditionConstants& c, BoundPart part);
double gamma_constant(double g, double D, BoundPart part);

TheoremBoundResult theorem_bound(const TheoremBoundInputs& in);

struct ThresholdReport {
    double d = 0.0;
    double moment_threshold = 0.0;     // 4(k+p+1)M^4
    double expansion_threshold = 0.0;  // 2k + p(2k+2)2^{k+3}
    double dimension_threshold = 0.0;  // p^2
    double required() const;
    double margin() const { return d - required(); }
    bool applicable = false;
};

ThresholdReport applicability_thresholds(double d, int p, int k, double M);

struct ScanRow {
    double log_d = 0.0;
    int p = 0;
    TheoremBoundResult bound;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    std::vector<double> growth_ratio;  // p_d / (xi log d)
    bool deviation_decreasing = false; // strictly, from the first nonvacuous row on
    bool nu_decreasing = false;
    bool final_below_1e3 = false;      // both bounds < 1e-3 at the last row
};

using PRule = std::function<int(double log_d)>;

// Evaluates theorem_bound (with base inputs, p and log d replaced) along the
// grid. Throws GrowthConditionViolated unless p_d / (xi log d) is
// non-increasing along the grid and falls to at most half its first value.
ScanResult asymptotic_scan(const TheoremBoundInputs& base, const PRule& p_rule, const std::vector<double>& log_d_grid);

}  // namespace projcond
