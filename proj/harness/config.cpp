#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "projcond/error.hpp"
#include "projcond/harness.hpp"

namespace projcond::harness {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ConfigInvalid, "field \"" + field + "\" " + what);
}

int get_int(const json& j, const std::string& key, int fallback, int min_value) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) invalid(key, "must be an integer");
    const auto x = v.get<long long>();
    if (x < min_value || x > 2000000000LL) invalid(key, "must be an integer >= " + std::to_string(min_value));
    return static_cast<int>(x);
}

double get_double(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) invalid(key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) invalid(key, "must be finite");
    return x;
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) invalid(key, "must be a string");
    return j.at(key).get<std::string>();
}

template <class T>
std::vector<T> get_list(const json& j, const std::string& key, std::vector<T> fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_array() || v.empty()) invalid(key, "must be a non-empty array");
    std::vector<T> out;
    for (const auto& e : v) {
        if constexpr (std::is_same_v<T, int>) {
            if (!e.is_number_integer()) invalid(key, "must contain integers");
        } else if constexpr (std::is_same_v<T, double>) {
            if (!e.is_number()) invalid(key, "must contain numbers");
        } else {
            if (!e.is_string()) invalid(key, "must contain strings");
        }
        out.push_back(e.get<T>());
    }
    return out;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) invalid(prefix + key, "is not a recognized setting");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) invalid("<root>", "must be a JSON object");
    check_keys(j,
               {"experiment", "distribution", "d", "p", "k", "n", "n_outer", "n_inner", "n_B", "seed", "z", "level",
                "output", "x_norms", "x_values", "k_list", "d_grid", "log_d_grid", "p_rule", "mode", "inner",
                "cases", "max_m", "n_random", "t", "tau", "part", "kappa", "g", "gamma", "constants"},
               "");
    ExperimentConfig c;
    if (!j.contains("experiment")) invalid("experiment", "is required");
    c.kind = get_string(j, "experiment", "");
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) invalid("experiment", "is not a known kind");

    c.d = get_int(j, "d", c.d, 2);
    c.p = get_int(j, "p", c.p, 1);
    if (c.p >= c.d) invalid("p", "must be smaller than d");
    c.k = get_int(j, "k", c.k, 1);
    c.n = get_int(j, "n", c.n, 2);
    c.n_outer = get_int(j, "n_outer", c.n_outer, 1);
    c.n_inner = get_int(j, "n_inner", c.n_inner, 2);
    c.n_B = get_int(j, "n_B", c.n_B, 1);
    c.max_m = get_int(j, "max_m", c.max_m, 0);
    c.n_random = get_int(j, "n_random", c.n_random, 0);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) invalid("seed", "must be an integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.z = get_double(j, "z", c.z);
    if (!(c.z > 0.0)) invalid("z", "must be positive");
    c.level = get_double(j, "level", c.level);
    if (!(c.level > 0.0 && c.level < 1.0)) invalid("level", "must lie in (0, 1)");
    c.output = get_string(j, "output", "");

    c.x_norms = get_list<double>(j, "x_norms", c.x_norms);
    for (double v : c.x_norms)
        if (!(v >= 0.0)) invalid("x_norms", "must be nonnegative");
    c.x_values = get_list<double>(j, "x_values", c.x_values);
    c.k_list = get_list<int>(j, "k_list", c.k_list);
    for (int v : c.k_list)
        if (v < 1) invalid("k_list", "must contain positive integers");
    c.d_grid = get_list<int>(j, "d_grid", c.d_grid);
    for (int v : c.d_grid)
        if (v <= c.p) invalid("d_grid", "entries must exceed p");
    c.log_d_grid = get_list<double>(j, "log_d_grid", c.log_d_grid);
    for (double v : c.log_d_grid)
        if (!(v > 0.0)) invalid("log_d_grid", "entries must be positive");
    c.p_rule = get_string(j, "p_rule", c.p_rule);
    if (c.p_rule != "constant" && c.p_rule != "sqrt-log" && c.p_rule != "log")
        invalid("p_rule", "must be constant, sqrt-log or log");
    c.mode = get_string(j, "mode", "");
    c.inner = parse_inner_method(get_string(j, "inner", "auto"));
    c.cases = get_list<std::string>(j, "cases", c.cases);
    for (const auto& s : c.cases)
        if (s != "a" && s != "b" && s != "c") invalid("cases", "entries must be a, b or c");

    c.t = get_double(j, "t", c.t);
    if (!(c.t >= 0.0)) invalid("t", "must be nonnegative");
    c.tau = get_double(j, "tau", c.tau);
    if (!(c.tau > 0.0 && c.tau < 1.0)) invalid("tau", "must lie in (0, 1)");
    c.part = parse_part(get_string(j, "part", "A"));
    c.kappa = get_double(j, "kappa", c.kappa);
    if (!(c.kappa >= 0.0)) invalid("kappa", "must be nonnegative");
    c.g = get_double(j, "g", c.g);
    if (!(c.g > 0.0)) invalid("g", "must be positive");
    c.gamma = get_double(j, "gamma", c.gamma);

    if (j.contains("constants")) {
        const auto& cj = j.at("constants");
        if (!cj.is_object()) invalid("constants", "must be an object");
        check_keys(cj, {"epsilon", "alpha", "beta", "xi", "D"}, "constants.");
        c.constants.epsilon = get_double(cj, "epsilon", c.constants.epsilon);
        c.constants.alpha = get_double(cj, "alpha", c.constants.alpha);
        c.constants.beta = get_double(cj, "beta", c.constants.beta);
        c.constants.xi = get_double(cj, "xi", c.constants.xi);
        c.constants.D = get_double(cj, "D", c.constants.D);
        c.constants.validate();
    }

    std::string family = "gaussian", marginal;
    if (j.contains("distribution")) {
        const auto& dj = j.at("distribution");
        if (!dj.is_object()) invalid("distribution", "must be an object");
        check_keys(dj, {"family", "marginal", "d"}, "distribution.");
        family = get_string(dj, "family", family);
        marginal = get_string(dj, "marginal", "");
        if (dj.contains("d") && get_int(dj, "d", c.d, 1) != c.d) invalid("distribution.d", "must equal d");
    }
    c.spec = DistributionSpec::parse(family, marginal, c.d);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::ConfigInvalid, "config file not readable: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace projcond::harness
