#include <chrono>
#include <cstdio>
#include <functional>

#include "projcond/error.hpp"
#include "projcond/harness.hpp"

namespace projcond::harness {

namespace {

struct CriterionPlan {
    std::string title;
    double budget_s;
    std::function<std::vector<ExperimentConfig>(std::uint64_t)> configs;
};

ExperimentConfig base(const std::string& kind, std::uint64_t seed) {
    ExperimentConfig c;
    c.kind = kind;
    c.seed = seed;
    return c;
}

DistributionSpec spec_of(const std::string& name, int d) {
    if (name == "gaussian") return DistributionSpec::gaussian(d);
    return DistributionSpec::parse("iid-marginal", name, d);
}

std::vector<CriterionPlan> plans() {
    std::vector<CriterionPlan> out;
    out.push_back({"density normalization", 60.0, [](std::uint64_t seed) {
                       std::vector<ExperimentConfig> v;
                       for (auto [d, p, k] : {std::tuple{30, 1, 1}, std::tuple{30, 1, 2}, std::tuple{50, 2, 2}}) {
                           auto c = base("clone-density-check", seed);
                           c.d = d;
                           c.p = p;
                           c.k = k;
                           c.spec = DistributionSpec::gaussian(d);
                           c.x_norms = {0.0, 0.5};
                           c.n = 100000;
                           v.push_back(c);
                       }
                       return v;
                   }});
    out.push_back({"eta bound", 1.0, [](std::uint64_t seed) {
                       auto c = base("clone-density-check", seed);
                       c.mode = "eta-bound";
                       c.d_grid = {10, 50, 200};
                       c.k_list = {1, 2, 4};
                       return std::vector<ExperimentConfig>{c};
                   }});
    out.push_back({"bartlett structure", 120.0, [](std::uint64_t seed) {
                       auto c = base("bartlett-check", seed);
                       c.d = 20;
                       c.p = 2;
                       c.k = 3;
                       c.n = 100000;
                       c.level = 0.01;
                       c.x_norms = {0.5};
                       return std::vector<ExperimentConfig>{c};
                   }});
    out.push_back({"expansion exactness and order", 60.0, [](std::uint64_t seed) {
                       auto c = base("expansion-order", seed);
                       c.d = 10000;
                       c.p = 1;
                       c.k_list = {1, 2, 4};
                       c.x_norms = {0.0, 0.5};
                       return std::vector<ExperimentConfig>{c};
                   }});
    out.push_back({"gaussian zero-cases", 300.0, [](std::uint64_t seed) {
                       auto a = base("conditional-linearity", seed);
                       a.mode = "gaussian-exact";
                       a.d = 60;
                       a.p = 1;
                       a.spec = DistributionSpec::gaussian(60);
                       a.n_B = 5;
                       a.n_inner = 10000;
                       auto b = base("normalzero-check", seed);
                       b.d = 60;
                       b.p = 1;
                       b.k_list = {2, 4};
                       b.max_m = 2;
                       b.n = 100000;
                       b.x_norms = {0.5};
                       return std::vector<ExperimentConfig>{a, b};
                   }});
    out.push_back({"prop5 special cases", 120.0, [](std::uint64_t seed) {
                       std::vector<ExperimentConfig> v;
                       for (const auto& [name, cases] :
                            {std::pair<std::string, std::vector<std::string>>{"gaussian", {"a", "b", "c"}},
                             {"uniform", {"a", "b", "c"}},
                             {"exponential", {"b"}}}) {
                           auto c = base("prop5-cases", seed);
                           c.d = 100;
                           c.spec = spec_of(name, 100);
                           c.n = 100000;
                           c.cases = cases;
                           v.push_back(c);
                       }
                       return v;
                   }});
    out.push_back({"standardization-forced moment identity", 60.0, [](std::uint64_t seed) {
                       std::vector<ExperimentConfig> v;
                       for (const char* name : {"gaussian", "uniform", "exponential", "triangular"}) {
                           auto c = base("moment-conditions", seed);
                           c.mode = "identity";
                           c.d = 100;
                           c.spec = spec_of(name, 100);
                           c.d_grid = {100, 400};
                           c.n = 100000;
                           v.push_back(c);
                       }
                       return v;
                   }});
    out.push_back({"conditional-linearity trend", 900.0, [](std::uint64_t seed) {
                       auto c = base("conditional-linearity", seed);
                       c.mode = "trend";
                       c.d = 32;
                       c.p = 1;
                       c.spec = spec_of("uniform", 32);
                       c.d_grid = {32, 128, 512};
                       c.n_B = 20;
                       c.n_outer = 250;
                       c.t = 0.5;
                       c.inner = InnerMethod::Fourier;
                       return std::vector<ExperimentConfig>{c};
                   }});
    out.push_back({"quadrature oracle agreement", 60.0, [](std::uint64_t seed) {
                       auto c = base("conditional-linearity", seed);
                       c.mode = "quadrature";
                       c.d = 2;
                       c.p = 1;
                       c.spec = spec_of("uniform", 2);
                       c.n = 100000;
                       c.x_values = {0.0, 0.3, -0.3, 0.8, -0.8};
                       return std::vector<ExperimentConfig>{c};
                   }});
    out.push_back({"bound arithmetic", 1.0, [](std::uint64_t seed) {
                       std::vector<ExperimentConfig> v;
                       for (BoundPart part : {BoundPart::A, BoundPart::B}) {
                           auto t = base("theorem-bound", seed);
                           t.d = 1000000;
                           t.p = 2;
                           t.t = 1.0;
                           t.part = part;
                           t.n_random = part == BoundPart::A ? 20 : 0;
                           v.push_back(t);
                           auto s = base("asymptotic-scan", seed);
                           s.p = 2;
                           s.part = part;
                           s.t = 1.0;
                           s.log_d_grid = {1e3, 1e4, 1e5, 1e6};
                           v.push_back(s);
                       }
                       return v;
                   }});
    return out;
}

CriterionResult run_configs(int id, const std::string& title, double budget_s,
                            const std::vector<ExperimentConfig>& configs, Exec exec) {
    CriterionResult res;
    res.id = id;
    res.title = title;
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
        for (const auto& c : configs) {
            auto rows = run_experiment(c, exec);
            res.rows.insert(res.rows.end(), rows.begin(), rows.end());
        }
    } catch (const std::exception& e) {
        error = e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::size_t failed = 0;
    for (const auto& r : res.rows) failed += r.pass ? 0 : 1;
    const bool in_budget = budget_s <= 0.0 || res.seconds <= budget_s;
    res.pass = error.empty() && failed == 0 && !res.rows.empty() && in_budget;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu/%zu rows pass, %.2f s (budget %.0f s)", res.rows.size() - failed,
                  res.rows.size(), res.seconds, budget_s);
    res.detail = buf;
    if (!error.empty()) res.detail += "; error: " + error;
    if (!in_budget) res.detail += "; over budget";
    return res;
}

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed, Exec exec) {
    const auto all = plans();
    if (id < 1 || id > static_cast<int>(all.size()))
        throw Error(ErrorCode::ConfigInvalid, "criterion id must lie in 1.." + std::to_string(all.size()));
    const auto& plan = all[static_cast<std::size_t>(id - 1)];
    return run_configs(id, plan.title, plan.budget_s, plan.configs(seed), exec);
}

CriterionResult run_smoke(std::uint64_t seed, Exec exec) {
    std::vector<ExperimentConfig> v;
    {
        auto c = base("clone-density-check", seed);
        c.mode = "eta-bound";
        v.push_back(c);
    }
    for (BoundPart part : {BoundPart::A, BoundPart::B}) {
        auto t = base("theorem-bound", seed);
        t.d = 1000000;
        t.p = 2;
        t.t = 1.0;
        t.part = part;
        v.push_back(t);
        auto s = base("asymptotic-scan", seed);
        s.p = 2;
        s.t = 1.0;
        s.part = part;
        s.log_d_grid = {1e3, 1e4, 1e5, 1e6};
        v.push_back(s);
    }
    {
        auto c = base("conditional-linearity", seed);
        c.mode = "gaussian-exact";
        c.d = 20;
        c.p = 2;
        c.spec = DistributionSpec::gaussian(20);
        c.n_B = 3;
        c.n_inner = 2000;
        c.n_outer = 100;
        v.push_back(c);
    }
    {
        auto c = base("expansion-order", seed);
        c.d = 10000;
        c.k_list = {1, 2};
        c.x_norms = {0.5};
        v.push_back(c);
    }
    return run_configs(0, "smoke (deterministic checks)", 60.0, v, exec);
}

std::vector<CriterionResult> run_suite(Profile profile, std::uint64_t seed, const std::vector<int>& only, Exec exec) {
    if (profile == Profile::Smoke) return {run_smoke(seed, exec)};
    std::vector<CriterionResult> out;
    if (only.empty()) {
        for (int id = 1; id <= kCriteria; ++id) out.push_back(run_criterion(id, seed, exec));
    } else {
        for (int id : only) out.push_back(run_criterion(id, seed, exec));
    }
    return out;
}

std::string format_result_line(const CriterionResult& r) {
    char head[64];
    if (r.id == 0)
        std::snprintf(head, sizeof head, "smoke");
    else
        std::snprintf(head, sizeof head, "criterion %2d", r.id);
    return std::string(head) + " " + (r.pass ? "PASS" : "FAIL") + "  " + r.title + ": " + r.detail;
}

}  // namespace projcond::harness
