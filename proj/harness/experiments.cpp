#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "projcond/clones.hpp"
#include "projcond/error.hpp"
#include "projcond/expansion.hpp"
#include "projcond/harness.hpp"
#include "projcond/linalg.hpp"
#include "projcond/oracles.hpp"

namespace projcond::harness {

namespace {

class Params {
public:
    template <class T>
    Params& operator()(const std::string& key, const T& value) {
        if (!text_.empty()) text_ += ';';
        text_ += key + '=' + str(value);
        return *this;
    }
    const std::string& text() const { return text_; }

private:
    static std::string str(const std::string& s) { return s; }
    static std::string str(const char* s) { return s; }
    static std::string str(int v) { return std::to_string(v); }
    static std::string str(std::size_t v) { return std::to_string(v); }
    static std::string str(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }
    std::string text_;
};

class Runner {
public:
    Runner(const ExperimentConfig& cfg, Exec exec) : cfg_(cfg), exec_(exec) {}

    // Fresh generator for the i-th independent computation of this experiment.
    Rng stream(std::uint64_t i) const { return Rng::substream(cfg_.seed, hash_name(cfg_.kind), i); }
    Rng next_stream() { return stream(counter_++); }

    template <class Fn>
    void timed(Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        const std::size_t before = rows_.size();
        fn();
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        const std::size_t added = rows_.size() - before;
        for (std::size_t i = before; i < rows_.size(); ++i) rows_[i].ms = ms / static_cast<double>(added);
    }

    void add(const Params& params, double estimate, double se, double target, Check check, double tol = 0.0) {
        rows_.push_back(make_row(cfg_.kind, params.text(), estimate, se, target, check, tol));
    }

    const ExperimentConfig& cfg() const { return cfg_; }
    Exec exec() const { return exec_; }
    std::vector<ReportRow> take() { return std::move(rows_); }

private:
    const ExperimentConfig& cfg_;
    Exec exec_;
    std::uint64_t counter_ = 0;
    std::vector<ReportRow> rows_;
};

VectorXd axis_point(int p, double norm) {
    VectorXd x = VectorXd::Zero(p);
    x[0] = norm;
    return x;
}

DistributionSpec with_d(DistributionSpec s, int d) {
    s.d = d;
    return s;
}

std::string mode_or(const ExperimentConfig& cfg, const std::string& fallback) {
    return cfg.mode.empty() ? fallback : cfg.mode;
}

[[noreturn]] void bad_mode(const std::string& kind) {
    throw Error(ErrorCode::ConfigInvalid, "field \"mode\" is not supported for " + kind);
}

// ---------------------------------------------------------------- clones

void clone_density_check(Runner& r) {
    const auto& c = r.cfg();
    const std::string mode = mode_or(c, "normalization");
    if (mode == "eta-bound") {
        const std::vector<int> ds = c.d_grid.empty() ? std::vector<int>{10, 50, 200} : c.d_grid;
        for (int d : ds)
            for (int p : {1, 2, 3})
                for (int k : c.k_list) {
                    if (!(k < d - p - 1)) continue;
                    r.timed([&] {
                        r.add(Params()("d", d)("p", p)("k", k)("quantity", "eta<=bound"), eta_norm_const(d, p, k), 0.0,
                              eta_upper_bound(d, p, k), Check::AtMost);
                        r.add(Params()("d", d)("p", p)("k", k)("quantity", "log-eta-vs-oracle"), log_eta(d, p, k), 0.0,
                              static_cast<double>(oracle::log_eta(d, p, k)), Check::AbsTol, 1e-9);
                    });
                }
        return;
    }
    if (mode != "normalization") bad_mode(c.kind);
    for (double xn : c.x_norms) {
        r.timed([&] {
            Rng g = r.next_stream();
            const Estimate e = clone_density_normalization(axis_point(c.p, xn), c.d, c.p, c.k, c.n, g, r.exec());
            r.add(Params()("d", c.d)("p", c.p)("k", c.k)("x_norm", xn)("n", c.n)("quantity", "mean-ratio"), e.value,
                  e.se, 1.0, Check::Within, c.z);
        });
    }
    if (c.k < c.d - c.p - 1)
        r.add(Params()("d", c.d)("p", c.p)("k", c.k)("quantity", "eta<=bound"), eta_norm_const(c.d, c.p, c.k), 0.0,
              eta_upper_bound(c.d, c.p, c.k), Check::AtMost);
    if (c.spec.family == Family::IidMarginal) {
        if (c.spec.marginal == Marginal::Exponential) {
            // f/phi grows like exp(z^2/2) on the right tail: infinite variance.
            r.add(Params()("spec", c.spec.name())("quantity", "h-normalization")("status", "excluded-infinite-variance"),
                  0.0, 0.0, 0.0, Check::Info);
            return;
        }
        r.timed([&] {
            Rng g = r.next_stream();
            const StiefelMatrix B = haar_stiefel(c.d, c.p, g);
            StreamFactory xs(g, "h-normalization");
            const auto hs = map_indices<double>(
                static_cast<std::size_t>(c.n_outer),
                [&](std::size_t i) {
                    Rng gi = xs(i);
                    const VectorXd x = gi.normal_vector(c.p);
                    return estimate_h(c.spec, B, x, c.n_inner, gi, Exec::Serial).value;
                },
                r.exec());
            Moments m;
            for (double h : hs) m.add(h);
            r.add(Params()("spec", c.spec.name())("d", c.d)("p", c.p)("n_outer", c.n_outer)("n_inner", c.n_inner)(
                      "quantity", "h-normalization"),
                  m.mean, m.se(), 1.0, Check::Within, c.z);
        });
    }
}

// ---------------------------------------------------------------- bartlett

void bartlett_check(Runner& r) {
    const auto& c = r.cfg();
    const VectorXd x = axis_point(c.p, c.x_norms.back());
    r.timed([&] {
        Rng g = r.next_stream();
        const BartlettReport rep = bartlett_distribution_check(c.d, c.p, c.k, x, c.n, g);
        for (const auto& t : rep.ks)
            r.add(Params()("d", c.d)("p", c.p)("k", c.k)("n", c.n)("test", t.name)("D", t.statistic), t.p_value, 0.0,
                  c.level, Check::Above);
        const double bound = 4.0 / std::sqrt(static_cast<double>(c.n));
        for (const auto& cr : rep.corr)
            r.add(Params()("d", c.d)("p", c.p)("k", c.k)("quantity", "|corr(" + cr.a + " " + cr.b + ")|"),
                  std::abs(cr.r), 0.0, bound, Check::AtMost);
        r.add(Params()("d", c.d)("p", c.p)("k", c.k)("quantity", "max-below-diagonal"), rep.max_below_diagonal, 0.0,
              1e-10, Check::AtMost);
    });
    r.timed([&] {
        Rng g = r.next_stream();
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const StiefelMatrix B = haar_stiefel(c.d, c.p, g);
            const MatrixXd w = sample_clones(B, x, c.k, g).W;
            const GramSchmidtFrame f = frame_decompose(B, x, w);
            const double det = f.Lambda.determinant();
            worst = std::max(worst, std::abs(det * det - lambda_det_target(x, w)));
        }
        r.add(Params()("d", c.d)("p", c.p)("k", c.k)("frames", 100)("quantity", "max|det(Lambda)^2-target|"), worst,
              0.0, 0.0, Check::AbsTol, 1e-8);
    });
}

// ---------------------------------------------------------------- expansion

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void expansion_order(Runner& r) {
    const auto& c = r.cfg();
    const std::vector<double> eps{0.02, 0.01, 0.005, 0.0025};
    for (int k : c.k_list) {
        for (double xn : c.x_norms) {
            r.timed([&] {
                const VectorXd x = axis_point(c.p, xn);
                const MatrixXd I = MatrixXd::Identity(k, k);
                const Params base = Params()("d", c.d)("p", c.p)("k", k)("x_norm", xn);
                r.add(Params(base)("quantity", "remainder-at-I"), remainder_diagnostic(x, I, c.d, c.p).remainder, 0.0,
                      0.0, Check::AbsTol, 1e-10);

                // Direction A with a non-degenerate leading remainder coefficient.
                Rng g = r.next_stream();
                MatrixXd A;
                std::vector<long double> coef;
                int attempts = 0;
                for (; attempts < 50; ++attempts) {
                    A = g.normal_matrix(k, k);
                    A = (A + A.transpose()).eval();
                    A /= spectral_norm(A);
                    coef = oracle::ratio_series(xn * xn, A, c.d, c.p, k + 2);
                    const long double lead = std::abs(coef[static_cast<std::size_t>(k + 1)]);
                    const long double next = std::abs(coef[static_cast<std::size_t>(k + 2)]);
                    if (lead > 0.0L && eps.front() * next <= 0.25L * lead) break;
                }
                std::vector<double> lx, ly;
                for (double e : eps) {
                    const double rem = remainder_diagnostic(x, I + e * A, c.d, c.p).remainder;
                    lx.push_back(std::log(e));
                    ly.push_back(std::log(std::abs(rem)));
                }
                r.add(Params(base)("quantity", "log-log-slope")("direction_attempts", attempts + 1), fit_slope(lx, ly),
                      0.0, k + 1.0, Check::AbsTol, 0.3);

                // Cross-checks of the polynomial against the series oracle at eps = 0.01.
                const MatrixXd S = I + 0.01 * A;
                long double trunc = 0.0L, pw = 1.0L;
                for (int j = 0; j <= k; ++j, pw *= 0.01L) trunc += coef[static_cast<std::size_t>(j)] * pw;
                r.add(Params(base)("quantity", "psi-vs-series-oracle"), psi_eval(x, S, c.d, c.p), 0.0,
                      static_cast<double>(trunc), Check::AbsTol, 1e-12);
                r.add(Params(base)("quantity", "psi-poly-vs-psi-eval"), psi_poly(x, k, c.p, c.d).evaluate(S), 0.0,
                      psi_eval(x, S, c.d, c.p), Check::AbsTol, 1e-12);
            });
        }
    }
}

// ---------------------------------------------------------------- moments

void moment_conditions(Runner& r) {
    const auto& c = r.cfg();
    const std::string mode = mode_or(c, "full");
    if (mode != "full" && mode != "identity") bad_mode(c.kind);
    const std::vector<int> ds = c.d_grid.empty() ? std::vector<int>{c.d} : c.d_grid;
    const MonomialSpec e12sq = MonomialSpec::make({{1, 2}, {1, 2}});
    for (int d : ds) {
        r.timed([&] {
            Rng g = r.next_stream();
            const auto mm = estimate_monomial_mean(with_d(c.spec, d), d, e12sq, c.n, g, r.exec());
            r.add(Params()("spec", c.spec.name())("d", d)("n", c.n)("quantity", "d*E[(S-I)_12^2]"), mm.estimate, mm.se,
                  1.0, Check::Within, c.z);
        });
    }
    if (mode == "identity") return;
    r.timed([&] {
        Rng g = r.next_stream();
        const Estimate a = estimate_b1a(c.spec, c.d, c.k, c.constants.epsilon, c.n, g, r.exec());
        r.add(Params()("spec", c.spec.name())("d", c.d)("k", c.k)("quantity", "b1a-moment"), a.value, a.se, 0.0,
              Check::Info);
    });
    for (const auto& G : b1b_family(c.k)) {
        r.timed([&] {
            Rng g = r.next_stream();
            const auto mm = estimate_monomial_mean(c.spec, c.d, G, c.n, g, r.exec());
            std::string name;
            for (const auto& [a, b] : G.key.pairs) name += "e" + std::to_string(a) + std::to_string(b);
            r.add(Params()("spec", c.spec.name())("d", c.d)("monomial", name)("class", class_name(G.cls))("quantity",
                                                                                                        "b1b-mean"),
                  mm.estimate, mm.se, mm.target.value_or(0.0), Check::Info);
        });
    }
    r.timed([&] {
        Rng g = r.next_stream();
        const auto k = estimate_constants(c.spec, c.d, c.k, c.n, g, c.constants.epsilon, c.constants.xi, r.exec());
        const Params base = Params()("spec", c.spec.name())("d", c.d)("k", c.k);
        r.add(Params(base)("quantity", "alpha_hat"), k.alpha, 0.0, 0.0, Check::Info);
        r.add(Params(base)("quantity", "beta_hat(family)"), k.beta, 0.0, 0.0, Check::Info);
        r.add(Params(base)("quantity", "D"), k.D, 0.0, 0.0, Check::Info);
    });
}

void prop5_cases(Runner& r) {
    const auto& c = r.cfg();
    r.timed([&] {
        Rng g = r.next_stream();
        const Prop5Cases pc = prop5_special_cases(c.spec, c.d, c.n, g, r.exec());
        const Params base = Params()("spec", c.spec.name())("d", c.d)("n", c.n);
        for (const auto& name : c.cases) {
            const Estimate& e = name == "a" ? pc.a : name == "b" ? pc.b : pc.c;
            const auto& exact = name == "a" ? pc.a_exact : name == "b" ? pc.b_exact : pc.c_exact;
            r.add(Params(base)("case", name), e.value, e.se, exact.value_or(0.0),
                  exact ? Check::Within : Check::Info, c.z);
        }
    });
}

// ---------------------------------------------------------------- conditional

void conditional_trend(Runner& r) {
    const auto& c = r.cfg();
    const std::vector<int> ds = c.d_grid.empty() ? std::vector<int>{32, 128, 512} : c.d_grid;
    std::vector<Estimate> mean_disp, var_disp;
    for (int d : ds) {
        r.timed([&] {
            const DistributionSpec spec = with_d(c.spec, d);
            double pm = 0.0, pv = 0.0, vm = 0.0, vv = 0.0, noise_m = 0.0, noise_v = 0.0;
            InnerMethod used = c.inner;
            for (int b = 0; b < c.n_B; ++b) {
                Rng g = r.next_stream();
                const StiefelMatrix B = haar_stiefel(d, c.p, g);
                const auto dp = deviation_probability(spec, B, c.t, c.n_outer, c.n_inner, g, c.inner, r.exec());
                pm += dp.mean.value;
                pv += dp.variance.value;
                vm += dp.mean.se * dp.mean.se;
                vv += dp.variance.se * dp.variance.se;
                noise_m += dp.inner_noise_mean;
                noise_v += dp.inner_noise_var;
                used = dp.method;
            }
            const double nb = c.n_B;
            mean_disp.push_back({pm / nb, std::sqrt(vm) / nb});
            var_disp.push_back({pv / nb, std::sqrt(vv) / nb});
            const Params base = Params()("spec", c.spec.name())("d", d)("p", c.p)("t", c.t)("n_B", c.n_B)(
                "n_outer", c.n_outer)("inner", inner_method_name(used));
            r.add(Params(base)("display", "mean")("inner_noise", noise_m / nb), mean_disp.back().value,
                  mean_disp.back().se, 0.0, Check::Info);
            r.add(Params(base)("display", "variance")("inner_noise", noise_v / nb), var_disp.back().value,
                  var_disp.back().se, 0.0, Check::Info);
        });
    }
    for (std::size_t i = 1; i < ds.size(); ++i) {
        auto trend = [&](const std::vector<Estimate>& v, const char* display) {
            const double se = std::sqrt(v[i].se * v[i].se + v[i - 1].se * v[i - 1].se);
            r.add(Params()("spec", c.spec.name())("display", display)("d_from", ds[i - 1])("d_to", ds[i])(
                      "quantity", "P(d_to)-P(d_from)"),
                  v[i].value - v[i - 1].value, se, 0.0, Check::AtMostSe, c.z);
        };
        trend(mean_disp, "mean");
        trend(var_disp, "variance");
    }
}

void conditional_quadrature(Runner& r) {
    const auto& c = r.cfg();
    if (c.d != 2 || c.p != 1) throw Error(ErrorCode::ConfigInvalid, "field \"d\" must be 2 (and p = 1) for quadrature");
    const Marginal m = c.spec.family == Family::Gaussian ? Marginal::Normal : c.spec.marginal;
    const Eigen::Vector2d b = Eigen::Vector2d(1.0, 2.0) / std::sqrt(5.0);
    const StiefelMatrix B{MatrixXd(b)};
    for (double x : c.x_values) {
        r.timed([&] {
            Rng g = r.next_stream();
            VectorXd xv(1);
            xv << x;
            const auto est = estimate_conditional(c.spec, B, xv, c.n, g, true, r.exec());
            const auto ref = oracle::fiber_quadrature(m, b, x);
            const Params base = Params()("spec", c.spec.name())("B", "(1,2)/sqrt5")("x", x)("n", c.n);
            r.add(Params(base)("quantity", "h"), est.h.value, est.h.se, ref.h, Check::Within, c.z);
            for (int i = 0; i < 2; ++i)
                r.add(Params(base)("quantity", "mu_" + std::to_string(i + 1)), est.mu[i], est.mu_se[i], ref.mu[i],
                      Check::Within, c.z);
            r.add(Params(base)("quantity", "|Delta|"), est.delta_op_norm.value, est.delta_op_norm.se,
                  ref.delta_op_norm, Check::Within, c.z);
        });
    }
}

void conditional_gaussian_exact(Runner& r) {
    const auto& c = r.cfg();
    if (c.spec.family != Family::Gaussian)
        throw Error(ErrorCode::ConfigInvalid, "field \"distribution\" must be gaussian for gaussian-exact");
    for (int b = 0; b < c.n_B; ++b) {
        r.timed([&] {
            Rng g = r.next_stream();
            const StiefelMatrix B = haar_stiefel(c.d, c.p, g);
            const VectorXd x = g.normal_vector(c.p);
            const auto e = estimate_conditional(c.spec, B, x, c.n_inner, g, true, r.exec());
            const Params base = Params()("d", c.d)("p", c.p)("B", b)("n_inner", c.n_inner);
            r.add(Params(base)("quantity", "h"), e.h.value, e.h.se, 1.0, Check::AbsTol, 0.0);
            r.add(Params(base)("quantity", "max|mu-Bx|"), (e.mu - B.matrix() * x).cwiseAbs().maxCoeff(), 0.0, 0.0,
                  Check::AbsTol, 1e-12);
            r.add(Params(base)("quantity", "|Delta|"), e.delta_op_norm.value, e.delta_op_norm.se, 0.0, Check::AbsTol,
                  1e-12);
        });
    }
    r.timed([&] {
        Rng g = r.next_stream();
        const StiefelMatrix B = haar_stiefel(c.d, c.p, g);
        const auto dp =
            deviation_probability(c.spec, B, c.t > 0.0 ? c.t : 0.5, std::min(c.n_outer, 200), std::min(c.n_inner, 2000),
                                  g, InnerMethod::Importance, r.exec());
        const Params base = Params()("d", c.d)("p", c.p)("quantity", "deviation-probability");
        r.add(Params(base)("display", "mean"), dp.mean.value, dp.mean.se, 0.0, Check::AbsTol, 0.0);
        r.add(Params(base)("display", "variance"), dp.variance.value, dp.variance.se, 0.0, Check::AbsTol, 0.0);
    });
}

void conditional_linearity(Runner& r) {
    const std::string mode = mode_or(r.cfg(), "trend");
    if (mode == "trend") return conditional_trend(r);
    if (mode == "quadrature") return conditional_quadrature(r);
    if (mode == "gaussian-exact") return conditional_gaussian_exact(r);
    bad_mode(r.cfg().kind);
}

void g_membership_experiment(Runner& r) {
    const auto& c = r.cfg();
    const double xi = xi_effective(c.constants, c.part);
    const TauParams tau = solve_tau(c.tau, xi, part_char(c.part));
    const double gamma = c.gamma > 0.0 ? c.gamma : gamma_constant(c.g, c.constants.D, c.part);
    int non_members = 0;
    for (int b = 0; b < c.n_B; ++b) {
        r.timed([&] {
            Rng g = r.next_stream();
            const StiefelMatrix B = haar_stiefel(c.d, c.p, g);
            const auto rep = g_membership(c.spec, B, tau, gamma, c.n_outer, c.n_inner, g, c.inner, r.exec());
            non_members += rep.member ? 0 : 1;
            r.add(Params()("spec", c.spec.name())("d", c.d)("p", c.p)("B", b)("M_d", rep.M_d)("member",
                                                                                             rep.member ? 1 : 0)(
                      "trivial", rep.trivial ? 1 : 0)("quantity", "integral-vs-delta_d"),
                  rep.integral.value, rep.integral.se, rep.delta_d, Check::Info);
        });
    }
    TheoremBoundInputs in = TheoremBoundInputs::with_d(c.d);
    in.p = c.p;
    in.t = c.t > 0.0 ? c.t : 1.0;
    in.tau = c.tau;
    in.constants = c.constants;
    in.kappa = std::max(1.0, c.kappa);
    in.g = c.g;
    in.part = c.part;
    const auto tb = theorem_bound(in);
    r.add(Params()("spec", c.spec.name())("d", c.d)("p", c.p)("quantity", "non-member-fraction")("nu_gc_bound",
                                                                                               tb.nu_gc_bound),
          non_members / static_cast<double>(c.n_B), 0.0, tb.nu_gc_bound, Check::Info);
}

// ---------------------------------------------------------------- bounds

TheoremBoundInputs base_inputs(const ExperimentConfig& c) {
    TheoremBoundInputs in = TheoremBoundInputs::with_d(c.d);
    in.p = c.p;
    in.t = c.t;
    in.tau = c.tau;
    in.constants = c.constants;
    in.kappa = c.kappa;
    in.g = c.g;
    in.part = c.part;
    return in;
}

void theorem_bound_experiment(Runner& r) {
    const auto& c = r.cfg();
    r.timed([&] {
        const TheoremBoundInputs in = base_inputs(c);
        const auto tb = theorem_bound(in);
        const auto ref = oracle::theorem_bound(part_char(c.part), c.d, c.p, c.t, c.tau, c.constants.epsilon,
                                               c.constants.xi, c.constants.D, c.kappa, c.g);
        const Params base = Params()("part", std::string(1, part_char(c.part)))("d", c.d)("p", c.p)("t", c.t)("tau",
                                                                                                          c.tau);
        r.add(Params(base)("quantity", "deviation_bound")("vacuous", tb.deviation_vacuous ? 1 : 0),
              tb.deviation_bound, 0.0, static_cast<double>(ref.deviation), Check::RelTol, 1e-12);
        r.add(Params(base)("quantity", "nu_gc_bound")("vacuous", tb.nu_vacuous ? 1 : 0), tb.nu_gc_bound, 0.0,
              static_cast<double>(ref.nu), Check::RelTol, 1e-12);
        r.add(Params(base)("quantity", "xi_eff"), tb.xi_eff, 0.0, static_cast<double>(ref.xi_eff), Check::RelTol,
              1e-15);
        r.add(Params(base)("quantity", "gamma"), tb.gamma, 0.0, static_cast<double>(ref.gamma), Check::RelTol, 1e-14);
        for (int k : {2, 4}) {
            const auto th = applicability_thresholds(c.d, c.p, k, 1.0);
            r.add(Params(base)("k", k)("quantity", "applicability-margin")("applicable", th.applicable ? 1 : 0),
                  th.margin(), 0.0, 0.0, Check::Info);
        }
    });
    if (c.n_random == 0) return;
    r.timed([&] {
        Rng g = r.next_stream();
        auto unif = [&](double a, double b) { return a + (b - a) * g.uniform(); };
        for (int i = 0; i < c.n_random; ++i) {
            const double d = std::exp(unif(std::log(10.0), std::log(1e8)));
            const int p = 1 + static_cast<int>(g.uniform() * 5.0);
            const double t = unif(0.1, 10.0), tau = unif(0.05, 0.95), eps = unif(0.0, 0.5), xi = unif(0.05, 0.5);
            const double D = unif(1.0, 3.0), kappa = unif(1.0, 3.0), gg = unif(0.5, 20.0);
            const BoundPart part = g.uniform() < 0.5 ? BoundPart::A : BoundPart::B;
            TheoremBoundInputs in = TheoremBoundInputs::with_d(d);
            in.p = p;
            in.t = t;
            in.tau = tau;
            in.constants.epsilon = eps;
            in.constants.xi = xi;
            in.constants.D = D;
            in.kappa = kappa;
            in.g = gg;
            in.part = part;
            const auto tb = theorem_bound(in);
            const auto ref = oracle::theorem_bound(part_char(part), d, p, t, tau, eps, xi, D, kappa, gg);
            const Params base = Params()("tuple", i)("part", std::string(1, part_char(part)))("d", d)("p", p);
            r.add(Params(base)("quantity", "deviation_bound"), tb.deviation_bound, 0.0,
                  static_cast<double>(ref.deviation), Check::RelTol, 1e-12);
            r.add(Params(base)("quantity", "nu_gc_bound"), tb.nu_gc_bound, 0.0, static_cast<double>(ref.nu),
                  Check::RelTol, 1e-12);

            const int k = 1 + static_cast<int>(g.uniform() * 4.0);
            const double M = unif(0.5, 2.0);
            r.add(Params(base)("k", k)("M", M)("quantity", "generic_bound"),
                  generic_bound(p, k, eps, gg, M, D, d, xi, kappa), 0.0,
                  static_cast<double>(oracle::generic_bound(p, k, eps, gg, M, D, d, xi, kappa)), Check::RelTol, 1e-12);
        }
    });
}

PRule make_p_rule(const ExperimentConfig& c) {
    if (c.p_rule == "sqrt-log") return [](double ld) { return std::max(1, static_cast<int>(std::sqrt(ld))); };
    if (c.p_rule == "log") return [](double ld) { return std::max(1, static_cast<int>(ld)); };
    const int p = c.p;
    return [p](double) { return p; };
}

void asymptotic_scan_experiment(Runner& r) {
    const auto& c = r.cfg();
    const std::vector<double> grid =
        c.log_d_grid.empty() ? std::vector<double>{1e3, 1e4, 1e5, 1e6} : c.log_d_grid;
    r.timed([&] {
        TheoremBoundInputs in = base_inputs(c);
        in.t = c.t > 0.0 ? c.t : 1.0;
        in.log_d = grid.front();
        const ScanResult scan = asymptotic_scan(in, make_p_rule(c), grid);
        const double ln10 = std::log(10.0);
        for (std::size_t i = 0; i < scan.rows.size(); ++i) {
            const auto& row = scan.rows[i];
            const Params base = Params()("part", std::string(1, part_char(c.part)))("log_d", row.log_d)("p", row.p)(
                "growth_ratio", scan.growth_ratio[i]);
            r.add(Params(base)("quantity", "log10_deviation_bound"), row.bound.log_deviation_bound / ln10, 0.0, 0.0,
                  Check::Info);
            r.add(Params(base)("quantity", "log10_nu_gc_bound"), row.bound.log_nu_gc_bound / ln10, 0.0, 0.0,
                  Check::Info);
        }
        const Params base = Params()("part", std::string(1, part_char(c.part)))("p_rule", c.p_rule);
        r.add(Params(base)("quantity", "deviation-strictly-decreasing"), scan.deviation_decreasing ? 1.0 : 0.0, 0.0,
              1.0, Check::AbsTol, 0.0);
        r.add(Params(base)("quantity", "nu-strictly-decreasing"), scan.nu_decreasing ? 1.0 : 0.0, 0.0, 1.0,
              Check::AbsTol, 0.0);
        const double final_log10 =
            std::max(scan.rows.back().bound.log_deviation_bound, scan.rows.back().bound.log_nu_gc_bound) / ln10;
        r.add(Params(base)("quantity", "final-max-log10-bound"), final_log10, 0.0, -3.0, Check::AtMost);
    });
}

// ---------------------------------------------------------------- normalzero

void normalzero_check(Runner& r) {
    const auto& c = r.cfg();
    const VectorXd x = axis_point(c.p, c.x_norms.back());
    for (int k : c.k_list) {
        if (k % 2 != 0) continue;
        for (const auto& chain : enumerate_chains(k, c.max_m)) {
            r.timed([&] {
                Rng g = r.next_stream();
                const auto res = gaussian_chain_identity(x, c.d, c.p, k, chain, c.n, g, ChainRoute::Clones, r.exec());
                std::string js;
                for (int v : chain.j) js += (js.empty() ? "" : "/") + std::to_string(v);
                r.add(Params()("d", c.d)("p", c.p)("k", k)("l", chain.l)("j", js)("target", res.target)("quantity",
                                                                                                     "chain-minus-target"),
                      res.estimate, res.se, 0.0, Check::Within, c.z);
            });
        }
        r.timed([&] {
            Rng g = r.next_stream();
            const auto res = gaussian_alternating_sum(x, c.d, c.p, k, c.n, g, ChainRoute::Clones, r.exec());
            r.add(Params()("d", c.d)("p", c.p)("k", k)("target", res.target)("quantity", "alternating-sum-minus-target"),
                  res.estimate, res.se, 0.0, Check::Within, c.z);
        });
    }
}

}  // namespace

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg, Exec exec) {
    Runner r(cfg, exec);
    const std::string& k = cfg.kind;
    if (k == "clone-density-check") clone_density_check(r);
    else if (k == "bartlett-check") bartlett_check(r);
    else if (k == "expansion-order") expansion_order(r);
    else if (k == "moment-conditions") moment_conditions(r);
    else if (k == "prop5-cases") prop5_cases(r);
    else if (k == "conditional-linearity") conditional_linearity(r);
    else if (k == "g-membership") g_membership_experiment(r);
    else if (k == "theorem-bound") theorem_bound_experiment(r);
    else if (k == "asymptotic-scan") asymptotic_scan_experiment(r);
    else if (k == "normalzero-check") normalzero_check(r);
    else throw Error(ErrorCode::ConfigInvalid, "field \"experiment\" is not a known kind");
    return r.take();
}

}  // namespace projcond::harness
