#include "projcond/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

#include "projcond/error.hpp"

namespace projcond {

namespace {

using cd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogFloor = -40.0;
constexpr long kMaxNodes = 20000;

struct IsAccumulator {
    Moments b;            // r - 1
    VectorXd sum_a;       // sum W (r - 1)
    MatrixXd sum_m;       // sum W W' (r - 1)
    bool init = false;
    void merge(const IsAccumulator& o) {
        if (!o.init) return;
        if (!init) {
            *this = o;
            return;
        }
        b.merge(o.b);
        sum_a += o.sum_a;
        if (sum_m.size()) sum_m += o.sum_m;
    }
};

struct ResidualAccumulator {
    std::vector<Moments> mu;
    Moments delta;
    void merge(const ResidualAccumulator& o) {
        if (mu.empty()) {
            *this = o;
            return;
        }
        for (std::size_t i = 0; i < mu.size(); ++i) mu[i].merge(o.mu[i]);
        delta.merge(o.delta);
    }
};

VectorXd clone_draw(const MatrixXd& B, const VectorXd& bx, Rng& g) {
    const VectorXd v = g.normal_vector(static_cast<int>(B.rows()));
    return bx + v - B * (B.transpose() * v);
}

double weight_minus_one(const DistributionSpec& spec, const VectorXd& w) {
    if (spec.family == Family::Gaussian) return 0.0;
    const double lf = log_density(spec, w);
    if (lf == -std::numeric_limits<double>::infinity()) return -1.0;
    return std::expm1(lf - log_phi(w));
}

ConditionalEstimates conditional_is(const DistributionSpec& spec, const StiefelMatrix& Bs, const VectorXd& x, int n,
                                    Rng& rng, bool with_delta, Exec exec, bool& degenerate) {
    const MatrixXd& B = Bs.matrix();
    const int d = Bs.d();
    if (spec.d != d) throw Error(ErrorCode::DimensionMismatch, "spec dimension differs from B");
    if (x.size() != Bs.p()) throw Error(ErrorCode::DimensionMismatch, "x must have length p");
    if (n < 2) throw Error(ErrorCode::InvalidDimension, "inner sample size must be at least 2");
    const VectorXd bx = B * x;
    StreamFactory streams(rng, "conditional");

    const IsAccumulator acc = chunked_reduce<IsAccumulator>(
        static_cast<std::size_t>(n),
        [&](std::size_t lo, std::size_t hi) {
            IsAccumulator a;
            a.init = true;
            a.sum_a = VectorXd::Zero(d);
            const Eigen::Index len = static_cast<Eigen::Index>(hi - lo);
            MatrixXd wc(d, len);
            VectorXd bc(len);
            for (std::size_t i = lo; i < hi; ++i) {
                Rng g = streams(i);
                const VectorXd w = clone_draw(B, bx, g);
                const double b = weight_minus_one(spec, w);
                a.b.add(b);
                a.sum_a += b * w;
                wc.col(static_cast<Eigen::Index>(i - lo)) = w;
                bc[static_cast<Eigen::Index>(i - lo)] = b;
            }
            if (with_delta) a.sum_m = wc * bc.asDiagonal() * wc.transpose();
            return a;
        },
        [](IsAccumulator& a, const IsAccumulator& o) { a.merge(o); }, exec);

    ConditionalEstimates out;
    out.method = InnerMethod::Importance;
    out.n_inner = n;
    const double nn = n;
    const double h = 1.0 + acc.b.mean;
    out.h = {h, acc.b.se()};
    degenerate = !(h > 10.0 * out.h.se) || !(h > 0.0);
    const double hs = h > 0.0 ? h : 1.0;
    out.mu = (bx + acc.sum_a / nn) / hs;

    const MatrixXd g0 = bx * bx.transpose() + MatrixXd::Identity(d, d) - B * B.transpose();
    VectorXd u = VectorXd::Zero(d);
    double lambda = 0.0;
    if (with_delta) {
        MatrixXd delta = (g0 + acc.sum_m / nn) / hs - g0;
        delta = 0.5 * (delta + delta.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(delta);
        Eigen::Index idx = 0;
        es.eigenvalues().cwiseAbs().maxCoeff(&idx);
        lambda = es.eigenvalues()[idx];
        u = es.eigenvectors().col(idx);
        out.delta = std::move(delta);
        out.delta_op_norm.value = std::abs(lambda);
    }

    // Second pass regenerates the same draws for delta-method residuals.
    const double ug0u = u.dot(g0 * u);
    const double big_q = lambda + ug0u;  // (u'G0u + mean c) / h
    const ResidualAccumulator res = chunked_reduce<ResidualAccumulator>(
        static_cast<std::size_t>(n),
        [&](std::size_t lo, std::size_t hi) {
            ResidualAccumulator r;
            r.mu.resize(static_cast<std::size_t>(d));
            for (std::size_t i = lo; i < hi; ++i) {
                Rng g = streams(i);
                const VectorXd w = clone_draw(B, bx, g);
                const double b = weight_minus_one(spec, w);
                for (int j = 0; j < d; ++j) r.mu[static_cast<std::size_t>(j)].add(b * (w[j] - out.mu[j]));
                if (with_delta) {
                    const double uw = u.dot(w);
                    r.delta.add(b * (uw * uw - big_q));
                }
            }
            return r;
        },
        [](ResidualAccumulator& a, const ResidualAccumulator& o) { a.merge(o); }, exec);

    out.mu_se.resize(d);
    for (int j = 0; j < d; ++j) out.mu_se[j] = res.mu[static_cast<std::size_t>(j)].se() / hs;
    if (with_delta) out.delta_op_norm.se = res.delta.se() / hs;
    return out;
}

// log of an upper bound on |phi(u)| that is nonincreasing in |u|.
double log_charfn_envelope(Marginal m, double u) {
    const double au = std::abs(u);
    auto sinc_env = [](double v) {
        const double gauss = -v * v / 6.0;
        const double inv = v > 1.0 ? -std::log(v) : 0.0;
        return std::max(gauss, inv);
    };
    switch (m) {
        case Marginal::Normal: return -0.5 * au * au;
        case Marginal::Uniform: return sinc_env(std::sqrt(3.0) * au);
        case Marginal::Triangular: return 2.0 * sinc_env(std::sqrt(6.0) / 2.0 * au);
        case Marginal::Exponential: return -0.5 * std::log1p(au * au);
    }
    return 0.0;
}

double envelope_sum(Marginal m, const VectorXd& b, double t) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < b.size(); ++j) s += log_charfn_envelope(m, b[j] * t);
    return s;
}

// Radius beyond which the density of b'Z (and its first two moments against
// Z) is negligible.
double effective_radius(Marginal m, const VectorXd& b) {
    const double l1 = b.cwiseAbs().sum();
    switch (m) {
        case Marginal::Normal: return 12.0;
        case Marginal::Uniform: return std::min(std::sqrt(3.0) * l1, 20.0);
        case Marginal::Triangular: return std::min(std::sqrt(6.0) * l1, 28.0);
        case Marginal::Exponential: return 10.0 + 40.0 * b.cwiseAbs().maxCoeff();
    }
    return 20.0;
}

struct FourierGrid {
    double step = 0.0;
    long nodes = 0;
};

FourierGrid fourier_grid(Marginal m, const VectorXd& b, double x) {
    FourierGrid g;
    g.step = 2.0 * kPi / (std::abs(x) + effective_radius(m, b) + 5.0);
    double hi = 1.0;
    while (envelope_sum(m, b, hi) > kLogFloor) {
        hi *= 2.0;
        if (hi > g.step * static_cast<double>(kMaxNodes)) {
            g.nodes = kMaxNodes + 1;
            return g;
        }
    }
    double lo = 0.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (envelope_sum(m, b, mid) > kLogFloor ? lo : hi) = mid;
    }
    g.nodes = static_cast<long>(std::ceil(hi / g.step)) + 1;
    return g;
}

}  // namespace

std::string inner_method_name(InnerMethod m) {
    switch (m) {
        case InnerMethod::Importance: return "importance";
        case InnerMethod::Fourier: return "fourier";
        case InnerMethod::Auto: return "auto";
    }
    return "?";
}

InnerMethod parse_inner_method(const std::string& s) {
    if (s == "importance") return InnerMethod::Importance;
    if (s == "fourier") return InnerMethod::Fourier;
    if (s == "auto") return InnerMethod::Auto;
    throw Error(ErrorCode::ConfigInvalid, "field \"inner\" must be importance, fourier or auto");
}

bool fourier_applicable(const DistributionSpec& spec, int p) {
    return p == 1 && (spec.family == Family::IidMarginal || spec.family == Family::Gaussian);
}

ConditionalEstimates estimate_conditional(const DistributionSpec& spec, const StiefelMatrix& B, const VectorXd& x,
                                          int n, Rng& rng, bool with_delta, Exec exec) {
    bool degenerate = false;
    ConditionalEstimates out = conditional_is(spec, B, x, n, rng, with_delta, exec, degenerate);
    if (degenerate) throw Error(ErrorCode::DegenerateH, "h estimate is below 10 standard errors");
    return out;
}

Estimate estimate_h(const DistributionSpec& spec, const StiefelMatrix& B, const VectorXd& x, int n, Rng& rng,
                    Exec exec) {
    bool degenerate = false;
    return conditional_is(spec, B, x, n, rng, false, exec, degenerate).h;
}

std::pair<VectorXd, VectorXd> estimate_mu(const DistributionSpec& spec, const StiefelMatrix& B, const VectorXd& x,
                                          int n, Rng& rng, Exec exec) {
    auto e = estimate_conditional(spec, B, x, n, rng, false, exec);
    return {std::move(e.mu), std::move(e.mu_se)};
}

Estimate estimate_delta(const DistributionSpec& spec, const StiefelMatrix& B, const VectorXd& x, int n, Rng& rng,
                        Exec exec) {
    return estimate_conditional(spec, B, x, n, rng, true, exec).delta_op_norm;
}

ConditionalEstimates fourier_conditional(const DistributionSpec& spec, const VectorXd& b, double x, bool with_delta) {
    const Eigen::Index d = b.size();
    const Marginal m = spec.family == Family::Gaussian ? Marginal::Normal : spec.marginal;
    const FourierGrid grid = fourier_grid(m, b, x);
    if (grid.nodes > kMaxNodes)
        throw Error(ErrorCode::InvalidStructure, "characteristic function of b'Z decays too slowly for inversion");
    const Eigen::Index nodes = grid.nodes;

    // Per node n: c_n = w_n e^{-i t x} P(t), a_j = psi(b_j t)/phi(b_j t),
    // g_j = chi(b_j t)/phi(b_j t) with psi = E[Z e^{iuZ}], chi = E[Z^2 e^{iuZ}].
    MatrixXd ar(d, nodes), ai(d, nodes);
    VectorXd cr(nodes), ci(nodes);
    double f_sum = 0.0;
    VectorXd m1 = VectorXd::Zero(d), m2 = VectorXd::Zero(d);
    VectorXd gr(d), gi(d);
    for (Eigen::Index nix = 0; nix < nodes; ++nix) {
        const double t = grid.step * static_cast<double>(nix);
        const double w = nix == 0 ? 0.5 * grid.step : grid.step;
        double log_mag = 0.0, phase = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const CharFn cf = marginal_charfn(m, b[j] * t);
            cd phi = cf.f;
            // Keeps a/phi finite at an exact zero of phi; P carries the same factor.
            if (std::abs(phi) < 1e-250) phi = phi == cd(0.0) ? cd(1e-250) : phi / std::abs(phi) * 1e-250;
            log_mag += std::log(std::abs(phi));
            phase += std::arg(phi);
            const cd a = cd(0.0, -1.0) * cf.f1 / phi;
            const cd g = -cf.f2 / phi;
            ar(j, nix) = a.real();
            ai(j, nix) = a.imag();
            gr[j] = g.real();
            gi[j] = g.imag();
        }
        const cd c = w * std::exp(cd(log_mag, phase - t * x));
        cr[nix] = c.real();
        ci[nix] = c.imag();
        f_sum += c.real();
        m1 += c.real() * ar.col(nix) - c.imag() * ai.col(nix);
        m2 += c.real() * gr - c.imag() * gi;
    }

    ConditionalEstimates out;
    out.method = InnerMethod::Fourier;
    out.n_inner = 0;
    const double density = f_sum / kPi;
    const double phi1 = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    out.h = {density / phi1, 0.0};
    if (!(density > 0.0)) throw Error(ErrorCode::DegenerateH, "inverted density of b'Z is not positive");
    out.mu = m1 / f_sum;
    out.mu_se = VectorXd::Zero(d);
    if (with_delta) {
        // Re(A diag(c) A') with A = ar + i ai, c = cr + i ci.
        MatrixXd second = ar * cr.asDiagonal() * ar.transpose() - ai * cr.asDiagonal() * ai.transpose() -
                          ar * ci.asDiagonal() * ai.transpose() - ai * ci.asDiagonal() * ar.transpose();
        second /= f_sum;
        for (Eigen::Index j = 0; j < d; ++j) second(j, j) = m2[j] / f_sum;
        MatrixXd delta = second - MatrixXd::Identity(d, d) - (x * x - 1.0) * b * b.transpose();
        delta = 0.5 * (delta + delta.transpose()).eval();
        out.delta_op_norm = {symmetric_op_norm(delta), 0.0};
        out.delta = std::move(delta);
    }
    return out;
}

double symmetric_op_norm(const MatrixXd& a) {
    const Eigen::Index d = a.rows();
    if (d == 0) return 0.0;
    if (d <= 128) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    const Eigen::Index steps = std::min<Eigen::Index>(d, 80);
    MatrixXd q(d, steps + 1);
    VectorXd alpha(steps), beta(steps);
    VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i) + 1.0);
    q.col(0) = v.normalized();
    Eigen::Index m = 0;
    const double scale = a.cwiseAbs().maxCoeff();
    for (; m < steps; ++m) {
        VectorXd w = a * q.col(m);
        alpha[m] = q.col(m).dot(w);
        // Full reorthogonalization, twice.
        for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(m + 1) * (q.leftCols(m + 1).transpose() * w);
        beta[m] = w.norm();
        if (beta[m] <= 1e-13 * std::max(scale, 1e-300) || m + 1 == steps) {
            ++m;
            break;
        }
        q.col(m + 1) = w / beta[m];
    }
    MatrixXd tri = MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(tri, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

DeviationProbability deviation_probability(const DistributionSpec& spec, const StiefelMatrix& B, double t,
                                           int n_outer, int n_inner, Rng& rng, InnerMethod method, Exec exec) {
    if (n_outer < 1) throw Error(ErrorCode::InvalidDimension, "n_outer must be positive");
    const int p = B.p();
    const VectorXd b0 = B.matrix().col(0);
    InnerMethod use = method;
    if (use == InnerMethod::Auto) {
        use = InnerMethod::Importance;
        if (fourier_applicable(spec, p)) {
            const Marginal m = spec.family == Family::Gaussian ? Marginal::Normal : spec.marginal;
            if (fourier_grid(m, b0, 3.0).nodes <= kMaxNodes) use = InnerMethod::Fourier;
        }
    }
    if (use == InnerMethod::Fourier && !fourier_applicable(spec, p))
        throw Error(ErrorCode::InvalidStructure, "fourier inner estimator needs p = 1 and iid coordinates");

    struct Row {
        double dev_mean = 0.0, se_mean = 0.0, dev_var = 0.0, se_var = 0.0;
    };
    StreamFactory streams(rng, "deviation");
    const MatrixXd& Bm = B.matrix();
    const auto rows = map_indices<Row>(
        static_cast<std::size_t>(n_outer),
        [&](std::size_t i) {
            Rng g = streams(i);
            const VectorXd z = sample_one(spec, g);
            const VectorXd x = Bm.transpose() * z;
            Row r;
            ConditionalEstimates e;
            if (use == InnerMethod::Fourier) {
                e = fourier_conditional(spec, b0, x[0], true);
            } else {
                bool degenerate = false;
                e = conditional_is(spec, B, x, n_inner, g, true, Exec::Serial, degenerate);
                if (degenerate) {
                    // Counted as an exceedance for both displays.
                    r.dev_mean = r.dev_var = std::numeric_limits<double>::infinity();
                    return r;
                }
            }
            r.dev_mean = (e.mu - Bm * x).norm();
            r.se_mean = e.mu_se.norm();
            r.dev_var = e.delta_op_norm.value;
            r.se_var = e.delta_op_norm.se;
            return r;
        },
        exec);

    DeviationProbability out;
    out.n_outer = n_outer;
    out.n_inner = use == InnerMethod::Fourier ? 0 : n_inner;
    out.method = use;
    double c_mean = 0.0, c_var = 0.0;
    for (const auto& r : rows) {
        c_mean += r.dev_mean > t ? 1.0 : 0.0;
        c_var += r.dev_var > t ? 1.0 : 0.0;
        out.inner_noise_mean += std::isfinite(r.se_mean) ? r.se_mean : 0.0;
        out.inner_noise_var += std::isfinite(r.se_var) ? r.se_var : 0.0;
    }
    const double n = n_outer;
    auto binom = [n](double c) {
        const double pr = c / n;
        return Estimate{pr, std::sqrt(pr * (1.0 - pr) / n)};
    };
    out.mean = binom(c_mean);
    out.variance = binom(c_var);
    out.inner_noise_mean /= n;
    out.inner_noise_var /= n;
    return out;
}

TauParams solve_tau(double tau, double xi_eff, char part) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::ConfigInvalid, "field \"tau\" must lie in (0, 1)");
    if (!(xi_eff > 0.0)) throw Error(ErrorCode::ConfigInvalid, "field \"xi\" must be positive");
    TauParams out;
    out.tau = tau;
    if (part == 'A') {
        out.tau2 = 2.0 * tau * xi_eff;
        out.tau1 = 3.0 * xi_eff * (1.0 - tau);
    } else if (part == 'B') {
        out.tau2 = 4.0 * tau * xi_eff;
        out.tau1 = 5.0 * xi_eff * (1.0 - tau);
    } else {
        throw Error(ErrorCode::ConfigInvalid, "field \"part\" must be A or B");
    }
    return out;
}

GMembershipReport g_membership(const DistributionSpec& spec, const StiefelMatrix& B, const TauParams& tau,
                               double gamma, int n_x, int n_inner, Rng& rng, InnerMethod method, Exec exec) {
    const int d = B.d(), p = B.p();
    if (d < 3) throw Error(ErrorCode::InvalidDimension, "g_membership needs d >= 3");
    if (!(gamma > 0.0)) throw Error(ErrorCode::ConfigInvalid, "field \"gamma\" must be positive");
    if (n_x < 1) throw Error(ErrorCode::InvalidDimension, "n_x must be positive");
    GMembershipReport out;
    const double log_d = std::log(static_cast<double>(d));
    out.M_d = std::sqrt(tau.tau1 * log_d / gamma);
    out.delta_d = std::exp(-tau.tau2 * log_d);
    if (out.M_d <= 1.0) {
        out.trivial = true;
        out.member = true;
        return out;
    }
    out.ball_probability = chi_square_cdf(out.M_d * out.M_d, p);
    InnerMethod use = method;
    if (use == InnerMethod::Auto) {
        use = InnerMethod::Importance;
        if (fourier_applicable(spec, p)) {
            const Marginal m = spec.family == Family::Gaussian ? Marginal::Normal : spec.marginal;
            if (fourier_grid(m, B.matrix().col(0), out.M_d).nodes <= kMaxNodes) use = InnerMethod::Fourier;
        }
    }
    const MatrixXd& Bm = B.matrix();
    const double r2 = out.M_d * out.M_d;
    StreamFactory streams(rng, "g-membership");
    const Moments m = chunked_reduce<Moments>(
        static_cast<std::size_t>(n_x),
        [&](std::size_t lo, std::size_t hi) {
            Moments acc;
            for (std::size_t i = lo; i < hi; ++i) {
                Rng g = streams(i);
                VectorXd x = g.normal_vector(p);
                while (x.squaredNorm() > r2) x = g.normal_vector(p);
                ConditionalEstimates e;
                if (use == InnerMethod::Fourier) {
                    e = fourier_conditional(spec, Bm.col(0), x[0], false);
                } else {
                    bool degenerate = false;
                    e = conditional_is(spec, B, x, n_inner, g, false, Exec::Serial, degenerate);
                    if (!(e.h.value > 0.0)) {
                        acc.add(0.0);
                        continue;
                    }
                }
                const double dev = (e.mu - Bm * x).squaredNorm();
                acc.add(dev * e.h.value * e.h.value);
            }
            return acc;
        },
        [](Moments& a, const Moments& o) { a.merge(o); }, exec);
    out.integral = {m.mean * out.ball_probability, m.se() * out.ball_probability};
    out.member = out.integral.value <= out.delta_d;
    return out;
}

}  // namespace projcond
