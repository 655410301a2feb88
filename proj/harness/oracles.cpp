#include "projcond/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace projcond::oracle {

namespace {

using Series = std::vector<long double>;
using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

constexpr long double kPiL = 3.141592653589793238462643383279502884L;

Series series_log(const Series& u) {
    const std::size_t n = u.size();
    Series l(n, 0.0L);
    l[0] = std::log(u[0]);
    for (std::size_t i = 1; i < n; ++i) {
        long double acc = static_cast<long double>(i) * u[i];
        for (std::size_t j = 1; j < i; ++j) acc -= static_cast<long double>(j) * l[j] * u[i - j];
        l[i] = acc / (static_cast<long double>(i) * u[0]);
    }
    return l;
}

Series series_exp(const Series& l) {
    const std::size_t n = l.size();
    Series e(n, 0.0L);
    e[0] = std::exp(l[0]);
    for (std::size_t i = 1; i < n; ++i) {
        long double acc = 0.0L;
        for (std::size_t j = 1; j <= i; ++j) acc += static_cast<long double>(j) * l[j] * e[i - j];
        e[i] = acc / static_cast<long double>(i);
    }
    return e;
}

double marginal_pdf(Marginal m, double z) {
    const double s3 = std::sqrt(3.0), s6 = std::sqrt(6.0);
    switch (m) {
        case Marginal::Normal: return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        case Marginal::Uniform: return std::abs(z) <= s3 ? 1.0 / (2.0 * s3) : 0.0;
        case Marginal::Triangular: return std::abs(z) <= s6 ? (s6 - std::abs(z)) / 6.0 : 0.0;
        case Marginal::Exponential: return z >= -1.0 ? std::exp(-(z + 1.0)) : 0.0;
    }
    return 0.0;
}

std::pair<double, double> marginal_range(Marginal m) {
    switch (m) {
        case Marginal::Uniform: return {-std::sqrt(3.0), std::sqrt(3.0)};
        case Marginal::Triangular: return {-std::sqrt(6.0), std::sqrt(6.0)};
        case Marginal::Exponential: return {-1.0, 60.0};
        case Marginal::Normal: return {-40.0, 40.0};
    }
    return {-40.0, 40.0};
}

}  // namespace

long double log_eta(int d, int p, int k) {
    long double s = -0.5L * k * p * std::log(static_cast<long double>(d) / 2.0L);
    for (int i = 1; i <= k; ++i)
        s += std::lgamma(static_cast<long double>(d - i + 1) / 2.0L) -
             std::lgamma(static_cast<long double>(d - p - i + 1) / 2.0L);
    return s;
}

std::vector<long double> ratio_series(double x_norm_sq, const Eigen::MatrixXd& A, int d, int p, int order) {
    const int k = static_cast<int>(A.rows());
    const std::size_t n = static_cast<std::size_t>(order) + 1;
    const MatL a = A.cast<long double>();
    const Eigen::Matrix<long double, Eigen::Dynamic, 1> iota = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Ones(k);
    const long double xs = x_norm_sq;

    Series logdet(n, 0.0L), u(n, 0.0L);
    MatL power = MatL::Identity(k, k);
    u[0] = 1.0L - xs * k / d;
    for (std::size_t j = 1; j < n; ++j) {
        power = power * a;
        const long double sign = (j % 2 == 1) ? 1.0L : -1.0L;
        logdet[j] = sign * power.trace() / static_cast<long double>(j);
        u[j] = -(xs / d) * (-sign) * iota.dot(power * iota);
    }
    const Series lu = series_log(u);
    Series l(n, 0.0L);
    const long double half_exp = static_cast<long double>(d - p - k - 1) / 2.0L;
    for (std::size_t j = 0; j < n; ++j) l[j] = -0.5L * p * logdet[j] + half_exp * lu[j];
    l[0] += log_eta(d, p, k) + k * xs / 2.0L;
    return series_exp(l);
}

FiberMoments fiber_quadrature(Marginal m, const Eigen::Vector2d& b, double x, int points) {
    const Eigen::Vector2d bp(-b[1], b[0]);
    const Eigen::Vector2d base = x * b;
    const auto [lo_m, hi_m] = marginal_range(m);
    double lo = -1e300, hi = 1e300;
    for (int i = 0; i < 2; ++i) {
        if (std::abs(bp[i]) < 1e-15) continue;
        double a = (lo_m - base[i]) / bp[i], c = (hi_m - base[i]) / bp[i];
        if (a > c) std::swap(a, c);
        lo = std::max(lo, a);
        hi = std::min(hi, c);
    }
    FiberMoments out;
    out.mu.setZero();
    out.second.setZero();
    double i0 = 0.0;
    Eigen::Vector2d i1 = Eigen::Vector2d::Zero();
    Eigen::Matrix2d i2 = Eigen::Matrix2d::Zero();
    if (hi > lo) {
        const int n = points % 2 == 0 ? points : points + 1;
        const double step = (hi - lo) / n;
        for (int j = 0; j <= n; ++j) {
            const double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            const Eigen::Vector2d z = base + (lo + j * step) * bp;
            const double f = marginal_pdf(m, z[0]) * marginal_pdf(m, z[1]) * w;
            i0 += f;
            i1 += f * z;
            i2 += f * z * z.transpose();
        }
        i0 *= step / 3.0;
        i1 *= step / 3.0;
        i2 *= step / 3.0;
    }
    out.h = i0 / (std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI));
    if (i0 > 0.0) {
        out.mu = i1 / i0;
        out.second = i2 / i0;
    }
    out.delta = out.second - Eigen::Matrix2d::Identity() - (x * x - 1.0) * b * b.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(out.delta);
    out.delta_op_norm = es.eigenvalues().cwiseAbs().maxCoeff();
    return out;
}

long double generic_bound(int p, int k, long double epsilon, long double g, long double M, long double D,
                          long double d, long double xi, long double kappa) {
    const long double rate = std::min({xi, epsilon / 2.0L + 0.25L, 0.5L});
    return kappa * std::pow(static_cast<long double>(p), 2.0L * k + 1.0L + epsilon) * std::exp(g * M * M) *
           std::pow(2.0L * D * std::sqrt(kPiL * std::exp(1.0L)), static_cast<long double>(p * k)) *
           std::pow(d, -rate);
}

TheoremBoundValues theorem_bound(char part, long double d, int p, long double t, long double tau, long double epsilon,
                                 long double xi, long double D, long double kappa, long double g) {
    const long double c = part == 'A' ? 3.0L : 5.0L;
    TheoremBoundValues v{};
    v.xi_eff = std::min({xi, epsilon / 2.0L + 0.25L, 0.5L}) / c;
    const long double lf = std::log(2.0L * D * std::sqrt(kPiL * std::exp(1.0L)));
    v.gamma = part == 'A' ? std::max(g, 6.0L + 2.0L * lf) : std::max(g, 10.0L + 4.0L * lf);
    const long double ld = std::log(d);
    v.deviation = std::pow(d, -tau * v.xi_eff) / t + v.gamma / (1.0L - tau) * p / (c * v.xi_eff * ld);
    const long double lead = part == 'A' ? kappa : 2.0L * kappa;
    v.nu = lead * std::pow(d, -tau * v.xi_eff * (1.0L - (v.gamma / tau) * p / (v.xi_eff * ld)));
    return v;
}

}  // namespace projcond::oracle
