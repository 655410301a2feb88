#include "projcond/stats.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace projcond {

void JointMoments::add(const std::vector<double>& x) {
    const std::size_t k = dim();
    n += 1.0;
    std::vector<double> before(k);
    for (std::size_t i = 0; i < k; ++i) {
        before[i] = x[i] - mean[i];
        mean[i] += before[i] / n;
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) comom[i * k + j] += before[i] * (x[j] - mean[j]);
}

void JointMoments::merge(const JointMoments& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
        *this = o;
        return;
    }
    const std::size_t k = dim();
    const double total = n + o.n;
    std::vector<double> delta(k);
    for (std::size_t i = 0; i < k; ++i) delta[i] = o.mean[i] - mean[i];
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            comom[i * k + j] += o.comom[i * k + j] + delta[i] * delta[j] * n * o.n / total;
    for (std::size_t i = 0; i < k; ++i) mean[i] += delta[i] * o.n / total;
    n = total;
}

double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    // For small lambda the alternating series converges slowly; use the
    // Jacobi-theta form of the cdf instead.
    if (lambda < 1.0) {
        const double pi = 3.14159265358979323846;
        double cdf = 0.0;
        for (int j = 1; j <= 50; ++j) {
            const double a = (2.0 * j - 1.0) * pi / lambda;
            cdf += std::exp(-a * a / 8.0);
        }
        cdf *= std::sqrt(2.0 * pi) / lambda;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p(double statistic, double n_eff) {
    const double rn = std::sqrt(n_eff);
    return kolmogorov_q((rn + 0.12 + 0.11 / rn) * statistic);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (i + 1.0) / n - f, f - i / n});
    }
    return {d, ks_p(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return {d, ks_p(d, na * nb / (na + nb))};
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected) {
    if (observed.size() != expected.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_gof: size mismatch");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw std::invalid_argument("chi_square_gof: nonpositive expected count");
        const double r = observed[i] - expected[i];
        stat += r * r / expected[i];
    }
    const double dof = static_cast<double>(observed.size() - 1);
    boost::math::chi_squared_distribution<double> chi(dof);
    return {stat, dof, boost::math::cdf(boost::math::complement(chi, stat))};
}

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(), x); }

double chi_square_cdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    return boost::math::cdf(boost::math::chi_squared_distribution<double>(dof), x);
}

double sample_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    JointMoments jm(2);
    for (std::size_t i = 0; i < a.size(); ++i) jm.add({a[i], b[i]});
    const double den = std::sqrt(jm.cov(0, 0) * jm.cov(1, 1));
    return den > 0.0 ? jm.cov(0, 1) / den : 0.0;
}

}  // namespace projcond
