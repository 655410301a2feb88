#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace projcond {

// Running mean and sum of squared deviations; merge() follows Chan et al.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        if (n == 0.0) {
            *this = o;
            return;
        }
        const double total = n + o.n;
        const double delta = o.mean - mean;
        mean += delta * o.n / total;
        m2 += o.m2 + delta * delta * n * o.n / total;
        n = total;
    }

    double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
    double se() const { return n > 1.0 ? std::sqrt(variance() / n) : 0.0; }
};

// Running mean and covariance for a handful of jointly sampled scalars.
struct JointMoments {
    explicit JointMoments(std::size_t dim = 0) : mean(dim, 0.0), comom(dim * dim, 0.0) {}

    double n = 0.0;
    std::vector<double> mean;
    std::vector<double> comom;

    std::size_t dim() const { return mean.size(); }
    void add(const std::vector<double>& x);
    void merge(const JointMoments& o);
    double cov(std::size_t i, std::size_t j) const { return n > 1.0 ? comom[i * dim() + j] / (n - 1.0) : 0.0; }
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// One-sample test against a continuous cdf (asymptotic p-value with the
// Stephens small-sample correction). Sorts a copy of the sample.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Pearson chi-square goodness of fit; expected counts must be positive.
struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};
ChiSquareResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected);

double normal_cdf(double x);
double chi_square_cdf(double x, double dof);

double sample_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace projcond
