#pragma once

#include <complex>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "projcond/linalg.hpp"
#include "projcond/rng.hpp"

namespace projcond {

enum class Family { Gaussian, IidMarginal };
enum class Marginal { Normal, Uniform, Exponential, Triangular };

// Law of Z: standard Gaussian, or iid standardized marginals.
// uniform: U[-sqrt3, sqrt3]; exponential: Exp(1) - 1; triangular: on [-sqrt6, sqrt6].
struct DistributionSpec {
    Family family = Family::Gaussian;
    Marginal marginal = Marginal::Normal;
    int d = 1;

    static DistributionSpec gaussian(int d) { return {Family::Gaussian, Marginal::Normal, d}; }
    static DistributionSpec iid(Marginal m, int d) { return {Family::IidMarginal, m, d}; }

    std::string name() const;
    // "gaussian" or the marginal name; throws ConfigInvalid otherwise.
    static DistributionSpec parse(const std::string& family, const std::string& marginal, int d);
};

std::string marginal_name(Marginal m);

struct MomentOracle {
    double m3 = 0.0;
    double m4 = 3.0;
    double density_sup = 0.0;
};

MomentOracle moment_oracle(const DistributionSpec& spec);

double sample_marginal(Marginal m, Rng& rng);
Eigen::VectorXd sample_one(const DistributionSpec& spec, Rng& rng);
// n x d, rows iid.
Eigen::MatrixXd sample_z(const DistributionSpec& spec, int n, Rng& rng);

double marginal_log_density(Marginal m, double z);
// Exact log f(z); -inf off the support.
double log_density(const DistributionSpec& spec, const Eigen::VectorXd& z);
// log of the standard Gaussian density in dimension z.size().
double log_phi(const Eigen::VectorXd& z);

// Support of one marginal as [lo, hi] (infinite ends allowed).
std::pair<double, double> marginal_support(Marginal m);

// Characteristic function of one marginal and its first two derivatives at s.
struct CharFn {
    std::complex<double> f, f1, f2;
};
CharFn marginal_charfn(Marginal m, double s);

// y -> Sigma^{-1/2}(y - mu) and B = Sigma^{1/2} A (A' Sigma A)^{-1/2}.
struct Standardization {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma_inv_half;
    Eigen::MatrixXd sigma_half;
    StiefelMatrix B;
    Eigen::VectorXd whiten(const Eigen::VectorXd& y) const { return sigma_inv_half * (y - mu); }
};

Standardization standardize(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& A);

}  // namespace projcond
