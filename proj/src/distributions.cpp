#include "projcond/distributions.hpp"

#include <cmath>
#include <limits>

#include "projcond/error.hpp"

namespace projcond {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt6 = 2.4494897427831781;
constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kInf = std::numeric_limits<double>::infinity();

// sin(u)/u and its first two derivatives in u.
void sinc3(double u, double& s0, double& s1, double& s2) {
    if (std::abs(u) < 1e-3) {
        const double u2 = u * u;
        s0 = 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
        s1 = -u / 3.0 + u * u2 / 30.0;
        s2 = -1.0 / 3.0 + u2 / 10.0;
        return;
    }
    const double sn = std::sin(u), cs = std::cos(u);
    s0 = sn / u;
    s1 = (u * cs - sn) / (u * u);
    s2 = (-u * u * sn - 2.0 * u * cs + 2.0 * sn) / (u * u * u);
}

}  // namespace

std::string marginal_name(Marginal m) {
    switch (m) {
        case Marginal::Normal: return "normal";
        case Marginal::Uniform: return "uniform";
        case Marginal::Exponential: return "exponential";
        case Marginal::Triangular: return "triangular";
    }
    return "?";
}

std::string DistributionSpec::name() const {
    return family == Family::Gaussian ? std::string("gaussian") : marginal_name(marginal);
}

DistributionSpec DistributionSpec::parse(const std::string& family, const std::string& marginal, int d) {
    if (d < 1) throw Error(ErrorCode::ConfigInvalid, "field \"d\" must be a positive integer");
    if (family == "gaussian") return gaussian(d);
    if (family != "iid-marginal" && family != "iid")
        throw Error(ErrorCode::ConfigInvalid, "field \"family\" must be gaussian or iid-marginal");
    if (marginal == "uniform") return iid(Marginal::Uniform, d);
    if (marginal == "exponential") return iid(Marginal::Exponential, d);
    if (marginal == "triangular") return iid(Marginal::Triangular, d);
    if (marginal == "normal") return iid(Marginal::Normal, d);
    throw Error(ErrorCode::ConfigInvalid, "field \"marginal\" must be uniform, exponential or triangular");
}

MomentOracle moment_oracle(const DistributionSpec& spec) {
    switch (spec.family == Family::Gaussian ? Marginal::Normal : spec.marginal) {
        case Marginal::Normal: return {0.0, 3.0, 1.0 / std::sqrt(2.0 * M_PI)};
        case Marginal::Uniform: return {0.0, 9.0 / 5.0, 1.0 / (2.0 * kSqrt3)};
        case Marginal::Exponential: return {2.0, 9.0, 1.0};
        case Marginal::Triangular: return {0.0, 12.0 / 5.0, 1.0 / kSqrt6};
    }
    return {};
}

double sample_marginal(Marginal m, Rng& rng) {
    switch (m) {
        case Marginal::Normal: return rng.normal();
        case Marginal::Uniform: return kSqrt3 * (2.0 * rng.uniform() - 1.0);
        case Marginal::Exponential: return rng.exponential() - 1.0;
        case Marginal::Triangular: return kSqrt6 * (rng.uniform() + rng.uniform() - 1.0);
    }
    return 0.0;
}

Eigen::VectorXd sample_one(const DistributionSpec& spec, Rng& rng) {
    const Marginal m = spec.family == Family::Gaussian ? Marginal::Normal : spec.marginal;
    Eigen::VectorXd z(spec.d);
    for (int i = 0; i < spec.d; ++i) z[i] = sample_marginal(m, rng);
    return z;
}

Eigen::MatrixXd sample_z(const DistributionSpec& spec, int n, Rng& rng) {
    Eigen::MatrixXd out(n, spec.d);
    for (int r = 0; r < n; ++r) out.row(r) = sample_one(spec, rng).transpose();
    return out;
}

double marginal_log_density(Marginal m, double z) {
    switch (m) {
        case Marginal::Normal: return -0.5 * kLog2Pi - 0.5 * z * z;
        case Marginal::Uniform: return std::abs(z) <= kSqrt3 ? -std::log(2.0 * kSqrt3) : -kInf;
        case Marginal::Exponential: return z >= -1.0 ? -(z + 1.0) : -kInf;
        case Marginal::Triangular: {
            const double a = kSqrt6 - std::abs(z);
            return a > 0.0 ? std::log(a / 6.0) : -kInf;
        }
    }
    return -kInf;
}

double log_phi(const Eigen::VectorXd& z) {
    return -0.5 * kLog2Pi * static_cast<double>(z.size()) - 0.5 * z.squaredNorm();
}

double log_density(const DistributionSpec& spec, const Eigen::VectorXd& z) {
    if (spec.family == Family::Gaussian) return log_phi(z);
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        s += marginal_log_density(spec.marginal, z[i]);
        if (s == -kInf) return s;
    }
    return s;
}

std::pair<double, double> marginal_support(Marginal m) {
    switch (m) {
        case Marginal::Normal: return {-kInf, kInf};
        case Marginal::Uniform: return {-kSqrt3, kSqrt3};
        case Marginal::Exponential: return {-1.0, kInf};
        case Marginal::Triangular: return {-kSqrt6, kSqrt6};
    }
    return {-kInf, kInf};
}

CharFn marginal_charfn(Marginal m, double s) {
    using C = std::complex<double>;
    switch (m) {
        case Marginal::Normal: {
            const double f = std::exp(-0.5 * s * s);
            return {C(f), C(-s * f), C((s * s - 1.0) * f)};
        }
        case Marginal::Uniform: {
            double s0, s1, s2;
            sinc3(kSqrt3 * s, s0, s1, s2);
            return {C(s0), C(kSqrt3 * s1), C(3.0 * s2)};
        }
        case Marginal::Exponential: {
            const C one_minus = C(1.0, -s);
            const C f = std::exp(C(0.0, -s)) / one_minus;
            const C f1 = -s * f / one_minus;
            const C f2 = f * (s * s - 1.0) / (one_minus * one_minus);
            return {f, f1, f2};
        }
        case Marginal::Triangular: {
            // Sum of two iid U[-b, b] with b = sqrt6 / 2.
            const double b = 0.5 * kSqrt6;
            double s0, s1, s2;
            sinc3(b * s, s0, s1, s2);
            return {C(s0 * s0), C(2.0 * b * s0 * s1), C(2.0 * b * b * (s1 * s1 + s0 * s2))};
        }
    }
    return {};
}

Standardization standardize(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& A) {
    const auto d = sigma.rows();
    if (sigma.cols() != d || mu.size() != d || A.rows() != d)
        throw Error(ErrorCode::DimensionMismatch, "standardize inputs");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * sigma.cwiseAbs().maxCoeff())
        throw Error(ErrorCode::NotSpd, "Sigma is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    const Eigen::VectorXd ev = es.eigenvalues();
    if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff())) throw Error(ErrorCode::NotSpd, "Sigma is not positive definite");
    const Eigen::MatrixXd& u = es.eigenvectors();
    Standardization out;
    out.mu = mu;
    out.sigma_half = u * ev.cwiseSqrt().asDiagonal() * u.transpose();
    out.sigma_inv_half = u * ev.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();

    const Eigen::MatrixXd m = A.transpose() * sigma * A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(m);
    const Eigen::VectorXd mv = em.eigenvalues();
    if (!(mv.minCoeff() > 1e-12 * mv.maxCoeff())) throw Error(ErrorCode::RankDeficient, "A is rank deficient");
    const Eigen::MatrixXd m_inv_half =
        em.eigenvectors() * mv.cwiseSqrt().cwiseInverse().asDiagonal() * em.eigenvectors().transpose();
    out.B = StiefelMatrix(out.sigma_half * A * m_inv_half);
    return out;
}

}  // namespace projcond
