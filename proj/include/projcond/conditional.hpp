#pragma once

#include <string>

#include <Eigen/Dense>

#include "projcond/distributions.hpp"
#include "projcond/linalg.hpp"
#include "projcond/parallel.hpp"
#include "projcond/rng.hpp"
#include "projcond/stats.hpp"

namespace projcond {

// Importance: W = Bx + (I - BB')V with weights f(W)/phi(W).
// Fourier: p = 1 and iid marginals; conditional moments of Z given b'Z = x by
// numerical inversion of the characteristic function (no sampling).
// Auto picks Fourier when it applies.
enum class InnerMethod { Importance, Fourier, Auto };

std::string inner_method_name(InnerMethod m);
InnerMethod parse_inner_method(const std::string& s);
bool fourier_applicable(const DistributionSpec& spec, int p);

struct ConditionalEstimates {
    Estimate h;                  // h(x|B) = density of B'Z at x over phi_p(x)
    VectorXd mu;                 // E[Z | B'Z = x]
    VectorXd mu_se;
    MatrixXd delta;              // E[ZZ' | B'Z = x] - (I + B(xx' - I)B')
    Estimate delta_op_norm;
    int n_inner = 0;             // 0 for the Fourier route
    InnerMethod method = InnerMethod::Importance;
};

// Importance sampling with the Gaussian moments of W as control variates:
// h = 1 + mean(r - 1), mu = (Bx + mean(W(r - 1))) / h, and likewise for the
// second moment, so a Gaussian spec (r = 1) gives exact values. SEs by the
// delta method; the operator norm is linearized at its top eigenvector.
// Throws DegenerateH if h < 10 SE(h).
ConditionalEstimates estimate_conditional(const DistributionSpec& spec, const StiefelMatrix& B, const VectorXd& x,
                                          int n, Rng& rng, bool with_delta = true, Exec exec = Exec::Parallel);

Estimate estimate_h(const DistributionSpec& spec, const StiefelMatrix& B, const VectorXd& x, int n, Rng& rng,
                    Exec exec = Exec::Parallel);
// mu and its componentwise SE.
std::pair<VectorXd, VectorXd> estimate_mu(const DistributionSpec& spec, const StiefelMatrix& B, const VectorXd& x,
                                          int n, Rng& rng, Exec exec = Exec::Parallel);
Estimate estimate_delta(const DistributionSpec& spec, const StiefelMatrix& B, const VectorXd& x, int n, Rng& rng,
                        Exec exec = Exec::Parallel);

// Fourier route; requires fourier_applicable(spec, 1).
ConditionalEstimates fourier_conditional(const DistributionSpec& spec, const VectorXd& b, double x,
                                         bool with_delta = true);

// Largest |eigenvalue| of a symmetric matrix: dense for d <= 128, Lanczos
// with full reorthogonalization above.
double symmetric_op_norm(const MatrixXd& m);

struct DeviationProbability {
    Estimate mean;            // P(|mu_hat - Bx| > t)
    Estimate variance;        // P(|Delta_hat| > t)
    double inner_noise_mean = 0.0;  // average SE attached to |mu_hat - Bx|
    double inner_noise_var = 0.0;   // average SE attached to |Delta_hat|
    int n_outer = 0, n_inner = 0;
    InnerMethod method = InnerMethod::Importance;
};

// Outer: Z ~ spec, x = B'Z. Inner: conditional estimates at x.
DeviationProbability deviation_probability(const DistributionSpec& spec, const StiefelMatrix& B, double t,
                                           int n_outer, int n_inner, Rng& rng,
                                           InnerMethod method = InnerMethod::Auto, Exec exec = Exec::Parallel);

struct TauParams {
    double tau = 0.5;
    double tau1 = 0.0;
    double tau2 = 0.0;
};

// Solves tau1, tau2 from (tau, xi_eff): part A tau2 = 2 tau xi, tau1 = 3 xi (1 - tau);
// part B tau2 = 4 tau xi, tau1 = 5 xi (1 - tau).
TauParams solve_tau(double tau, double xi_eff, char part);

struct GMembershipReport {
    double M_d = 0.0;
    double delta_d = 0.0;
    Estimate integral;
    double ball_probability = 1.0;
    bool member = true;
    bool trivial = false;  // M_d <= 1: every B is a member
};

// Estimates int_{|x| <= M_d} |mu_{x|B} - Bx|^2 h(x|B)^2 phi_p(x) dx by
// rejection-sampling x ~ N(0, I_p) on the ball and compares it with d^{-tau2}.
GMembershipReport g_membership(const DistributionSpec& spec, const StiefelMatrix& B, const TauParams& tau,
                               double gamma, int n_x, int n_inner, Rng& rng, InnerMethod method = InnerMethod::Auto,
                               Exec exec = Exec::Parallel);

}  // namespace projcond
