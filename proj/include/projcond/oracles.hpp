#pragma once

// Reference computations that share no code path with the library routines
// they check. Used by the acceptance suite and the unit tests.

#include <vector>

#include <Eigen/Dense>

#include "projcond/distributions.hpp"

namespace projcond::oracle {

// log eta(d, p, k) straight from the gamma-function product in long double.
long double log_eta(int d, int p, int k);

// Coefficients c_0..c_order of eps -> clone density ratio at S = I + eps A,
// via the series of log det(I + eps A) = sum (-1)^{j+1} eps^j tr(A^j)/j and
// iota'(I + eps A)^{-1} iota = sum (-eps)^j iota'A^j iota, then exp.
std::vector<long double> ratio_series(double x_norm_sq, const Eigen::MatrixXd& A, int d, int p, int order);

// Conditional law of Z given b'Z = x for d = 2 and iid marginals, by
// composite Simpson quadrature along the fiber {x b + s b_perp}.
struct FiberMoments {
    double h = 0.0;
    Eigen::Vector2d mu;
    Eigen::Matrix2d second;
    Eigen::Matrix2d delta;
    double delta_op_norm = 0.0;
};
FiberMoments fiber_quadrature(Marginal m, const Eigen::Vector2d& b, double x, int points = 10000);

// Direct (non-log-domain) evaluations of the closed-form bounds.
long double generic_bound(int p, int k, long double epsilon, long double g, long double M, long double D,
                          long double d, long double xi, long double kappa);

struct TheoremBoundValues {
    long double xi_eff, gamma, deviation, nu;
};
TheoremBoundValues theorem_bound(char part, long double d, int p, long double t, long double tau, long double epsilon,
                                 long double xi, long double D, long double kappa, long double g);

}  // namespace projcond::oracle
