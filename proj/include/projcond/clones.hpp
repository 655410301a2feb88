#pragma once

#include <vector>

#include <Eigen/Dense>

#include "projcond/linalg.hpp"
#include "projcond/parallel.hpp"
#include "projcond/rng.hpp"
#include "projcond/stats.hpp"

namespace projcond {

// W_j = Bx + (I - BB')V_j, j = 1..k (columns).
struct CloneDraw {
    StiefelMatrix B;
    VectorXd x;
    MatrixXd W;
    MatrixXd V;
};

CloneDraw sample_clones(const StiefelMatrix& B, const VectorXd& x, int k, Rng& rng);

struct DensityRatioValue {
    double log_ratio = 0.0;
    bool in_domain = true;
};

// log of phi_x(w_1..w_k) / prod phi(w_i) for the joint clone density.
// vectors: d x k. Out of domain (S_k singular, or |x|^2 iota'S^{-1}iota >= d)
// gives -inf.
DensityRatioValue clone_log_density_ratio(const VectorXd& x, const MatrixXd& vectors, int p);

// Same, from a precomputed Gram matrix S_k (k x k) and |x|^2.
DensityRatioValue clone_log_density_ratio_gram(double x_norm_sq, const MatrixXd& S, int d, int p);

double log_eta(int d, int p, int k);
// eta(d,p,k) = (d/2)^{-kp/2} prod_{i=1}^k Gamma((d-i+1)/2) / Gamma((d-p-i+1)/2).
// p = 0 is accepted and gives 1.
double eta_norm_const(int d, int p, int k);
// exp[p^2/d (1 - (p+k-1)/d)^{-1} k^2/2], valid for k < d - p - 1.
double eta_upper_bound(int d, int p, int k);

// Chain products W_{a}'W_{a+1} ... W_{b-1}'W_b over segments
// [j_{i-1}+1, j_i], i = 1..m, for vectors of dimension d.
struct ChainSpec {
    int l = 0;              // number of vectors entering the density ratio
    std::vector<int> j;     // j_0 = 0, j_1, ..., j_m
    int m() const { return static_cast<int>(j.size()) - 1; }
};

void validate_chain(const ChainSpec& c, int k);
double chain_product(const ChainSpec& c, const MatrixXd& vectors);
// |x|^{2(j_m - m)}
double chain_target(const ChainSpec& c, double x_norm_sq);
// All admissible chains with l <= k and m <= max_m.
std::vector<ChainSpec> enumerate_chains(int k, int max_m);

enum class ChainRoute { Clones, Importance };

struct ChainResult {
    double estimate = 0.0;  // E[...] - target
    double se = 0.0;
    double target = 0.0;
};

ChainResult gaussian_chain_identity(const VectorXd& x, int d, int p, int k, const ChainSpec& chain, int n, Rng& rng,
                                    ChainRoute route = ChainRoute::Clones, Exec exec = Exec::Parallel);

// sum_{j=1}^k (-1)^{k-j} C(k,j) E[(cycle_j - d + p - 1) ratio] - (1 - |x|^2)^k,
// cycle_j = W_1'W_2 W_2'W_3 ... W_j'W_1.
ChainResult gaussian_alternating_sum(const VectorXd& x, int d, int p, int k, int n, Rng& rng,
                                     ChainRoute route = ChainRoute::Clones, Exec exec = Exec::Parallel);

// Mean of exp(log ratio) over V_1..V_k ~ N(0, I_d); should be 1.
Estimate clone_density_normalization(const VectorXd& x, int d, int p, int k, int n, Rng& rng,
                                     Exec exec = Exec::Parallel);

}  // namespace projcond
