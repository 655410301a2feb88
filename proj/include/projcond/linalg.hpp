#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "projcond/rng.hpp"

namespace projcond {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// d x p matrix with orthonormal columns, 1 <= p < d.
class StiefelMatrix {
public:
    StiefelMatrix() = default;
    // Validates B'B = I within tol (max-norm) and 1 <= p < d.
    explicit StiefelMatrix(MatrixXd entries, double tol = 1e-10);

    const MatrixXd& matrix() const { return b_; }
    int d() const { return static_cast<int>(b_.rows()); }
    int p() const { return static_cast<int>(b_.cols()); }

private:
    MatrixXd b_;
};

StiefelMatrix haar_stiefel(int d, int p, Rng& rng);

// Orthonormal columns of A by Householder QR with the sign convention diag(R) > 0.
MatrixXd orthonormalize(const MatrixXd& a);

double spectral_norm(const MatrixXd& m);

struct GramMatrix {
    int d = 0;
    MatrixXd entries;  // k x k, (i,j) = w_i'w_j / d
    int k() const { return static_cast<int>(entries.rows()); }
};

// Columns of `vectors` are w_1..w_k.
GramMatrix gram_matrix(const MatrixXd& vectors, int d);
GramMatrix gram_matrix(const std::vector<VectorXd>& vectors, int d);

// Orthonormal frames of the triangular decomposition for (B, x, w_1..w_k).
// N is completed to d-p columns by w_j = Bx + beta_j (j > k), where
// beta_{k+1..d-p} complete [B, beta_1..beta_k] to an orthonormal basis; the
// first k columns of every quantity depend only on the supplied vectors.
struct GramSchmidtFrame {
    int d = 0, p = 0, k = 0;
    MatrixXd B;        // d x p
    MatrixXd N;        // d x (d-p), extended w's
    MatrixXd betas;    // d x (d-p): beta_1..beta_{d-p}
    MatrixXd cs;       // d x (d-p): c_1..c_{d-p}
    MatrixXd C;        // d x p: c_{1-p}..c_0
    MatrixXd S;        // d x d: [B, betas]' [B, N], structural zeros below the diagonal of the lower block
    MatrixXd T;        // d x d: [C, cs]' [B, N]
    MatrixXd Lambda;   // k x k: (c_i' beta_j)
    VectorXd kappa_sq; // k: kappa_j^2
    VectorXd zeta;     // k-1: shift of (t_{1k}..t_{k-1,k})

    // Rows/columns use the 1-based paper indexing i in [1-p, d-p].
    double s(int i, int j) const { return S(i + p - 1, j + p - 1); }
    double t(int i, int j) const { return T(i + p - 1, j + p - 1); }
    MatrixXd beta_frame() const;  // [B, betas]
    MatrixXd c_frame() const;     // [C, cs]
};

// vectors: d x k with B'w_j = x. Throws ConstraintViolated / RankDeficient /
// InvalidDimension.
GramSchmidtFrame frame_decompose(const StiefelMatrix& B, const VectorXd& x, const MatrixXd& vectors);

// 1 - |x|^2 iota'(N'N)^{-1} iota for the supplied k columns (dense solve).
double lambda_det_target(const VectorXd& x, const MatrixXd& vectors);

struct NamedTest {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
};

struct NamedCorrelation {
    std::string a, b;
    double r = 0.0;
};

struct BartlettReport {
    int d = 0, p = 0, k = 0, n = 0;
    std::vector<NamedTest> ks;              // distributional tests
    std::vector<NamedCorrelation> corr;     // pairwise sample correlations of the s's
    double max_below_diagonal = 0.0;        // max |S entry| below the diagonal of the lower block
    bool passes(double level) const;        // all p > level and |r| <= 4/sqrt(n)
};

BartlettReport bartlett_distribution_check(int d, int p, int k, const VectorXd& x, int n_reps, Rng& rng);

}  // namespace projcond
