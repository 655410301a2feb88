#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace projcond {

// Multiset of entries (i, j), 1 <= i <= j <= k, of the symmetric matrix S - I,
// stored sorted so that equal monomials compare equal.
struct MonomialKey {
    std::vector<std::pair<int, int>> pairs;

    static MonomialKey canonical(std::vector<std::pair<int, int>> raw);
    int degree() const { return static_cast<int>(pairs.size()); }
    // Product of the referenced entries of E (1-based indices).
    double evaluate(const Eigen::MatrixXd& E) const;
    MonomialKey relabeled(const std::vector<int>& perm) const;  // perm is 0-based: i -> perm[i-1]+1
    bool operator<(const MonomialKey& o) const { return pairs < o.pairs; }
    bool operator==(const MonomialKey& o) const { return pairs == o.pairs; }
};

using SparsePoly = std::map<MonomialKey, double>;

struct PolynomialPsi {
    int k = 0, p = 0, d = 0;
    double x_norm_sq = 0.0;
    SparsePoly coeffs;

    double coefficient(const MonomialKey& key) const;
    double evaluate(const Eigen::MatrixXd& S) const;  // S is the Gram matrix, not S - I
};

struct ExpansionConstants {
    double xi_k = -1.0;   // expansion radius parameter; <= 0 means 2k+1
    double c_delta = 1.0; // multiplies the reported remainder bound shape
    double xi_for(int k) const { return xi_k > 0.0 ? xi_k : 2.0 * k + 1.0; }
};

// coefficient j = (-x_norm_sq/2)^j / j!, j = 0..k
std::vector<double> taylor_p1(double x_norm_sq, int k);
// g1(z) = (1 - x_norm_sq z/d)^{(d-p-k-1)/2} e^{k x_norm_sq/2}
double taylor_g1(double z, int d, int p, int k, double x_norm_sq);
// coefficient j = g1^{(j)}(k)/j! - (-x_norm_sq/2)^j/j!; needs d > 4(k+p+1) max(1, x_norm_sq)^2
std::vector<double> taylor_r1(int d, int p, int k, double x_norm_sq);
// coefficient j = (-1/2)^j / j! prod_{i<j} (p + 2i)
std::vector<double> taylor_p2(int p, int k);

// Degree-k approximant of the clone density ratio at Gram matrix S (k <= 4),
// evaluated from the truncated product eta * Q1 * Q2 along S = I + t(S - I)
// and averaged over relabelings.
double psi_eval(const Eigen::VectorXd& x, const Eigen::MatrixXd& S, int d, int p);
// The same approximant as an explicit sparse polynomial in the entries of S - I.
PolynomialPsi psi_poly(const Eigen::VectorXd& x, int k, int p, int d);
// Precondition d > max{4(k+p+1)M^4, p^2}, M = max(1, |x|).
void check_psi_threshold(double x_norm_sq, int k, int p, int d);

// Exact clone density ratio as a function of S (x enters through |x|^2 only).
double clone_ratio_at(const Eigen::VectorXd& x, const Eigen::MatrixXd& S, int d, int p);

struct RemainderReport {
    double remainder = 0.0;    // ratio - psi
    double bound_shape = 0.0;  // C_Delta p^{k+1} M^{2(k+2)} e^{k M^2/2} |S-I|^{k+1}
};

// Throws OutsideExpansionRegion unless |S - I| < 1/(p xi(k)).
RemainderReport remainder_diagnostic(const Eigen::VectorXd& x, const Eigen::MatrixXd& S, int d, int p,
                                     const ExpansionConstants& constants = {});

}  // namespace projcond
