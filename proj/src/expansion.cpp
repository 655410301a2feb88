#include "projcond/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "projcond/clones.hpp"
#include "projcond/error.hpp"
#include "projcond/linalg.hpp"

namespace projcond {

MonomialKey MonomialKey::canonical(std::vector<std::pair<int, int>> raw) {
    for (auto& pr : raw)
        if (pr.first > pr.second) std::swap(pr.first, pr.second);
    std::sort(raw.begin(), raw.end());
    return MonomialKey{std::move(raw)};
}

double MonomialKey::evaluate(const Eigen::MatrixXd& E) const {
    double v = 1.0;
    for (const auto& [i, j] : pairs) v *= E(i - 1, j - 1);
    return v;
}

MonomialKey MonomialKey::relabeled(const std::vector<int>& perm) const {
    std::vector<std::pair<int, int>> out;
    out.reserve(pairs.size());
    for (const auto& [i, j] : pairs) out.emplace_back(perm[i - 1] + 1, perm[j - 1] + 1);
    return canonical(std::move(out));
}

double PolynomialPsi::coefficient(const MonomialKey& key) const {
    const auto it = coeffs.find(MonomialKey::canonical(key.pairs));
    return it == coeffs.end() ? 0.0 : it->second;
}

double PolynomialPsi::evaluate(const Eigen::MatrixXd& S) const {
    const Eigen::MatrixXd E = S - Eigen::MatrixXd::Identity(S.rows(), S.cols());
    double total = 0.0;
    for (const auto& [key, c] : coeffs) total += c * key.evaluate(E);
    return total;
}

std::vector<double> taylor_p1(double x_norm_sq, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidK, "k must be positive");
    std::vector<double> c(k + 1);
    c[0] = 1.0;
    for (int j = 1; j <= k; ++j) c[j] = c[j - 1] * (-x_norm_sq / 2.0) / j;
    return c;
}

double taylor_g1(double z, int d, int p, int k, double x_norm_sq) {
    return std::exp(0.5 * (d - p - k - 1) * std::log1p(-x_norm_sq * z / d) + 0.5 * k * x_norm_sq);
}

void check_psi_threshold(double x_norm_sq, int k, int p, int d) {
    if (k < 1 || k > 4) throw Error(ErrorCode::InvalidK, "psi supports 1 <= k <= 4");
    const double m2 = std::max(1.0, x_norm_sq);
    if (!(d > 4.0 * (k + p + 1) * m2 * m2) || !(d > double(p) * p))
        throw Error(ErrorCode::ThresholdViolated, "need d > max{4(k+p+1)M^4, p^2}");
}

namespace {

// Internal evaluation runs in Real (long double): order-(k+1) remainders of
// the k = 4 expansion near S = I fall below double resolution.
template <class Real>
using Series = std::vector<Real>;  // coefficients of t^0..t^K

template <class Real>
Series<Real> ser_mul(const Series<Real>& a, const Series<Real>& b, int K) {
    Series<Real> out(K + 1, Real(0));
    for (int i = 0; i <= K; ++i) {
        if (a[i] == Real(0)) continue;
        for (int j = 0; i + j <= K; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

// sum_j c_j s^j truncated at degree K; s has zero constant term.
template <class Real>
Series<Real> ser_compose(const std::vector<Real>& c, const Series<Real>& s, int K) {
    Series<Real> out(K + 1, Real(0));
    Series<Real> pw(K + 1, Real(0));
    pw[0] = Real(1);
    for (std::size_t j = 0; j < c.size(); ++j) {
        for (int i = 0; i <= K; ++i) out[i] += c[j] * pw[i];
        pw = ser_mul(pw, s, K);
    }
    return out;
}

// g1^{(j)}(k)/j!, j = 0..k
template <class Real>
std::vector<Real> g1_taylor(int d, int p, int k, Real x_norm_sq) {
    std::vector<Real> out(k + 1);
    const Real dd = d;
    const Real log_base = std::log1p(-x_norm_sq * k / dd);
    Real prod = 1, fact = 1, pw = 1;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) {
            prod *= (dd - (p + k + 1 + 2 * (j - 1))) / dd;
            fact *= j;
            pw *= -x_norm_sq / 2;
        }
        out[j] = pw * prod * std::exp(Real(0.5) * (dd - (p + k + 1 + 2 * j)) * log_base + Real(0.5) * k * x_norm_sq) /
                 fact;
    }
    return out;
}

template <class Real>
std::vector<Real> p2_coefficients(int p, int k) {
    std::vector<Real> c(k + 1);
    c[0] = Real(1);
    for (int j = 1; j <= k; ++j) c[j] = c[j - 1] * Real(-0.5) * (p + Real(2) * (j - 1)) / j;
    return c;
}

template <class Real>
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
Real truncated_product_at_one(const Mat<Real>& E, const std::vector<Real>& q1c, const std::vector<Real>& p2c, int k) {
    // y(t) = sum_{j=1}^k iota'(-tE)^j iota
    Series<Real> y(k + 1, Real(0));
    Vec<Real> v = Vec<Real>::Ones(k);
    for (int j = 1; j <= k; ++j) {
        v = (-E * v).eval();
        y[j] = v.sum();
    }
    const Series<Real> q1 = ser_compose(q1c, y, k);

    // prod_i T_i(t), T_i = 1 + t E_ii - sum_j t^{j+2} u'(-E_(i-1))^j u
    Series<Real> prod(k + 1, Real(0));
    prod[0] = Real(1);
    for (int i = 0; i < k; ++i) {
        Series<Real> T(k + 1, Real(0));
        T[0] = Real(1);
        T[1] = E(i, i);
        if (i > 0) {
            const Vec<Real> u = E.col(i).head(i);
            const Mat<Real> lead = E.topLeftCorner(i, i);
            Vec<Real> w = u;
            for (int j = 0; j + 2 <= k; ++j) {
                T[j + 2] -= u.dot(w);
                w = (-lead * w).eval();
            }
        }
        prod = ser_mul(prod, T, k);
    }
    prod[0] = Real(0);
    const Series<Real> q2 = ser_compose(p2c, prod, k);
    const Series<Real> q = ser_mul(q1, q2, k);
    Real total = 0;
    for (const Real& c : q) total += c;
    return total;
}

void require_gram(const Eigen::MatrixXd& S) {
    if (S.rows() != S.cols() || S.rows() < 1) throw Error(ErrorCode::DimensionMismatch, "S must be square");
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(ErrorCode::ConstraintViolated, "S must be symmetric");
}

// psi / eta: permutation average of the truncated product.
template <class Real>
Real psi_over_eta(double x_norm_sq, const Eigen::MatrixXd& S, int d, int p) {
    const int k = static_cast<int>(S.rows());
    const Real xns = x_norm_sq;
    const auto q1c = g1_taylor<Real>(d, p, k, xns);
    const auto p2c = p2_coefficients<Real>(p, k);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    Real total = 0;
    int count = 0;
    do {
        Mat<Real> E(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) E(i, j) = Real(S(perm[i], perm[j])) - (i == j ? Real(1) : Real(0));
        total += truncated_product_at_one<Real>(E, q1c, p2c, k);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total / count;
}

// ratio / eta = det S^{-p/2} (1 - |x|^2 iota'S^{-1}iota/d)^{(d-p-k-1)/2} e^{k|x|^2/2};
// NaN outside the domain.
template <class Real>
Real ratio_over_eta(double x_norm_sq, const Eigen::MatrixXd& S, int d, int p) {
    const int k = static_cast<int>(S.rows());
    const Mat<Real> Sr = S.cast<Real>();
    Eigen::LLT<Mat<Real>> llt(Sr);
    if (llt.info() != Eigen::Success) return std::numeric_limits<Real>::quiet_NaN();
    Real log_det = 0;
    for (int i = 0; i < k; ++i) log_det += 2 * std::log(llt.matrixLLT()(i, i));
    const Vec<Real> iota = Vec<Real>::Ones(k);
    const Real q = Real(x_norm_sq) * iota.dot(llt.solve(iota));
    if (!(q < d)) return std::numeric_limits<Real>::quiet_NaN();
    return std::exp(-Real(p) / 2 * log_det + Real(d - p - k - 1) / 2 * std::log1p(-q / d) + Real(k) * x_norm_sq / 2);
}

}  // namespace

std::vector<double> taylor_r1(int d, int p, int k, double x_norm_sq) {
    if (k < 1) throw Error(ErrorCode::InvalidK, "k must be positive");
    const double m2 = std::max(1.0, x_norm_sq);
    if (!(d > 4.0 * (k + p + 1) * m2 * m2))
        throw Error(ErrorCode::ThresholdViolated, "need d > 4(k+p+1) max(1,|x|^2)^2");
    const auto p1 = taylor_p1(x_norm_sq, k);
    auto r = g1_taylor<double>(d, p, k, x_norm_sq);
    for (int j = 0; j <= k; ++j) r[j] -= p1[j];
    return r;
}

std::vector<double> taylor_p2(int p, int k) { return p2_coefficients<double>(p, std::max(k, 0)); }

double psi_eval(const Eigen::VectorXd& x, const Eigen::MatrixXd& S, int d, int p) {
    require_gram(S);
    const int k = static_cast<int>(S.rows());
    const double xns = x.squaredNorm();
    check_psi_threshold(xns, k, p, d);
    return eta_norm_const(d, p, k) * static_cast<double>(psi_over_eta<long double>(xns, S, d, p));
}

namespace {

constexpr double kPrune = 1e-14;

void prune(SparsePoly& a) {
    for (auto it = a.begin(); it != a.end();) {
        if (std::abs(it->second) < kPrune)
            it = a.erase(it);
        else
            ++it;
    }
}

SparsePoly poly_const(double c) {
    SparsePoly out;
    if (c != 0.0) out[MonomialKey{}] = c;
    return out;
}

void poly_axpy(SparsePoly& acc, double a, const SparsePoly& x) {
    for (const auto& [key, c] : x) acc[key] += a * c;
}

SparsePoly poly_mul(const SparsePoly& a, const SparsePoly& b, int max_degree) {
    SparsePoly out;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            if (ka.degree() + kb.degree() > max_degree) continue;
            std::vector<std::pair<int, int>> merged = ka.pairs;
            merged.insert(merged.end(), kb.pairs.begin(), kb.pairs.end());
            out[MonomialKey::canonical(std::move(merged))] += ca * cb;
        }
    prune(out);
    return out;
}

SparsePoly poly_compose(const std::vector<double>& c, const SparsePoly& s, int max_degree) {
    SparsePoly out;
    SparsePoly pw = poly_const(1.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        poly_axpy(out, c[j], pw);
        pw = poly_mul(pw, s, max_degree);
    }
    prune(out);
    return out;
}

using PolyVec = std::vector<SparsePoly>;

SparsePoly entry(int i, int j) {  // 0-based indices of E
    SparsePoly out;
    out[MonomialKey::canonical({{i + 1, j + 1}})] = 1.0;
    return out;
}

// -E_(n) v for the leading n x n block of E.
PolyVec neg_block_times(int n, const PolyVec& v, int max_degree) {
    PolyVec out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) poly_axpy(out[i], -1.0, poly_mul(entry(i, j), v[j], max_degree));
    for (auto& e : out) prune(e);
    return out;
}

SparsePoly dot(const PolyVec& a, const PolyVec& b, int max_degree) {
    SparsePoly out;
    for (std::size_t i = 0; i < a.size(); ++i) poly_axpy(out, 1.0, poly_mul(a[i], b[i], max_degree));
    prune(out);
    return out;
}

}  // namespace

PolynomialPsi psi_poly(const Eigen::VectorXd& x, int k, int p, int d) {
    const double xns = x.squaredNorm();
    check_psi_threshold(xns, k, p, d);
    const auto q1c = g1_taylor<double>(d, p, k, xns);
    const auto p2c = p2_coefficients<double>(p, k);

    // Lemma Taylor4: y = sum_{j=1}^k iota'(I - S)^j iota
    SparsePoly y;
    PolyVec v(k, poly_const(1.0));
    for (int j = 1; j <= k; ++j) {
        v = neg_block_times(k, v, k);
        for (const auto& e : v) poly_axpy(y, 1.0, e);
    }
    prune(y);
    const SparsePoly q1 = poly_compose(q1c, y, k);

    // Lemma Taylor5: det S ~ prod_i T_i
    SparsePoly prod = poly_const(1.0);
    for (int i = 0; i < k; ++i) {
        SparsePoly T = poly_const(1.0);
        poly_axpy(T, 1.0, entry(i, i));
        if (i > 0) {
            PolyVec u(i);
            for (int r = 0; r < i; ++r) u[r] = entry(r, i);
            PolyVec w = u;
            for (int j = 0; j + 2 <= k; ++j) {
                poly_axpy(T, -1.0, dot(u, w, k));
                w = neg_block_times(i, w, k);
            }
        }
        prune(T);
        prod = poly_mul(prod, T, k);
    }
    prod.erase(MonomialKey{});
    const SparsePoly q2 = poly_compose(p2c, prod, k);
    const SparsePoly q = poly_mul(q1, q2, k);

    // Average over relabelings of {1..k}.
    PolynomialPsi out;
    out.k = k;
    out.p = p;
    out.d = d;
    out.x_norm_sq = xns;
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    int count = 0;
    SparsePoly acc;
    do {
        for (const auto& [key, c] : q) acc[key.relabeled(perm)] += c;
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double eta = eta_norm_const(d, p, k);
    for (auto& [key, c] : acc) c *= eta / count;
    prune(acc);
    out.coeffs = std::move(acc);
    return out;
}

double clone_ratio_at(const Eigen::VectorXd& x, const Eigen::MatrixXd& S, int d, int p) {
    return std::exp(clone_log_density_ratio_gram(x.squaredNorm(), S, d, p).log_ratio);
}

RemainderReport remainder_diagnostic(const Eigen::VectorXd& x, const Eigen::MatrixXd& S, int d, int p,
                                     const ExpansionConstants& constants) {
    require_gram(S);
    const int k = static_cast<int>(S.rows());
    const double norm = spectral_norm(S - Eigen::MatrixXd::Identity(k, k));
    if (!(norm < 1.0 / (p * constants.xi_for(k))))
        throw Error(ErrorCode::OutsideExpansionRegion, "need |S - I| < 1/(p xi(k))");
    check_psi_threshold(x.squaredNorm(), k, p, d);
    RemainderReport r;
    const long double diff = ratio_over_eta<long double>(x.squaredNorm(), S, d, p) -
                             psi_over_eta<long double>(x.squaredNorm(), S, d, p);
    r.remainder = eta_norm_const(d, p, k) * static_cast<double>(diff);
    const double M = std::max(1.0, x.norm());
    r.bound_shape = constants.c_delta * std::pow(p, k + 1) * std::pow(M, 2.0 * (k + 2)) * std::exp(k * M * M / 2.0) *
                    std::pow(norm, k + 1);
    return r;
}

}  // namespace projcond
