#include "projcond/clones.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <functional>
#include <limits>

#include "projcond/error.hpp"
#include "projcond/mutation.hpp"

namespace projcond {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_k(int d, int p, int k) {
    if (k < 1 || k > d - p) throw Error(ErrorCode::InvalidK, "need 1 <= k <= d - p");
}

}  // namespace

CloneDraw sample_clones(const StiefelMatrix& B, const VectorXd& x, int k, Rng& rng) {
    if (x.size() != B.p()) throw Error(ErrorCode::DimensionMismatch, "x must have length p");
    if (k < 1) throw Error(ErrorCode::InvalidK, "k must be positive");
    const MatrixXd& b = B.matrix();
    CloneDraw out{B, x, MatrixXd(B.d(), k), rng.normal_matrix(B.d(), k)};
    const VectorXd bx = b * x;
    for (int j = 0; j < k; ++j) {
        const VectorXd v = out.V.col(j);
        out.W.col(j) = bx + (v - b * (b.transpose() * v));
    }
    return out;
}

double log_eta(int d, int p, int k) {
    if (p < 0 || k < 1 || k > d - p) throw Error(ErrorCode::InvalidK, "need 1 <= k <= d - p");
    double s = -0.5 * k * p * std::log(0.5 * d);
    // Gamma(a)/Gamma(a - p/2) with a = (d-i+1)/2; the direct lgamma difference
    // loses ~1e-12 to cancellation at d ~ 1e4.
    for (int i = 1; i <= k; ++i) {
        const double a = 0.5 * (d - p - i + 1);
        const double ratio = p == 0 ? 1.0 : boost::math::tgamma_delta_ratio(a, 0.5 * p);
        if (ratio > 0.0 && std::isfinite(ratio))
            s -= std::log(ratio);
        else
            s += static_cast<double>(std::lgamma(static_cast<long double>(a) + 0.5L * p) -
                                     std::lgamma(static_cast<long double>(a)));
    }
    if (mutation_enabled("eta")) s += std::log(1.05);
    return s;
}

double eta_norm_const(int d, int p, int k) { return std::exp(log_eta(d, p, k)); }

double eta_upper_bound(int d, int p, int k) {
    const double dd = d;
    return std::exp(double(p) * p / dd / (1.0 - (p + k - 1) / dd) * k * k / 2.0);
}

DensityRatioValue clone_log_density_ratio_gram(double x_norm_sq, const MatrixXd& S, int d, int p) {
    const int k = static_cast<int>(S.rows());
    check_k(d, p, k);
    Eigen::LLT<MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) return {kNegInf, false};
    double log_det = 0.0;
    for (int i = 0; i < k; ++i) {
        const double di = llt.matrixLLT()(i, i);
        if (!(di > 0.0)) return {kNegInf, false};
        log_det += 2.0 * std::log(di);
    }
    const VectorXd iota = VectorXd::Ones(k);
    const VectorXd v = llt.solve(iota);
    const double q = x_norm_sq * iota.dot(v);
    if (!std::isfinite(q) || !std::isfinite(log_det) || !(q < d)) return {kNegInf, false};
    const double lr = log_eta(d, p, k) - 0.5 * p * log_det + 0.5 * (d - p - k - 1) * std::log1p(-q / d) +
                      0.5 * k * x_norm_sq;
    return {lr, true};
}

DensityRatioValue clone_log_density_ratio(const VectorXd& x, const MatrixXd& vectors, int p) {
    const int d = static_cast<int>(vectors.rows());
    if (x.size() != p) throw Error(ErrorCode::DimensionMismatch, "x must have length p");
    check_k(d, p, static_cast<int>(vectors.cols()));
    return clone_log_density_ratio_gram(x.squaredNorm(), gram_matrix(vectors, d).entries, d, p);
}

void validate_chain(const ChainSpec& c, int k) {
    if (c.j.empty() || c.j[0] != 0) throw Error(ErrorCode::InvalidChain, "j_0 must be 0");
    if (c.l < 1 || c.l > k) throw Error(ErrorCode::InvalidChain, "need 1 <= l <= k");
    for (int i = 1; i <= c.m(); ++i)
        if (!(c.j[i - 1] + 1 < c.j[i])) throw Error(ErrorCode::InvalidChain, "need j_{i-1} + 1 < j_i");
    if (c.j.back() > c.l) throw Error(ErrorCode::InvalidChain, "need j_m <= l");
}

double chain_product(const ChainSpec& c, const MatrixXd& vectors) {
    double prod = 1.0;
    for (int i = 1; i <= c.m(); ++i)
        for (int a = c.j[i - 1] + 1; a < c.j[i]; ++a) prod *= vectors.col(a - 1).dot(vectors.col(a));
    return prod;
}

double chain_target(const ChainSpec& c, double x_norm_sq) {
    return std::pow(x_norm_sq, c.j.back() - c.m());
}

std::vector<ChainSpec> enumerate_chains(int k, int max_m) {
    std::vector<ChainSpec> out;
    for (int l = 1; l <= k; ++l) {
        // depth-first over increasing j's
        std::vector<std::vector<int>> stack{{0}};
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            out.push_back({l, cur});
            if (static_cast<int>(cur.size()) - 1 >= max_m) continue;
            for (int next = cur.back() + 2; next <= l; ++next) {
                auto ext = cur;
                ext.push_back(next);
                stack.push_back(std::move(ext));
            }
        }
    }
    return out;
}

namespace {

// Draws the k vectors for one replication and the weight attached to them:
// clones carry weight 1; Gaussian V's carry the density ratio of the first l.
void draw_block(ChainRoute route, const VectorXd& x, int d, int p, int k, int l, Rng& g, MatrixXd& vecs,
                double& weight) {
    if (route == ChainRoute::Clones) {
        const StiefelMatrix B = haar_stiefel(d, p, g);
        vecs = sample_clones(B, x, k, g).W;
        weight = 1.0;
    } else {
        vecs = g.normal_matrix(d, k);
        const auto r = clone_log_density_ratio(x, vecs.leftCols(l), p);
        weight = std::exp(r.log_ratio);
    }
}

Moments reduce_scalar(std::size_t n, const std::function<double(std::size_t)>& fn, Exec exec) {
    return chunked_reduce<Moments>(
        n,
        [&](std::size_t b, std::size_t e) {
            Moments m;
            for (std::size_t i = b; i < e; ++i) m.add(fn(i));
            return m;
        },
        [](Moments& a, const Moments& o) { a.merge(o); }, exec);
}

}  // namespace

ChainResult gaussian_chain_identity(const VectorXd& x, int d, int p, int k, const ChainSpec& chain, int n, Rng& rng,
                                    ChainRoute route, Exec exec) {
    if (k % 2 != 0) throw Error(ErrorCode::InvalidK, "k must be even");
    check_k(d, p, k);
    validate_chain(chain, k);
    if (x.size() != p) throw Error(ErrorCode::DimensionMismatch, "x must have length p");
    const double target = chain_target(chain, x.squaredNorm());
    StreamFactory streams(rng, "chain");
    const Moments m = reduce_scalar(
        static_cast<std::size_t>(n),
        [&](std::size_t i) {
            Rng g = streams(i);
            MatrixXd vecs;
            double w;
            draw_block(route, x, d, p, k, chain.l, g, vecs, w);
            return w * chain_product(chain, vecs);
        },
        exec);
    return {m.mean - target, m.se(), target};
}

ChainResult gaussian_alternating_sum(const VectorXd& x, int d, int p, int k, int n, Rng& rng, ChainRoute route,
                                     Exec exec) {
    if (k % 2 != 0) throw Error(ErrorCode::InvalidK, "k must be even");
    check_k(d, p, k);
    if (x.size() != p) throw Error(ErrorCode::DimensionMismatch, "x must have length p");
    const double target = std::pow(1.0 - x.squaredNorm(), k);
    StreamFactory streams(rng, "alternating");
    const Moments m = reduce_scalar(
        static_cast<std::size_t>(n),
        [&](std::size_t i) {
            Rng g = streams(i);
            MatrixXd w;
            double weight;
            draw_block(route, x, d, p, k, k, g, w, weight);
            double total = 0.0;
            double binom = 1.0;  // C(k, j)
            for (int j = 1; j <= k; ++j) {
                binom = binom * (k - j + 1) / j;
                double cyc = 1.0;
                for (int a = 0; a + 1 < j; ++a) cyc *= w.col(a).dot(w.col(a + 1));
                cyc *= w.col(j - 1).dot(w.col(0));
                const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
                total += sign * binom * (cyc - d + p - 1);
            }
            return weight * total;
        },
        exec);
    return {m.mean - target, m.se(), target};
}

Estimate clone_density_normalization(const VectorXd& x, int d, int p, int k, int n, Rng& rng, Exec exec) {
    check_k(d, p, k);
    StreamFactory streams(rng, "normalization");
    const Moments m = reduce_scalar(
        static_cast<std::size_t>(n),
        [&](std::size_t i) {
            Rng g = streams(i);
            const MatrixXd v = g.normal_matrix(d, k);
            return std::exp(clone_log_density_ratio(x, v, p).log_ratio);
        },
        exec);
    return {m.mean, m.se()};
}

}  // namespace projcond
