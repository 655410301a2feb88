#include "projcond/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "projcond/error.hpp"
#include "projcond/parallel.hpp"
#include "projcond/stats.hpp"

namespace projcond {

StiefelMatrix::StiefelMatrix(MatrixXd entries, double tol) : b_(std::move(entries)) {
    const auto d = b_.rows(), p = b_.cols();
    if (p < 1 || p >= d) {
        std::ostringstream os;
        os << "need 1 <= p < d, got d=" << d << " p=" << p;
        throw Error(ErrorCode::InvalidDimension, os.str());
    }
    const double dev = (b_.transpose() * b_ - MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff();
    if (dev > tol) throw Error(ErrorCode::ConstraintViolated, "columns are not orthonormal");
}

MatrixXd orthonormalize(const MatrixXd& a) {
    Eigen::HouseholderQR<MatrixXd> qr(a);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(a.rows(), a.cols());
    const MatrixXd& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

StiefelMatrix haar_stiefel(int d, int p, Rng& rng) {
    if (p < 1 || p >= d) {
        std::ostringstream os;
        os << "need 1 <= p < d, got d=" << d << " p=" << p;
        throw Error(ErrorCode::InvalidDimension, os.str());
    }
    return StiefelMatrix(orthonormalize(rng.normal_matrix(d, p)));
}

double spectral_norm(const MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::JacobiSVD<MatrixXd> svd(m);
    return svd.singularValues()(0);
}

GramMatrix gram_matrix(const MatrixXd& vectors, int d) {
    if (vectors.rows() != d || vectors.cols() < 1)
        throw Error(ErrorCode::DimensionMismatch, "vectors must be d x k with k >= 1");
    const auto k = vectors.cols();
    GramMatrix g;
    g.d = d;
    g.entries.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i; j < k; ++j) {
            const double v = vectors.col(i).dot(vectors.col(j)) / d;
            g.entries(i, j) = v;
            g.entries(j, i) = v;
        }
    return g;
}

GramMatrix gram_matrix(const std::vector<VectorXd>& vectors, int d) {
    if (vectors.empty()) throw Error(ErrorCode::DimensionMismatch, "need at least one vector");
    MatrixXd m(d, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        if (vectors[j].size() != d) throw Error(ErrorCode::DimensionMismatch, "vector length differs from d");
        m.col(static_cast<Eigen::Index>(j)) = vectors[j];
    }
    return gram_matrix(m, d);
}

namespace {

// Removes from v its components along the first `count` columns of Q,
// twice (classical Gram-Schmidt with one reorthogonalization).
VectorXd project_out(const MatrixXd& q, Eigen::Index count, VectorXd v) {
    if (count == 0) return v;
    for (int pass = 0; pass < 2; ++pass) {
        const VectorXd coef = q.leftCols(count).transpose() * v;
        v -= q.leftCols(count) * coef;
    }
    return v;
}

}  // namespace

MatrixXd GramSchmidtFrame::beta_frame() const {
    MatrixXd out(d, d);
    out << B, betas;
    return out;
}

MatrixXd GramSchmidtFrame::c_frame() const {
    MatrixXd out(d, d);
    out << C, cs;
    return out;
}

GramSchmidtFrame frame_decompose(const StiefelMatrix& Bm, const VectorXd& x, const MatrixXd& vectors) {
    const MatrixXd& B = Bm.matrix();
    const int d = Bm.d(), p = Bm.p();
    const int k = static_cast<int>(vectors.cols());
    if (vectors.rows() != d || x.size() != p) throw Error(ErrorCode::DimensionMismatch, "frame inputs");
    if (k < 1 || k > d - p) throw Error(ErrorCode::InvalidDimension, "need 1 <= k <= d - p");

    for (int j = 0; j < k; ++j) {
        const double dev = (B.transpose() * vectors.col(j) - x).cwiseAbs().maxCoeff();
        if (dev > 1e-8) throw Error(ErrorCode::ConstraintViolated, "B'w_j != x");
    }
    {
        MatrixXd combined(d, p + k);
        combined << B, vectors;
        Eigen::JacobiSVD<MatrixXd> svd(combined);
        const auto& sv = svd.singularValues();
        if (!(sv(sv.size() - 1) >= 1e-10 * sv(0)))
            throw Error(ErrorCode::RankDeficient, "columns of B and w_1..w_k are numerically dependent");
    }

    const int m = d - p;
    GramSchmidtFrame f;
    f.d = d;
    f.p = p;
    f.k = k;
    f.B = B;

    // basis = [B, beta_1, ..., beta_m]
    MatrixXd basis(d, d);
    basis.leftCols(p) = B;
    for (int j = 0; j < k; ++j) {
        VectorXd r = project_out(basis, p + j, vectors.col(j));
        basis.col(p + j) = r / r.norm();
    }
    // Complete with standard basis vectors, largest residual first.
    for (int j = k; j < m; ++j) {
        double best = -1.0;
        VectorXd best_r;
        for (int e = 0; e < d; ++e) {
            VectorXd r = project_out(basis, p + j, VectorXd::Unit(d, e));
            const double nr = r.norm();
            if (nr > best) {
                best = nr;
                best_r = std::move(r);
            }
        }
        best_r = project_out(basis, p + j, best_r);
        basis.col(p + j) = best_r / best_r.norm();
    }
    f.betas = basis.rightCols(m);

    f.N.resize(d, m);
    f.N.leftCols(k) = vectors;
    const VectorXd bx = B * x;
    for (int j = k; j < m; ++j) f.N.col(j) = bx + f.betas.col(j);

    // c_1..c_m: Gram-Schmidt of the extended w's.
    MatrixXd cbasis(d, d);
    for (int j = 0; j < m; ++j) {
        VectorXd r = project_out(cbasis, j, f.N.col(j));
        cbasis.col(j) = r / r.norm();
    }
    // c_0, c_{-1}, ..., c_{1-p}: beta_j (= columns of B, last first) against
    // c_1..c_m and the c's already built.
    for (int j = 0; j < p; ++j) {
        VectorXd r = project_out(cbasis, m + j, B.col(p - 1 - j));
        cbasis.col(m + j) = r / r.norm();
    }
    f.cs = cbasis.leftCols(m);
    f.C.resize(d, p);
    for (int j = 0; j < p; ++j) f.C.col(p - 1 - j) = cbasis.col(m + j);

    MatrixXd M(d, d);
    M << B, f.N;
    // S: entries below the diagonal of the lower block are zero by
    // construction; only the upper part is evaluated so that column j uses
    // w_1..w_j alone.
    f.S = MatrixXd::Zero(d, d);
    f.S.topRows(p) = B.transpose() * M;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i <= j; ++i) f.S(p + i, p + j) = f.betas.col(i).dot(f.N.col(j));

    MatrixXd cframe(d, d);
    cframe << f.C, f.cs;
    f.T = cframe.transpose() * M;

    f.Lambda = f.cs.leftCols(k).transpose() * f.betas.leftCols(k);

    f.kappa_sq.resize(k);
    for (int j = 0; j < k; ++j) {
        MatrixXd a = B;
        if (j > 0) {
            const MatrixXd q = orthonormalize(vectors.leftCols(j));
            a -= q * (q.transpose() * B);
        }
        // |P_A w|^2 = w'A (A'A)^{-1} A'w
        const VectorXd aw = a.transpose() * vectors.col(j);
        f.kappa_sq(j) = aw.dot((a.transpose() * a).ldlt().solve(aw));
    }
    f.zeta = f.cs.leftCols(k - 1).transpose() * bx;
    return f;
}

double lambda_det_target(const VectorXd& x, const MatrixXd& vectors) {
    const MatrixXd g = vectors.transpose() * vectors;
    const VectorXd iota = VectorXd::Ones(vectors.cols());
    const VectorXd v = g.fullPivLu().solve(iota);
    return 1.0 - x.squaredNorm() * iota.dot(v);
}

bool BartlettReport::passes(double level) const {
    for (const auto& t : ks)
        if (!(t.p_value > level)) return false;
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    for (const auto& c : corr)
        if (std::abs(c.r) > bound) return false;
    return true;
}

BartlettReport bartlett_distribution_check(int d, int p, int k, const VectorXd& x, int n_reps, Rng& rng) {
    if (k < 1 || k > d - p) throw Error(ErrorCode::InvalidDimension, "need 1 <= k <= d - p");
    if (n_reps < 1000) throw Error(ErrorCode::InvalidDimension, "n_reps must be at least 1000");
    if (x.size() != p) throw Error(ErrorCode::DimensionMismatch, "x must have length p");

    // Per replication: s_{ij} (i<j), s_jj^2, t_kk^2 - kappa_k^2, the
    // whitened t-shift Lambda_{k-1}^{-1}(t - zeta), and the below-diagonal
    // maximum. Layout is fixed by (k).
    const int n_off = k * (k - 1) / 2;
    const int width = n_off + k + 1 + (k - 1) + 1;
    StreamFactory streams(rng, "bartlett");
    auto rows = map_indices<std::vector<double>>(static_cast<std::size_t>(n_reps), [&](std::size_t r) {
        Rng g = streams(r);
        const StiefelMatrix B = haar_stiefel(d, p, g);
        const MatrixXd& b = B.matrix();
        const VectorXd bx = b * x;
        MatrixXd w(d, k);
        for (int j = 0; j < k; ++j) {
            const VectorXd v = g.normal_vector(d);
            w.col(j) = bx + v - b * (b.transpose() * v);
        }
        const GramSchmidtFrame f = frame_decompose(B, x, w);
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(width));
        for (int j = 2; j <= k; ++j)
            for (int i = 1; i < j; ++i) row.push_back(f.s(i, j));
        for (int j = 1; j <= k; ++j) row.push_back(f.s(j, j) * f.s(j, j));
        row.push_back(f.t(k, k) * f.t(k, k) - f.kappa_sq(k - 1));
        if (k > 1) {
            VectorXd tk(k - 1);
            for (int i = 1; i < k; ++i) tk(i - 1) = f.t(i, k);
            const MatrixXd lam = f.Lambda.topLeftCorner(k - 1, k - 1);
            const VectorXd z = lam.triangularView<Eigen::Lower>().solve(tk - f.zeta);
            for (int i = 0; i < k - 1; ++i) row.push_back(z(i));
        }
        double below = 0.0;
        const MatrixXd full = f.betas.transpose() * f.N;
        for (int j = 0; j < d - p; ++j)
            for (int i = j + 1; i < d - p; ++i) below = std::max(below, std::abs(full(i, j)));
        row.push_back(below);
        return row;
    });

    BartlettReport rep;
    rep.d = d;
    rep.p = p;
    rep.k = k;
    rep.n = n_reps;
    auto column = [&](int c) {
        std::vector<double> v(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) v[r] = rows[r][static_cast<std::size_t>(c)];
        return v;
    };
    const auto std_normal = [](double v) { return normal_cdf(v); };

    std::vector<std::string> names;
    std::vector<std::vector<double>> s_cols;
    int c = 0;
    for (int j = 2; j <= k; ++j)
        for (int i = 1; i < j; ++i, ++c) {
            auto col = column(c);
            const std::string name = "s_" + std::to_string(i) + std::to_string(j);
            const auto res = ks_one_sample(col, std_normal);
            rep.ks.push_back({name + " ~ N(0,1)", res.statistic, res.p_value});
            names.push_back(name);
            s_cols.push_back(std::move(col));
        }
    for (int j = 1; j <= k; ++j, ++c) {
        auto col = column(c);
        const double dof = d - p - j + 1;
        const auto res = ks_one_sample(col, [dof](double v) { return chi_square_cdf(v, dof); });
        const std::string name = "s_" + std::to_string(j) + std::to_string(j) + "^2";
        rep.ks.push_back({name + " ~ chi2(" + std::to_string(d - p - j + 1) + ")", res.statistic, res.p_value});
        names.push_back(name);
        s_cols.push_back(std::move(col));
    }
    {
        const double dof = d - p - k + 1;
        const auto res = ks_one_sample(column(c), [dof](double v) { return chi_square_cdf(v, dof); });
        rep.ks.push_back({"t_kk^2 - kappa_k^2 ~ chi2(" + std::to_string(d - p - k + 1) + ")", res.statistic,
                          res.p_value});
        ++c;
    }
    for (int i = 1; i < k; ++i, ++c) {
        const auto res = ks_one_sample(column(c), std_normal);
        rep.ks.push_back({"Lambda^{-1}(t_k - zeta)_" + std::to_string(i) + " ~ N(0,1)", res.statistic, res.p_value});
    }
    for (const auto& r : rows) rep.max_below_diagonal = std::max(rep.max_below_diagonal, r.back());

    for (std::size_t a = 0; a < s_cols.size(); ++a)
        for (std::size_t b = a + 1; b < s_cols.size(); ++b)
            rep.corr.push_back({names[a], names[b], sample_correlation(s_cols[a], s_cols[b])});

    // Spherical reconstruction: fixed orthonormal c_1..c_{k-1}, c_k uniform
    // on the unit sphere of their complement, q_k ~ chi_{d-k+1}.
    {
        Rng g0 = streams(static_cast<std::uint64_t>(n_reps));
        const MatrixXd cfix = orthonormalize(g0.normal_matrix(d, std::max(k - 1, 1))).leftCols(k - 1);
        auto us = map_indices<VectorXd>(static_cast<std::size_t>(n_reps), [&](std::size_t r) {
            Rng g = streams(static_cast<std::uint64_t>(n_reps) + 1 + r);
            VectorXd u = VectorXd::Zero(d);
            for (int i = 0; i < k - 1; ++i) u += g.normal() * cfix.col(i);
            VectorXd ck = g.normal_vector(d);
            if (k > 1) ck -= cfix * (cfix.transpose() * ck);
            ck /= ck.norm();
            double chi2 = 0.0;
            for (int i = 0; i < d - k + 1; ++i) {
                const double z = g.normal();
                chi2 += z * z;
            }
            return VectorXd(u + std::sqrt(chi2) * ck);
        });
        for (int coord = 0; coord < d; ++coord) {
            std::vector<double> v(us.size());
            for (std::size_t r = 0; r < us.size(); ++r) v[r] = us[r](coord);
            const auto res = ks_one_sample(v, std_normal);
            rep.ks.push_back({"U_" + std::to_string(coord + 1) + " ~ N(0,1)", res.statistic, res.p_value});
        }
    }
    return rep;
}

}  // namespace projcond
