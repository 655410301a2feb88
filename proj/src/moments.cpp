#include "projcond/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "projcond/error.hpp"
#include "projcond/linalg.hpp"

namespace projcond {

void MomentConditionConstants::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw Error(ErrorCode::ConfigInvalid, "field \"epsilon\" must lie in [0, 1/2]");
    if (!(alpha >= 1.0)) throw Error(ErrorCode::ConfigInvalid, "field \"alpha\" must be >= 1");
    if (!(beta > 0.0)) throw Error(ErrorCode::ConfigInvalid, "field \"beta\" must be > 0");
    if (!(xi > 0.0 && xi <= 0.5)) throw Error(ErrorCode::ConfigInvalid, "field \"xi\" must lie in (0, 1/2]");
    if (!(D >= 1.0)) throw Error(ErrorCode::ConfigInvalid, "field \"D\" must be >= 1");
}

std::string class_name(MonomialClass c) {
    switch (c) {
        case MonomialClass::Cycle: return "cycle";
        case MonomialClass::OpenChain: return "open-chain";
        case MonomialClass::Diagonal: return "diagonal";
        case MonomialClass::General: return "general";
    }
    return "?";
}

namespace {

MonomialKey cycle_key(int g) {
    if (g == 1) return MonomialKey::canonical({{1, 1}});
    std::vector<std::pair<int, int>> pairs;
    for (int a = 1; a < g; ++a) pairs.emplace_back(a, a + 1);
    pairs.emplace_back(g, 1);
    return MonomialKey::canonical(std::move(pairs));
}

}  // namespace

MonomialSpec cycle_monomial(int g) {
    if (g < 1) throw Error(ErrorCode::InvalidStructure, "cycle length must be positive");
    MonomialSpec s;
    s.key = cycle_key(g);
    s.cls = MonomialClass::Cycle;
    return s;
}

namespace {

bool is_open_chain(const MonomialKey& key) {
    if (key.pairs.empty()) return true;
    for (std::size_t i = 0; i < key.pairs.size(); ++i) {
        const auto [a, b] = key.pairs[i];
        if (b != a + 1) return false;
        if (i > 0 && key.pairs[i - 1] == key.pairs[i]) return false;
    }
    // Sorted pairs (a, a+1): consecutive runs are the segments; the next
    // segment must start right after the previous one ends.
    if (key.pairs.front().first != 1) return false;
    for (std::size_t i = 1; i < key.pairs.size(); ++i) {
        const int prev_end = key.pairs[i - 1].second;
        const int start = key.pairs[i].first;
        if (start != prev_end && start != prev_end + 1) return false;
    }
    return true;
}

}  // namespace

MonomialClass classify(const MonomialKey& key) {
    const int g = key.degree();
    if (g >= 1 && key == cycle_key(g)) return MonomialClass::Cycle;
    if (is_open_chain(key)) return MonomialClass::OpenChain;
    if (std::all_of(key.pairs.begin(), key.pairs.end(), [](const auto& pr) { return pr.first == pr.second; }))
        return MonomialClass::Diagonal;
    return MonomialClass::General;
}

MonomialSpec MonomialSpec::make(std::vector<std::pair<int, int>> pairs) {
    for (const auto& [a, b] : pairs)
        if (a < 1 || b < 1) throw Error(ErrorCode::InvalidStructure, "monomial indices are 1-based");
    MonomialSpec s;
    s.key = MonomialKey::canonical(std::move(pairs));
    s.cls = classify(s.key);
    return s;
}

int MonomialSpec::max_index() const {
    int m = 0;
    for (const auto& pr : key.pairs) m = std::max(m, pr.second);
    return m;
}

std::optional<double> MonomialSpec::b1b_target() const {
    std::map<std::pair<int, int>, int> count;
    for (const auto& pr : key.pairs) ++count[pr];
    bool all_quadratic_offdiag = !count.empty();
    for (const auto& [pr, c] : count) {
        if (c == 1) return 0.0;
        if (c != 2 || pr.first == pr.second) all_quadratic_offdiag = false;
    }
    if (all_quadratic_offdiag) return 1.0;
    return std::nullopt;
}

namespace {

Eigen::MatrixXd draw_deviation(const DistributionSpec& spec, int d, int k, Rng& g) {
    DistributionSpec s = spec;
    s.d = d;
    Eigen::MatrixXd z(d, k);
    for (int j = 0; j < k; ++j) z.col(j) = sample_one(s, g);
    return gram_matrix(z, d).entries - Eigen::MatrixXd::Identity(k, k);
}

template <class Fn>
Moments reduce_blocks(std::size_t n, Fn&& fn, Exec exec) {
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

Estimate estimate_b1a(const DistributionSpec& spec, int d, int k, double epsilon, int n_blocks, Rng& rng, Exec exec) {
    if (k < 1) throw Error(ErrorCode::InvalidK, "k must be positive");
    if (n_blocks < 1) throw Error(ErrorCode::InvalidDimension, "n_blocks must be positive");
    const double power = 2.0 * k + 1.0 + epsilon;
    StreamFactory streams(rng, "b1a");
    const Moments m = reduce_blocks(
        static_cast<std::size_t>(n_blocks),
        [&](std::size_t i) {
            Rng g = streams(i);
            const Eigen::MatrixXd E = draw_deviation(spec, d, k, g);
            return std::pow(std::sqrt(double(d)) * spectral_norm(E), power);
        },
        exec);
    return {m.mean, m.se()};
}

MonomialMean estimate_monomial_mean(const DistributionSpec& spec, int d, const MonomialSpec& G, int n_blocks, Rng& rng,
                                    Exec exec) {
    const int k = std::max(1, G.max_index());
    const double scale = std::pow(double(d), G.degree() / 2.0);
    StreamFactory streams(rng, "monomial");
    const Moments m = reduce_blocks(
        static_cast<std::size_t>(n_blocks),
        [&](std::size_t i) {
            Rng g = streams(i);
            return scale * G.key.evaluate(draw_deviation(spec, d, k, g));
        },
        exec);
    return {m.mean, m.se(), G.b1b_target()};
}

Estimate estimate_scaled_product(const DistributionSpec& spec, int d, const MonomialSpec& G, const MonomialSpec& H,
                                 int n_blocks, Rng& rng, Exec exec) {
    const int k = std::max({1, G.max_index(), H.max_index()});
    const double scale = std::pow(double(d), G.degree());
    StreamFactory streams(rng, "b1c");
    const Moments m = reduce_blocks(
        static_cast<std::size_t>(n_blocks),
        [&](std::size_t i) {
            Rng g = streams(i);
            const Eigen::MatrixXd E = draw_deviation(spec, d, k, g);
            return scale * G.key.evaluate(E) * H.key.evaluate(E);
        },
        exec);
    return {m.mean, m.se()};
}

Estimate estimate_b1c(const DistributionSpec& spec, int d, const MonomialSpec& G, const MonomialSpec& H, int n_blocks,
                      Rng& rng, Exec exec) {
    const int g = G.degree(), h = H.degree();
    if (G.cls != MonomialClass::Cycle || g < 3)
        throw Error(ErrorCode::InvalidStructure, "G must be a cycle Z_1'Z_2...Z_g'Z_1/d^g with g >= 3");
    if (!(2 <= h && h < g)) throw Error(ErrorCode::InvalidStructure, "need 2 <= deg(H) < deg(G)");
    std::set<int> support;
    for (const auto& [a, b] : H.key.pairs) {
        support.insert(a);
        support.insert(b);
    }
    for (int i = 1; i <= g; ++i)
        if (!support.count(i)) throw Error(ErrorCode::InvalidStructure, "H must depend on every Z_i with i <= g");
    return estimate_scaled_product(spec, d, G, H, n_blocks, rng, exec);
}

Prop5Cases prop5_special_cases(const DistributionSpec& spec, int d, int n, Rng& rng, Exec exec) {
    if (n < 1) throw Error(ErrorCode::InvalidDimension, "n must be positive");
    DistributionSpec s = spec;
    s.d = d;
    StreamFactory streams(rng, "prop5");
    const double dd = d;
    // E Z'Z = d and E(Z1'Z2)^2 = d exactly, so the variances are means of
    // squared deviations from those known values.
    const JointMoments jm = chunked_reduce<JointMoments>(
        static_cast<std::size_t>(n),
        [&](std::size_t b, std::size_t e) {
            JointMoments acc(3);
            for (std::size_t i = b; i < e; ++i) {
                Rng g = streams(i);
                const Eigen::VectorXd z1 = sample_one(s, g);
                const Eigen::VectorXd z2 = sample_one(s, g);
                const double q = z1.squaredNorm() - dd;
                const double c = z1.dot(z2);
                const double c2 = c * c - dd;
                acc.add({q * q / dd - 2.0, c * c * c / dd, c2 * c2 / (dd * dd) - 2.0 * (1.0 + 3.0 / dd)});
            }
            return acc;
        },
        [](JointMoments& a, const JointMoments& o) { a.merge(o); }, exec);
    Prop5Cases out;
    auto est = [&](std::size_t i) { return Estimate{jm.mean[i], std::sqrt(jm.cov(i, i) / jm.n)}; };
    out.a = est(0);
    out.b = est(1);
    out.c = est(2);
    const MomentOracle mo = moment_oracle(spec);
    out.a_exact = mo.m4 - 3.0;
    out.b_exact = mo.m3 * mo.m3;
    out.c_exact = (mo.m4 * mo.m4 - 9.0) / dd;
    return out;
}

std::vector<MonomialSpec> b1b_family(int k) {
    std::vector<MonomialSpec> out;
    out.push_back(MonomialSpec::make({{1, 1}}));
    if (k >= 2) {
        out.push_back(MonomialSpec::make({{1, 2}}));
        out.push_back(MonomialSpec::make({{1, 2}, {1, 2}}));
        out.push_back(MonomialSpec::make({{1, 1}, {1, 2}, {1, 2}}));
    }
    if (k >= 3) {
        out.push_back(MonomialSpec::make({{1, 2}, {1, 2}, {1, 3}, {1, 3}}));
        out.push_back(MonomialSpec::make({{1, 2}, {2, 3}}));
        out.push_back(MonomialSpec::make({{1, 2}, {2, 3}, {1, 3}}));
    }
    if (k >= 4) {
        out.push_back(MonomialSpec::make({{1, 2}, {1, 2}, {3, 4}, {3, 4}}));
        out.push_back(MonomialSpec::make({{1, 2}, {3, 4}}));
    }
    return out;
}

GaussianReference gaussian_reference(int k, int d, int n, Rng& rng, double epsilon, Exec exec) {
    if (k < 1 || k > 4) throw Error(ErrorCode::InvalidK, "gaussian_reference supports 1 <= k <= 4");
    const DistributionSpec g = DistributionSpec::gaussian(d);
    GaussianReference out;
    out.alpha_star = estimate_b1a(g, d, k, epsilon, n, rng, exec);
    const double root_d = std::sqrt(double(d));
    for (const auto& G : b1b_family(k)) {
        const auto mm = estimate_monomial_mean(g, d, G, n, rng, exec);
        const double dev = std::abs(mm.estimate - *mm.target) * root_d;
        if (dev >= out.beta_star) {
            out.beta_star = dev;
            out.beta_star_se = mm.se * root_d;
        }
    }
    return out;
}

MomentConditionConstants estimate_constants(const DistributionSpec& spec, int d, int k, int n, Rng& rng,
                                            double epsilon, double xi, Exec exec) {
    MomentConditionConstants c;
    c.epsilon = epsilon;
    c.xi = xi;
    c.alpha = std::max(1.0, estimate_b1a(spec, d, k, epsilon, n, rng, exec).value);
    double beta = 0.0;
    for (const auto& G : b1b_family(k)) {
        const auto mm = estimate_monomial_mean(spec, d, G, n, rng, exec);
        beta = std::max(beta, std::abs(mm.estimate - *mm.target) * std::pow(double(d), xi));
    }
    c.beta = std::max(beta, 1e-12);
    c.D = std::max(1.0, moment_oracle(spec).density_sup);
    return c;
}

}  // namespace projcond
