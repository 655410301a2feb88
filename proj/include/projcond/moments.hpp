#pragma once

#include <optional>
#include <string>
#include <vector>

#include "projcond/distributions.hpp"
#include "projcond/expansion.hpp"
#include "projcond/parallel.hpp"
#include "projcond/rng.hpp"
#include "projcond/stats.hpp"

namespace projcond {

struct MomentConditionConstants {
    double epsilon = 0.5;
    double alpha = 1.0;
    double beta = 1.0;
    double xi = 0.5;
    double D = 1.0;
    void validate() const;  // ConfigInvalid naming the offending field
};

enum class MonomialClass { Cycle, OpenChain, Diagonal, General };
std::string class_name(MonomialClass c);

// cycle: (1,2)(2,3)...(j-1,j)(j,1) for some j >= 1 (j = 1 is (1,1), j = 2 is (1,2)^2);
// open-chain: prod_i (j_{i-1}+1, j_{i-1}+2) ... (j_i - 1, j_i) with j_0 = 0, gaps >= 2;
// diagonal: every pair (a, a); general: anything else.
MonomialClass classify(const MonomialKey& key);

struct MonomialSpec {
    MonomialKey key;
    MonomialClass cls = MonomialClass::General;
    static MonomialSpec make(std::vector<std::pair<int, int>> pairs);
    int degree() const { return key.degree(); }
    int max_index() const;
    // (b1)(b) target: 1 if every factor is an above-diagonal entry appearing
    // exactly squared, 0 if some entry appears exactly once, none otherwise.
    std::optional<double> b1b_target() const;
};

MonomialSpec cycle_monomial(int g);

// Mean of |sqrt(d)(S_k - I_k)|^{2k+1+eps} over blocks of k fresh vectors.
Estimate estimate_b1a(const DistributionSpec& spec, int d, int k, double epsilon, int n_blocks, Rng& rng,
                      Exec exec = Exec::Parallel);

struct MonomialMean {
    double estimate = 0.0;  // d^{g/2} mean of G
    double se = 0.0;
    std::optional<double> target;
};

MonomialMean estimate_monomial_mean(const DistributionSpec& spec, int d, const MonomialSpec& G, int n_blocks, Rng& rng,
                                    Exec exec = Exec::Parallel);

// d^g mean of G H for a cycle G of degree g and H with 2 <= h < g whose
// indices cover 1..g.
Estimate estimate_b1c(const DistributionSpec& spec, int d, const MonomialSpec& G, const MonomialSpec& H, int n_blocks,
                      Rng& rng, Exec exec = Exec::Parallel);
// Same scaled mean without the structural check (used to exhibit excluded pairs).
Estimate estimate_scaled_product(const DistributionSpec& spec, int d, const MonomialSpec& G, const MonomialSpec& H,
                                 int n_blocks, Rng& rng, Exec exec = Exec::Parallel);

struct Prop5Cases {
    Estimate a, b, c;  // Var[Z'Z]/d - 2, E(Z1'Z2)^3/d, Var[(Z1'Z2)^2]/d^2 - 2(1 + 3/d)
    std::optional<double> a_exact, b_exact, c_exact;
};

Prop5Cases prop5_special_cases(const DistributionSpec& spec, int d, int n, Rng& rng, Exec exec = Exec::Parallel);

// Curated monomials with (b1)(b) targets for block size k.
std::vector<MonomialSpec> b1b_family(int k);

struct GaussianReference {
    Estimate alpha_star;
    double beta_star = 0.0;  // max over b1b_family(k) of |d^{g/2} mean - target| d^{1/2}
    double beta_star_se = 0.0;
};

GaussianReference gaussian_reference(int k, int d, int n, Rng& rng, double epsilon = 0.5, Exec exec = Exec::Parallel);

// alpha_hat, beta_hat (family-restricted) and D = max(1, density_sup) for a spec.
MomentConditionConstants estimate_constants(const DistributionSpec& spec, int d, int k, int n, Rng& rng,
                                            double epsilon = 0.5, double xi = 0.5, Exec exec = Exec::Parallel);

}  // namespace projcond
