#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include <Eigen/Dense>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace projcond {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a, used to turn experiment names into stream keys.
constexpr std::uint64_t hash_name(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// xoshiro256++ engine. Substreams are keyed by (root, experiment, index), so a
// replication's draws do not depend on which worker runs it.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) { reseed(seed, 0, 0); }

    static Rng substream(std::uint64_t root, std::uint64_t experiment, std::uint64_t index) {
        Rng r;
        r.reseed(root, experiment, index);
        return r;
    }

    // Child stream of this one; does not advance the parent.
    Rng split(std::uint64_t index) const { return substream(s_[0] ^ s_[2], s_[1] ^ s_[3], index); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double normal() { return normal_(*this); }
    double exponential() { return exponential_(*this); }

    Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
        return m;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    void reseed(std::uint64_t root, std::uint64_t experiment, std::uint64_t index) {
        std::uint64_t st = root;
        std::uint64_t a = splitmix64(st);
        st = a ^ experiment;
        std::uint64_t b = splitmix64(st);
        st = b ^ index;
        for (auto& w : s_) w = splitmix64(st);
    }

    std::uint64_t s_[4]{};
    boost::random::normal_distribution<double> normal_{};
    boost::random::exponential_distribution<double> exponential_{};
};

// Substreams for one Monte Carlo loop: draws one key from the caller's
// stream, then replication i always gets the same child stream.
class StreamFactory {
public:
    StreamFactory(Rng& parent, std::string_view tag) : key_(parent()), tag_(hash_name(tag)) {}
    Rng operator()(std::uint64_t index) const { return Rng::substream(key_, tag_, index); }

private:
    std::uint64_t key_;
    std::uint64_t tag_;
};

}  // namespace projcond
