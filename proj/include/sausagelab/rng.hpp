#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace sausagelab {

// splitmix64 finalizer; used both as a mixer and to seed streams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++; state seeded from a splitmix64 chain.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    explicit Xoshiro256pp(std::uint64_t seed = 0) {
        std::uint64_t x = seed;
        for (auto& w : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            w = mix64(x);
        }
    }

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

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Derive a per-task seed from (master seed, task path). Stable under
// scheduling order and worker count.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(master ^ 0x5f3a1c9d2b847e6fULL);
    for (std::uint64_t id : path) h = mix64(h ^ mix64(id));
    return h;
}

// Engine plus cached-pair normal sampler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    double u01() {  // [0,1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double normal() {  // Marsaglia polar
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, q;
        do {
            u = 2.0 * u01() - 1.0;
            v = 2.0 * u01() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Poisson by inversion for small mean, PTRS-style normal cutover is not
    // needed here; large means use the gamma-free "count exponentials via
    // normal approx refinement" — we just use the exact inversion below a
    // threshold and a table-free PA method above it.
    std::uint64_t poisson(double mean);

    Xoshiro256pp& engine() { return eng_; }

private:
    Xoshiro256pp eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline std::uint64_t Rng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
        const double l = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01();
        } while (p > l);
        return k - 1;
    }
    // Split recursively: Poisson(m) = Poisson(m/2) + Poisson(m/2).
    const double half = mean / 2.0;
    return poisson(half) + poisson(mean - half);
}

}  // namespace sausagelab
