#include "levyou/rng.hpp"

#include <cmath>
#include <limits>

namespace levyou {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kPhiloxM4x32A, ctr[0], hi0, lo0);
    mul_hi_lo(kPhiloxM4x32B, ctr[2], hi1, lo1);
    const std::uint32_t c1 = ctr[1];
    const std::uint32_t c3 = ctr[3];
    ctr[0] = hi1 ^ c1 ^ key[0];
    ctr[1] = lo1;
    ctr[2] = hi0 ^ c3 ^ key[1];
    ctr[3] = lo0;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_(stream_index) {}

void RandomStream::refill() {
    std::uint32_t ctr[4] = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32),
    };
    std::uint32_t key[2] = {
        static_cast<std::uint32_t>(seed_),
        static_cast<std::uint32_t>(seed_ >> 32),
    };
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, key);
        key[0] += kPhiloxW32A;
        key[1] += kPhiloxW32B;
    }
    block_[0] = ctr[0];
    block_[1] = ctr[1];
    block_[2] = ctr[2];
    block_[3] = ctr[3];
    block_pos_ = 0;
    ++counter_;
}

std::uint64_t RandomStream::next_u64() {
    if (block_pos_ > 2) refill();
    const std::uint64_t lo = block_[block_pos_];
    const std::uint64_t hi = block_[block_pos_ + 1];
    block_pos_ += 2;
    return (hi << 32) | lo;
}

double RandomStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

long RandomStream::poisson(double lambda) {
    if (!(lambda >= 0.0)) return 0;
    if (lambda == 0.0) return 0;
    if (lambda < 30.0) {
        // Knuth: multiply uniforms until the product drops below e^{-lambda}.
        const double limit = std::exp(-lambda);
        long k = 0;
        double prod = uniform_pos();
        while (prod > limit) {
            ++k;
            prod *= uniform_pos();
        }
        return k;
    }
    // PTRS (Hormann 1993): exact transformed rejection, O(1) per draw.
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform_pos();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_lambda - lambda - std::lgamma(k + 1.0)) {
            return static_cast<long>(kf);
        }
    }
}

RandomStream RandomStream::fork(std::uint64_t role) const {
    return RandomStream(seed_, mix64(stream_ ^ mix64(role ^ 0xA5A5A5A55A5A5A5Aull)));
}

}  // namespace levyou
