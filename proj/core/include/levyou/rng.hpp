#pragma once

#include <cstdint>

namespace levyou {

/// Counter-based random stream (Philox4x32-10, Salmon et al. SC 2011).
///
/// A stream is identified by (seed, stream_index); the counter advances as
/// values are drawn. Distinct (seed, stream_index) pairs give decorrelated
/// sequences, so replica i of a Monte Carlo run can use stream i and the
/// result is independent of how replicas are scheduled across workers.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index);

    /// Next raw 64-bit word.
    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double uniform();

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos();

    /// Standard normal (Box-Muller; the paired value is cached).
    double normal();

    /// Poisson(lambda). Knuth's product method for small lambda,
    /// Hormann's PTRS transformed rejection for large lambda.
    long poisson(double lambda);

    /// Derive a decorrelated stream for a sub-role (e.g. "the jump sizes of
    /// replica i"). Depends only on (seed, stream_index, role), not on how
    /// much has been drawn from this stream.
    RandomStream fork(std::uint64_t role) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }

  private:
    void refill();

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
    std::uint32_t block_[4] = {0, 0, 0, 0};
    int block_pos_ = 4;  // empty
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// SplitMix64 finalizer; used for stream-id derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace levyou
