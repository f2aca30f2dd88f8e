#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "levyou/rng.hpp"

namespace levyou {

/// Result of a Monte Carlo mean. Reproducible: the same
/// (seed, stream family, replicas, sampler) gives a bit-identical mean
/// regardless of the worker count.
struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;     ///< sample std / sqrt(replicas)
    std::int64_t replicas = 0;  ///< replicas requested
    std::uint64_t seed = 0;
    std::int64_t nonfinite = 0; ///< samples excluded as NaN/inf (< 0.1% or the run aborts)
};

/// Per-replica scalar sampler. Replica i receives its own substream.
using Sampler = std::function<double(RandomStream&)>;

/// Per-replica sampler producing several correlated outputs at once
/// (common-random-numbers estimators). Must write exactly `width` values.
using MultiSampler = std::function<void(RandomStream&, double* out)>;

/// Mean and standard error of `sampler` over `replicas` i.i.d. substreams.
///
/// Replica i draws from the substream derived from (base, i); per-replica
/// values are reduced in a fixed pairwise order (Kahan-compensated at the
/// leaves), so the result does not depend on `workers`.
///
/// Non-finite sampler values are counted and excluded from the moments;
/// if they exceed 0.1% of replicas the run aborts with diagnostics.
MeanEstimate mc_reduce(const Sampler& sampler, std::int64_t replicas,
                       const RandomStream& base, int workers = 1);

/// Common-random-numbers variant: one pass over the replicas, `width`
/// correlated means out. Component j of the result reduces the j-th output
/// of every replica. Same determinism contract as mc_reduce.
std::vector<MeanEstimate> mc_reduce_multi(const MultiSampler& sampler, int width,
                                          std::int64_t replicas,
                                          const RandomStream& base, int workers = 1);

/// All per-replica values of a scalar sampler in replica order
/// (for histogram-based estimators that need the raw sample).
std::vector<double> mc_collect(const Sampler& sampler, std::int64_t replicas,
                               const RandomStream& base, int workers = 1);

/// Deterministic pairwise sum with Kahan compensation on the leaf blocks.
double pairwise_sum(const double* values, std::size_t count);

}  // namespace levyou
