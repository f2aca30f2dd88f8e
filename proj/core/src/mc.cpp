#include "levyou/mc.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "levyou/errors.hpp"

namespace levyou {

namespace {

constexpr std::size_t kLeafBlock = 64;

double kahan_block(const double* v, std::size_t n) {
    double sum = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = v[i] - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Runs `fn(i)` for i in [0, replicas) across `workers` threads. The work is
// chunked contiguously; fn must only write to replica-indexed slots.
void parallel_for(std::int64_t replicas, int workers,
                  const std::function<void(std::int64_t)>& fn) {
    if (workers <= 1 || replicas < 2) {
        for (std::int64_t i = 0; i < replicas; ++i) fn(i);
        return;
    }
    const int nthreads = static_cast<int>(std::min<std::int64_t>(workers, replicas));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::int64_t chunk = (replicas + nthreads - 1) / nthreads;
    for (int w = 0; w < nthreads; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min<std::int64_t>(replicas, lo + chunk);
        pool.emplace_back([&, lo, hi]() {
            try {
                for (std::int64_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

MeanEstimate reduce_column(const std::vector<double>& values, std::int64_t stride,
                           std::int64_t column, std::int64_t replicas,
                           std::uint64_t seed) {
    // Gather the column, count non-finite entries.
    std::vector<double> col(static_cast<std::size_t>(replicas));
    std::int64_t nonfinite = 0;
    std::int64_t first_bad = -1;
    for (std::int64_t i = 0; i < replicas; ++i) {
        const double v = values[static_cast<std::size_t>(i * stride + column)];
        if (!std::isfinite(v)) {
            ++nonfinite;
            if (first_bad < 0) first_bad = i;
            col[static_cast<std::size_t>(i)] = 0.0;
        } else {
            col[static_cast<std::size_t>(i)] = v;
        }
    }
    if (nonfinite * 1000 > replicas) {
        std::ostringstream msg;
        msg << "mc_reduce: " << nonfinite << " of " << replicas
            << " samples non-finite (> 0.1%); first bad replica " << first_bad
            << ", seed " << seed;
        throw InternalError(msg.str());
    }
    const std::int64_t n = replicas - nonfinite;
    MeanEstimate est;
    est.replicas = replicas;
    est.seed = seed;
    est.nonfinite = nonfinite;
    if (n == 0) return est;
    const double sum = pairwise_sum(col.data(), col.size());
    est.mean = sum / static_cast<double>(n);
    if (n > 1) {
        std::vector<double> sq(col.size(), 0.0);
        for (std::size_t i = 0; i < col.size(); ++i) {
            const double d = col[i] - est.mean;
            sq[i] = d * d;
        }
        // Non-finite slots hold (0 - mean)^2; subtract them back out.
        double correction = 0.0;
        if (nonfinite > 0) correction = static_cast<double>(nonfinite) * est.mean * est.mean;
        const double ss = pairwise_sum(sq.data(), sq.size()) - correction;
        const double var = std::max(0.0, ss / static_cast<double>(n - 1));
        est.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return est;
}

}  // namespace

double pairwise_sum(const double* values, std::size_t count) {
    if (count <= kLeafBlock) return kahan_block(values, count);
    const std::size_t half = count / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

MeanEstimate mc_reduce(const Sampler& sampler, std::int64_t replicas,
                       const RandomStream& base, int workers) {
    if (replicas < 1) throw InvalidInput("mc_reduce: replicas must be >= 1");
    std::vector<double> values(static_cast<std::size_t>(replicas));
    parallel_for(replicas, workers, [&](std::int64_t i) {
        RandomStream rs = base.fork(static_cast<std::uint64_t>(i));
        values[static_cast<std::size_t>(i)] = sampler(rs);
    });
    return reduce_column(values, 1, 0, replicas, base.seed());
}

std::vector<MeanEstimate> mc_reduce_multi(const MultiSampler& sampler, int width,
                                          std::int64_t replicas,
                                          const RandomStream& base, int workers) {
    if (replicas < 1) throw InvalidInput("mc_reduce_multi: replicas must be >= 1");
    if (width < 1) throw InvalidInput("mc_reduce_multi: width must be >= 1");
    std::vector<double> values(static_cast<std::size_t>(replicas * width));
    parallel_for(replicas, workers, [&](std::int64_t i) {
        RandomStream rs = base.fork(static_cast<std::uint64_t>(i));
        sampler(rs, values.data() + i * width);
    });
    std::vector<MeanEstimate> out;
    out.reserve(static_cast<std::size_t>(width));
    for (int j = 0; j < width; ++j) {
        out.push_back(reduce_column(values, width, j, replicas, base.seed()));
    }
    return out;
}

std::vector<double> mc_collect(const Sampler& sampler, std::int64_t replicas,
                               const RandomStream& base, int workers) {
    if (replicas < 1) throw InvalidInput("mc_collect: replicas must be >= 1");
    std::vector<double> values(static_cast<std::size_t>(replicas));
    parallel_for(replicas, workers, [&](std::int64_t i) {
        RandomStream rs = base.fork(static_cast<std::uint64_t>(i));
        values[static_cast<std::size_t>(i)] = sampler(rs);
    });
    return values;
}

}  // namespace levyou
