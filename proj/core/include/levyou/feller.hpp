#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "levyou/levy.hpp"
#include "levyou/linmodel.hpp"
#include "levyou/mc.hpp"

namespace levyou {

/// Outcome of the controllability checks: the rank of (B, AB, ..., A^{m-1}B)
/// and, when estimate_tm ran, a sampled lower bound for
/// t_m = sup{t : Rank(e^{s_1 A}B, ..., e^{s_m A}B) = n for all ordered
/// tuples in [0, t]}. tm_lower is a statistical lower bound, not a proof;
/// tm_lower == t_max_searched means no failure was found anywhere.
struct RankReport {
    int m = 1;
    int rank_H = 0;
    bool satisfied = false;
    double tm_lower = 0.0;
    long tuples_tested = 0;
    double t_max_searched = 0.0;
};

/// Numerical rank of the n x (m d) block matrix (B, AB, ..., A^{m-1}B)
/// (singular values above n * sigma_max * 1e-12 count).
RankReport rank_condition(const OUModel& model, int m);

/// Bisection for the largest t at which no sampled ordered tuple
/// (s_1 < ... < s_m) in [0, t]^m breaks the exponential rank condition.
/// Tuples per candidate t: `tuple_samples` uniform ordered tuples, plus
/// deterministic clustered tuples (spacing 1e-6, probing the
/// divided-difference degeneracy) and endpoint/equispaced tuples.
/// Returns tm_lower = 0 with satisfied = false when (H) itself fails.
RankReport estimate_tm(const OUModel& model, int m, double t_max, long tuple_samples,
                       RandomStream rs);

using StateTestFn = std::function<double(const Eigen::VectorXd&)>;

/// P_t^m f(x) = E[f(X_t^x) 1_{tau_m <= t ^ (tau_1 + t_m)}] with tau_i the
/// nu0 jump times; pass tm = +inf for the plain {tau_m <= t} event.
MeanEstimate pm_estimate(const StateTestFn& f, const OUModel& model,
                         const LevyNoise& noise, const Eigen::VectorXd& x, double t,
                         int m, double tm, std::int64_t replicas,
                         const RandomStream& base, int workers = 1);

struct SmoothingRow {
    double h = 0.0;
    double increment = 0.0;  ///< |P_t^m f(x) - P_t^m f(x + h e)|
    double std_error = 0.0;
};

/// Empirical strong-Feller modulus: the increment of P_t^m f along direction
/// e at each radius, on common random numbers (h = 0 gives exactly 0).
/// Requires the rank condition for m and tm > 0.
std::vector<SmoothingRow> smoothing_modulus(const StateTestFn& f, const OUModel& model,
                                            const LevyNoise& noise,
                                            const Eigen::VectorXd& x, double t, int m,
                                            double tm, const std::vector<double>& radii,
                                            const Eigen::VectorXd& direction,
                                            std::int64_t replicas,
                                            const RandomStream& base, int workers = 1);

}  // namespace levyou
