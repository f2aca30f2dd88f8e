#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "levyou/density.hpp"
#include "levyou/linmodel.hpp"
#include "levyou/rng.hpp"

namespace levyou {

/// Finite-activity Levy driver: total (uncompensated) drift b, Gaussian
/// covariance Q, the absolutely continuous jump component nu0 (jump0) and an
/// optional finite remainder (jump1).
///
/// Convention: `drift` is the raw drift added to the path; no small-jump
/// compensation is performed. A classical triplet (b, Q, nu) with compensated
/// jumps |z| <= 1 maps to drift = b - int_{|z|<=1} z nu(dz) here. Infinite
/// activity tails are out of scope: truncate at `small_jump_truncation` and
/// fold the truncated mean into `drift`.
struct LevyNoise {
    Eigen::VectorXd drift;
    Eigen::MatrixXd gaussian_cov;
    JumpDensity jump0;
    std::optional<JumpDensity> jump1;
    std::optional<double> small_jump_truncation;

    int d() const { return jump0.dim(); }

    /// Q symmetric PSD (min eigenvalue >= -1e-12), dimensions consistent.
    void validate() const;

    bool has_gaussian() const;

    /// Convenience: pure-jump noise driven by nu0 alone.
    static LevyNoise pure_jump(const JumpDensity& jump0);
};

/// One compound-Poisson realization on [0, horizon]: strictly increasing
/// jump times with their (non-zero) sizes.
struct JumpPath {
    double horizon = 0.0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> sizes;

    void validate() const;
    std::size_t size() const { return times.size(); }
};

/// Exact compound-Poisson path: Poisson(lambda0 T) many jumps at uniform
/// order-statistic times, sizes i.i.d. rho0/lambda0.
JumpPath sample_jump_path(const JumpDensity& density, double T, RandomStream& rs);

/// #{jump times in [0, T]} (closed interval: a jump exactly at T counts).
long count_jumps(const JumpPath& path, double T);

/// Precomputed deterministic pieces of the time-t solution map: e^{At}, the
/// accumulated drift, and a Cholesky factor of the Brownian covariance
/// int_0^t e^{A(t-s)} B Q B^T e^{A^T(t-s)} ds (adaptive quadrature + jitter).
struct OUPropagator {
    double t = 0.0;
    Eigen::MatrixXd eAt;
    Eigen::VectorXd drift_term;
    Eigen::MatrixXd gauss_chol;  // empty when Q = 0
    bool zero_A = false;
};

OUPropagator make_propagator(const OUModel& model, const LevyNoise& noise, double t);

/// e^{At}x + sum over jumps (both paths, tau <= t) of e^{A(t-tau)} B xi
/// + accumulated drift + one Gaussian draw with the Brownian covariance.
/// Deterministic given (inputs, rng state).
Eigen::VectorXd ou_terminal_state(const OUPropagator& prop, const OUModel& model,
                                  const JumpPath& path0, const JumpPath* path1,
                                  const Eigen::VectorXd& x, RandomStream& rs);

/// Convenience overload building the propagator on the fly.
Eigen::VectorXd ou_terminal_state(const OUModel& model, const LevyNoise& noise,
                                  const JumpPath& path0, const JumpPath* path1,
                                  const Eigen::VectorXd& x, double t, RandomStream& rs);

/// `replicas` i.i.d. draws of X_t^x. Replica i uses the substream (base, i),
/// so the output is identical for any worker count.
std::vector<Eigen::VectorXd> sample_X(const OUModel& model, const LevyNoise& noise,
                                      const Eigen::VectorXd& x, double t,
                                      std::int64_t replicas, const RandomStream& base,
                                      int workers = 1);

}  // namespace levyou
