#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

#include "levyou/density.hpp"
#include "levyou/levy.hpp"
#include "levyou/mc.hpp"

namespace levyou {

/// A random path shift w -> w + xi 1_{[tau, infty)}. Characterized by the
/// joint density g of (L, xi, tau) relative to L(dw) nu0(dz) dt plus an
/// atom of mass eps_atom at xi = 0 (data-model only: sampling requires
/// eps_atom = 0, since a zero shift does not move the path).
///
/// For an independent product shift with xi-law p(z) dz and tau-density k(t),
/// g(w, z, t) = (p(z) / rho0(z)) k(t), independent of w ("factorized").
struct ShiftSpec {
    std::function<double(const JumpPath&, const Eigen::VectorXd&, double)> g;
    std::function<void(RandomStream&, Eigen::VectorXd&)> sample_xi;
    std::function<double(RandomStream&)> sample_tau;
    double horizon = 0.0;
    double eps_atom = 0.0;
    bool factorized = true;  ///< g ignores its path argument

    /// xi ~ nu0/lambda0, tau ~ U[0,T]: g = 1_{[0,T]}(t) / (lambda0 T), so
    /// U(w) = n_T(w) / (lambda0 T).
    static ShiftSpec nu0_uniform(const JumpDensity& rho0, double T);

    /// xi ~ nu0 restricted to the ball B_radius(z0), tau ~ U[0,T]:
    /// g = 1_{B}(z) 1_{[0,T]}(t) / (T nu0(B)).
    static ShiftSpec ball_restricted(const JumpDensity& rho0, const Eigen::VectorXd& z0,
                                     double radius, double T);
};

/// The path with one extra jump (xi at tau), times kept sorted.
/// Throws on xi = 0 (invalid shift) or tau outside [0, horizon].
JumpPath shift_path(const JumpPath& path, const Eigen::VectorXd& xi, double tau);

/// Remove the jump at index `idx` (helper for the density sum).
JumpPath remove_jump(const JumpPath& path, std::size_t idx);

/// U(w) = eps + sum over jumps (t, dw) of g(w - dw 1_{[t,inf)}, dw, t).
/// Always >= 0; a negative g value raises InvalidDensity.
double density_U(const JumpPath& path, const ShiftSpec& spec, double T);

/// Test functional for the Mecke identity: F(configuration, point) where a
/// configuration is a JumpPath over R^d x [0, T] and the point is (z, t).
using MeckeFn =
    std::function<double(const JumpPath&, const Eigen::VectorXd&, double)>;

/// Monte Carlo estimates of both sides of the Mecke identity with intensity
/// sigma = nu0 x Lebesgue on R^d x [0,T]:
///   LHS: E int F(gamma + delta_z, z) sigma(dz)
///   RHS: E sum_{z in gamma} F(gamma, z)
std::pair<MeanEstimate, MeanEstimate> mecke_check(const MeckeFn& F,
                                                  const JumpDensity& density, double T,
                                                  std::int64_t replicas,
                                                  const RandomStream& base,
                                                  int workers = 1);

/// Path functional for the conditional Girsanov identity.
using PathFn = std::function<double(const JumpPath&)>;

/// Monte Carlo estimates of both sides of
///   E[(F 1_{U>0})(L0)] = E[(F 1_{U>0} / U)(L0 + xi 1_{[tau,inf)})].
/// Requires eps_atom = 0; U on a shifted path is positive by construction
/// (it gained a jump), and a zero value raises InternalError.
std::pair<MeanEstimate, MeanEstimate> girsanov_check(const PathFn& F,
                                                     const ShiftSpec& spec,
                                                     const JumpDensity& rho0, double T,
                                                     std::int64_t replicas,
                                                     const RandomStream& base,
                                                     int workers = 1);

}  // namespace levyou
