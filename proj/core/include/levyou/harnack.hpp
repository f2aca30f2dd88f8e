#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "levyou/density.hpp"
#include "levyou/levy.hpp"
#include "levyou/linmodel.hpp"
#include "levyou/mc.hpp"

namespace levyou {

using ScalarTestFn = std::function<double(const Eigen::VectorXd&)>;

/// V_p(r) = (1/lambda0) sup_{|z'| <= r} int rho0(z - z')^{p/(p-1)}
///          / rho0(z)^{1/(p-1)} dz.
/// Returns +inf (a value, not an exception) when the integral diverges,
/// so hypothesis scans can tabulate applicability regions.
///
/// The sup over |z'| <= r uses the boundary value for radially monotone
/// families (where it is attained at |z'| = r) and a grid + golden-section
/// refinement otherwise.
double compute_vp(const JumpDensity& rho0, double p, double r, double tol = 1e-8,
                  int sup_grid = 64);

/// Tabulated V_p over a radius grid, with the build settings recorded.
struct VpProfile {
    double p = 2.0;
    std::vector<double> radii;
    std::vector<double> values;
    double quadrature_tol = 1e-8;
    int sup_grid_points = 64;
    bool sup_at_boundary = false;  ///< fast path taken (radially monotone rho0)

    /// Piecewise-linear interpolation (exact at the grid points).
    double operator()(double r) const;
};

VpProfile build_vp_profile(const JumpDensity& rho0, double p,
                           const std::vector<double>& radii, double tol = 1e-8,
                           int sup_grid = 64);

/// P_t^1 f(x) = E[f(X_t^x) 1_{tau_1 <= t}], tau_1 = first jump time of the
/// nu0-driven compound-Poisson component.
MeanEstimate p1_estimate(const ScalarTestFn& f, const OUModel& model,
                         const LevyNoise& noise, const Eigen::VectorXd& x, double t,
                         std::int64_t replicas, const RandomStream& base,
                         int workers = 1);

struct HarnackResult {
    double lhs = 0.0;      ///< (P_t^1 f(x))^p
    double rhs = 0.0;      ///< P_t^1 f^p(y) * [(1 - e^{-lambda0 t}) V_p(c e^{||A|| t} |x-y|)]^{p-1}
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    double margin = 0.0;   ///< rhs - lhs
    bool pass = false;     ///< lhs <= rhs + 3 sqrt(lhs_se^2 + rhs_se^2)
    double vp_value = 0.0;
    double radius = 0.0;   ///< c e^{||A|| t} |x - y|
};

/// One Harnack-inequality check with common random numbers across the two
/// endpoint estimates. Requires Rank(B) = n and a finite V_p at the needed
/// radius (else PreconditionError).
HarnackResult harnack_check(const ScalarTestFn& f, const OUModel& model,
                            const LevyNoise& noise, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y, double t, double p,
                            std::int64_t replicas, const RandomStream& base,
                            int workers = 1);

/// The ultracontractivity bound
///   ||P_t^1||_{p->inf} <= (1 - e^{-lambda0 t}) e^{||A|| t / p}
///                         { int dx / V_p(c e^{||A|| t} |x|)^{p-1} }^{-1/p},
/// with the x-integral over R^n by radial quadrature (n <= 3). Returns +inf
/// when that integral diverges (degenerate V_p profile).
double ultracontractivity_bound(const JumpDensity& rho0, double p, double t,
                                const OUModel& model);

/// Compare the semigroup driven by L + L0 (an extra independent compound
/// Poisson with density extra_jump) against e^{-lambda0 t} P_t f: the
/// perturbed semigroup dominates. Returns (lhs = perturbed, rhs = damped)
/// with the e^{-lambda0 t} factor folded into rhs; base-noise randomness is
/// shared between the two sides.
std::pair<MeanEstimate, MeanEstimate> semigroup_comparison_check(
    const OUModel& model, const LevyNoise& noise, const JumpDensity& extra_jump,
    const ScalarTestFn& f, const Eigen::VectorXd& x, double t, std::int64_t replicas,
    const RandomStream& base, int workers = 1);

}  // namespace levyou
