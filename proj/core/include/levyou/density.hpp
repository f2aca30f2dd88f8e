#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "levyou/rng.hpp"

namespace levyou {

enum class DensityFamily { gaussian, polynomial_decay, truncated_stable, tabulated, custom };

/// A finite-activity jump density rho0 >= 0 on R^d with total mass
/// lambda0 = int rho0(z) dz in (0, inf). Acts both as an (unnormalized)
/// evaluator z -> rho0(z) and as a sampler for the normalized law rho0/lambda0.
///
/// Families:
///   gaussian(sigma2, lambda0)          rho0 = lambda0 * N(0, sigma2 I)
///   polynomial_decay(c, r)             rho0 = c (1+|z|)^{-r}, r > d
///   truncated_stable(c, alpha, r_cut)  rho0 = c / (|z| v r_cut)^{d+alpha}
///   tabulated(grid, values)            1D piecewise-linear, inverse-CDF sampled
///   custom(...)                        callable + rejection from a Gaussian envelope
class JumpDensity {
  public:
    /// Placeholder with zero mass; build real densities via the factories.
    JumpDensity() = default;

    static JumpDensity gaussian(int dim, double sigma2, double lambda0);
    static JumpDensity polynomial_decay(int dim, double c, double r);
    static JumpDensity truncated_stable(int dim, double c, double alpha, double r_cut);
    static JumpDensity tabulated(std::vector<double> grid, std::vector<double> values);
    /// Custom evaluator with rejection sampling from the Gaussian envelope
    /// envelope_scale * N(0, envelope_sigma2 I) >= rho0 pointwise.
    static JumpDensity custom(int dim, double lambda0,
                              std::function<double(const Eigen::VectorXd&)> evaluator,
                              double envelope_sigma2, double envelope_scale);

    int dim() const { return dim_; }
    double lambda0() const { return lambda0_; }
    DensityFamily family() const { return family_; }

    /// rho0(z)
    double operator()(const Eigen::VectorXd& z) const;

    /// One draw from rho0/lambda0; exact zeros are redrawn (the path space
    /// excludes zero jumps).
    void sample(RandomStream& rs, Eigen::VectorXd& out) const;
    Eigen::VectorXd sample(RandomStream& rs) const;

    /// nu0(B_radius(z0)) by quadrature (d <= 3).
    double ball_mass(const Eigen::VectorXd& z0, double radius) const;

    /// int_{B_radius(z0)} rho0(z)^{-1} dz; +inf when rho0 vanishes somewhere
    /// on the ball (the Thm-3.1-style integrability check).
    double inverse_mass_ball(const Eigen::VectorXd& z0, double radius) const;

    Eigen::VectorXd mode() const;
    double peak() const;

    /// |z| beyond which rho0 < fraction * peak (integration cutoff helper).
    double tail_radius(double fraction) const;

    /// True when rho0 is a non-increasing function of |z| (all built-in
    /// symmetric families); lets V_p take its sup at the boundary radius.
    bool radially_monotone() const;

    /// min(rho0, 1) as a density of its own (mass recomputed by quadrature,
    /// sampling by rejection from this density). Returns *this unchanged
    /// when peak() <= 1.
    JumpDensity clamped_at_one() const;

    /// E[xi] under rho0/lambda0 (quadrature for tabulated/custom; exact 0
    /// for the symmetric families).
    Eigen::VectorXd mean() const;

    /// E[|xi|^2] under rho0/lambda0; +inf when divergent (stable tails).
    double second_moment() const;

  private:
    DensityFamily family_ = DensityFamily::custom;
    int dim_ = 1;
    double lambda0_ = 0.0;

    // gaussian
    double sigma2_ = 1.0;
    // polynomial_decay
    double poly_c_ = 0.0, poly_r_ = 0.0;
    // truncated_stable
    double stable_c_ = 0.0, stable_alpha_ = 0.0, stable_rcut_ = 0.0;
    // tabulated
    struct TabData {
        std::vector<double> grid, values, cum;
    };
    std::shared_ptr<const TabData> tab_;
    // custom
    std::function<double(const Eigen::VectorXd&)> eval_;
    std::function<void(RandomStream&, Eigen::VectorXd&)> custom_sampler_;
    double peak_hint_ = 0.0;
    bool monotone_hint_ = false;
};

}  // namespace levyou
