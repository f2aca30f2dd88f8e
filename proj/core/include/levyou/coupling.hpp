#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "levyou/density.hpp"
#include "levyou/levy.hpp"
#include "levyou/linmodel.hpp"
#include "levyou/mc.hpp"

namespace levyou {

/// Ball parameters and constants for the coupling weight estimator:
/// the ball B_{eps/2}(z0), its nu0-mass, the second-moment bound
/// sigma = lambda0 int_{B_eps(z0)} rho0^{-1} / nu0(B_{eps/2})^2 for the
/// shifted weights, and the single-step distance cap eps / (2 ||B1^{-1}||).
struct CouplingConfig {
    Eigen::VectorXd z0;
    double eps = 0.0;
    double ball_mass = 0.0;
    double sigma_bound = 0.0;
    double max_step = 0.0;
    double lambda0 = 0.0;
    JumpDensity rho0;
    bool clamped = false;  ///< rho0 was replaced by min(rho0, 1)

    /// Default z0 = mode of rho0; eps by bisection so nu0(B_{eps/2}) =
    /// lambda0/2. `clamp` mirrors the proof's reduction to rho0 <= 1.
    /// Throws PreconditionError when int_{B_eps} rho0^{-1} diverges
    /// (the Thm-3.1 integrability hypothesis).
    static CouplingConfig make(const JumpDensity& density, const ColumnSplit& split,
                               bool clamp = true,
                               std::optional<Eigen::VectorXd> z0 = std::nullopt,
                               std::optional<double> eps = std::nullopt);

    void validate() const;
};

/// A total-variation value in [0, 2] (mutually singular laws have distance 2).
struct TVEstimate {
    enum class Method { weight_bound, histogram, closed_form };
    double value = 0.0;
    double std_error = 0.0;
    Method method = Method::weight_bound;
    double t = 0.0;
    Eigen::VectorXd x, y;
};

enum class WeightKind { unit, eta, eta_tilde };

/// eta(xi) = lambda0 1_{B_{eps/2}(z0)}(xi) / nu0(B_{eps/2}); mean 1 under
/// xi ~ nu0/lambda0.
double weight_eta(const Eigen::VectorXd& xi, const CouplingConfig& cfg);

/// The shifted weight
///   eta~(xi) = lambda0 rho0(xi - v) 1_{B_{eps/2}(z0) + v}(xi)
///              / (nu0(B_{eps/2}) rho0(xi)),
/// v = embed(B1^{-1} e^{A tau} (x - y)); conditional mean 1 given tau.
/// Requires |x - y| <= max_step so the shifted ball stays inside B_eps.
double weight_eta_tilde(const Eigen::VectorXd& xi, double tau,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        const OUModel& model, const ColumnSplit& split,
                        const CouplingConfig& cfg);

/// Monte Carlo estimate of E(1 - (1/lambda0 T) sum_i w_i)^2 over the jumps
/// of a [0, T] compound-Poisson path; the bound is sigma / (lambda0 T).
/// x/y are only used by the eta_tilde weights.
MeanEstimate lemma31_gap(double T, const CouplingConfig& cfg, WeightKind kind,
                         const OUModel& model, const ColumnSplit& split,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         std::int64_t replicas, const RandomStream& base,
                         int workers = 1);

/// The coupling upper estimate for ||P_T(x,.) - P_T(y,.)||_var:
/// E|1 - S~_y| + E|S_x - 1| on common random numbers when |x-y| <= max_step,
/// chained over ceil(2 ||B1^{-1}|| |x-y| / eps) intermediate points otherwise.
/// Checks the Thm 3.1 hypotheses (dissipativity, rank, integrability) and
/// names the failed one.
TVEstimate tv_weight_bound(const OUModel& model, const LevyNoise& noise,
                           const CouplingConfig& cfg, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y, double T, std::int64_t replicas,
                           const RandomStream& base, int workers = 1);

struct HistogramSpec {
    std::optional<double> bin_width;  ///< override the Freedman-Diaconis width
    int max_bins_per_axis = 1024;
    int bootstrap_resamples = 200;
    std::uint64_t bootstrap_seed = 0x5EEDFACEu;
};

/// Histogram total variation sum_cells |p_x - p_y| in [0, 2] with a
/// bootstrap standard error. Shared support and bin width over both samples
/// (Freedman-Diaconis per axis); d <= 3.
TVEstimate tv_histogram(const std::vector<Eigen::VectorXd>& samples_x,
                        const std::vector<Eigen::VectorXd>& samples_y,
                        const HistogramSpec& spec = {});

/// Closed-form reflection-coupling TV for Brownian motion:
/// 2 (sqrt2/sqrtpi) int_0^{|x-y|/(2 sqrt t)} e^{-u^2/2} du, by adaptive
/// quadrature (the coupling-time tail equals half of this value).
double reflection_tv(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double t);

struct BerryEsseenRow {
    double t = 0.0;
    double tv = 0.0;
    double std_error = 0.0;
    double sqrt_t_tv = 0.0;  ///< sqrt(t) * tv; bounded below when 1/sqrt(t) is sharp
};

/// Sharpness experiment: 1D, A=0, B=1, rate-1 compound Poisson with jump law
/// nu (a probability with zero mean, unit variance, finite third absolute
/// moment; verified by quadrature). Estimates TV(x vs 0) by histogram at
/// each t and reports sqrt(t) * TV.
std::vector<BerryEsseenRow> berry_esseen_experiment(const JumpDensity& nu, double x,
                                                    const std::vector<double>& t_grid,
                                                    std::int64_t replicas,
                                                    const RandomStream& base,
                                                    int workers = 1);

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

/// The jump-semigroup comparison P_{t+s} f(x) >= e^{-lambda s} P_t f(x) for
/// A = 0, pure-jump noise with zero effective drift (the classical-triplet
/// condition b = int_{|z|<=1} z nu(dz)). Returns (lhs, rhs) estimates with
/// the e^{-lambda s} factor folded into rhs.
std::pair<MeanEstimate, MeanEstimate> l1_comparison_check(
    const OUModel& model, const LevyNoise& noise, const ScalarFn& f, double t,
    double s, const Eigen::VectorXd& x, std::int64_t replicas,
    const RandomStream& base, int workers = 1);

/// Heat-semigroup dimension inequality P_t f <= ((t+s)/s)^{n/2} P_{t+s} f
/// for f >= 0 (Q = I, A = 0, B = I, k = n). Returns (lhs, rhs) with the
/// dimension factor folded into rhs; common random numbers across the sides.
std::pair<MeanEstimate, MeanEstimate> gaussian_dimension_check(
    int n, const ScalarFn& f, double t, double s, const Eigen::VectorXd& x,
    std::int64_t replicas, const RandomStream& base, int workers = 1);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// OLS fit of log(value) against log(t).
SlopeFit fit_loglog(const std::vector<double>& t, const std::vector<double>& value);

}  // namespace levyou
