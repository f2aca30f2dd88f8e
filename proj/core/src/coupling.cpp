#include "levyou/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"

namespace levyou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The R^d shift vector v(tau) = embed(B1^{-1} e^{A tau} diff) of the
// eta~ weight, with the A = 0 / scalar fast paths.
class ShiftCache {
  public:
    ShiftCache(const OUModel& model, const ColumnSplit& split, Eigen::VectorXd diff)
        : model_(&model), split_(&split), diff_(std::move(diff)) {
        zero_A_ = model.zero_drift();
        scalar_ = (model.n() == 1);
        if (zero_A_) constant_ = split.embed(split.B1_inv * diff_);
        if (scalar_) scalar_base_ = (split.B1_inv * diff_)(0);
    }

    Eigen::VectorXd at(double tau) const {
        if (zero_A_) return constant_;
        if (scalar_) {
            Eigen::VectorXd w(1);
            w(0) = std::exp(model_->A(0, 0) * tau) * scalar_base_;
            return split_->embed(w);
        }
        return split_->embed(split_->B1_inv * (matrix_exp(model_->A, tau) * diff_));
    }

  private:
    const OUModel* model_;
    const ColumnSplit* split_;
    Eigen::VectorXd diff_;
    Eigen::VectorXd constant_;
    double scalar_base_ = 0.0;
    bool zero_A_ = false;
    bool scalar_ = false;
};

double eta_tilde_value(const Eigen::VectorXd& xi, const Eigen::VectorXd& v,
                       const CouplingConfig& cfg) {
    if ((xi - cfg.z0 - v).norm() > 0.5 * cfg.eps) return 0.0;
    const double denom = cfg.rho0(xi);
    if (!(denom > 0.0)) {
        throw InvalidDensity(
            "weight_eta_tilde: rho0 vanishes inside the shifted ball (rho0 > 0 on B_eps required)");
    }
    return cfg.lambda0 * cfg.rho0(xi - v) / (cfg.ball_mass * denom);
}

}  // namespace

CouplingConfig CouplingConfig::make(const JumpDensity& density, const ColumnSplit& split,
                                    bool clamp, std::optional<Eigen::VectorXd> z0,
                                    std::optional<double> eps) {
    CouplingConfig cfg;
    cfg.rho0 = clamp ? density.clamped_at_one() : density;
    cfg.clamped = clamp && (cfg.rho0.lambda0() != density.lambda0());
    cfg.lambda0 = cfg.rho0.lambda0();
    cfg.z0 = z0 ? *z0 : cfg.rho0.mode();
    if (cfg.z0.size() != cfg.rho0.dim()) {
        throw InvalidInput("CouplingConfig: z0 dimension mismatch");
    }

    if (eps) {
        cfg.eps = *eps;
        if (!(cfg.eps > 0.0)) throw InvalidInput("CouplingConfig: eps must be > 0");
        cfg.ball_mass = cfg.rho0.ball_mass(cfg.z0, 0.5 * cfg.eps);
    } else {
        // Bisection for nu0(B_{eps/2}) = lambda0 / 2.
        const double target = 0.5 * cfg.lambda0;
        double lo = 0.0;
        double hi = std::max(1.0, 2.0 * cfg.rho0.tail_radius(0.5));
        while (cfg.rho0.ball_mass(cfg.z0, 0.5 * hi) < target) {
            hi *= 2.0;
            if (hi > 1e12) {
                throw PreconditionError("CouplingConfig: could not reach half the mass by eps growth");
            }
        }
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (cfg.rho0.ball_mass(cfg.z0, 0.5 * mid) < target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        cfg.eps = 0.5 * (lo + hi);
        cfg.ball_mass = cfg.rho0.ball_mass(cfg.z0, 0.5 * cfg.eps);
    }
    if (!(cfg.ball_mass > 0.0)) {
        throw PreconditionError("CouplingConfig: nu0(B_{eps/2}(z0)) = 0");
    }

    const double inv_integral = cfg.rho0.inverse_mass_ball(cfg.z0, cfg.eps);
    if (!std::isfinite(inv_integral)) {
        throw PreconditionError(
            "Thm 3.1: int_{B_eps(z0)} rho0(z)^{-1} dz diverges (integrability hypothesis fails)");
    }
    cfg.sigma_bound = cfg.lambda0 * inv_integral / (cfg.ball_mass * cfg.ball_mass);
    cfg.max_step = 0.5 * cfg.eps / split.b1_inv_norm;
    cfg.validate();
    return cfg;
}

void CouplingConfig::validate() const {
    if (!(eps > 0.0) || !(ball_mass > 0.0) || !(lambda0 > 0.0)) {
        throw InvalidInput("CouplingConfig: eps, ball_mass and lambda0 must be positive");
    }
    if (!std::isfinite(sigma_bound)) {
        throw PreconditionError("Thm 3.1: sigma bound is infinite (rho0^{-1} not integrable on B_eps)");
    }
    // E eta^2 = lambda0 / nu0(B_{eps/2}) lower-bounds the eta~ second moment.
    if (sigma_bound < lambda0 / ball_mass * (1.0 - 1e-9)) {
        throw InternalError("CouplingConfig: sigma bound below the eta second moment");
    }
    if (!(max_step > 0.0)) throw InvalidInput("CouplingConfig: max_step must be > 0");
}

double weight_eta(const Eigen::VectorXd& xi, const CouplingConfig& cfg) {
    if ((xi - cfg.z0).norm() > 0.5 * cfg.eps) return 0.0;
    return cfg.lambda0 / cfg.ball_mass;
}

double weight_eta_tilde(const Eigen::VectorXd& xi, double tau, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y, const OUModel& model,
                        const ColumnSplit& split, const CouplingConfig& cfg) {
    const Eigen::VectorXd diff = x - y;
    if (diff.norm() > cfg.max_step * (1.0 + 1e-12)) {
        throw PreconditionError(
            "weight_eta_tilde: |x - y| > eps / (2 ||B1^{-1}||), shifted ball leaves B_eps");
    }
    const ShiftCache shift(model, split, diff);
    return eta_tilde_value(xi, shift.at(tau), cfg);
}

MeanEstimate lemma31_gap(double T, const CouplingConfig& cfg, WeightKind kind,
                         const OUModel& model, const ColumnSplit& split,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         std::int64_t replicas, const RandomStream& base, int workers) {
    if (!(T > 0.0)) throw InvalidInput("lemma31_gap: T must be > 0");
    const double lam_T = cfg.lambda0 * T;
    const ShiftCache shift(model, split, x - y);
    return mc_reduce(
        [&](RandomStream& rs) {
            const long count = rs.poisson(lam_T);
            double sum = 0.0;
            Eigen::VectorXd xi(cfg.rho0.dim());
            for (long i = 0; i < count; ++i) {
                switch (kind) {
                    case WeightKind::unit:
                        sum += 1.0;
                        break;
                    case WeightKind::eta:
                        cfg.rho0.sample(rs, xi);
                        sum += weight_eta(xi, cfg);
                        break;
                    case WeightKind::eta_tilde: {
                        const double tau = T * rs.uniform();
                        cfg.rho0.sample(rs, xi);
                        sum += eta_tilde_value(xi, shift.at(tau), cfg);
                        break;
                    }
                }
            }
            const double gap = 1.0 - sum / lam_T;
            return gap * gap;
        },
        replicas, base, workers);
}

TVEstimate tv_weight_bound(const OUModel& model, const LevyNoise& noise,
                           const CouplingConfig& cfg, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y, double T, std::int64_t replicas,
                           const RandomStream& base, int workers) {
    model.validate();
    if (!(T > 0.0)) throw InvalidInput("tv_weight_bound: T must be > 0");
    if (x.size() != model.n() || y.size() != model.n()) {
        throw InvalidInput("tv_weight_bound: endpoint dimension mismatch");
    }
    if (!check_dissipative(model.A, 1e-10)) {
        throw PreconditionError("Thm 3.1: <Ax, x> <= 0 fails (symmetric part of A has a positive eigenvalue)");
    }
    ColumnSplit split;
    try {
        split = column_split(model.B);
    } catch (const RankDeficientError&) {
        throw PreconditionError("Thm 3.1: Rank(B) = n fails");
    }
    cfg.validate();
    (void)noise;  // the estimator only involves the nu0 weights

    TVEstimate est;
    est.method = TVEstimate::Method::weight_bound;
    est.t = T;
    est.x = x;
    est.y = y;
    const double dist = (x - y).norm();
    if (dist == 0.0) return est;

    // Chain over m legs when the pair is further apart than one step; every
    // leg has the same difference vector, so with common random numbers the
    // chained bound is exactly m times the single-leg bound.
    long legs = 1;
    if (dist > cfg.max_step) {
        legs = static_cast<long>(std::ceil(2.0 * split.b1_inv_norm * dist / cfg.eps));
    }
    const Eigen::VectorXd diff = (x - y) / static_cast<double>(legs);
    const ShiftCache shift(model, split, diff);
    const double lam_T = cfg.lambda0 * T;

    const MeanEstimate leg = mc_reduce(
        [&](RandomStream& rs) {
            const long count = rs.poisson(lam_T);
            double sum_eta = 0.0;
            double sum_tilde = 0.0;
            Eigen::VectorXd xi(cfg.rho0.dim());
            for (long i = 0; i < count; ++i) {
                const double tau = T * rs.uniform();
                cfg.rho0.sample(rs, xi);
                sum_eta += weight_eta(xi, cfg);
                sum_tilde += eta_tilde_value(xi, shift.at(tau), cfg);
            }
            return std::abs(1.0 - sum_tilde / lam_T) + std::abs(sum_eta / lam_T - 1.0);
        },
        replicas, base, workers);

    est.value = std::min(2.0, static_cast<double>(legs) * leg.mean);
    est.std_error = static_cast<double>(legs) * leg.std_error;
    return est;
}

TVEstimate tv_histogram(const std::vector<Eigen::VectorXd>& samples_x,
                        const std::vector<Eigen::VectorXd>& samples_y,
                        const HistogramSpec& spec) {
    if (samples_x.empty() || samples_y.empty()) {
        throw InvalidInput("tv_histogram: both sample lists must be nonempty");
    }
    const int d = static_cast<int>(samples_x.front().size());
    if (d > 3) {
        throw UnsupportedDimension("tv_histogram: d <= 3 required (use the weight bound instead)");
    }

    const std::size_t nx = samples_x.size();
    const std::size_t ny = samples_y.size();
    const double combined = static_cast<double>(nx + ny);

    // Freedman-Diaconis width per axis on the pooled sample; shared support.
    std::vector<double> lo(d), hi(d), width(d);
    std::vector<int> bins(d);
    std::vector<double> axis(nx + ny);
    long total_cells = 1;
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < nx; ++i) axis[i] = samples_x[i](k);
        for (std::size_t i = 0; i < ny; ++i) axis[nx + i] = samples_y[i](k);
        std::sort(axis.begin(), axis.end());
        lo[k] = axis.front();
        hi[k] = axis.back();
        const double q1 = axis[static_cast<std::size_t>(0.25 * (combined - 1))];
        const double q3 = axis[static_cast<std::size_t>(0.75 * (combined - 1))];
        double w = spec.bin_width ? *spec.bin_width
                                  : 2.0 * (q3 - q1) / std::cbrt(combined);
        const double range = hi[k] - lo[k];
        if (!(w > 0.0)) w = range > 0.0 ? range / 64.0 : 1.0;
        int nb = range > 0.0 ? static_cast<int>(std::ceil(range / w)) : 1;
        nb = std::clamp(nb, 1, spec.max_bins_per_axis);
        bins[k] = nb;
        width[k] = range > 0.0 ? range / nb : 1.0;
        total_cells *= nb;
        if (total_cells > (1L << 24)) {
            throw InvalidInput("tv_histogram: bin grid too large");
        }
    }

    auto cell_of = [&](const Eigen::VectorXd& z) {
        long idx = 0;
        for (int k = 0; k < d; ++k) {
            int b = static_cast<int>((z(k) - lo[k]) / width[k]);
            b = std::clamp(b, 0, bins[k] - 1);
            idx = idx * bins[k] + b;
        }
        return idx;
    };

    std::vector<double> cx(static_cast<std::size_t>(total_cells), 0.0);
    std::vector<double> cy(static_cast<std::size_t>(total_cells), 0.0);
    for (const auto& z : samples_x) cx[static_cast<std::size_t>(cell_of(z))] += 1.0;
    for (const auto& z : samples_y) cy[static_cast<std::size_t>(cell_of(z))] += 1.0;

    auto tv_of = [&](const std::vector<double>& a, const std::vector<double>& b,
                     double na, double nb2) {
        double tv = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            tv += std::abs(a[i] / na - b[i] / nb2);
        }
        return tv;
    };

    TVEstimate est;
    est.method = TVEstimate::Method::histogram;
    est.value = tv_of(cx, cy, static_cast<double>(nx), static_cast<double>(ny));

    // Poisson bootstrap of the cell counts (equivalent to resampling the
    // data for a counts-only statistic, up to total-count jitter).
    RandomStream rs(spec.bootstrap_seed, 0);
    std::vector<double> bx(cx.size()), by(cy.size());
    double mean = 0.0, m2 = 0.0;
    for (int rep = 0; rep < spec.bootstrap_resamples; ++rep) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < cx.size(); ++i) {
            bx[i] = static_cast<double>(rs.poisson(cx[i]));
            by[i] = static_cast<double>(rs.poisson(cy[i]));
            sx += bx[i];
            sy += by[i];
        }
        if (sx == 0.0 || sy == 0.0) continue;
        const double tv = tv_of(bx, by, sx, sy);
        const double delta = tv - mean;
        mean += delta / (rep + 1);
        m2 += delta * (tv - mean);
    }
    if (spec.bootstrap_resamples > 1) {
        est.std_error = std::sqrt(std::max(0.0, m2 / (spec.bootstrap_resamples - 1)));
    }
    return est;
}

double reflection_tv(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double t) {
    if (!(t > 0.0)) throw InvalidInput("reflection_tv: t must be > 0");
    const double r = (x - y).norm() / (2.0 * std::sqrt(t));
    if (r == 0.0) return 0.0;
    const double integral =
        integrate([](double u) { return std::exp(-0.5 * u * u); }, 0.0, r, 1e-10);
    return 2.0 * std::sqrt(2.0 / M_PI) * integral;
}

std::vector<BerryEsseenRow> berry_esseen_experiment(const JumpDensity& nu, double x,
                                                    const std::vector<double>& t_grid,
                                                    std::int64_t replicas,
                                                    const RandomStream& base,
                                                    int workers) {
    if (nu.dim() != 1) throw InvalidInput("berry_esseen_experiment: nu must be 1D");
    if (std::abs(nu.lambda0() - 1.0) > 1e-8) {
        throw PreconditionError("Remark (2): nu must be a probability measure (lambda0 = 1)");
    }
    // Moment preconditions by quadrature: mean 0, variance 1, E|z|^3 < inf.
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(1);
    const double r0 = std::max(1.0, nu.tail_radius(0.5));
    const TailResult m1 = rd_integral(
        [&](const Eigen::VectorXd& z) { return z(0) * nu(z); }, origin, r0, 1e-9);
    const TailResult m2 = rd_integral(
        [&](const Eigen::VectorXd& z) { return z(0) * z(0) * nu(z); }, origin, r0, 1e-9);
    const TailResult m3 = rd_integral(
        [&](const Eigen::VectorXd& z) { return std::abs(z(0)) * z(0) * z(0) * nu(z); },
        origin, r0, 1e-9);
    if (m1.diverged || std::abs(m1.value) > 1e-6) {
        throw PreconditionError("Remark (2): nu must have zero mean");
    }
    if (m2.diverged || std::abs(m2.value - 1.0) > 1e-6) {
        throw PreconditionError("Remark (2): nu must have unit variance");
    }
    if (m3.diverged) {
        throw PreconditionError("Remark (2): nu must have a finite third absolute moment");
    }

    std::vector<BerryEsseenRow> rows;
    rows.reserve(t_grid.size());
    std::uint64_t family = 1;
    for (double t : t_grid) {
        auto cp_sampler = [&](double start) {
            return [&nu, t, start](RandomStream& rs) {
                const long count = rs.poisson(t);
                double sum = start;
                Eigen::VectorXd xi(1);
                for (long i = 0; i < count; ++i) {
                    nu.sample(rs, xi);
                    sum += xi(0);
                }
                return sum;
            };
        };
        const std::vector<double> sx =
            mc_collect(cp_sampler(x), replicas, base.fork(family++), workers);
        const std::vector<double> sy =
            mc_collect(cp_sampler(0.0), replicas, base.fork(family++), workers);
        std::vector<Eigen::VectorXd> vx(sx.size()), vy(sy.size());
        for (std::size_t i = 0; i < sx.size(); ++i) {
            vx[i] = Eigen::VectorXd::Constant(1, sx[i]);
            vy[i] = Eigen::VectorXd::Constant(1, sy[i]);
        }
        const TVEstimate tv = tv_histogram(vx, vy);
        BerryEsseenRow row;
        row.t = t;
        row.tv = tv.value;
        row.std_error = tv.std_error;
        row.sqrt_t_tv = std::sqrt(t) * tv.value;
        rows.push_back(row);
    }
    return rows;
}

std::pair<MeanEstimate, MeanEstimate> l1_comparison_check(
    const OUModel& model, const LevyNoise& noise, const ScalarFn& f, double t, double s,
    const Eigen::VectorXd& x, std::int64_t replicas, const RandomStream& base,
    int workers) {
    model.validate();
    noise.validate();
    if (!model.zero_drift()) {
        throw PreconditionError("l1_comparison_check: A = 0 required");
    }
    if (noise.has_gaussian()) {
        throw PreconditionError("l1_comparison_check: pure-jump noise required (Q = 0)");
    }
    if (!noise.drift.isZero(1e-12)) {
        throw PreconditionError(
            "l1_comparison_check: zero effective drift required (b = int_{|z|<=1} z nu(dz))");
    }
    if (!(t > 0.0) || !(s > 0.0)) throw InvalidInput("l1_comparison_check: t, s must be > 0");

    double lambda = noise.jump0.lambda0();
    if (noise.jump1) lambda += noise.jump1->lambda0();

    auto terminal = [&](double horizon) {
        return [&, horizon](RandomStream& rs) {
            const JumpPath p0 = sample_jump_path(noise.jump0, horizon, rs);
            Eigen::VectorXd state = x;
            for (const auto& z : p0.sizes) state += model.B * z;
            if (noise.jump1) {
                const JumpPath p1 = sample_jump_path(*noise.jump1, horizon, rs);
                for (const auto& z : p1.sizes) state += model.B * z;
            }
            return f(state);
        };
    };

    MeanEstimate lhs = mc_reduce(terminal(t + s), replicas, base.fork(1), workers);
    MeanEstimate rhs = mc_reduce(terminal(t), replicas, base.fork(2), workers);
    const double factor = std::exp(-lambda * s);
    rhs.mean *= factor;
    rhs.std_error *= factor;
    return {lhs, rhs};
}

std::pair<MeanEstimate, MeanEstimate> gaussian_dimension_check(
    int n, const ScalarFn& f, double t, double s, const Eigen::VectorXd& x,
    std::int64_t replicas, const RandomStream& base, int workers) {
    if (n < 1 || x.size() != n) throw InvalidInput("gaussian_dimension_check: bad dimension");
    if (!(t > 0.0) || !(s > 0.0)) throw InvalidInput("gaussian_dimension_check: t, s must be > 0");
    const double sd_t = std::sqrt(t);
    const double sd_ts = std::sqrt(t + s);
    const auto estimates = mc_reduce_multi(
        [&](RandomStream& rs, double* out) {
            Eigen::VectorXd g(n);
            for (int i = 0; i < n; ++i) g(i) = rs.normal();
            out[0] = f(x + sd_t * g);
            out[1] = f(x + sd_ts * g);
        },
        2, replicas, base, workers);
    MeanEstimate lhs = estimates[0];
    MeanEstimate rhs = estimates[1];
    const double factor = std::pow((t + s) / s, 0.5 * n);
    rhs.mean *= factor;
    rhs.std_error *= factor;
    return {lhs, rhs};
}

SlopeFit fit_loglog(const std::vector<double>& t, const std::vector<double>& value) {
    if (t.size() != value.size() || t.size() < 2) {
        throw InvalidInput("fit_loglog: need at least two matching points");
    }
    const std::size_t n = t.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(t[i] > 0.0) || !(value[i] > 0.0)) {
            throw InvalidInput("fit_loglog: all points must be positive");
        }
        const double lx = std::log(t[i]);
        const double ly = std::log(value[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double dn = static_cast<double>(n);
    const double cov = sxy - sx * sy / dn;
    const double varx = sxx - sx * sx / dn;
    const double vary = syy - sy * sy / dn;
    SlopeFit fit;
    fit.slope = cov / varx;
    fit.intercept = (sy - fit.slope * sx) / dn;
    fit.r2 = vary > 0.0 ? (cov * cov) / (varx * vary) : 1.0;
    return fit;
}

}  // namespace levyou
