#include "levyou/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"

namespace levyou {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gauss_pdf(double norm2, int d, double sigma2) {
    return std::pow(2.0 * M_PI * sigma2, -0.5 * d) * std::exp(-0.5 * norm2 / sigma2);
}

void sample_unit_direction(RandomStream& rs, Eigen::VectorXd& out) {
    double norm2 = 0.0;
    do {
        for (int i = 0; i < out.size(); ++i) out(i) = rs.normal();
        norm2 = out.squaredNorm();
    } while (norm2 == 0.0);
    out /= std::sqrt(norm2);
}

// log Beta(a, b)
double lbeta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

JumpDensity JumpDensity::gaussian(int dim, double sigma2, double lambda0) {
    if (dim < 1) throw InvalidInput("JumpDensity::gaussian: dim must be >= 1");
    if (!(sigma2 > 0.0) || !(lambda0 > 0.0) || !std::isfinite(sigma2) ||
        !std::isfinite(lambda0)) {
        throw InvalidInput("JumpDensity::gaussian: sigma2 and lambda0 must be positive finite");
    }
    JumpDensity jd;
    jd.family_ = DensityFamily::gaussian;
    jd.dim_ = dim;
    jd.lambda0_ = lambda0;
    jd.sigma2_ = sigma2;
    return jd;
}

JumpDensity JumpDensity::polynomial_decay(int dim, double c, double r) {
    if (dim < 1) throw InvalidInput("JumpDensity::polynomial_decay: dim must be >= 1");
    if (!(c > 0.0) || !(r > dim)) {
        throw InvalidInput("JumpDensity::polynomial_decay: need c > 0 and r > d for integrability");
    }
    JumpDensity jd;
    jd.family_ = DensityFamily::polynomial_decay;
    jd.dim_ = dim;
    jd.poly_c_ = c;
    jd.poly_r_ = r;
    // lambda0 = c * |S^{d-1}| * Beta(d, r - d)
    jd.lambda0_ = c * unit_sphere_area(dim) * std::exp(lbeta(dim, r - dim));
    return jd;
}

JumpDensity JumpDensity::truncated_stable(int dim, double c, double alpha, double r_cut) {
    if (dim < 1) throw InvalidInput("JumpDensity::truncated_stable: dim must be >= 1");
    if (!(c > 0.0) || !(alpha > 0.0) || alpha >= 2.0 || !(r_cut > 0.0)) {
        throw InvalidInput("JumpDensity::truncated_stable: need c > 0, alpha in (0,2), r_cut > 0");
    }
    JumpDensity jd;
    jd.family_ = DensityFamily::truncated_stable;
    jd.dim_ = dim;
    jd.stable_c_ = c;
    jd.stable_alpha_ = alpha;
    jd.stable_rcut_ = r_cut;
    jd.lambda0_ = c * unit_sphere_area(dim) * std::pow(r_cut, -alpha) *
                  (1.0 / dim + 1.0 / alpha);
    return jd;
}

JumpDensity JumpDensity::tabulated(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size() || grid.size() < 2) {
        throw InvalidInput("JumpDensity::tabulated: grid/values must have equal size >= 2");
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1])) {
            throw InvalidInput("JumpDensity::tabulated: grid must be strictly increasing");
        }
    }
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InvalidInput("JumpDensity::tabulated: values must be finite and >= 0");
        }
    }
    auto tab = std::make_shared<TabData>();
    tab->grid = std::move(grid);
    tab->values = std::move(values);
    tab->cum.assign(tab->grid.size(), 0.0);
    for (std::size_t i = 1; i < tab->grid.size(); ++i) {
        const double w = tab->grid[i] - tab->grid[i - 1];
        tab->cum[i] = tab->cum[i - 1] + 0.5 * (tab->values[i] + tab->values[i - 1]) * w;
    }
    if (!(tab->cum.back() > 0.0)) {
        throw InvalidInput("JumpDensity::tabulated: density must have positive mass");
    }
    JumpDensity jd;
    jd.family_ = DensityFamily::tabulated;
    jd.dim_ = 1;
    jd.lambda0_ = tab->cum.back();
    jd.tab_ = std::move(tab);
    return jd;
}

JumpDensity JumpDensity::custom(int dim, double lambda0,
                                std::function<double(const Eigen::VectorXd&)> evaluator,
                                double envelope_sigma2, double envelope_scale) {
    if (dim < 1 || !(lambda0 > 0.0) || !(envelope_sigma2 > 0.0) || !(envelope_scale > 0.0)) {
        throw InvalidInput("JumpDensity::custom: bad parameters");
    }
    JumpDensity jd;
    jd.family_ = DensityFamily::custom;
    jd.dim_ = dim;
    jd.lambda0_ = lambda0;
    jd.eval_ = std::move(evaluator);
    const double sigma2 = envelope_sigma2;
    const double scale = envelope_scale;
    const auto eval = jd.eval_;
    jd.custom_sampler_ = [dim, sigma2, scale, eval](RandomStream& rs, Eigen::VectorXd& out) {
        const double sd = std::sqrt(sigma2);
        for (long attempt = 0; attempt < 1000000; ++attempt) {
            for (int i = 0; i < dim; ++i) out(i) = sd * rs.normal();
            const double envelope = scale * gauss_pdf(out.squaredNorm(), dim, sigma2);
            const double target = eval(out);
            if (target > envelope * (1.0 + 1e-9)) {
                throw InternalError("JumpDensity::custom: envelope does not dominate the density");
            }
            if (rs.uniform() * envelope <= target) return;
        }
        throw InternalError("JumpDensity::custom: rejection sampler failed to accept");
    };
    return jd;
}

double JumpDensity::operator()(const Eigen::VectorXd& z) const {
    switch (family_) {
        case DensityFamily::gaussian:
            return lambda0_ * gauss_pdf(z.squaredNorm(), dim_, sigma2_);
        case DensityFamily::polynomial_decay:
            return poly_c_ * std::pow(1.0 + z.norm(), -poly_r_);
        case DensityFamily::truncated_stable:
            return stable_c_ *
                   std::pow(std::max(z.norm(), stable_rcut_), -(dim_ + stable_alpha_));
        case DensityFamily::tabulated: {
            const double x = z(0);
            const auto& g = tab_->grid;
            if (x < g.front() || x > g.back()) return 0.0;
            const auto it = std::upper_bound(g.begin(), g.end(), x);
            const std::size_t i = std::min<std::size_t>(g.size() - 1,
                                                        static_cast<std::size_t>(it - g.begin()));
            const std::size_t lo = i == 0 ? 0 : i - 1;
            const double w = g[lo + 1] - g[lo];
            const double frac = (x - g[lo]) / w;
            return tab_->values[lo] * (1.0 - frac) + tab_->values[lo + 1] * frac;
        }
        case DensityFamily::custom:
            return eval_(z);
    }
    return 0.0;
}

void JumpDensity::sample(RandomStream& rs, Eigen::VectorXd& out) const {
    out.resize(dim_);
    for (;;) {
        switch (family_) {
            case DensityFamily::gaussian: {
                const double sd = std::sqrt(sigma2_);
                for (int i = 0; i < dim_; ++i) out(i) = sd * rs.normal();
                break;
            }
            case DensityFamily::polynomial_decay: {
                double s;
                if (dim_ == 1) {
                    s = std::pow(rs.uniform_pos(), -1.0 / (poly_r_ - 1.0)) - 1.0;
                    out(0) = (rs.next_u64() & 1u) ? s : -s;
                    break;
                }
                // Propose (1+s) Pareto with index r-d, accept with (s/(1+s))^{d-1}.
                for (;;) {
                    s = std::pow(rs.uniform_pos(), -1.0 / (poly_r_ - dim_)) - 1.0;
                    const double accept = std::pow(s / (1.0 + s), dim_ - 1);
                    if (rs.uniform() <= accept) break;
                }
                sample_unit_direction(rs, out);
                out *= s;
                break;
            }
            case DensityFamily::truncated_stable: {
                const double p_core = stable_alpha_ / (stable_alpha_ + dim_);
                double s;
                if (rs.uniform() < p_core) {
                    s = stable_rcut_ * std::pow(rs.uniform_pos(), 1.0 / dim_);
                } else {
                    s = stable_rcut_ * std::pow(rs.uniform_pos(), -1.0 / stable_alpha_);
                }
                if (dim_ == 1) {
                    out(0) = (rs.next_u64() & 1u) ? s : -s;
                } else {
                    sample_unit_direction(rs, out);
                    out *= s;
                }
                break;
            }
            case DensityFamily::tabulated: {
                const auto& t = *tab_;
                const double target = rs.uniform_pos() * lambda0_;
                const auto it = std::lower_bound(t.cum.begin(), t.cum.end(), target);
                std::size_t i = static_cast<std::size_t>(it - t.cum.begin());
                if (i == 0) i = 1;
                if (i >= t.cum.size()) i = t.cum.size() - 1;
                const double m = target - t.cum[i - 1];
                const double w = t.grid[i] - t.grid[i - 1];
                const double a = t.values[i - 1];
                const double b = t.values[i];
                double xi;
                if (std::abs(b - a) < 1e-14 * (a + b + 1e-300)) {
                    xi = a > 0.0 ? m / a : 0.5 * w;
                } else {
                    const double slope = (b - a) / w;
                    xi = (-a + std::sqrt(std::max(0.0, a * a + 2.0 * slope * m))) / slope;
                }
                out(0) = t.grid[i - 1] + std::clamp(xi, 0.0, w);
                break;
            }
            case DensityFamily::custom:
                custom_sampler_(rs, out);
                break;
        }
        if (!out.isZero(0.0)) return;  // zero jumps are excluded from path space
    }
}

Eigen::VectorXd JumpDensity::sample(RandomStream& rs) const {
    Eigen::VectorXd out(dim_);
    sample(rs, out);
    return out;
}

double JumpDensity::ball_mass(const Eigen::VectorXd& z0, double radius) const {
    if (z0.size() != dim_) throw InvalidInput("ball_mass: center dimension mismatch");
    return ball_integral([this](const Eigen::VectorXd& z) { return (*this)(z); }, z0,
                         radius, 1e-10);
}

double JumpDensity::inverse_mass_ball(const Eigen::VectorXd& z0, double radius) const {
    if (z0.size() != dim_) throw InvalidInput("inverse_mass_ball: center dimension mismatch");
    bool vanished = false;
    const double value = ball_integral(
        [this, &vanished](const Eigen::VectorXd& z) {
            const double rho = (*this)(z);
            if (rho <= 0.0) {
                vanished = true;
                return 0.0;
            }
            return 1.0 / rho;
        },
        z0, radius, 1e-10);
    return vanished ? kInf : value;
}

Eigen::VectorXd JumpDensity::mode() const {
    if (family_ == DensityFamily::tabulated) {
        const auto& t = *tab_;
        const std::size_t i =
            static_cast<std::size_t>(std::max_element(t.values.begin(), t.values.end()) -
                                     t.values.begin());
        Eigen::VectorXd m(1);
        m(0) = t.grid[i];
        return m;
    }
    // All other built-in families peak at the origin.
    return Eigen::VectorXd::Zero(dim_);
}

double JumpDensity::peak() const {
    switch (family_) {
        case DensityFamily::gaussian:
            return lambda0_ * gauss_pdf(0.0, dim_, sigma2_);
        case DensityFamily::polynomial_decay:
            return poly_c_;
        case DensityFamily::truncated_stable:
            return stable_c_ * std::pow(stable_rcut_, -(dim_ + stable_alpha_));
        case DensityFamily::tabulated:
            return *std::max_element(tab_->values.begin(), tab_->values.end());
        case DensityFamily::custom: {
            if (peak_hint_ > 0.0) return peak_hint_;
            return (*this)(mode());
        }
    }
    return 0.0;
}

double JumpDensity::tail_radius(double fraction) const {
    if (!(fraction > 0.0) || fraction >= 1.0) {
        throw InvalidInput("tail_radius: fraction must be in (0,1)");
    }
    switch (family_) {
        case DensityFamily::gaussian:
            return std::sqrt(-2.0 * sigma2_ * std::log(fraction));
        case DensityFamily::polynomial_decay:
            return std::pow(fraction, -1.0 / poly_r_) - 1.0;
        case DensityFamily::truncated_stable:
            return stable_rcut_ * std::pow(fraction, -1.0 / (dim_ + stable_alpha_));
        case DensityFamily::tabulated:
            return std::max(std::abs(tab_->grid.front()), std::abs(tab_->grid.back()));
        case DensityFamily::custom: {
            // Expand until the evaluator drops below fraction * peak in all axis directions.
            const double pk = peak();
            double r = 1.0;
            Eigen::VectorXd z = Eigen::VectorXd::Zero(dim_);
            for (int it = 0; it < 60; ++it) {
                bool small_everywhere = true;
                for (int axis = 0; axis < dim_ && small_everywhere; ++axis) {
                    z.setZero();
                    z(axis) = r;
                    if ((*this)(z) >= fraction * pk) small_everywhere = false;
                    z(axis) = -r;
                    if ((*this)(z) >= fraction * pk) small_everywhere = false;
                }
                if (small_everywhere) return r;
                r *= 2.0;
            }
            return r;
        }
    }
    return 1.0;
}

bool JumpDensity::radially_monotone() const {
    switch (family_) {
        case DensityFamily::gaussian:
        case DensityFamily::polynomial_decay:
        case DensityFamily::truncated_stable:
            return true;
        case DensityFamily::custom:
            return monotone_hint_;
        default:
            return false;
    }
}

JumpDensity JumpDensity::clamped_at_one() const {
    if (peak() <= 1.0) return *this;
    const JumpDensity base = *this;
    auto clamped_eval = [base](const Eigen::VectorXd& z) {
        return std::min(base(z), 1.0);
    };
    // Mass of min(rho0, 1) over R^d.
    const double r0 = std::max(1.0, base.tail_radius(0.5));
    TailResult mass = rd_integral(clamped_eval, Eigen::VectorXd::Zero(dim_), r0, 1e-10);
    if (mass.diverged || !(mass.value > 0.0)) {
        throw InternalError("clamped_at_one: clamped mass did not converge");
    }
    JumpDensity jd;
    jd.family_ = DensityFamily::custom;
    jd.dim_ = dim_;
    jd.lambda0_ = mass.value;
    jd.eval_ = clamped_eval;
    jd.custom_sampler_ = [base](RandomStream& rs, Eigen::VectorXd& out) {
        // Rejection from the unclamped density: accept with min(rho0,1)/rho0.
        for (long attempt = 0; attempt < 1000000; ++attempt) {
            base.sample(rs, out);
            const double rho = base(out);
            if (rho <= 1.0 || rs.uniform() * rho <= 1.0) return;
        }
        throw InternalError("clamped_at_one: rejection sampler failed to accept");
    };
    jd.peak_hint_ = std::min(peak(), 1.0);
    jd.monotone_hint_ = radially_monotone();
    return jd;
}

Eigen::VectorXd JumpDensity::mean() const {
    switch (family_) {
        case DensityFamily::gaussian:
        case DensityFamily::polynomial_decay:
        case DensityFamily::truncated_stable:
            return Eigen::VectorXd::Zero(dim_);
        default: {
            Eigen::VectorXd m(dim_);
            const double r0 = std::max(1.0, tail_radius(0.5));
            for (int k = 0; k < dim_; ++k) {
                TailResult res = rd_integral(
                    [this, k](const Eigen::VectorXd& z) { return z(k) * (*this)(z); },
                    Eigen::VectorXd::Zero(dim_), r0, 1e-9);
                m(k) = res.diverged ? kInf : res.value / lambda0_;
            }
            return m;
        }
    }
}

double JumpDensity::second_moment() const {
    switch (family_) {
        case DensityFamily::gaussian:
            return dim_ * sigma2_;
        case DensityFamily::polynomial_decay: {
            if (poly_r_ <= dim_ + 2) return kInf;
            // E s^2 with radial density s^{d-1}(1+s)^{-r}: Beta(d+2, r-d-2)/Beta(d, r-d)
            return std::exp(lbeta(dim_ + 2, poly_r_ - dim_ - 2) - lbeta(dim_, poly_r_ - dim_));
        }
        case DensityFamily::truncated_stable: {
            if (stable_alpha_ >= 2.0) return kInf;  // family restricts alpha < 2 anyway
            return kInf;
        }
        default: {
            const double r0 = std::max(1.0, tail_radius(0.5));
            TailResult res = rd_integral(
                [this](const Eigen::VectorXd& z) { return z.squaredNorm() * (*this)(z); },
                Eigen::VectorXd::Zero(dim_), r0, 1e-9);
            return res.diverged ? kInf : res.value / lambda0_;
        }
    }
}

}  // namespace levyou
