#include "levyou/girsanov.hpp"

#include <algorithm>
#include <cmath>

#include "levyou/errors.hpp"

namespace levyou {

ShiftSpec ShiftSpec::nu0_uniform(const JumpDensity& rho0, double T) {
    if (!(T > 0.0)) throw InvalidInput("ShiftSpec::nu0_uniform: T must be > 0");
    ShiftSpec spec;
    spec.horizon = T;
    spec.factorized = true;
    const double lambda0 = rho0.lambda0();
    spec.g = [lambda0, T](const JumpPath&, const Eigen::VectorXd&, double t) {
        return (t >= 0.0 && t <= T) ? 1.0 / (lambda0 * T) : 0.0;
    };
    spec.sample_xi = [rho0](RandomStream& rs, Eigen::VectorXd& out) {
        rho0.sample(rs, out);
    };
    spec.sample_tau = [T](RandomStream& rs) { return T * rs.uniform(); };
    return spec;
}

ShiftSpec ShiftSpec::ball_restricted(const JumpDensity& rho0, const Eigen::VectorXd& z0,
                                     double radius, double T) {
    if (!(T > 0.0)) throw InvalidInput("ShiftSpec::ball_restricted: T must be > 0");
    if (!(radius > 0.0)) throw InvalidInput("ShiftSpec::ball_restricted: radius must be > 0");
    const double mass = rho0.ball_mass(z0, radius);
    if (!(mass > 0.0)) {
        throw PreconditionError("ShiftSpec::ball_restricted: nu0(B) = 0 on the chosen ball");
    }
    ShiftSpec spec;
    spec.horizon = T;
    spec.factorized = true;
    const Eigen::VectorXd center = z0;
    spec.g = [center, radius, mass, T](const JumpPath&, const Eigen::VectorXd& z, double t) {
        if (t < 0.0 || t > T) return 0.0;
        return ((z - center).norm() <= radius) ? 1.0 / (T * mass) : 0.0;
    };
    spec.sample_xi = [rho0, center, radius](RandomStream& rs, Eigen::VectorXd& out) {
        // Rejection from nu0/lambda0 onto the ball.
        for (long attempt = 0; attempt < 10000000; ++attempt) {
            rho0.sample(rs, out);
            if ((out - center).norm() <= radius) return;
        }
        throw InternalError("ShiftSpec::ball_restricted: ball has negligible mass");
    };
    spec.sample_tau = [T](RandomStream& rs) { return T * rs.uniform(); };
    return spec;
}

JumpPath shift_path(const JumpPath& path, const Eigen::VectorXd& xi, double tau) {
    if (xi.isZero(0.0)) throw InvalidInput("shift_path: xi must be non-zero");
    if (tau < 0.0 || tau > path.horizon) {
        throw InvalidInput("shift_path: tau outside [0, horizon]");
    }
    JumpPath out = path;
    const auto it = std::upper_bound(out.times.begin(), out.times.end(), tau);
    const std::size_t pos = static_cast<std::size_t>(it - out.times.begin());
    out.times.insert(out.times.begin() + pos, tau);
    out.sizes.insert(out.sizes.begin() + pos, xi);
    return out;
}

JumpPath remove_jump(const JumpPath& path, std::size_t idx) {
    if (idx >= path.times.size()) throw InvalidInput("remove_jump: index out of range");
    JumpPath out = path;
    out.times.erase(out.times.begin() + idx);
    out.sizes.erase(out.sizes.begin() + idx);
    return out;
}

double density_U(const JumpPath& path, const ShiftSpec& spec, double T) {
    double u = spec.eps_atom;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        if (path.times[i] > T) break;
        double gi;
        if (spec.factorized) {
            gi = spec.g(path, path.sizes[i], path.times[i]);
        } else {
            gi = spec.g(remove_jump(path, i), path.sizes[i], path.times[i]);
        }
        if (gi < 0.0 || !std::isfinite(gi)) {
            throw InvalidDensity("density_U: g returned a negative or non-finite value");
        }
        u += gi;
    }
    return u;
}

std::pair<MeanEstimate, MeanEstimate> mecke_check(const MeckeFn& F,
                                                  const JumpDensity& density, double T,
                                                  std::int64_t replicas,
                                                  const RandomStream& base, int workers) {
    if (!(T > 0.0)) throw InvalidInput("mecke_check: T must be > 0");
    const double total_mass = density.lambda0() * T;

    // LHS: gamma ~ Poisson(sigma), (z*, t*) ~ sigma / |sigma|; the extra
    // point is added to the configuration before evaluating.
    const MeanEstimate lhs = mc_reduce(
        [&](RandomStream& rs) {
            const JumpPath gamma = sample_jump_path(density, T, rs);
            Eigen::VectorXd z(density.dim());
            density.sample(rs, z);
            const double t = T * rs.uniform();
            const JumpPath augmented = shift_path(gamma, z, t);
            return total_mass * F(augmented, z, t);
        },
        replicas, base.fork(1), workers);

    // RHS: pick-a-point sum over the configuration's own points.
    const MeanEstimate rhs = mc_reduce(
        [&](RandomStream& rs) {
            const JumpPath gamma = sample_jump_path(density, T, rs);
            double sum = 0.0;
            for (std::size_t i = 0; i < gamma.times.size(); ++i) {
                sum += F(gamma, gamma.sizes[i], gamma.times[i]);
            }
            return sum;
        },
        replicas, base.fork(2), workers);

    return {lhs, rhs};
}

std::pair<MeanEstimate, MeanEstimate> girsanov_check(const PathFn& F,
                                                     const ShiftSpec& spec,
                                                     const JumpDensity& rho0, double T,
                                                     std::int64_t replicas,
                                                     const RandomStream& base,
                                                     int workers) {
    if (spec.eps_atom != 0.0) {
        throw PreconditionError("girsanov_check: eps_atom must be 0 (xi != 0 a.s.)");
    }
    if (!(T > 0.0)) throw InvalidInput("girsanov_check: T must be > 0");

    const MeanEstimate lhs = mc_reduce(
        [&](RandomStream& rs) {
            const JumpPath w = sample_jump_path(rho0, T, rs);
            const double u = density_U(w, spec, T);
            return u > 0.0 ? F(w) : 0.0;
        },
        replicas, base.fork(1), workers);

    const MeanEstimate rhs = mc_reduce(
        [&](RandomStream& rs) {
            const JumpPath w = sample_jump_path(rho0, T, rs);
            Eigen::VectorXd xi(rho0.dim());
            spec.sample_xi(rs, xi);
            const double tau = spec.sample_tau(rs);
            const JumpPath shifted = shift_path(w, xi, tau);
            const double u = density_U(shifted, spec, T);
            if (!(u > 0.0)) {
                throw InternalError(
                    "girsanov_check: U vanished on a shifted path (impossible for xi != 0, tau <= T)");
            }
            return F(shifted) / u;
        },
        replicas, base.fork(2), workers);

    return {lhs, rhs};
}

}  // namespace levyou
