#include "levyou/levy.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "levyou/errors.hpp"
#include "levyou/quadrature.hpp"

namespace levyou {

void LevyNoise::validate() const {
    const int dd = jump0.dim();
    if (drift.size() != dd) throw InvalidInput("LevyNoise: drift dimension mismatch");
    if (gaussian_cov.rows() != dd || gaussian_cov.cols() != dd) {
        throw InvalidInput("LevyNoise: gaussian_cov must be d x d");
    }
    if (!drift.allFinite() || !gaussian_cov.allFinite()) {
        throw InvalidInput("LevyNoise: non-finite entries");
    }
    if ((gaussian_cov - gaussian_cov.transpose()).norm() > 1e-10 * (1.0 + gaussian_cov.norm())) {
        throw InvalidInput("LevyNoise: gaussian_cov must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gaussian_cov, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) {
        throw InvalidInput("LevyNoise: gaussian_cov must be PSD (min eigenvalue >= -1e-12)");
    }
    if (!(jump0.lambda0() > 0.0)) throw InvalidInput("LevyNoise: jump0 mass must be positive");
    if (jump1 && jump1->dim() != dd) throw InvalidInput("LevyNoise: jump1 dimension mismatch");
}

bool LevyNoise::has_gaussian() const {
    return gaussian_cov.size() > 0 && !gaussian_cov.isZero(0.0);
}

LevyNoise LevyNoise::pure_jump(const JumpDensity& jump0) {
    LevyNoise noise{Eigen::VectorXd::Zero(jump0.dim()),
                    Eigen::MatrixXd::Zero(jump0.dim(), jump0.dim()), jump0, std::nullopt,
                    std::nullopt};
    return noise;
}

void JumpPath::validate() const {
    if (!(horizon >= 0.0)) throw InvalidInput("JumpPath: horizon must be >= 0");
    if (times.size() != sizes.size()) throw InvalidInput("JumpPath: times/sizes length mismatch");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || times[i] > horizon) {
            throw InvalidInput("JumpPath: jump time outside [0, horizon]");
        }
        if (i > 0 && !(times[i - 1] < times[i])) {
            throw InvalidInput("JumpPath: jump times must be strictly increasing");
        }
        if (sizes[i].isZero(0.0)) throw InvalidInput("JumpPath: zero jump size");
    }
}

JumpPath sample_jump_path(const JumpDensity& density, double T, RandomStream& rs) {
    if (!(T >= 0.0)) throw InvalidInput("sample_jump_path: T must be >= 0");
    JumpPath path;
    path.horizon = T;
    if (T == 0.0) return path;
    const long count = rs.poisson(density.lambda0() * T);
    path.times.resize(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) path.times[static_cast<std::size_t>(i)] = T * rs.uniform();
    std::sort(path.times.begin(), path.times.end());
    // Ties among continuous uniforms are measure zero; nudge if they occur.
    for (std::size_t i = 1; i < path.times.size(); ++i) {
        if (path.times[i] <= path.times[i - 1]) {
            path.times[i] = std::nextafter(path.times[i - 1], T);
        }
    }
    path.sizes.resize(static_cast<std::size_t>(count));
    for (auto& s : path.sizes) {
        s.resize(density.dim());
        density.sample(rs, s);
    }
    return path;
}

long count_jumps(const JumpPath& path, double T) {
    if (T > path.horizon) throw InvalidInput("count_jumps: T exceeds the path horizon");
    const auto it = std::upper_bound(path.times.begin(), path.times.end(), T);
    return static_cast<long>(it - path.times.begin());
}

OUPropagator make_propagator(const OUModel& model, const LevyNoise& noise, double t) {
    model.validate();
    noise.validate();
    if (!(t >= 0.0)) throw InvalidInput("make_propagator: t must be >= 0");
    if (noise.d() != model.d()) throw InvalidInput("make_propagator: noise/model dimension mismatch");
    const int n = model.n();
    OUPropagator prop;
    prop.t = t;
    prop.zero_A = model.zero_drift();
    prop.eAt = prop.zero_A ? Eigen::MatrixXd::Identity(n, n) : matrix_exp(model.A, t);

    // int_0^t e^{Au} du via the block exponential of [[A, I], [0, 0]].
    const Eigen::VectorXd Bb = model.B * noise.drift;
    if (Bb.isZero(0.0) || t == 0.0) {
        prop.drift_term = Eigen::VectorXd::Zero(n);
    } else if (prop.zero_A) {
        prop.drift_term = t * Bb;
    } else {
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        block.topLeftCorner(n, n) = model.A;
        block.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd eBlock = matrix_exp(block, t);
        prop.drift_term = eBlock.topRightCorner(n, n) * Bb;
    }

    if (noise.has_gaussian() && t > 0.0) {
        const Eigen::MatrixXd BQBt = model.B * noise.gaussian_cov * model.B.transpose();
        Eigen::MatrixXd cov;
        if (prop.zero_A) {
            cov = t * BQBt;
        } else {
            cov = integrate_matrix(
                [&](double u) -> Eigen::MatrixXd {
                    const Eigen::MatrixXd E = matrix_exp(model.A, u);
                    return E * BQBt * E.transpose();
                },
                0.0, t, 1e-10);
            cov = 0.5 * (cov + cov.transpose());
        }
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) {
            llt.compute(cov + 1e-14 * Eigen::MatrixXd::Identity(n, n));
            if (llt.info() != Eigen::Success) {
                throw InternalError("make_propagator: Brownian covariance not PSD after jitter");
            }
        }
        prop.gauss_chol = llt.matrixL();
    }
    return prop;
}

namespace {

// Accumulate sum of e^{A(t-tau)} B xi over the jumps of one path with tau <= t.
void add_jumps(const OUPropagator& prop, const OUModel& model, const JumpPath& path,
               Eigen::VectorXd& acc) {
    const double t = prop.t;
    if (path.horizon < t) throw InvalidInput("ou_terminal_state: path horizon shorter than t");
    if (!path.sizes.empty() && path.sizes.front().size() != model.d()) {
        throw InvalidInput("ou_terminal_state: jump dimension does not match B");
    }
    const int n = model.n();
    const bool scalar_A = (n == 1);
    const double a = scalar_A ? model.A(0, 0) : 0.0;
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        const double tau = path.times[i];
        if (tau > t) break;
        const Eigen::VectorXd Bxi = model.B * path.sizes[i];
        if (prop.zero_A) {
            acc += Bxi;
        } else if (scalar_A) {
            acc(0) += std::exp(a * (t - tau)) * Bxi(0);
        } else {
            acc += matrix_exp(model.A, t - tau) * Bxi;
        }
    }
}

}  // namespace

Eigen::VectorXd ou_terminal_state(const OUPropagator& prop, const OUModel& model,
                                  const JumpPath& path0, const JumpPath* path1,
                                  const Eigen::VectorXd& x, RandomStream& rs) {
    if (x.size() != model.n()) throw InvalidInput("ou_terminal_state: x dimension mismatch");
    Eigen::VectorXd state = prop.eAt * x + prop.drift_term;
    add_jumps(prop, model, path0, state);
    if (path1) add_jumps(prop, model, *path1, state);
    if (prop.gauss_chol.size() > 0) {
        Eigen::VectorXd g(model.n());
        for (int i = 0; i < g.size(); ++i) g(i) = rs.normal();
        state += prop.gauss_chol * g;
    }
    return state;
}

Eigen::VectorXd ou_terminal_state(const OUModel& model, const LevyNoise& noise,
                                  const JumpPath& path0, const JumpPath* path1,
                                  const Eigen::VectorXd& x, double t, RandomStream& rs) {
    const OUPropagator prop = make_propagator(model, noise, t);
    return ou_terminal_state(prop, model, path0, path1, x, rs);
}

std::vector<Eigen::VectorXd> sample_X(const OUModel& model, const LevyNoise& noise,
                                      const Eigen::VectorXd& x, double t,
                                      std::int64_t replicas, const RandomStream& base,
                                      int workers) {
    if (replicas < 1) throw InvalidInput("sample_X: replicas must be >= 1");
    const OUPropagator prop = make_propagator(model, noise, t);
    std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(replicas));
    auto run_range = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            RandomStream rs = base.fork(static_cast<std::uint64_t>(i));
            const JumpPath path0 = sample_jump_path(noise.jump0, t, rs);
            JumpPath path1;
            const JumpPath* p1 = nullptr;
            if (noise.jump1) {
                path1 = sample_jump_path(*noise.jump1, t, rs);
                p1 = &path1;
            }
            out[static_cast<std::size_t>(i)] =
                ou_terminal_state(prop, model, path0, p1, x, rs);
        }
    };
    if (workers <= 1 || replicas < 2) {
        run_range(0, replicas);
    } else {
        const int nthreads = static_cast<int>(std::min<std::int64_t>(workers, replicas));
        std::vector<std::thread> pool;
        const std::int64_t chunk = (replicas + nthreads - 1) / nthreads;
        for (int w = 0; w < nthreads; ++w) {
            const std::int64_t lo = w * chunk;
            const std::int64_t hi = std::min<std::int64_t>(replicas, lo + chunk);
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace levyou
