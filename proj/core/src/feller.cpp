#include "levyou/feller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyou/errors.hpp"

namespace levyou {

namespace {

constexpr double kClusterSpacing = 1e-6;

int numerical_rank(const Eigen::MatrixXd& M, int n) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const double smax = svd.singularValues()(0);
    if (smax == 0.0) return 0;
    return static_cast<int>(
        (svd.singularValues().array() > n * smax * 1e-12).count());
}

// Rank of (e^{s_1 A}B, ..., e^{s_m A}B) over a given tuple. The invertible
// common factor e^{s_1 A} is dropped (the rank only depends on the gaps
// s_j - s_1) and columns are normalized, so the test stays meaningful when
// the exponentials reach e^{100}-type scales.
bool tuple_full_rank(const OUModel& model, const std::vector<double>& s) {
    const int n = model.n();
    const int d = model.d();
    const int m = static_cast<int>(s.size());
    Eigen::MatrixXd H(n, m * d);
    for (int j = 0; j < m; ++j) {
        H.middleCols(j * d, d) = matrix_exp(model.A, s[j] - s[0]) * model.B;
    }
    for (int c = 0; c < H.cols(); ++c) {
        const double norm = H.col(c).norm();
        if (norm > 0.0 && std::isfinite(norm)) H.col(c) /= norm;
    }
    return numerical_rank(H, n) == n;
}

// No rank failure over `samples` random ordered tuples in [0, t]^m plus the
// deterministic clustered/endpoint families.
bool survives_at(const OUModel& model, int m, double t, long samples,
                 RandomStream& rs, long& tuples_tested) {
    std::vector<double> s(static_cast<std::size_t>(m));
    auto check = [&](const std::vector<double>& tuple) {
        ++tuples_tested;
        return tuple_full_rank(model, tuple);
    };

    // Clustered tuples: s_i = start + (i-1) * spacing, probing the
    // divided-difference degeneracy of nearly equal times.
    const double spacing = std::min(kClusterSpacing, t / (m > 1 ? m : 1) * 0.5);
    for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        double start = frac * std::max(0.0, t - (m - 1) * spacing);
        for (int i = 0; i < m; ++i) s[static_cast<std::size_t>(i)] = start + i * spacing;
        if (!check(s)) return false;
    }
    // Equispaced across [0, t] (includes the endpoints).
    if (m > 1) {
        for (int i = 0; i < m; ++i) s[static_cast<std::size_t>(i)] = t * i / (m - 1);
        if (!check(s)) return false;
    } else {
        s[0] = t;
        if (!check(s)) return false;
    }
    // Uniform ordered tuples.
    for (long k = 0; k < samples; ++k) {
        for (int i = 0; i < m; ++i) s[static_cast<std::size_t>(i)] = t * rs.uniform();
        std::sort(s.begin(), s.end());
        if (!check(s)) return false;
    }
    return true;
}

}  // namespace

RankReport rank_condition(const OUModel& model, int m) {
    model.validate();
    if (m < 1) throw InvalidInput("rank_condition: m must be >= 1");
    const int n = model.n();
    const int d = model.d();
    Eigen::MatrixXd H(n, m * d);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (int j = 0; j < m; ++j) {
        H.middleCols(j * d, d) = power * model.B;
        power = model.A * power;
    }
    RankReport report;
    report.m = m;
    report.rank_H = numerical_rank(H, n);
    report.satisfied = (report.rank_H == n);
    return report;
}

RankReport estimate_tm(const OUModel& model, int m, double t_max, long tuple_samples,
                       RandomStream rs) {
    if (!(t_max > 0.0)) throw InvalidInput("estimate_tm: t_max must be > 0");
    if (tuple_samples < 1000) throw InvalidInput("estimate_tm: tuple_samples must be >= 1000");
    RankReport report = rank_condition(model, m);
    report.t_max_searched = t_max;
    if (!report.satisfied) {
        report.tm_lower = 0.0;
        return report;
    }

    long tested = 0;
    if (survives_at(model, m, t_max, tuple_samples, rs, tested)) {
        // No failure found anywhere; callers treat this as t_m = +inf.
        report.tm_lower = t_max;
        report.tuples_tested = tested;
        return report;
    }
    double lo = 0.0;
    double hi = t_max;
    for (int it = 0; it < 40 && (hi - lo) > 1e-9 * t_max; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (survives_at(model, m, mid, tuple_samples, rs, tested)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    report.tm_lower = lo;
    report.tuples_tested = tested;
    return report;
}

MeanEstimate pm_estimate(const StateTestFn& f, const OUModel& model,
                         const LevyNoise& noise, const Eigen::VectorXd& x, double t,
                         int m, double tm, std::int64_t replicas,
                         const RandomStream& base, int workers) {
    if (m < 1) throw InvalidInput("pm_estimate: m must be >= 1");
    if (!(t >= 0.0)) throw InvalidInput("pm_estimate: t must be >= 0");
    if (!(tm >= 0.0)) throw InvalidInput("pm_estimate: tm must be >= 0 (or +inf)");
    const OUPropagator prop = make_propagator(model, noise, t);
    const std::size_t mm = static_cast<std::size_t>(m);
    return mc_reduce(
        [&](RandomStream& rs) {
            const JumpPath path0 = sample_jump_path(noise.jump0, t, rs);
            if (path0.times.size() < mm) return 0.0;
            const double tau_m = path0.times[mm - 1];
            const double cutoff = std::min(t, path0.times[0] + tm);
            if (tau_m > cutoff) return 0.0;
            JumpPath path1;
            const JumpPath* extra = nullptr;
            if (noise.jump1) {
                path1 = sample_jump_path(*noise.jump1, t, rs);
                extra = &path1;
            }
            return f(ou_terminal_state(prop, model, path0, extra, x, rs));
        },
        replicas, base, workers);
}

std::vector<SmoothingRow> smoothing_modulus(const StateTestFn& f, const OUModel& model,
                                            const LevyNoise& noise,
                                            const Eigen::VectorXd& x, double t, int m,
                                            double tm, const std::vector<double>& radii,
                                            const Eigen::VectorXd& direction,
                                            std::int64_t replicas,
                                            const RandomStream& base, int workers) {
    if (radii.empty()) throw InvalidInput("smoothing_modulus: empty radius list");
    if (!(tm > 0.0)) throw PreconditionError("smoothing_modulus: t_m > 0 required (Lemma-5.2 regime)");
    if (!rank_condition(model, m).satisfied) {
        throw PreconditionError("Thm 5.1: rank condition (H) fails for this m");
    }
    const Eigen::VectorXd e = direction / direction.norm();
    const OUPropagator prop = make_propagator(model, noise, t);
    const Eigen::VectorXd v = prop.eAt * e;  // X_t^{x + h e} = X_t^x + h v
    const int width = static_cast<int>(radii.size());
    const std::size_t mm = static_cast<std::size_t>(m);

    const auto est = mc_reduce_multi(
        [&](RandomStream& rs, double* out) {
            const JumpPath path0 = sample_jump_path(noise.jump0, t, rs);
            bool in_event = path0.times.size() >= mm;
            if (in_event) {
                const double cutoff = std::min(t, path0.times[0] + tm);
                in_event = path0.times[mm - 1] <= cutoff;
            }
            if (!in_event) {
                for (int j = 0; j < width; ++j) out[j] = 0.0;
                return;
            }
            JumpPath path1;
            const JumpPath* extra = nullptr;
            if (noise.jump1) {
                path1 = sample_jump_path(*noise.jump1, t, rs);
                extra = &path1;
            }
            const Eigen::VectorXd X = ou_terminal_state(prop, model, path0, extra, x, rs);
            const double base_val = f(X);
            for (int j = 0; j < width; ++j) {
                out[j] = f(X + radii[static_cast<std::size_t>(j)] * v) - base_val;
            }
        },
        width, replicas, base, workers);

    std::vector<SmoothingRow> rows(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) {
        rows[j].h = radii[j];
        rows[j].increment = std::abs(est[j].mean);
        rows[j].std_error = est[j].std_error;
    }
    return rows;
}

}  // namespace levyou
