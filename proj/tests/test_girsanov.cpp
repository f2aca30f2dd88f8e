#include <doctest.h>

#include <cmath>

#include "levyou/errors.hpp"
#include "levyou/girsanov.hpp"
#include "levyou/levy.hpp"
#include "test_support.hpp"

using namespace levyou;

namespace {

JumpPath three_jump_path(double T) {
    JumpPath path;
    path.horizon = T;
    path.times = {0.2, 0.5, 0.9};
    path.sizes = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -0.5),
                  Eigen::VectorXd::Constant(1, 2.0)};
    return path;
}

}  // namespace

TEST_CASE("shift_path inserts one jump and keeps order") {
    JumpPath empty{1.0, {}, {}};
    const Eigen::VectorXd z = Eigen::VectorXd::Constant(1, 0.7);
    const JumpPath one = shift_path(empty, z, 0.5);
    CHECK(one.times.size() == 1);
    CHECK(one.times[0] == 0.5);
    CHECK(one.sizes[0](0) == 0.7);

    const JumpPath path = three_jump_path(1.0);
    const JumpPath shifted = shift_path(path, z, 0.6);
    CHECK(shifted.times.size() == path.times.size() + 1);
    for (std::size_t i = 1; i < shifted.times.size(); ++i) {
        CHECK(shifted.times[i] > shifted.times[i - 1]);
    }
    CHECK_THROWS_AS(shift_path(path, Eigen::VectorXd::Zero(1), 0.5), InvalidInput);
    CHECK_THROWS_AS(shift_path(path, z, 2.0), InvalidInput);
}

TEST_CASE("shifting a path adds e^{A(t-tau)} B xi to the terminal state") {
    Eigen::MatrixXd A(2, 2);
    A << -0.4, 0.3, -0.3, -0.2;
    Eigen::MatrixXd B(2, 1);
    B << 1.0, 0.5;
    const OUModel model{A, B};
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 2.0));
    RandomStream sim(301, 0);
    const double t = 1.4;
    const JumpPath path = sample_jump_path(noise.jump0, t, sim);
    const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, 0.8);
    const double tau = 0.9;
    const JumpPath shifted = shift_path(path, xi, tau);
    Eigen::VectorXd x(2);
    x << 0.2, -1.0;
    RandomStream r1(302, 0), r2(302, 0);
    const Eigen::VectorXd before = ou_terminal_state(model, noise, path, nullptr, x, t, r1);
    const Eigen::VectorXd after = ou_terminal_state(model, noise, shifted, nullptr, x, t, r2);
    const Eigen::VectorXd expected = matrix_exp(A, t - tau) * (B * xi);
    CHECK((after - before - expected).norm() <= 1e-12);
}

TEST_CASE("density_U under the nu0-uniform spec is n_T / (lambda0 T)") {
    const JumpDensity rho0 = JumpDensity::gaussian(1, 1.0, 2.0);
    const double T = 1.5;
    const ShiftSpec spec = ShiftSpec::nu0_uniform(rho0, T);
    CHECK(density_U(JumpPath{T, {}, {}}, spec, T) == 0.0);
    const JumpPath path = three_jump_path(T);
    CHECK(density_U(path, spec, T) == doctest::Approx(3.0 / (2.0 * T)).epsilon(1e-14));
    // shifted path gains exactly one jump: U = (n+1)/(lambda0 T) > 0
    const JumpPath shifted = shift_path(path, Eigen::VectorXd::Constant(1, 0.3), 0.4);
    CHECK(density_U(shifted, spec, T) == doctest::Approx(4.0 / (2.0 * T)).epsilon(1e-14));
}

TEST_CASE("density_U uses set semantics over the jump list") {
    const JumpDensity rho0 = JumpDensity::gaussian(1, 1.0, 1.0);
    const double T = 1.0;
    const ShiftSpec spec = ShiftSpec::ball_restricted(rho0, Eigen::VectorXd::Zero(1), 1.0, T);
    const JumpPath path = three_jump_path(T);
    JumpPath permuted = path;
    std::swap(permuted.times[0], permuted.times[2]);
    std::swap(permuted.sizes[0], permuted.sizes[2]);
    // permuted storage violates the ordering invariant but the sum is the same
    CHECK(density_U(path, spec, T) == doctest::Approx(density_U(permuted, spec, T)));
}

TEST_CASE("ball-restricted spec reproduces the eta weight sum") {
    const JumpDensity rho0 = JumpDensity::gaussian(1, 1.0, 1.0);
    const double T = 2.0;
    const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(1);
    const double radius = 0.6744897501960817;  // nu0-mass 1/2 ball for N(0,1)
    const ShiftSpec spec = ShiftSpec::ball_restricted(rho0, z0, radius, T);
    const double mass = rho0.ball_mass(z0, radius);
    JumpPath path{T, {0.3, 1.2}, {Eigen::VectorXd::Constant(1, 0.1), Eigen::VectorXd::Constant(1, 5.0)}};
    // only the in-ball jump contributes 1/(T nu0(B))
    CHECK(density_U(path, spec, T) == doctest::Approx(1.0 / (T * mass)).epsilon(1e-10));
}

TEST_CASE("negative g raises InvalidDensity") {
    ShiftSpec spec;
    spec.horizon = 1.0;
    spec.factorized = true;
    spec.g = [](const JumpPath&, const Eigen::VectorXd&, double) { return -1.0; };
    CHECK_THROWS_AS(density_U(three_jump_path(1.0), spec, 1.0), InvalidDensity);
}

TEST_CASE("Mecke identity: indicator functional has the closed form sigma(A0)") {
    const JumpDensity rho0 = JumpDensity::gaussian(1, 1.0, 2.0);
    const double T = 1.0;
    // F = 1_{|z| <= 1} 1_{t <= T/2}: both sides = nu0(B_1) * T/2
    const MeckeFn F = [T](const JumpPath&, const Eigen::VectorXd& z, double t) {
        return (z.norm() <= 1.0 && t <= 0.5 * T) ? 1.0 : 0.0;
    };
    const auto [lhs, rhs] = mecke_check(F, rho0, T, 200000, RandomStream(7, 0), 2);
    const double exact = rho0.ball_mass(Eigen::VectorXd::Zero(1), 1.0) * 0.5 * T;
    CHECK(std::abs(lhs.mean - exact) <= 4.0 * lhs.std_error);
    CHECK(std::abs(rhs.mean - exact) <= 4.0 * rhs.std_error);
    CHECK(std::abs(lhs.mean - rhs.mean) <= 3.0 * std::hypot(lhs.std_error, rhs.std_error));
}

TEST_CASE("Mecke identity: configuration-count functional matches Poisson moments") {
    const JumpDensity rho0 = JumpDensity::gaussian(1, 1.0, 1.0);
    const double T = 2.0;  // mu = lambda0 T = 2
    const MeckeFn F = [](const JumpPath& gamma, const Eigen::VectorXd&, double) {
        return static_cast<double>(gamma.times.size());
    };
    const auto [lhs, rhs] = mecke_check(F, rho0, T, 200000, RandomStream(11, 0), 2);
    const double mu = 2.0;
    // LHS = mu E[N+1] = mu(mu+1); RHS = E N^2 = mu + mu^2
    CHECK(std::abs(lhs.mean - mu * (mu + 1.0)) <= 4.0 * lhs.std_error);
    CHECK(std::abs(rhs.mean - (mu + mu * mu)) <= 4.0 * rhs.std_error);
}

TEST_CASE("Mecke identity: zero functional") {
    const JumpDensity rho0 = JumpDensity::gaussian(1, 1.0, 1.0);
    const MeckeFn F = [](const JumpPath&, const Eigen::VectorXd&, double) { return 0.0; };
    const auto [lhs, rhs] = mecke_check(F, rho0, 1.0, 1000, RandomStream(13, 0));
    CHECK(lhs.mean == 0.0);
    CHECK(rhs.mean == 0.0);
}

TEST_CASE("conditional Girsanov: F = 1 matches 1 - e^{-lambda0 T}") {
    const JumpDensity rho0 = JumpDensity::gaussian(1, 1.0, 2.0);
    const double T = 1.0;
    const ShiftSpec spec = ShiftSpec::nu0_uniform(rho0, T);
    const PathFn F = [](const JumpPath&) { return 1.0; };
    const auto [lhs, rhs] = girsanov_check(F, spec, rho0, T, 200000, RandomStream(17, 0), 2);
    const double exact = 1.0 - std::exp(-2.0);
    // LHS = P(N >= 1); RHS = E[lambda0 T / (N + 1)] = same value
    CHECK(std::abs(lhs.mean - exact) <= 4.0 * lhs.std_error);
    CHECK(std::abs(rhs.mean - exact) <= 4.0 * rhs.std_error);
}

TEST_CASE("conditional Girsanov: F = n_T against the finite-sum oracle") {
    const JumpDensity rho0 = JumpDensity::gaussian(1, 1.0, 1.5);
    const double T = 2.0;
    const double mu = 3.0;
    const ShiftSpec spec = ShiftSpec::nu0_uniform(rho0, T);
    const PathFn F = [T](const JumpPath& w) {
        return static_cast<double>(count_jumps(w, T));
    };
    const auto [lhs, rhs] = girsanov_check(F, spec, rho0, T, 200000, RandomStream(19, 0), 2);
    // oracle: E[n 1_{n>0}] = sum_{k<=50} k pmf(k)
    double oracle = 0.0;
    for (long k = 1; k <= 50; ++k) oracle += k * testsupport::poisson_pmf(k, mu);
    CHECK(std::abs(lhs.mean - oracle) <= 4.0 * lhs.std_error);
    CHECK(std::abs(rhs.mean - oracle) <= 4.0 * rhs.std_error);
    CHECK(std::abs(lhs.mean - rhs.mean) <= 3.0 * std::hypot(lhs.std_error, rhs.std_error));
}

TEST_CASE("conditional Girsanov: zero functional and the eps_atom guard") {
    const JumpDensity rho0 = JumpDensity::gaussian(1, 1.0, 1.0);
    ShiftSpec spec = ShiftSpec::nu0_uniform(rho0, 1.0);
    const PathFn zero = [](const JumpPath&) { return 0.0; };
    const auto [lhs, rhs] = girsanov_check(zero, spec, rho0, 1.0, 1000, RandomStream(23, 0));
    CHECK(lhs.mean == 0.0);
    CHECK(rhs.mean == 0.0);
    spec.eps_atom = 0.1;
    CHECK_THROWS_AS(girsanov_check(zero, spec, rho0, 1.0, 10, RandomStream(23, 0)),
                    PreconditionError);
}

TEST_CASE("conditional Girsanov under a polynomial-decay density") {
    const JumpDensity rho0 = JumpDensity::polynomial_decay(1, 1.0, 4.0);
    const double T = 1.0;
    const ShiftSpec spec = ShiftSpec::nu0_uniform(rho0, T);
    const PathFn F = [T](const JumpPath& w) {
        return static_cast<double>(count_jumps(w, T));
    };
    const auto [lhs, rhs] = girsanov_check(F, spec, rho0, T, 100000, RandomStream(29, 0), 2);
    CHECK(std::abs(lhs.mean - rhs.mean) <= 3.0 * std::hypot(lhs.std_error, rhs.std_error));
}
