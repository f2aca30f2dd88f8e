#include <doctest.h>

#include <cmath>

#include "levyou/errors.hpp"
#include "levyou/harnack.hpp"
#include "levyou/quadrature.hpp"
#include "test_support.hpp"

using namespace levyou;
using testsupport::normal_cdf;

TEST_CASE("V_p(0) = 1 for every family and p") {
    std::vector<JumpDensity> families = {
        JumpDensity::gaussian(1, 1.0, 1.0),
        JumpDensity::gaussian(2, 0.7, 2.0),
        JumpDensity::polynomial_decay(1, 1.0, 4.0),
        JumpDensity::truncated_stable(1, 0.3, 1.2, 0.9),
        JumpDensity::tabulated({-2.0, 0.0, 2.0}, {0.2, 1.0, 0.2}),
    };
    for (const auto& jd : families) {
        for (double p : {1.5, 2.0, 4.0}) {
            CHECK(compute_vp(jd, p, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("Gaussian V_2(r) = e^{r^2} to 1e-6 relative") {
    const JumpDensity g = JumpDensity::gaussian(1, 1.0, 1.0);
    for (double r : {0.0, 0.5, 1.0, 1.7, 2.4, 3.0}) {
        const double got = compute_vp(g, 2.0, r);
        CHECK(got == doctest::Approx(std::exp(r * r)).epsilon(1e-6));
    }
}

TEST_CASE("Gaussian V_p closed form exp(p r^2 / (2 (p-1)^2)) and p-monotonicity") {
    const JumpDensity g = JumpDensity::gaussian(1, 1.0, 1.0);
    const double r = 1.3;
    double prev = std::numeric_limits<double>::infinity();
    for (double p : {1.5, 2.0, 4.0}) {
        const double got = compute_vp(g, p, r);
        const double closed = std::exp(p * r * r / (2.0 * (p - 1.0) * (p - 1.0)));
        CHECK(got == doctest::Approx(closed).epsilon(1e-6));
        CHECK(got <= prev * (1.0 + 1e-9));  // non-increasing in p
        prev = got;
    }
    // 2D isotropic Gaussian shares the same closed form
    const JumpDensity g2 = JumpDensity::gaussian(2, 1.0, 1.0);
    CHECK(compute_vp(g2, 2.0, 0.8, 1e-6) == doctest::Approx(std::exp(0.64)).epsilon(1e-4));
}

TEST_CASE("V_p is infinite for compact support and monotone on a grid") {
    const JumpDensity uniformish = JumpDensity::tabulated({-1.0, -0.999, 0.999, 1.0},
                                                          {0.0, 0.5, 0.5, 0.0});
    CHECK(std::isinf(compute_vp(uniformish, 2.0, 0.5)));

    const JumpDensity poly = JumpDensity::polynomial_decay(1, 1.0, 4.0);
    const VpProfile profile = build_vp_profile(poly, 2.0, {0.0, 0.3, 0.6, 1.0, 1.5});
    for (std::size_t i = 1; i < profile.values.size(); ++i) {
        CHECK(profile.values[i] >= profile.values[i - 1] * (1.0 - 1e-9));
    }
    CHECK(profile(0.45) >= profile.values[1]);
    CHECK(profile(0.45) <= profile.values[2]);
}

TEST_CASE("grid+golden sup search agrees with the boundary fast path") {
    // the asymmetric tabulated family exercises the generic search
    const JumpDensity g = JumpDensity::gaussian(1, 1.0, 1.0);
    const JumpDensity as_custom = JumpDensity::custom(
        1, 1.0, [g](const Eigen::VectorXd& z) { return g(z); }, 4.0, 3.0);
    const double r = 1.1;
    const double generic = compute_vp(as_custom, 2.0, r, 1e-8, 32);
    const double fast = compute_vp(g, 2.0, r);
    CHECK(generic == doctest::Approx(fast).epsilon(1e-6));
}

TEST_CASE("p1_estimate: jump-probability mass and endpoints") {
    const OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    const double lambda0 = 2.0;
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, lambda0));
    auto one = [](const Eigen::VectorXd&) { return 1.0; };
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);

    const MeanEstimate t0 = p1_estimate(one, model, noise, x, 0.0, 1000, RandomStream(3, 0));
    CHECK(t0.mean == 0.0);

    const MeanEstimate t1 =
        p1_estimate(one, model, noise, x, 1.0, 200000, RandomStream(5, 0), 2);
    CHECK(std::abs(t1.mean - (1.0 - std::exp(-lambda0))) <= 4.0 * t1.std_error);

    // lambda0 t = ln 2 gives exactly 1/2
    const double t_half = std::log(2.0) / lambda0;
    const MeanEstimate th =
        p1_estimate(one, model, noise, x, t_half, 200000, RandomStream(7, 0), 2);
    CHECK(std::abs(th.mean - 0.5) <= 4.0 * th.std_error);
}

TEST_CASE("p1_estimate respects the sub-Markov mass bound") {
    Eigen::MatrixXd A(2, 2);
    A << -0.3, 0.4, -0.4, -0.2;
    Eigen::MatrixXd B(2, 2);
    B << 1.0, 0.0, 0.3, 1.0;
    const OUModel model{A, B};
    LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(2, 1.0, 1.5));
    noise.gaussian_cov = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    auto f = [](const Eigen::VectorXd& v) { return 0.7 * std::exp(-v.squaredNorm()); };
    for (double t : {0.3, 1.0, 2.5}) {
        const MeanEstimate est = p1_estimate(f, model, noise, Eigen::VectorXd::Ones(2), t,
                                             20000, RandomStream(11, 0), 2);
        CHECK(est.mean <= 0.7 * (1.0 - std::exp(-1.5 * t)) + 3.0 * est.std_error);
    }
}

TEST_CASE("harnack_check: Jensen case at x = y and constant functions") {
    const OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.2);
    auto bump = [](const Eigen::VectorXd& v) { return std::exp(-v.squaredNorm()); };
    const HarnackResult jensen =
        harnack_check(bump, model, noise, x, x, 1.0, 2.0, 50000, RandomStream(13, 0), 2);
    CHECK(jensen.vp_value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(jensen.pass);

    auto constant = [](const Eigen::VectorXd&) { return 0.8; };
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, -0.3);
    const HarnackResult c =
        harnack_check(constant, model, noise, x, y, 1.0, 2.0, 50000, RandomStream(17, 0), 2);
    CHECK(c.pass);  // V_p >= 1 makes constants pass automatically

    auto negative = [](const Eigen::VectorXd&) { return -1.0; };
    CHECK_THROWS_AS(harnack_check(negative, model, noise, x, y, 1.0, 2.0, 100,
                                  RandomStream(19, 0)),
                    InvalidInput);
}

TEST_CASE("harnack_check: 1D pure-jump reference case with recorded margin") {
    // A=0, B=1, Gaussian rho0, f = exp-bump, |x-y| = 1, p = 2, lambda0 t = 1:
    // RHS uses the closed form V_2(1) = e.
    const OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    auto bump = [](const Eigen::VectorXd& v) { return std::exp(-v.squaredNorm()); };
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.5);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, -0.5);
    const HarnackResult res =
        harnack_check(bump, model, noise, x, y, 1.0, 2.0, 100000, RandomStream(401, 0), 2);
    CHECK(res.vp_value == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
    CHECK(res.pass);
    CHECK(res.margin > 0.0);
}

TEST_CASE("harnack_check rejects inapplicable hypotheses") {
    // compact support: V_p infinite at any positive radius
    const JumpDensity tab = JumpDensity::tabulated({-1.0, -0.9, 0.9, 1.0},
                                                   {0.0, 1.0, 1.0, 0.0});
    const OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    const LevyNoise noise = LevyNoise::pure_jump(tab);
    auto one = [](const Eigen::VectorXd&) { return 1.0; };
    CHECK_THROWS_AS(harnack_check(one, model, noise, Eigen::VectorXd::Zero(1),
                                  Eigen::VectorXd::Ones(1), 1.0, 2.0, 100,
                                  RandomStream(23, 0)),
                    PreconditionError);
    // rank failure
    const OUModel rank_bad{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Ones(2, 1)};
    const LevyNoise noise1 = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    CHECK_THROWS_AS(harnack_check(one, rank_bad, noise1, Eigen::VectorXd::Zero(2),
                                  Eigen::VectorXd::Zero(2), 1.0, 2.0, 100,
                                  RandomStream(29, 0)),
                    PreconditionError);
}

TEST_CASE("ultracontractivity bound: Gaussian closed form to 1e-6") {
    // 1D, A = 0, B = 1, Gaussian rho0, p = 2:
    // V_2(r) = e^{r^2}, J = int e^{-x^2} dx = sqrt(pi),
    // bound = (1 - e^{-lambda0 t}) / pi^{1/4}... precisely J^{-1/2}.
    const JumpDensity g = JumpDensity::gaussian(1, 1.0, 1.0);
    const OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    const double t = 1.0;
    const double got = ultracontractivity_bound(g, 2.0, t, model);
    const double expected = (1.0 - std::exp(-t)) * std::pow(M_PI, -0.25);
    CHECK(got == doctest::Approx(expected).epsilon(1e-6));

    // t -> 0: the (1 - e^{-lambda0 t}) factor kills the bound
    CHECK(ultracontractivity_bound(g, 2.0, 1e-8, model) ==
          doctest::Approx(0.0).epsilon(1e-6));
    CHECK(ultracontractivity_bound(g, 2.0, 1e-4, model) < 1e-3);
}

TEST_CASE("semigroup comparison: trivial, vanishing and halfspace cases") {
    const OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    noise.gaussian_cov = Eigen::MatrixXd::Ones(1, 1);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    auto one = [](const Eigen::VectorXd&) { return 1.0; };
    const JumpDensity extra = JumpDensity::gaussian(1, 1.0, 0.8);

    const auto [l1, r1] = semigroup_comparison_check(model, noise, extra, one, x, 1.0,
                                                     2000, RandomStream(31, 0));
    CHECK(l1.mean == doctest::Approx(1.0));
    CHECK(r1.mean == doctest::Approx(std::exp(-0.8)));

    // lambda0 -> 0: both sides approach P_t f
    auto indicator = [](const Eigen::VectorXd& v) { return v(0) >= 0.0 ? 1.0 : 0.0; };
    const JumpDensity tiny = JumpDensity::gaussian(1, 1.0, 1e-3);
    const auto [lt, rt] = semigroup_comparison_check(model, noise, tiny, indicator, x,
                                                     1.0, 100000, RandomStream(37, 0), 2);
    CHECK(std::abs(lt.mean - rt.mean) <= 3.0 * std::hypot(lt.std_error, rt.std_error) + 1e-3);

    const auto [lh, rh] = semigroup_comparison_check(model, noise, extra, indicator, x,
                                                     1.0, 100000, RandomStream(41, 0), 2);
    CHECK(lh.mean >= rh.mean - 3.0 * std::hypot(lh.std_error, rh.std_error));
}
