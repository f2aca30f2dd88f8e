#include <doctest.h>

#include <cmath>

#include "levyou/errors.hpp"
#include "levyou/feller.hpp"
#include "levyou/harnack.hpp"
#include "test_support.hpp"

using namespace levyou;

namespace {

// n = 2, d = 1, A = [[0,1],[1,0]], B = (0,1): e^{sA}B = (sinh s, cosh s),
// so every ordered pair of times spans R^2 (t_2 = inf).
OUModel remark_model() {
    Eigen::MatrixXd A(2, 2);
    A << 0, 1, 1, 0;
    Eigen::MatrixXd B(2, 1);
    B << 0, 1;
    return OUModel{A, B};
}

OUModel nilpotent_model() {
    Eigen::MatrixXd A(2, 2);
    A << 0, 1, 0, 0;
    Eigen::MatrixXd B(2, 1);
    B << 0, 1;
    return OUModel{A, B};
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("rank_condition basic cases") {
    const RankReport remark = rank_condition(remark_model(), 2);
    CHECK(remark.rank_H == 2);
    CHECK(remark.satisfied);

    // Rank(B) = n at m = 1
    const OUModel full{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)};
    CHECK(rank_condition(full, 1).satisfied);

    const OUModel zero{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 1)};
    const RankReport z = rank_condition(zero, 3);
    CHECK(z.rank_H == 0);
    CHECK_FALSE(z.satisfied);

    // m = 1 alone does not span for the remark model (B is one column)
    CHECK_FALSE(rank_condition(remark_model(), 1).satisfied);
    CHECK_THROWS_AS(rank_condition(remark_model(), 0), InvalidInput);
}

TEST_CASE("rank at m >= n is equivalent to rank at m = n") {
    RandomStream rs(43, 0);
    for (int rep = 0; rep < 25; ++rep) {
        const Eigen::MatrixXd A = testsupport::random_matrix(3, 3, rs);
        Eigen::MatrixXd B = testsupport::random_matrix(3, rep % 2 ? 1 : 2, rs);
        if (rep % 5 == 0) B.setZero();
        const bool at_n = rank_condition(OUModel{A, B}, 3).satisfied;
        for (int m : {4, 5, 7}) {
            CHECK(rank_condition(OUModel{A, B}, m).satisfied == at_n);
        }
    }
}

TEST_CASE("estimate_tm: the remark model survives the whole horizon") {
    const RankReport report =
        estimate_tm(remark_model(), 2, 5.0, 1000, RandomStream(47, 0));
    CHECK(report.satisfied);
    CHECK(report.tm_lower == 5.0);
    CHECK(report.tuples_tested >= 1000);
}

TEST_CASE("estimate_tm: invertible exponentials make m = 1 trivial") {
    Eigen::MatrixXd A(2, 2);
    A << -0.3, 0.7, -0.7, -0.1;
    const OUModel model{A, Eigen::MatrixXd::Identity(2, 2)};
    const RankReport report = estimate_tm(model, 1, 10.0, 1000, RandomStream(53, 0));
    CHECK(report.satisfied);
    CHECK(report.tm_lower == 10.0);
}

TEST_CASE("estimate_tm: nilpotent model columns (s,1) stay independent") {
    const RankReport report =
        estimate_tm(nilpotent_model(), 2, 5.0, 1000, RandomStream(59, 0));
    CHECK(report.satisfied);
    CHECK(report.tm_lower == 5.0);
}

TEST_CASE("estimate_tm: failed (H) reports zero lower bound") {
    const OUModel zero{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Ones(2, 1)};
    const RankReport report = estimate_tm(zero, 2, 5.0, 1000, RandomStream(61, 0));
    CHECK_FALSE(report.satisfied);
    CHECK(report.tm_lower == 0.0);
    CHECK_THROWS_AS(estimate_tm(zero, 2, 5.0, 10, RandomStream(61, 0)), InvalidInput);
}

TEST_CASE("pm_estimate: Erlang tails for f = 1") {
    const OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    const double lambda0 = 2.0;
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, lambda0));
    auto one = [](const Eigen::VectorXd&) { return 1.0; };
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    for (double t : {0.25, 1.0, 4.0}) {
        double prev_mean = 2.0;
        for (int m : {1, 2, 3}) {
            const MeanEstimate est =
                pm_estimate(one, model, noise, x, t, m, kInf, 100000,
                            RandomStream(500 + static_cast<std::uint64_t>(m), 0), 2);
            // P(tau_m <= t) = 1 - sum_{k<m} pmf(k)
            double head = 0.0;
            for (long k = 0; k < m; ++k) head += testsupport::poisson_pmf(k, lambda0 * t);
            CHECK(std::abs(est.mean - (1.0 - head)) <= 4.0 * est.std_error);
            // nested events: non-increasing in m
            CHECK(est.mean <= prev_mean + 3.0 * est.std_error);
            prev_mean = est.mean;
        }
    }
    CHECK(pm_estimate(one, model, noise, x, 0.0, 1, kInf, 100, RandomStream(3, 0)).mean ==
          0.0);
}

TEST_CASE("pm_estimate with m = 1 coincides with p1_estimate") {
    const OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    auto f = [](const Eigen::VectorXd& v) { return std::exp(-v.squaredNorm()); };
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.4);
    // Identical streams and identical draw order: bitwise agreement.
    const MeanEstimate pm =
        pm_estimate(f, model, noise, x, 1.0, 1, kInf, 50000, RandomStream(67, 0), 2);
    const MeanEstimate p1 =
        p1_estimate(f, model, noise, x, 1.0, 50000, RandomStream(67, 0), 2);
    CHECK(pm.mean == p1.mean);
    CHECK(pm.std_error == p1.std_error);
}

TEST_CASE("pm_estimate: finite tm window restricts the event") {
    const OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    auto one = [](const Eigen::VectorXd&) { return 1.0; };
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    const MeanEstimate narrow =
        pm_estimate(one, model, noise, x, 4.0, 2, 0.1, 100000, RandomStream(71, 0), 2);
    const MeanEstimate wide =
        pm_estimate(one, model, noise, x, 4.0, 2, kInf, 100000, RandomStream(71, 0), 2);
    CHECK(narrow.mean < wide.mean);
    // {tau_2 <= tau_1 + tm} given two exponentials: P = 1 - e^{-lambda tm}
    // intersected with {tau_2 <= t}; the narrow window must be below that.
    CHECK(narrow.mean <= (1.0 - std::exp(-1.0 * 0.1)) + 4.0 * narrow.std_error);
}

TEST_CASE("smoothing_modulus: zero radius gives exactly zero; preconditions enforced") {
    const OUModel model = remark_model();
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    auto half = [](const Eigen::VectorXd& v) { return v(0) >= 0.0 ? 1.0 : 0.0; };
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(2, 0);
    const auto rows = smoothing_modulus(half, model, noise, x, 1.0, 2,
                                        std::numeric_limits<double>::infinity(),
                                        {0.0, 0.5}, e, 20000, RandomStream(73, 0), 2);
    CHECK(rows[0].h == 0.0);
    CHECK(rows[0].increment == 0.0);
    CHECK(rows[1].increment > 0.0);

    CHECK_THROWS_AS(smoothing_modulus(half, model, noise, x, 1.0, 2, 0.0, {0.1}, e, 100,
                                      RandomStream(1, 0)),
                    PreconditionError);
    const OUModel bad{Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Ones(2, 1)};
    CHECK_THROWS_AS(smoothing_modulus(half, bad, noise, x, 1.0, 2, 1.0, {0.1}, e, 100,
                                      RandomStream(1, 0)),
                    PreconditionError);
}

TEST_CASE("smoothing_modulus: Lipschitz functions move at most h e^{||A|| t}") {
    const OUModel model = remark_model();
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    // ramp is 1-Lipschitz, |P f(x) - P f(x+he)| <= h ||e^{At}||
    auto ramp = [](const Eigen::VectorXd& v) {
        return std::clamp(v(0) + v(1), 0.0, 1.0);
    };
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(2, 1);
    const double t = 0.7;
    const double lip = operator_norm(matrix_exp(model.A, t));
    const auto rows = smoothing_modulus(ramp, model, noise, x, t, 2,
                                        std::numeric_limits<double>::infinity(),
                                        {0.05, 0.2, 0.8}, e, 50000, RandomStream(79, 0), 2);
    for (const auto& row : rows) {
        CHECK(row.increment <= row.h * lip + 3.0 * row.std_error);
    }
}

TEST_CASE("smoothing_modulus is symmetric in the direction sign for symmetric rho0") {
    const OUModel model = remark_model();
    const LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    // threshold 0 keeps the +e / -e increments equal in law (X ~ -X)
    auto half = [](const Eigen::VectorXd& v) { return v(1) >= 0.0 ? 1.0 : 0.0; };
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(2, 1);
    const std::vector<double> radii{0.3};
    const auto plus = smoothing_modulus(half, model, noise, x, 1.0, 2,
                                        std::numeric_limits<double>::infinity(), radii, e,
                                        200000, RandomStream(83, 0), 2);
    const auto minus = smoothing_modulus(half, model, noise, x, 1.0, 2,
                                         std::numeric_limits<double>::infinity(), radii,
                                         (-e).eval(), 200000, RandomStream(89, 0), 2);
    CHECK(std::abs(plus[0].increment - minus[0].increment) <=
          3.0 * std::hypot(plus[0].std_error, minus[0].std_error));
}
