#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "levyou/errors.hpp"
#include "levyou/linmodel.hpp"
#include "test_support.hpp"

using namespace levyou;
using testsupport::random_matrix;
using testsupport::series_exp;

TEST_CASE("matrix_exp at s = 0 is the identity") {
    RandomStream rs(11, 0);
    for (int n : {1, 2, 5}) {
        const Eigen::MatrixXd A = random_matrix(n, n, rs);
        CHECK((matrix_exp(A, 0.0) - Eigen::MatrixXd::Identity(n, n)).norm() == 0.0);
    }
}

TEST_CASE("matrix_exp reproduces the cosh/sinh column") {
    // A = [[0,1],[1,0]], B-column (0,1): e^{sA} B = (sinh s, cosh s).
    Eigen::MatrixXd A(2, 2);
    A << 0, 1, 1, 0;
    Eigen::VectorXd B(2);
    B << 0, 1;
    for (double s : {0.0, 0.3, 1.0, 2.7}) {
        const Eigen::VectorXd col = matrix_exp(A, s) * B;
        CHECK(col(0) == doctest::Approx(std::sinh(s)).epsilon(1e-12));
        CHECK(col(1) == doctest::Approx(std::cosh(s)).epsilon(1e-12));
    }
}

TEST_CASE("matrix_exp matches the Taylor-series oracle") {
    RandomStream rs(17, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::MatrixXd A = random_matrix(3, 3, rs);
        const Eigen::MatrixXd expected = series_exp(A, 0.7);
        const Eigen::MatrixXd got = matrix_exp(A, 0.7);
        CHECK((got - expected).norm() <= 1e-10 * expected.norm());
    }
}

TEST_CASE("matrix_exp semigroup property and determinant identity") {
    RandomStream rs(23, 0);
    for (int rep = 0; rep < 30; ++rep) {
        Eigen::MatrixXd A = random_matrix(3, 3, rs);
        const double norm = operator_norm(A);
        if (norm > 2.0) A *= 2.0 / norm;
        const double s = 2.0 * rs.uniform();
        const double t = 2.0 * rs.uniform();
        const Eigen::MatrixXd whole = matrix_exp(A, s + t);
        const Eigen::MatrixXd split = matrix_exp(A, s) * matrix_exp(A, t);
        CHECK((whole - split).norm() <= 1e-8 * (1.0 + whole.norm()));
        CHECK(whole.determinant() ==
              doctest::Approx(std::exp((s + t) * A.trace())).epsilon(1e-8));
    }
}

TEST_CASE("matrix_exp rejects non-finite input") {
    Eigen::MatrixXd A(1, 1);
    A << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(matrix_exp(A, 1.0), InvalidInput);
    Eigen::MatrixXd B(2, 2);
    B.setZero();
    CHECK_THROWS_AS(matrix_exp(B, std::numeric_limits<double>::infinity()), InvalidInput);
}

TEST_CASE("check_dissipative basic cases") {
    CHECK(check_dissipative(Eigen::MatrixXd::Zero(3, 3)));
    CHECK(check_dissipative(-Eigen::MatrixXd::Identity(3, 3)));
    Eigen::MatrixXd A(2, 2);
    A << 0, 1, 1, 0;  // symmetric part has eigenvalue +1
    CHECK_FALSE(check_dissipative(A));
    // skew part is irrelevant
    Eigen::MatrixXd S(2, 2);
    S << 0, 5, -5, 0;
    CHECK(check_dissipative(S));
}

TEST_CASE("dissipative drift contracts the flow") {
    RandomStream rs(31, 0);
    for (int rep = 0; rep < 20; ++rep) {
        // A = skew + negative semidefinite symmetric part
        const Eigen::MatrixXd M = random_matrix(3, 3, rs);
        const Eigen::MatrixXd skew = 0.5 * (M - M.transpose());
        const Eigen::MatrixXd G = random_matrix(3, 3, rs);
        const Eigen::MatrixXd A = skew - G * G.transpose();
        REQUIRE(check_dissipative(A, 1e-10));
        const double s = 2.0 * rs.uniform();
        Eigen::VectorXd x = random_matrix(3, 1, rs);
        const double before = x.norm();
        const double after = (matrix_exp(A, s) * x).norm();
        CHECK(after <= before * (1.0 + 10.0 * 1e-10 * s) + 1e-12);
    }
}

TEST_CASE("column_split on the identity") {
    const ColumnSplit split = column_split(Eigen::MatrixXd::Identity(3, 3));
    CHECK(split.b1_inv_norm == doctest::Approx(1.0));
    CHECK((split.B1 - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
    CHECK((split.B1 * split.B1_inv - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-10);
}

TEST_CASE("column_split picks the invertible block of (0 | I)") {
    Eigen::MatrixXd B(2, 3);
    B << 0, 1, 0, 0, 0, 1;
    const ColumnSplit split = column_split(B);
    CHECK(split.b1_inv_norm == doctest::Approx(1.0));
    // the zero column must land in B2
    CHECK(split.permutation[2] == 0);
}

TEST_CASE("column_split minimizes the inverse norm over subsets") {
    // n=1, d=2, B = (2, 3): subsets give ||B1^{-1}|| in {1/2, 1/3}; min is 1/3.
    Eigen::MatrixXd B(1, 2);
    B << 2, 3;
    const ColumnSplit split = column_split(B);
    CHECK(split.B1(0, 0) == doctest::Approx(3.0));
    CHECK(split.b1_inv_norm == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("column_split permutation recombines to B") {
    RandomStream rs(37, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::MatrixXd B = random_matrix(3, 5, rs);
        const ColumnSplit split = column_split(B);
        for (int j = 0; j < 3; ++j) {
            CHECK((B.col(split.permutation[j]) - split.B1.col(j)).norm() == 0.0);
        }
        for (int j = 3; j < 5; ++j) {
            CHECK((B.col(split.permutation[j]) - split.B2.col(j - 3)).norm() == 0.0);
        }
        // embed maps through B back to B1 w
        const Eigen::VectorXd w = random_matrix(3, 1, rs);
        CHECK((B * split.embed(w) - split.B1 * w).norm() <= 1e-12);
    }
}

TEST_CASE("column_split rejects rank-deficient loadings") {
    Eigen::MatrixXd B(2, 2);
    B << 1, 2, 2, 4;
    CHECK_THROWS_AS(column_split(B), RankDeficientError);
    CHECK_THROWS_AS(column_split(Eigen::MatrixXd::Zero(2, 3)), RankDeficientError);
    CHECK_THROWS_AS(column_split(Eigen::MatrixXd::Ones(2, 1)), RankDeficientError);
}

TEST_CASE("operator_norm") {
    CHECK(operator_norm(Eigen::MatrixXd::Zero(3, 3)) == 0.0);
    CHECK(operator_norm(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(1.0));
    Eigen::MatrixXd N(2, 2);
    N << 0, 2, 0, 0;
    CHECK(operator_norm(N) == doctest::Approx(2.0).epsilon(1e-8));
}
