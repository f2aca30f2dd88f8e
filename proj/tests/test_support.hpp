#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "levyou/rng.hpp"

namespace testsupport {

/// Independent matrix-exponential oracle: plain Taylor series summed to
/// machine convergence. Only valid for moderate ||sA||.
inline Eigen::MatrixXd series_exp(const Eigen::MatrixXd& A, double s) {
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = term;
    const Eigen::MatrixXd M = s * A;
    for (int k = 1; k < 200; ++k) {
        term = (term * M) / static_cast<double>(k);
        sum += term;
        if (term.norm() <= 1e-18 * sum.norm()) break;
    }
    return sum;
}

/// Standard normal CDF via erfc (reference oracle).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Poisson pmf (reference oracle).
inline double poisson_pmf(long k, double lambda) {
    return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

/// Chi-square upper quantile via the Wilson-Hilferty cube approximation;
/// plenty accurate for goodness-of-fit thresholds at moderate df.
inline double chi2_quantile(double df, double prob) {
    // prob-quantile of N(0,1) for the usual test levels
    double z;
    if (prob >= 0.995) {
        z = 2.5758293035489004;
    } else if (prob >= 0.99) {
        z = 2.3263478740408408;
    } else if (prob >= 0.975) {
        z = 1.959963984540054;
    } else {
        z = 1.6448536269514722;
    }
    const double a = 2.0 / (9.0 * df);
    const double c = 1.0 - a + z * std::sqrt(a);
    return df * c * c * c;
}

/// Random matrix with i.i.d. uniform[-1,1] entries.
inline Eigen::MatrixXd random_matrix(int rows, int cols, levyou::RandomStream& rs) {
    Eigen::MatrixXd M(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) M(r, c) = 2.0 * rs.uniform() - 1.0;
    }
    return M;
}

}  // namespace testsupport
