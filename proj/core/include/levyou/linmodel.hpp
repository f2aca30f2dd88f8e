#pragma once

#include <Eigen/Dense>
#include <vector>

namespace levyou {

/// The linear model dX = A X dt + B dL: an n x n drift matrix A (units
/// 1/time) and an n x d noise loading B.
struct OUModel {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;

    int n() const { return static_cast<int>(A.rows()); }
    int d() const { return static_cast<int>(B.cols()); }

    /// Throws InvalidInput on size mismatch or non-finite entries.
    void validate() const;

    /// True when A is exactly the zero matrix (cheap e^{sA} = I fast path).
    bool zero_drift() const { return A.isZero(0.0); }
};

/// A choice of n columns of B forming an invertible B1, plus the rest.
/// The inverse norm ||B1^{-1}|| is the constant c in the Harnack bound and
/// sets the coupling step eps / (2 ||B1^{-1}||), so column_split minimizes it.
struct ColumnSplit {
    std::vector<int> permutation;  ///< column order of B; first n entries form B1
    Eigen::MatrixXd B1;            ///< invertible n x n
    Eigen::MatrixXd B2;            ///< n x (d-n)
    Eigen::MatrixXd B1_inv;
    double b1_inv_norm = 0.0;      ///< spectral norm of B1^{-1}

    /// Embed w in R^n into jump space R^d so that B * embed(w) = B1 * w:
    /// component permutation[j] carries w_j, all others are zero.
    Eigen::VectorXd embed(const Eigen::VectorXd& w) const;
};

/// e^{sA} by scaling-and-squaring with a fixed-order diagonal Pade
/// approximant (orders 3/5/7/9/13 chosen from ||sA||_1; target accuracy
/// ~1e-12 on well-conditioned inputs).
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& A, double s);

/// True iff the largest eigenvalue of (A + A^T)/2 is <= tol
/// (the <Ax, x> <= 0 hypothesis, with numerical slack).
bool check_dissipative(const Eigen::MatrixXd& A, double tol = 1e-10);

/// Pick the best n-column subset of B. Searches all C(d, n) subsets when
/// that count is <= 200, otherwise takes the pivoted-QR subset. Throws
/// RankDeficientError when Rank(B) < n.
ColumnSplit column_split(const Eigen::MatrixXd& B);

/// Spectral norm (largest singular value).
double operator_norm(const Eigen::MatrixXd& A);

}  // namespace levyou
