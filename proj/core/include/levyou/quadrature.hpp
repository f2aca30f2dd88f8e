#pragma once

#include <Eigen/Dense>
#include <functional>

namespace levyou {

/// Adaptive 15-point Gauss-Legendre integral of f over [a, b].
/// Recursion stops when the two-halves refinement of a panel changes it by
/// less than the panel's share of the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-14);

/// Same scheme for a matrix-valued integrand (error measured in Frobenius norm).
Eigen::MatrixXd integrate_matrix(const std::function<Eigen::MatrixXd(double)>& f,
                                 double a, double b, double rel_tol = 1e-10);

/// Integral of f over [a, inf) by geometrically expanding shells.
/// `diverged` is set when shell contributions stop shrinking (or overflow)
/// before the tail drops below tolerance.
struct TailResult {
    double value = 0.0;
    bool diverged = false;
};
TailResult integrate_tail(const std::function<double(double)>& f, double a,
                          double first_width, double rel_tol = 1e-10,
                          int max_shells = 60);

/// Integral of g over the closed ball B_radius(center), d = dim(center) <= 3.
/// d=1 uses the adaptive rule directly; d=2,3 use spherical coordinates with
/// an adaptive radial rule and a doubling angular rule.
double ball_integral(const std::function<double(const Eigen::VectorXd&)>& g,
                     const Eigen::VectorXd& center, double radius,
                     double rel_tol = 1e-10);

/// Integral of g over all of R^d (d <= 3) by expanding-shell ball integrals
/// around `center`; sets `diverged` like integrate_tail.
TailResult rd_integral(const std::function<double(const Eigen::VectorXd&)>& g,
                       const Eigen::VectorXd& center, double first_radius,
                       double rel_tol = 1e-10, int max_shells = 40);

/// Surface area of the unit sphere S^{d-1} in R^d.
double unit_sphere_area(int d);

}  // namespace levyou
