#include "levyou/quadrature.hpp"

#include <cmath>
#include <limits>

#include "levyou/errors.hpp"

namespace levyou {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; the rule
// is symmetric).
constexpr int kHalf = 7;
constexpr double kNode0Weight = 0.2025782419255613;
constexpr double kNodes[kHalf] = {
    0.2011940939974345, 0.3941513470775634, 0.5709721726085388,
    0.7244177313601701, 0.8482065834104272, 0.9372733924007060,
    0.9879925180204854,
};
constexpr double kWeights[kHalf] = {
    0.1984314853271116, 0.1861610000155622, 0.1662692058169939,
    0.1395706779261543, 0.1071592204671719, 0.0703660474881081,
    0.0307532419961173,
};

double gl15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = kNode0Weight * f(mid);
    for (int i = 0; i < kHalf; ++i) {
        const double dx = half * kNodes[i];
        sum += kWeights[i] * (f(mid - dx) + f(mid + dx));
    }
    return sum * half;
}

// `budget` caps the total number of panel refinements so integrands with
// non-integrable edge singularities terminate (the caller detects those by
// other means: value overflow or divergence flags).
double adaptive(const std::function<double(double)>& f, double a, double b,
                double whole, double tol, int depth, long& budget) {
    const double mid = 0.5 * (a + b);
    const double left = gl15(f, a, mid);
    const double right = gl15(f, mid, b);
    const double refined = left + right;
    // Forced refinement to depth 3 guards against features sitting exactly
    // on panel edges where the nodes never sample.
    const bool converged = depth >= 3 && std::abs(refined - whole) <= tol;
    if (depth > 48 || --budget <= 0 || converged) return refined;
    return adaptive(f, a, mid, left, 0.5 * tol, depth + 1, budget) +
           adaptive(f, mid, b, right, 0.5 * tol, depth + 1, budget);
}

Eigen::MatrixXd gl15_matrix(const std::function<Eigen::MatrixXd(double)>& f,
                            double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Eigen::MatrixXd sum = kNode0Weight * f(mid);
    for (int i = 0; i < kHalf; ++i) {
        const double dx = half * kNodes[i];
        sum += kWeights[i] * (f(mid - dx) + f(mid + dx));
    }
    return sum * half;
}

Eigen::MatrixXd adaptive_matrix(const std::function<Eigen::MatrixXd(double)>& f,
                                double a, double b, const Eigen::MatrixXd& whole,
                                double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const Eigen::MatrixXd left = gl15_matrix(f, a, mid);
    const Eigen::MatrixXd right = gl15_matrix(f, mid, b);
    const Eigen::MatrixXd refined = left + right;
    if (depth > 40 || (refined - whole).norm() <= tol) return refined;
    return adaptive_matrix(f, a, mid, left, 0.5 * tol, depth + 1) +
           adaptive_matrix(f, mid, b, right, 0.5 * tol, depth + 1);
}

// Mean over the sphere S^{d-1} of h(direction), by doubling the angular how
// many points until the value stabilizes. d = 2: trapezoid in the angle
// (spectral for smooth periodic integrands); d = 3: GL in cos(theta) x
// trapezoid in phi.
double sphere_mean(const std::function<double(const Eigen::VectorXd&)>& h, int d,
                   double rel_tol) {
    if (d == 2) {
        Eigen::VectorXd dir(2);
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (int m = 32; m <= 4096; m *= 2) {
            double sum = 0.0;
            for (int j = 0; j < m; ++j) {
                const double phi = 2.0 * M_PI * (j + 0.5) / m;
                dir << std::cos(phi), std::sin(phi);
                sum += h(dir);
            }
            const double cur = sum / m;
            if (std::isfinite(prev) &&
                std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300)) {
                return cur;
            }
            prev = cur;
        }
        return prev;
    }
    // d == 3
    Eigen::VectorXd dir(3);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int m = 16; m <= 512; m *= 2) {
        // GL panel rule in u = cos(theta) over [-1,1] with m/8 panels.
        const int panels = std::max(1, m / 8);
        double sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double ua = -1.0 + 2.0 * p / panels;
            const double ub = -1.0 + 2.0 * (p + 1) / panels;
            const double umid = 0.5 * (ua + ub), uhalf = 0.5 * (ub - ua);
            auto ring = [&](double u) {
                const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
                double rsum = 0.0;
                for (int j = 0; j < m; ++j) {
                    const double phi = 2.0 * M_PI * (j + 0.5) / m;
                    dir << s * std::cos(phi), s * std::sin(phi), u;
                    rsum += h(dir);
                }
                return rsum / m;
            };
            double psum = kNode0Weight * ring(umid);
            for (int i = 0; i < kHalf; ++i) {
                const double du = uhalf * kNodes[i];
                psum += kWeights[i] * (ring(umid - du) + ring(umid + du));
            }
            sum += psum * uhalf;
        }
        const double cur = sum / 2.0;  // mean over u in [-1,1]
        if (std::isfinite(prev) &&
            std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300)) {
            return cur;
        }
        prev = cur;
    }
    return prev;
}

}  // namespace

double unit_sphere_area(int d) {
    // 2 pi^{d/2} / Gamma(d/2)
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
    if (!(a <= b)) return -integrate(f, b, a, rel_tol, abs_tol);
    if (a == b) return 0.0;
    const double whole = gl15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    long budget = 40000;
    return adaptive(f, a, b, whole, tol, 0, budget);
}

Eigen::MatrixXd integrate_matrix(const std::function<Eigen::MatrixXd(double)>& f,
                                 double a, double b, double rel_tol) {
    const Eigen::MatrixXd whole = gl15_matrix(f, a, b);
    const double tol = std::max(1e-300, rel_tol * whole.norm());
    return adaptive_matrix(f, a, b, whole, tol, 0);
}

TailResult integrate_tail(const std::function<double(double)>& f, double a,
                          double first_width, double rel_tol, int max_shells) {
    TailResult res;
    double lo = a;
    double width = first_width;
    double prev_shell = std::numeric_limits<double>::infinity();
    for (int shell = 0; shell < max_shells; ++shell) {
        const double hi = lo + width;
        const double piece = integrate(f, lo, hi, rel_tol * 0.1, 1e-300);
        res.value += piece;
        if (!std::isfinite(res.value)) {
            res.diverged = true;
            return res;
        }
        if (std::abs(piece) <= rel_tol * (std::abs(res.value) + 1e-300) &&
            std::abs(piece) <= std::abs(prev_shell)) {
            return res;
        }
        prev_shell = piece;
        lo = hi;
        width *= 2.0;
    }
    res.diverged = true;
    return res;
}

double ball_integral(const std::function<double(const Eigen::VectorXd&)>& g,
                     const Eigen::VectorXd& center, double radius,
                     double rel_tol) {
    const int d = static_cast<int>(center.size());
    if (radius < 0.0) throw InvalidInput("ball_integral: negative radius");
    if (radius == 0.0) return 0.0;
    if (d == 1) {
        Eigen::VectorXd z(1);
        return integrate(
            [&](double x) {
                z(0) = x;
                return g(z);
            },
            center(0) - radius, center(0) + radius, rel_tol);
    }
    if (d > 3) throw UnsupportedDimension("ball_integral: d must be <= 3");
    auto shell_value = [&](double s) {
        return sphere_mean(
            [&](const Eigen::VectorXd& dir) {
                return g(center + s * dir);
            },
            d, rel_tol * 0.1);
    };
    const double area = unit_sphere_area(d);
    return integrate(
        [&](double s) { return area * std::pow(s, d - 1) * shell_value(s); },
        0.0, radius, rel_tol);
}

TailResult rd_integral(const std::function<double(const Eigen::VectorXd&)>& g,
                       const Eigen::VectorXd& center, double first_radius,
                       double rel_tol, int max_shells) {
    TailResult res;
    double lo = 0.0;
    double hi = first_radius;
    const int d = static_cast<int>(center.size());
    double prev_shell = std::numeric_limits<double>::infinity();
    for (int shell = 0; shell < max_shells; ++shell) {
        double piece;
        if (d == 1) {
            Eigen::VectorXd z(1);
            auto f1 = [&](double x) {
                z(0) = x;
                return g(z);
            };
            piece = integrate(f1, center(0) - hi, center(0) - lo, rel_tol * 0.1) +
                    (lo == 0.0 ? 0.0
                               : integrate(f1, center(0) + lo, center(0) + hi, rel_tol * 0.1));
            if (lo == 0.0) {
                piece = integrate(f1, center(0) - hi, center(0) + hi, rel_tol * 0.1);
            }
        } else {
            if (d > 3) throw UnsupportedDimension("rd_integral: d must be <= 3");
            const double area = unit_sphere_area(d);
            piece = integrate(
                [&](double s) {
                    return area * std::pow(s, d - 1) *
                           sphere_mean(
                               [&](const Eigen::VectorXd& dir) {
                                   return g(center + s * dir);
                               },
                               d, rel_tol * 0.1);
                },
                lo, hi, rel_tol * 0.1);
        }
        res.value += piece;
        if (!std::isfinite(res.value) || res.value > 1e300) {
            res.diverged = true;
            return res;
        }
        if (shell > 0 &&
            std::abs(piece) <= rel_tol * (std::abs(res.value) + 1e-300) &&
            std::abs(piece) <= std::abs(prev_shell)) {
            return res;
        }
        prev_shell = piece;
        lo = hi;
        hi *= 2.0;
    }
    res.diverged = true;
    return res;
}

}  // namespace levyou
