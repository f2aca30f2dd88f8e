#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace levyou {

using TestFn = std::function<double(const Eigen::VectorXd&)>;

/// Named test function selected from the curated library (configs pick
/// functions by name so results stay reproducible):
///   constant            f = a
///   indicator_halfspace f(x) = 1_{<vec, x> >= a}
///   indicator_ball      f(x) = 1_{|x - vec| <= a}
///   bump                f(x) = exp(-|x - vec|^2 / a^2)
///   ramp                f(x) = clamp(<vec, x> - a, 0, 1)   (Lipschitz)
///   sign                f(x) = sign(x_axis)                 (axis = a)
struct TestFnSpec {
    std::string name;
    Eigen::VectorXd vec;
    double a = 0.0;
};

TestFn make_test_function(const TestFnSpec& spec, int dim);

}  // namespace levyou
