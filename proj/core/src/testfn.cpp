#include "levyou/testfn.hpp"

#include <algorithm>
#include <cmath>

#include "levyou/errors.hpp"

namespace levyou {

TestFn make_test_function(const TestFnSpec& spec, int dim) {
    auto need_vec = [&]() {
        if (spec.vec.size() != dim) {
            throw InvalidInput("test function '" + spec.name + "': vector parameter must have dimension " +
                               std::to_string(dim));
        }
        return spec.vec;
    };
    if (spec.name == "constant") {
        const double v = spec.a;
        return [v](const Eigen::VectorXd&) { return v; };
    }
    if (spec.name == "indicator_halfspace") {
        const Eigen::VectorXd normal = need_vec();
        const double offset = spec.a;
        return [normal, offset](const Eigen::VectorXd& x) {
            return normal.dot(x) >= offset ? 1.0 : 0.0;
        };
    }
    if (spec.name == "indicator_ball") {
        const Eigen::VectorXd center = need_vec();
        const double radius = spec.a;
        if (!(radius > 0.0)) throw InvalidInput("indicator_ball: radius must be > 0");
        return [center, radius](const Eigen::VectorXd& x) {
            return (x - center).norm() <= radius ? 1.0 : 0.0;
        };
    }
    if (spec.name == "bump") {
        const Eigen::VectorXd center = need_vec();
        const double width = spec.a;
        if (!(width > 0.0)) throw InvalidInput("bump: width must be > 0");
        return [center, width](const Eigen::VectorXd& x) {
            const double r = (x - center).norm() / width;
            return std::exp(-r * r);
        };
    }
    if (spec.name == "ramp") {
        const Eigen::VectorXd dir = need_vec();
        const double offset = spec.a;
        return [dir, offset](const Eigen::VectorXd& x) {
            return std::clamp(dir.dot(x) - offset, 0.0, 1.0);
        };
    }
    if (spec.name == "sign") {
        const int axis = static_cast<int>(spec.a);
        if (axis < 0 || axis >= dim) throw InvalidInput("sign: axis out of range");
        return [axis](const Eigen::VectorXd& x) {
            return x(axis) > 0.0 ? 1.0 : (x(axis) < 0.0 ? -1.0 : 0.0);
        };
    }
    throw InvalidInput("unknown test function '" + spec.name + "'");
}

}  // namespace levyou
