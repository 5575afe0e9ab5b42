#include "ridge/example1.hpp"

#include <cmath>

namespace ridge {

Box Example1Model::domain() const {
    Box b;
    b.lo = Vector(2);
    b.hi = Vector(2);
    b.lo << -1.0, 0.0;
    b.hi << 1.0, 2.0;
    return b;
}

DerivativeBundle Example1Model::evaluate(const Vector& x, int order) const {
    if (order < 0 || order > 4) throw InvalidInputError("derivative order must be in 0..4");
    if (x.size() != 2) throw InvalidInputError("Example1 model is 2-dimensional");
    const double u = x[0], v = x[1];

    DerivativeBundle b;
    b.order = order;
    b.value = 0.375 * (1.0 - u * u) * v;
    if (order >= 1) {
        b.gradient = Vector(2);
        b.gradient << -0.75 * u * v, 0.375 * (1.0 - u * u);
    }
    if (order >= 2) {
        b.hessian = Matrix(2, 2);
        b.hessian << -0.75 * v, -0.75 * u, -0.75 * u, 0.0;
    }
    if (order >= 3) {
        b.third = Tensor3(2);
        // only d^3 f / du^2 dv is nonzero
        b.third(0, 0, 1) = -0.75;
        b.third(0, 1, 0) = -0.75;
        b.third(1, 0, 0) = -0.75;
    }
    if (order >= 4) b.fourth = Tensor4(2);
    return b;
}

Vector Example1Model::vertical_ridge_point(double v) {
    Vector p(2);
    p << 0.0, v;
    return p;
}

Vector Example1Model::curve_ridge_point(double u) {
    Vector p(2);
    p << u, (1.0 - u * u) / std::sqrt(2.0 + 2.0 * u * u);
    return p;
}

std::vector<Vector> Example1Model::ridge_samples(int per_curve) {
    std::vector<Vector> out;
    out.reserve(2 * per_curve);
    for (int i = 1; i < per_curve; ++i)
        out.push_back(vertical_ridge_point(2.0 * i / per_curve));
    for (int i = 0; i <= per_curve; ++i)
        out.push_back(curve_ridge_point(-1.0 + 2.0 * i / per_curve));
    return out;
}

std::shared_ptr<Example1Model> build_example1() {
    return std::make_shared<Example1Model>();
}

}  // namespace ridge
