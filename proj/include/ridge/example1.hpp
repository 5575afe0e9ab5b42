#ifndef RIDGE_EXAMPLE1_HPP
#define RIDGE_EXAMPLE1_HPP

#include <memory>
#include <vector>

#include "ridge/types.hpp"

namespace ridge {

// Analytic plug-in density f(u,v) = (3/8)(1-u^2) v on [-1,1] x [0,2].
// Polynomial, so all derivatives are exact; orders five and higher vanish.
//
// Its 1-dimensional ridge set is the union of the vertical segment
// {u = 0, v in (0,2)} and the curve v = (1-u^2)/sqrt(2+2u^2); the two
// intersect at (0, 1/sqrt(2)).
class Example1Model final : public DensityModel {
public:
    DerivativeBundle evaluate(const Vector& x, int order) const override;
    int dimension() const override { return 2; }
    Box domain() const override;

    static Vector vertical_ridge_point(double v);
    static Vector curve_ridge_point(double u);

    // Dense sampling of both ridge curves for testing, restricted to the
    // stated parameter ranges.
    static std::vector<Vector> ridge_samples(int per_curve = 2000);
};

std::shared_ptr<Example1Model> build_example1();

}  // namespace ridge

#endif
