#ifndef RIDGE_BENCH_HPP
#define RIDGE_BENCH_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ridge/pipeline.hpp"
#include "ridge/types.hpp"

namespace ridge {

enum class Shape { XCross, Circle, Spiral, Example1 };

std::string shape_name(Shape s);
Shape shape_from_name(const std::string& name);

struct SyntheticSpec {
    Shape shape = Shape::Circle;
    int n = 200;
    double noise_sigma = 0.05;
    std::uint64_t seed = 0;
};

// Dense point sampling of the true ridge set.
struct GroundTruth {
    std::vector<Vector> points;
};

std::pair<PointCloud, GroundTruth> generate(const SyntheticSpec& spec);

// max of the two directed sup-inf distances, exact double loop
double hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b);

// Central finite differences (the oracle used by all gradient checks).
Vector fd_gradient(const std::function<double(const Vector&)>& fun, const Vector& x,
                   double step);
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& fun, const Vector& x,
                   double step);

struct ConvergenceRow {
    int n;
    double median_dh;
};

// For each n: sample trials clouds, extract, compute the Hausdorff distance
// between extracted ridge points and the ground truth restricted to the
// retained density region; report per-n medians. h = h_scale * n^{-1/8}.
std::vector<ConvergenceRow> convergence_experiment(Shape shape,
                                                   const std::vector<int>& n_list,
                                                   double h_scale, Algorithm algorithm,
                                                   int trials,
                                                   std::uint64_t base_seed = 17,
                                                   double noise_sigma = 0.05);

struct GapReport {
    // max over samples of the SCMS-missed vertical segment of the distance
    // to each method's converged outputs
    double coverage_scms = 0.0;
    double coverage_alg1 = 0.0;
    // distance from each method's outputs to the curve intersection point
    double intersection_err_scms = 0.0;
    double intersection_err_alg1 = 0.0;
    int n_finals_scms = 0;
    int n_finals_alg1 = 0;
};

// Runs SCMS-direction flows and Algorithm-1 flows from a common grid of
// starts on the Example 1 analytic density and measures how well each
// covers the vertical ridge segment that the SCMS direction repels from.
GapReport scms_gap_experiment();

}  // namespace ridge

#endif
