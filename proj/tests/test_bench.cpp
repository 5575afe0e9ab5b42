#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ridge/bench.hpp"
#include "ridge/example1.hpp"

using namespace ridge;

namespace {

Vector vec2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

}  // namespace

TEST_CASE("generate: shapes, sizes, determinism") {
    for (Shape shape : {Shape::XCross, Shape::Circle, Shape::Spiral, Shape::Example1}) {
        SyntheticSpec spec;
        spec.shape = shape;
        spec.n = 64;
        spec.seed = 5;
        const auto [cloud, truth] = generate(spec);
        CHECK(cloud.n() == 64);
        CHECK(cloud.d() == 2);
        CHECK(truth.points.size() >= 2000);

        const auto [cloud2, truth2] = generate(spec);
        CHECK((cloud.points.array() == cloud2.points.array()).all());

        spec.seed = 6;
        const auto [cloud3, truth3] = generate(spec);
        CHECK(!(cloud.points.array() == cloud3.points.array()).all());
    }
}

TEST_CASE("generate rejects invalid specs") {
    SyntheticSpec spec;
    spec.n = 0;
    CHECK_THROWS_AS(generate(spec), InvalidInputError);
    spec.n = 10;
    spec.noise_sigma = -0.1;
    CHECK_THROWS_AS(generate(spec), InvalidInputError);
}

TEST_CASE("generate: samples scatter around their generating curves") {
    SyntheticSpec spec;
    spec.n = 300;
    spec.noise_sigma = 0.03;
    spec.seed = 21;

    spec.shape = Shape::Circle;
    auto [circle, circle_truth] = generate(spec);
    for (int i = 0; i < circle.n(); ++i)
        CHECK(std::abs(circle.points.row(i).norm() - 1.0) < 0.25);

    spec.shape = Shape::XCross;
    auto [cross, cross_truth] = generate(spec);
    for (int i = 0; i < cross.n(); ++i) {
        const double x = cross.points(i, 0), y = cross.points(i, 1);
        CHECK(std::min(std::abs(x - y), std::abs(x + y)) < 0.35);
    }

    spec.shape = Shape::Example1;
    auto [ex1, ex1_truth] = generate(spec);
    for (int i = 0; i < ex1.n(); ++i) {
        CHECK(ex1.points(i, 0) >= -1.0);
        CHECK(ex1.points(i, 0) <= 1.0);
        CHECK(ex1.points(i, 1) >= 0.0);
        CHECK(ex1.points(i, 1) <= 2.0);
    }
}

TEST_CASE("spiral ground truth lies on the spiral and spans its full length") {
    SyntheticSpec spec;
    spec.shape = Shape::Spiral;
    spec.n = 10;
    const auto [cloud, truth] = generate(spec);
    // r = 0.1 + 0.15 theta: endpoints at theta = 0 and 4 pi
    const double r_end = 0.1 + 0.15 * 4 * 3.14159265358979;
    CHECK((truth.points.front() - vec2(0.1, 0.0)).norm() < 1e-6);
    CHECK(truth.points.back().norm() == doctest::Approx(r_end).epsilon(1e-6));
    for (const auto& p : truth.points) {
        const double r = p.norm();
        CHECK(r >= 0.1 - 1e-9);
        CHECK(r <= r_end + 1e-9);
    }
}

TEST_CASE("hausdorff: hand-checked values") {
    const std::vector<Vector> a = {vec2(0, 0), vec2(1, 0)};
    const std::vector<Vector> b = {vec2(0, 0)};
    CHECK(hausdorff(a, b) == doctest::Approx(1.0));
    CHECK(hausdorff(b, a) == doctest::Approx(1.0));  // symmetric
    CHECK(hausdorff(a, a) == 0.0);

    const std::vector<Vector> c = {vec2(0, 3), vec2(5, 0)};
    // directed a->c: (0,0)->min(3,5)=3; (1,0)->min(sqrt(10),4)=sqrt(10)
    // directed c->a: (0,3)->3; (5,0)->4
    CHECK(hausdorff(a, c) == doctest::Approx(4.0));
    CHECK_THROWS_AS(hausdorff({}, a), InvalidInputError);
}

TEST_CASE("fd oracles recover polynomial derivatives") {
    auto fun = [](const Vector& x) { return x[0] * x[0] * x[1] + 3.0 * x[1]; };
    const Vector x = vec2(0.7, -0.4);
    const Vector g = fd_gradient(fun, x, 1e-6);
    CHECK(g[0] == doctest::Approx(2 * 0.7 * -0.4).epsilon(1e-8));
    CHECK(g[1] == doctest::Approx(0.7 * 0.7 + 3.0).epsilon(1e-8));

    auto vfun = [](const Vector& x) -> Vector {
        return vec2(x[0] * x[1], x[1] * x[1]);
    };
    const Matrix j = fd_jacobian(vfun, x, 1e-6);
    CHECK(j(0, 0) == doctest::Approx(-0.4).epsilon(1e-8));
    CHECK(j(0, 1) == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(j(1, 0) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(j(1, 1) == doctest::Approx(-0.8).epsilon(1e-8));
    CHECK_THROWS_AS(fd_gradient(fun, x, 0.0), InvalidInputError);
}

TEST_CASE("shape names round-trip") {
    for (Shape s : {Shape::XCross, Shape::Circle, Shape::Spiral, Shape::Example1})
        CHECK(shape_from_name(shape_name(s)) == s);
    CHECK_THROWS_AS(shape_from_name("triangle"), InvalidInputError);
}

TEST_CASE("convergence_experiment: smoke run produces finite medians") {
    const auto rows =
        convergence_experiment(Shape::Circle, {200}, 0.6, Algorithm::Alg2, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 200);
    CHECK(std::isfinite(rows[0].median_dh));
    CHECK(rows[0].median_dh < 0.5);
    CHECK_THROWS_AS(convergence_experiment(Shape::Circle, {}, 0.6, Algorithm::Alg2, 1),
                    InvalidInputError);
    CHECK_THROWS_AS(
        convergence_experiment(Shape::Circle, {200, 100}, 0.6, Algorithm::Alg2, 1),
        InvalidInputError);
}
