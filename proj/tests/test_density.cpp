#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "ridge/csv.hpp"
#include "ridge/example1.hpp"
#include "ridge/kde.hpp"
#include "ridge/types.hpp"

using namespace ridge;

namespace {

Vector vec2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

Matrix random_cloud(int n, int d, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(lo, hi);
    Matrix m(n, d);
    for (long i = 0; i < m.size(); ++i) m(i / d, i % d) = unif(rng);
    return m;
}

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

TEST_CASE("single-sample 1-d KDE at the sample: value, gradient, Hessian") {
    Matrix pts(1, 1);
    pts(0, 0) = 0.0;
    auto kde = build_kde(PointCloud::from_matrix(pts), Bandwidth(1.0));
    Vector x(1);
    x << 0.0;
    const DerivativeBundle b = kde->evaluate(x, 2);
    CHECK(b.value == doctest::Approx(kInvSqrt2Pi).epsilon(1e-12));
    CHECK(std::abs(b.gradient[0]) == 0.0);  // exact symmetry
    CHECK(b.hessian(0, 0) == doctest::Approx(-kInvSqrt2Pi).epsilon(1e-12));
}

TEST_CASE("KDE analytic derivatives match finite differences, orders 1-4") {
    auto kde = build_kde(PointCloud::from_matrix(random_cloud(5, 2, 42)), Bandwidth(0.5));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-0.8, 0.8);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector x = vec2(unif(rng), unif(rng));
        CHECK(kde_derivative_check(*kde, x, 1) < 1e-6);
        CHECK(kde_derivative_check(*kde, x, 2) < 1e-5);
        CHECK(kde_derivative_check(*kde, x, 3) < 1e-4);
        CHECK(kde_derivative_check(*kde, x, 4) < 1e-4);
    }
}

TEST_CASE("KDE lower orders are bitwise independent of the requested order") {
    auto kde = build_kde(PointCloud::from_matrix(random_cloud(20, 2, 99)), Bandwidth(0.4));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector x = vec2(unif(rng), unif(rng));
        const DerivativeBundle full = kde->evaluate(x, 4);
        for (int r = 0; r <= 3; ++r) {
            const DerivativeBundle part = kde->evaluate(x, r);
            CHECK(part.value == full.value);
            if (r >= 1) CHECK((part.gradient.array() == full.gradient.array()).all());
            if (r >= 2) CHECK((part.hessian.array() == full.hessian.array()).all());
            if (r >= 3) {
                bool same = true;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        for (int l = 0; l < 2; ++l)
                            same = same && part.third(i, j, l) == full.third(i, j, l);
                CHECK(same);
            }
        }
    }
}

TEST_CASE("unpopulated derivative orders are flagged, not zero-filled") {
    auto kde = build_kde(PointCloud::from_matrix(random_cloud(5, 2, 1)), Bandwidth(0.5));
    const DerivativeBundle b = kde->evaluate(vec2(0.1, 0.2), 1);
    CHECK(b.order == 1);
    CHECK_THROWS_AS(b.require(2), InvalidInputError);
    CHECK_NOTHROW(b.require(1));
}

TEST_CASE("KDE is strictly positive and integrates to 1 in d=1") {
    Matrix pts(3, 1);
    pts << -0.5, 0.2, 0.9;
    auto kde = build_kde(PointCloud::from_matrix(pts), Bandwidth(0.3));
    // trapezoid over +-8 sigma beyond the data range
    const double lo = -0.5 - 8 * 0.3, hi = 0.9 + 8 * 0.3;
    const int m = 200000;
    double integral = 0.0;
    double prev = 0.0;
    for (int i = 0; i <= m; ++i) {
        Vector x(1);
        x << lo + (hi - lo) * i / m;
        const double v = kde->evaluate(x, 0).value;
        CHECK(v > 0.0);
        if (i > 0) integral += 0.5 * (prev + v) * (hi - lo) / m;
        prev = v;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("KDE derivative tensors are symmetric under index permutation") {
    auto kde = build_kde(PointCloud::from_matrix(random_cloud(10, 3, 5)), Bandwidth(0.5));
    const Vector x = Vector::Constant(3, 0.1);
    const DerivativeBundle b = kde->evaluate(x, 4);
    CHECK((b.hessian - b.hessian.transpose()).norm() <= 1e-12 * b.hessian.norm());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l) {
                CHECK(b.third(i, j, l) == b.third(j, i, l));
                CHECK(b.third(i, j, l) == b.third(l, j, i));
                for (int m2 = 0; m2 < 3; ++m2) {
                    CHECK(b.fourth(i, j, l, m2) == b.fourth(j, i, l, m2));
                    CHECK(b.fourth(i, j, l, m2) == b.fourth(m2, j, l, i));
                }
            }
}

TEST_CASE("KDE rejects invalid construction inputs") {
    CHECK_THROWS_AS(Bandwidth(0.0), InvalidInputError);
    CHECK_THROWS_AS(Bandwidth(-1.0), InvalidInputError);
    CHECK_THROWS_AS(PointCloud::from_matrix(Matrix(0, 2)), InvalidInputError);
    Matrix bad(1, 1);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(PointCloud::from_matrix(bad), InvalidInputError);
}

TEST_CASE("Example 1: pinned values and closed-form derivatives") {
    auto model = build_example1();
    CHECK(model->dimension() == 2);

    // value at the ridge intersection
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(model->evaluate(vec2(0.0, inv_sqrt2), 0).value ==
          doctest::Approx(3.0 / (8.0 * std::sqrt(2.0))).epsilon(1e-12));

    // df/du vanishes on the symmetry axis
    for (double v : {0.1, 0.7, 1.3, 1.9})
        CHECK(model->evaluate(vec2(0.0, v), 1).gradient[0] == 0.0);

    // closed forms at random points
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> du(-1.0, 1.0), dv(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double u = du(rng), v = dv(rng);
        const DerivativeBundle b = model->evaluate(vec2(u, v), 3);
        CHECK(b.value == doctest::Approx(0.375 * (1 - u * u) * v).epsilon(1e-12));
        CHECK(b.gradient[0] == doctest::Approx(-0.75 * u * v).epsilon(1e-12));
        CHECK(b.gradient[1] == doctest::Approx(0.375 * (1 - u * u)).epsilon(1e-12));
        CHECK(b.hessian(0, 0) == doctest::Approx(-0.75 * v).epsilon(1e-12));
        CHECK(b.hessian(0, 1) == doctest::Approx(-0.75 * u).epsilon(1e-12));
        CHECK(b.hessian(1, 1) == 0.0);
        CHECK(b.third(0, 0, 1) == doctest::Approx(-0.75).epsilon(1e-12));
        CHECK(b.third(0, 0, 0) == 0.0);
        CHECK(b.third(1, 1, 1) == 0.0);
    }
}

TEST_CASE("Example 1: total mass is 1 over the rectangle") {
    // (3/8) * int(1-u^2, -1..1) * int(v, 0..2) = (3/8) * (4/3) * 2 = 1
    auto model = build_example1();
    const int m = 2000;
    double integral = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double u = -1.0 + 2.0 * (i + 0.5) / m;
            const double v = 2.0 * (j + 0.5) / m;
            integral += model->evaluate(vec2(u, v), 0).value * (2.0 / m) * (2.0 / m);
        }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Example 1 ridge parameterizations satisfy the defining equations") {
    // curve: v = (1-u^2)/sqrt(2+2u^2)
    for (double u : {-0.7, -0.2, 0.0, 0.4, 0.8}) {
        const Vector p = Example1Model::curve_ridge_point(u);
        CHECK(p[1] == doctest::Approx((1 - u * u) / std::sqrt(2 + 2 * u * u)).epsilon(1e-12));
    }
    const Vector q = Example1Model::vertical_ridge_point(1.3);
    CHECK(q[0] == 0.0);
    CHECK(q[1] == 1.3);
    CHECK(Example1Model::ridge_samples(100).size() >= 200);
}

TEST_CASE("silverman-style default bandwidth") {
    const Matrix pts = random_cloud(200, 2, 123);
    const double h = KdeModel::silverman_bandwidth(PointCloud::from_matrix(pts));
    CHECK(h > 0.0);
    // scale: mean marginal sd of U(-1,1) is ~0.577, n^{-1/8} ~ 0.515
    CHECK(h > 0.1);
    CHECK(h < 1.0);
}

TEST_CASE("CSV round trip and header handling") {
    const std::string path = "test_density_tmp.csv";
    Matrix pts(3, 2);
    pts << 0.25, -1.5, 1e-17, 2.0, -0.125, 0.5;
    write_point_cloud_csv(path, pts);
    const PointCloud back = read_point_cloud_csv(path);
    REQUIRE(back.n() == 3);
    REQUIRE(back.d() == 2);
    CHECK((back.points.array() == pts.array()).all());  // 17 digits round-trips doubles

    {
        std::ofstream out(path);
        out << "1.0,2.0\n3.0,4.0\n";  // headerless
    }
    CHECK(read_point_cloud_csv(path).n() == 2);

    {
        std::ofstream out(path);
        out << "1.0,oops\n";
    }
    CHECK_THROWS_AS(read_point_cloud_csv(path), InvalidInputError);
    CHECK_THROWS_AS(read_point_cloud_csv("no_such_file_anywhere.csv"), InvalidInputError);
    std::remove(path.c_str());
}
