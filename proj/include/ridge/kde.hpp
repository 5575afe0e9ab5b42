#ifndef RIDGE_KDE_HPP
#define RIDGE_KDE_HPP

#include <memory>

#include "ridge/types.hpp"

namespace ridge {

// Gaussian-kernel KDE with analytic derivatives up to order 4.
//
//   f(x) = 1/(n h^d) sum_i K((X_i - x)/h),   K = standard normal density.
//
// Order-r partial derivatives follow from the Hermite recursion
//   phi^(r)(t) = (-1)^r He_r(t) phi(t),
// which for the multi-index alpha gives
//   d^alpha f(x) = 1/(n h^{d+|alpha|}) sum_i K(u_i) prod_j He_{alpha_j}(u_ij),
// with u_i = (X_i - x)/h. Exact to floating point, no internal differencing.
class KdeModel final : public DensityModel {
public:
    KdeModel(PointCloud cloud, Bandwidth h);

    DerivativeBundle evaluate(const Vector& x, int order) const override;
    int dimension() const override { return cloud_.d(); }
    Box domain() const override { return domain_; }

    double bandwidth() const { return h_; }
    const PointCloud& cloud() const { return cloud_; }

    // mean(sigma_j) * n^{-1/(d+6)}; exponent chosen for Hessian consistency.
    static double silverman_bandwidth(const PointCloud& cloud);

private:
    PointCloud cloud_;
    double h_;
    Box domain_;  // bounding box of the cloud padded by 3h
};

std::shared_ptr<KdeModel> build_kde(PointCloud cloud, Bandwidth h);

// Max relative discrepancy between the analytic order-r derivative and a
// central finite difference of the analytic order-(r-1) derivative.
double kde_derivative_check(const DensityModel& model, const Vector& x, int order,
                            double step = 1e-5);

}  // namespace ridge

#endif
