#include "ridge/kde.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ridge {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Probabilists' Hermite polynomials He_0..He_4 at t.
inline void hermite(double t, double* he) {
    const double t2 = t * t;
    he[0] = 1.0;
    he[1] = t;
    he[2] = t2 - 1.0;
    he[3] = t * (t2 - 3.0);
    he[4] = (t2 - 6.0) * t2 + 3.0;
}

}  // namespace

KdeModel::KdeModel(PointCloud cloud, Bandwidth h)
    : cloud_(PointCloud::from_matrix(std::move(cloud.points))), h_(h.h) {
    domain_ = cloud_.bounding_box().padded(3.0 * h_);
}

std::shared_ptr<KdeModel> build_kde(PointCloud cloud, Bandwidth h) {
    return std::make_shared<KdeModel>(std::move(cloud), h);
}

double KdeModel::silverman_bandwidth(const PointCloud& cloud) {
    const int n = cloud.n();
    const int d = cloud.d();
    if (n < 2) throw InvalidInputError("bandwidth selection needs at least 2 points");
    Vector mean = cloud.points.colwise().mean().transpose();
    double sigma_sum = 0.0;
    for (int j = 0; j < d; ++j) {
        double ss = (cloud.points.col(j).array() - mean[j]).square().sum();
        sigma_sum += std::sqrt(ss / (n - 1));
    }
    const double sigma_bar = sigma_sum / d;
    return sigma_bar * std::pow(static_cast<double>(n), -1.0 / (d + 6));
}

DerivativeBundle KdeModel::evaluate(const Vector& x, int order) const {
    const int d = cloud_.d();
    const int n = cloud_.n();
    if (order < 0 || order > 4) throw InvalidInputError("derivative order must be in 0..4");
    if (static_cast<int>(x.size()) != d)
        throw InvalidInputError("evaluation point dimension mismatch");

    DerivativeBundle b;
    b.order = order;
    if (order >= 1) b.gradient = Vector::Zero(d);
    if (order >= 2) b.hessian = Matrix::Zero(d, d);
    if (order >= 3) b.third = Tensor3(d);
    if (order >= 4) b.fourth = Tensor4(d);

    const double norm_const = std::pow(kTwoPi, -0.5 * d);
    std::vector<double> he(static_cast<size_t>(d) * 5);

    // Accumulate canonical (sorted-index) entries only; the accumulation
    // order for a given derivative order does not depend on the requested
    // maximum, so restrictions of higher-order bundles are bitwise equal.
    for (int s = 0; s < n; ++s) {
        double q = 0.0;
        for (int j = 0; j < d; ++j) {
            const double t = (cloud_.points(s, j) - x[j]) / h_;
            q += t * t;
            hermite(t, &he[static_cast<size_t>(j) * 5]);
        }
        const double w = norm_const * std::exp(-0.5 * q);
        b.value += w;
        if (order < 1) continue;
        auto he_at = [&](int axis, int r) { return he[static_cast<size_t>(axis) * 5 + r]; };
        for (int a = 0; a < d; ++a) b.gradient[a] += he_at(a, 1) * w;
        if (order < 2) continue;
        for (int a = 0; a < d; ++a)
            for (int c = a; c < d; ++c)
                b.hessian(a, c) += (a == c ? he_at(a, 2) : he_at(a, 1) * he_at(c, 1)) * w;
        if (order < 3) continue;
        for (int a = 0; a < d; ++a)
            for (int c = a; c < d; ++c)
                for (int e = c; e < d; ++e) {
                    double p;
                    if (a == c && c == e) p = he_at(a, 3);
                    else if (a == c) p = he_at(a, 2) * he_at(e, 1);
                    else if (c == e) p = he_at(a, 1) * he_at(c, 2);
                    else p = he_at(a, 1) * he_at(c, 1) * he_at(e, 1);
                    b.third(a, c, e) += p * w;
                }
        if (order < 4) continue;
        for (int a = 0; a < d; ++a)
            for (int c = a; c < d; ++c)
                for (int e = c; e < d; ++e)
                    for (int g = e; g < d; ++g) {
                        // per-axis multiplicities of the sorted index (a,c,e,g)
                        double p = 1.0;
                        int axis = a, count = 0;
                        int idxs[4] = {a, c, e, g};
                        for (int t = 0; t < 4; ++t) {
                            if (idxs[t] == axis) {
                                ++count;
                            } else {
                                p *= he_at(axis, count);
                                axis = idxs[t];
                                count = 1;
                            }
                        }
                        p *= he_at(axis, count);
                        b.fourth(a, c, e, g) += p * w;
                    }
    }

    const double base = 1.0 / (n * std::pow(h_, d));
    b.value *= base;
    if (order >= 1) b.gradient *= base / h_;
    if (order >= 2) {
        const double s2 = base / (h_ * h_);
        for (int a = 0; a < d; ++a)
            for (int c = a; c < d; ++c) {
                b.hessian(a, c) *= s2;
                b.hessian(c, a) = b.hessian(a, c);
            }
    }
    if (order >= 3) {
        const double s3 = base / (h_ * h_ * h_);
        for (int a = 0; a < d; ++a)
            for (int c = a; c < d; ++c)
                for (int e = c; e < d; ++e) {
                    const double v = b.third(a, c, e) * s3;
                    b.third(a, c, e) = v;
                    b.third(a, e, c) = v;
                    b.third(c, a, e) = v;
                    b.third(c, e, a) = v;
                    b.third(e, a, c) = v;
                    b.third(e, c, a) = v;
                }
    }
    if (order >= 4) {
        const double s4 = base / (h_ * h_ * h_ * h_);
        for (int a = 0; a < d; ++a)
            for (int c = a; c < d; ++c)
                for (int e = c; e < d; ++e)
                    for (int g = e; g < d; ++g) {
                        const double v = b.fourth(a, c, e, g) * s4;
                        int idxs[4] = {a, c, e, g};
                        std::sort(idxs, idxs + 4);
                        do {
                            b.fourth(idxs[0], idxs[1], idxs[2], idxs[3]) = v;
                        } while (std::next_permutation(idxs, idxs + 4));
                    }
    }
    return b;
}

double kde_derivative_check(const DensityModel& model, const Vector& x, int order,
                            double step) {
    if (order < 1 || order > 4) throw InvalidInputError("check order must be in 1..4");
    if (!model.domain().contains(x))
        throw DomainExitError("derivative check point outside padded domain");
    const int d = model.dimension();
    const DerivativeBundle analytic = model.evaluate(x, order);

    std::vector<DerivativeBundle> plus(d), minus(d);
    for (int l = 0; l < d; ++l) {
        Vector xp = x, xm = x;
        xp[l] += step;
        xm[l] -= step;
        plus[l] = model.evaluate(xp, order - 1);
        minus[l] = model.evaluate(xm, order - 1);
    }
    const double inv2s = 0.5 / step;

    double max_abs_diff = 0.0, scale = 0.0;
    auto track = [&](double a, double fd) {
        max_abs_diff = std::max(max_abs_diff, std::abs(a - fd));
        scale = std::max({scale, std::abs(a), std::abs(fd)});
    };
    switch (order) {
        case 1:
            for (int l = 0; l < d; ++l)
                track(analytic.gradient[l], (plus[l].value - minus[l].value) * inv2s);
            break;
        case 2:
            for (int i = 0; i < d; ++i)
                for (int l = 0; l < d; ++l)
                    track(analytic.hessian(i, l),
                          (plus[l].gradient[i] - minus[l].gradient[i]) * inv2s);
            break;
        case 3:
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int l = 0; l < d; ++l)
                        track(analytic.third(i, j, l),
                              (plus[l].hessian(i, j) - minus[l].hessian(i, j)) * inv2s);
            break;
        case 4:
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int m = 0; m < d; ++m)
                        for (int l = 0; l < d; ++l)
                            track(analytic.fourth(i, j, m, l),
                                  (plus[l].third(i, j, m) - minus[l].third(i, j, m)) * inv2s);
            break;
    }
    if (scale <= 0.0) return 0.0;
    return max_abs_diff / scale;
}

}  // namespace ridge
