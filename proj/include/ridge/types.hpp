#ifndef RIDGE_TYPES_HPP
#define RIDGE_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace ridge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Thrown when the eigengap lambda_k - lambda_{k+1} falls below tolerance and
// the trailing projector is not well-defined.
struct EigenGapError : std::runtime_error {
    explicit EigenGapError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an evaluation point lies outside the working domain.
struct DomainExitError : std::runtime_error {
    explicit DomainExitError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidInputError : std::runtime_error {
    explicit InvalidInputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Axis-aligned box.
struct Box {
    Vector lo;
    Vector hi;

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(const Vector& x) const {
        for (int i = 0; i < dim(); ++i) {
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        }
        return true;
    }

    Box padded(double pad) const {
        Box b{lo, hi};
        b.lo.array() -= pad;
        b.hi.array() += pad;
        return b;
    }
};

// n x d sample matrix, one row per point.
struct PointCloud {
    Matrix points;

    int n() const { return static_cast<int>(points.rows()); }
    int d() const { return static_cast<int>(points.cols()); }

    static PointCloud from_matrix(Matrix m) {
        if (m.rows() < 1 || m.cols() < 1)
            throw InvalidInputError("point cloud must have at least one point and one dimension");
        if (!m.allFinite())
            throw InvalidInputError("point cloud contains non-finite coordinates");
        return PointCloud{std::move(m)};
    }

    Box bounding_box() const {
        Box b;
        b.lo = points.colwise().minCoeff().transpose();
        b.hi = points.colwise().maxCoeff().transpose();
        return b;
    }
};

struct Bandwidth {
    double h;

    explicit Bandwidth(double value) : h(value) {
        if (!(h > 0.0) || !std::isfinite(h))
            throw InvalidInputError("bandwidth must be positive and finite");
    }
};

// Dense symmetric d x d x d tensor, entry (i,j,l) = d^3 f / dx_i dx_j dx_l.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int d) : d_(d), a_(static_cast<size_t>(d) * d * d, 0.0) {}

    int dim() const { return d_; }

    double& operator()(int i, int j, int l) { return a_[idx(i, j, l)]; }
    double operator()(int i, int j, int l) const { return a_[idx(i, j, l)]; }

    // Slice fixing the last index: H_l with (H_l)_{ij} = (i,j,l).
    Matrix slice(int l) const {
        Matrix m(d_, d_);
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) m(i, j) = (*this)(i, j, l);
        return m;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    size_t idx(int i, int j, int l) const {
        return (static_cast<size_t>(i) * d_ + j) * d_ + l;
    }
    int d_ = 0;
    std::vector<double> a_;
};

// Dense symmetric d x d x d x d tensor.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int d) : d_(d), a_(static_cast<size_t>(d) * d * d * d, 0.0) {}

    int dim() const { return d_; }

    double& operator()(int i, int j, int l, int m) { return a_[idx(i, j, l, m)]; }
    double operator()(int i, int j, int l, int m) const { return a_[idx(i, j, l, m)]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    size_t idx(int i, int j, int l, int m) const {
        return ((static_cast<size_t>(i) * d_ + j) * d_ + l) * d_ + m;
    }
    int d_ = 0;
    std::vector<double> a_;
};

// Density value and derivatives at one point. `order` is the highest
// populated derivative order; accessing an unpopulated order throws.
struct DerivativeBundle {
    int order = 0;
    double value = 0.0;
    Vector gradient;
    Matrix hessian;
    Tensor3 third;
    Tensor4 fourth;

    void require(int r) const {
        if (order < r)
            throw InvalidInputError("derivative order " + std::to_string(r) +
                                    " not populated (have " + std::to_string(order) + ")");
    }
};

// Read-only density model with analytic derivatives up to order 4.
class DensityModel {
public:
    virtual ~DensityModel() = default;
    virtual DerivativeBundle evaluate(const Vector& x, int order) const = 0;
    virtual int dimension() const = 0;
    virtual Box domain() const = 0;
};

}  // namespace ridge

#endif
