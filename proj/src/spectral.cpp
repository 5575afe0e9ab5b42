#include "ridge/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace ridge {

EigenSystem eig_desc(const Matrix& H) {
    if (!H.allFinite()) throw InvalidInputError("eig_desc: non-finite entries");
    if (H.rows() != H.cols()) throw InvalidInputError("eig_desc: matrix not square");
    const int d = static_cast<int>(H.rows());

    const Matrix sym = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw InvalidInputError("eig_desc: eigendecomposition failed");

    EigenSystem out;
    out.eigenvalues = Vector(d);
    out.eigenvectors = Matrix(d, d);
    // Eigen returns ascending order; reverse to descending.
    for (int i = 0; i < d; ++i) {
        out.eigenvalues[i] = solver.eigenvalues()[d - 1 - i];
        out.eigenvectors.col(i) = solver.eigenvectors().col(d - 1 - i);
    }
    // Sign convention: largest-magnitude component positive, ties by lowest index.
    for (int i = 0; i < d; ++i) {
        int arg = 0;
        double best = std::abs(out.eigenvectors(0, i));
        for (int r = 1; r < d; ++r) {
            const double a = std::abs(out.eigenvectors(r, i));
            if (a > best) {
                best = a;
                arg = r;
            }
        }
        if (out.eigenvectors(arg, i) < 0.0) out.eigenvectors.col(i) = -out.eigenvectors.col(i);
    }
    return out;
}

TrailingProjection trailing(const EigenSystem& eigsys, int k, double gap_tol) {
    const int d = eigsys.dim();
    if (k < 1 || k > d - 1) throw InvalidInputError("trailing: k must be in 1..d-1");
    if (eigsys.gap_at(k) < gap_tol)
        throw EigenGapError("eigengap at k=" + std::to_string(k) + " below tolerance: " +
                            std::to_string(eigsys.gap_at(k)));
    TrailingProjection p;
    p.k = k;
    p.v_perp = eigsys.eigenvectors.rightCols(d - k);
    p.projector = p.v_perp * p.v_perp.transpose();
    return p;
}

Matrix projector_derivative(const DerivativeBundle& bundle, const EigenSystem& eigsys,
                            int k, double gap_tol) {
    bundle.require(3);
    const int d = eigsys.dim();
    if (k < 1 || k > d - 1) throw InvalidInputError("projector_derivative: k must be in 1..d-1");
    if (eigsys.gap_at(k) < gap_tol)
        throw EigenGapError("projector_derivative: eigengap below tolerance");

    Matrix out(d * d, d);
    for (int l = 0; l < d; ++l) {
        const Matrix Hl = bundle.third.slice(l);
        Matrix M = Matrix::Zero(d, d);
        for (int i = 0; i < k; ++i) {
            const Vector vi = eigsys.eigenvectors.col(i);
            for (int j = k; j < d; ++j) {
                const Vector vj = eigsys.eigenvectors.col(j);
                const double denom = eigsys.eigenvalues[j] - eigsys.eigenvalues[i];
                const double c = (vj.dot(Hl * vi)) / denom;
                M += c * (vj * vi.transpose() + vi * vj.transpose());
            }
        }
        out.col(l) = M.reshaped();
    }
    return out;
}

}  // namespace ridge
