#ifndef RIDGE_SPECTRAL_HPP
#define RIDGE_SPECTRAL_HPP

#include "ridge/types.hpp"

namespace ridge {

inline constexpr double kDefaultGapTol = 1e-8;

// Descending eigendecomposition of a symmetric matrix.
struct EigenSystem {
    Vector eigenvalues;   // lambda_1 >= ... >= lambda_d
    Matrix eigenvectors;  // orthonormal columns, column i paired with eigenvalues[i]

    int dim() const { return static_cast<int>(eigenvalues.size()); }
    // lambda_k - lambda_{k+1}, k in 1..d-1
    double gap_at(int k) const { return eigenvalues[k - 1] - eigenvalues[k]; }
};

// Projection onto the span of the trailing d-k eigenvectors.
struct TrailingProjection {
    Matrix v_perp;     // d x (d-k)
    Matrix projector;  // V_perp V_perp^T
    int k;
};

// H is symmetrized as (H + H^T)/2 before decomposition. Eigenvector signs are
// normalized so that each column's largest-magnitude component is positive
// (ties broken by lowest index).
EigenSystem eig_desc(const Matrix& H);

TrailingProjection trailing(const EigenSystem& eigsys, int k,
                            double gap_tol = kDefaultGapTol);

// Derivative of the trailing eigenprojector x -> V_perp(x) V_perp(x)^T as a
// d^2 x d matrix: column l is the column-major vectorization of
//   sum_{i<=k} sum_{j>k} (lambda_j - lambda_i)^{-1}
//     [V_j V_j^T H_l V_i V_i^T + V_i V_i^T H_l V_j V_j^T],
// where H_l is the partial derivative of the Hessian along axis l (slice l of
// the third-derivative tensor).
Matrix projector_derivative(const DerivativeBundle& bundle, const EigenSystem& eigsys,
                            int k, double gap_tol = kDefaultGapTol);

}  // namespace ridge

#endif
