#ifndef RIDGE_RIDGENESS_HPP
#define RIDGE_RIDGENESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "ridge/spectral.hpp"
#include "ridge/types.hpp"

namespace ridge {

namespace detail {
// Test hook: flips the sign of grad_eta (negative control for the validate
// command). Never set outside tests.
extern bool g_flip_grad_eta_sign;
}  // namespace detail

struct RidgenessEval {
    Vector xi;         // V_perp V_perp^T grad f
    double eta;        // -1/2 ||V_perp^T grad f||^2, nonpositive
    Vector grad_eta;   // -[grad xi]^T xi
    Matrix grad_xi;    // Jacobian of xi (analytic)
    Matrix hess_eta;   // populated when requested, symmetrized
    double lambda_k1;  // lambda_{k+1} of the density Hessian
    std::optional<EigenSystem> eig_star;  // eigensystem of hess_eta when requested
};

// Evaluates the ridgeness and its driving derivatives at x.
//
// grad_xi = (grad f^T (x) Kron I_d) grad[V_perp V_perp^T] + V_perp Lambda_perp V_perp^T.
// The Hessian of eta is assembled from central finite differences of the
// analytic grad_xi (step max(1e-5, 1e-5 ||x||)); the dominant term
// -grad_xi^T grad_xi stays fully analytic.
RidgenessEval ridgeness_eval(const DensityModel& model, const Vector& x, int k,
                             bool need_hessian, double gap_tol = kDefaultGapTol);

// eta(x) / f(x)^q. Identical zero set and argmax set as eta for every q > 0.
double s_q_eval(const DensityModel& model, const Vector& x, int k, double q,
                double gap_tol = kDefaultGapTol);

enum class SmoothingKernel { Quartic, TruncatedGaussian };

std::string kernel_name(SmoothingKernel k);
SmoothingKernel kernel_from_name(const std::string& name);

// eta evaluated on a regular grid, for convolution with the smoothing
// kernel L at scale tau. Nodes where the eigengap check fails hold a
// -infinity sentinel and are excluded from convolutions.
struct GridField {
    Vector origin;
    double spacing = 0.0;       // rho
    std::vector<int> extents;   // node counts per axis
    std::vector<double> values; // row-major over axes, last axis fastest
    double tau = 0.0;
    double kernel_radius = 0.0; // support radius of L in tau units
    SmoothingKernel kernel = SmoothingKernel::Quartic;
    int k = 1;
    bool has_sentinel = false;

    int dim() const { return static_cast<int>(origin.size()); }
    size_t node_count() const;
    size_t flat_index(const std::vector<int>& idx) const;
    Vector node_position(const std::vector<int>& idx) const;
    // hull of the node lattice
    Box hull() const;
    // region where eta_tau_eval is defined
    bool convolution_valid(const Vector& x) const;
};

GridField build_grid_field(const DensityModel& model, int k, const Box& domain,
                           double tau, double rho,
                           SmoothingKernel kernel = SmoothingKernel::Quartic,
                           double gap_tol = kDefaultGapTol);

struct SmoothedEval {
    double value = 0.0;
    Vector gradient;  // order >= 1
    Matrix hessian;   // order >= 2, symmetric
};

// Discrete convolution (rho^d / tau^d) sum_i L((x - x_i)/tau) eta(x_i) and its
// exact derivatives. Sentinel nodes are excluded with weight renormalization.
SmoothedEval eta_tau_eval(const GridField& field, const Vector& x, int order);

// JSON header (prefix + ".json") plus CSV node values (prefix + ".csv").
void save_grid_field(const GridField& field, const std::string& path_prefix);
GridField load_grid_field(const std::string& path_prefix);

}  // namespace ridge

#endif
