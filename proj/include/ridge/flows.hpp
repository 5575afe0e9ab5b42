#ifndef RIDGE_FLOWS_HPP
#define RIDGE_FLOWS_HPP

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ridge/kde.hpp"
#include "ridge/ridgeness.hpp"
#include "ridge/types.hpp"

namespace ridge {

struct FlowParams {
    double a = 0.005;       // step size (applied by the driver when scale_by_a)
    double eps_tol = 1e-7;  // stop when the applied displacement is this small
    int max_iters = 10000;
    bool record_trace = false;
};

enum class FlowStatus { Converged, DiscardedDomainExit, DiscardedEigenGap, MaxItersExceeded };

std::string flow_status_name(FlowStatus s);

struct FlowTrace {
    Vector start;
    std::vector<Vector> iterates;  // populated when record_trace
    Vector final;                  // discarded traces carry the exit iterate
    FlowStatus status = FlowStatus::MaxItersExceeded;
    int iterations = 0;
    double final_eta = std::numeric_limits<double>::quiet_NaN();
    double final_lambda_k1 = std::numeric_limits<double>::quiet_NaN();
};

// Deterministic update map y -> displacement.
class StepRule {
public:
    virtual ~StepRule() = default;
    virtual Vector step(const Vector& y) const = 0;
    virtual int required_model_order() const = 0;
};

// Raw displacements ------------------------------------------------------

// m(y) = sum_i X_i w_i / sum_i w_i - y. For the Gaussian kernel this equals
// h^2 grad f(y) / f(y).
Vector mean_shift(const KdeModel& model, const Vector& y);

// trailing projector of the density Hessian applied to m(y)
Vector scms_step(const KdeModel& model, const Vector& y, int k,
                 double gap_tol = kDefaultGapTol);

// SCMS direction for analytic models: projector * scale * grad f / f,
// the h^2 grad f / f surrogate for the mean shift. Comparison-only device.
Vector scms_surrogate_step(const DensityModel& model, const Vector& y, int k,
                           double scale, double gap_tol = kDefaultGapTol);

// xi*(y): grad eta projected onto the trailing eigenvectors of hess eta.
// Unit displacement; the driver applies the step size.
Vector alg1_step(const DensityModel& model, const Vector& y, int k,
                 double gap_tol = kDefaultGapTol);

// grad eta_tau projected onto the trailing eigenvectors of hess eta_tau.
Vector alg2_step(const GridField& field, const Vector& y, int k,
                 double gap_tol = kDefaultGapTol);

// Step rules -------------------------------------------------------------

class MeanShiftRule final : public StepRule {
public:
    explicit MeanShiftRule(std::shared_ptr<const KdeModel> model) : model_(std::move(model)) {}
    Vector step(const Vector& y) const override { return mean_shift(*model_, y); }
    int required_model_order() const override { return 1; }

private:
    std::shared_ptr<const KdeModel> model_;
};

class ScmsRule final : public StepRule {
public:
    ScmsRule(std::shared_ptr<const KdeModel> model, int k) : model_(std::move(model)), k_(k) {}
    Vector step(const Vector& y) const override { return scms_step(*model_, y, k_); }
    int required_model_order() const override { return 2; }

private:
    std::shared_ptr<const KdeModel> model_;
    int k_;
};

class ScmsSurrogateRule final : public StepRule {
public:
    ScmsSurrogateRule(std::shared_ptr<const DensityModel> model, int k, double scale)
        : model_(std::move(model)), k_(k), scale_(scale) {}
    Vector step(const Vector& y) const override {
        return scms_surrogate_step(*model_, y, k_, scale_);
    }
    int required_model_order() const override { return 2; }

private:
    std::shared_ptr<const DensityModel> model_;
    int k_;
    double scale_;
};

class Alg1Rule final : public StepRule {
public:
    Alg1Rule(std::shared_ptr<const DensityModel> model, int k) : model_(std::move(model)), k_(k) {}
    Vector step(const Vector& y) const override { return alg1_step(*model_, y, k_); }
    int required_model_order() const override { return 3; }

private:
    std::shared_ptr<const DensityModel> model_;
    int k_;
};

class Alg2Rule final : public StepRule {
public:
    Alg2Rule(std::shared_ptr<const GridField> field, int k) : field_(std::move(field)), k_(k) {}
    Vector step(const Vector& y) const override { return alg2_step(*field_, y, k_); }
    int required_model_order() const override { return 0; }

private:
    std::shared_ptr<const GridField> field_;
    int k_;
};

// Driver -----------------------------------------------------------------

using DomainGuard = std::function<bool(const Vector&)>;

// Euler iteration y_{j+1} = y_j + (a *) rule.step(y_j) with stopping and
// domain guards. All failures are encoded in the trace status; final_eta and
// final_lambda_k1 are left NaN for the caller to fill.
FlowTrace run_flow(const StepRule& rule, const Vector& start, const FlowParams& params,
                   const DomainGuard& domain, bool scale_by_a);

}  // namespace ridge

#endif
