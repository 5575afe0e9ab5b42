#include "ridge/flows.hpp"

#include <cmath>

namespace ridge {

std::string flow_status_name(FlowStatus s) {
    switch (s) {
        case FlowStatus::Converged: return "converged";
        case FlowStatus::DiscardedDomainExit: return "discarded_domain_exit";
        case FlowStatus::DiscardedEigenGap: return "discarded_eigen_gap";
        case FlowStatus::MaxItersExceeded: return "max_iters_exceeded";
    }
    return "unknown";
}

Vector mean_shift(const KdeModel& model, const Vector& y) {
    const Matrix& pts = model.cloud().points;
    const int n = model.cloud().n();
    const double h = model.bandwidth();

    double wsum = 0.0;
    Vector num = Vector::Zero(pts.cols());
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(-0.5 * (pts.row(i).transpose() - y).squaredNorm() / (h * h));
        wsum += w;
        num += w * pts.row(i).transpose();
    }
    if (!(wsum > 0.0) || !std::isfinite(wsum))
        throw InvalidInputError("mean_shift: vanishing kernel weight at query point");
    return num / wsum - y;
}

Vector scms_step(const KdeModel& model, const Vector& y, int k, double gap_tol) {
    const DerivativeBundle b = model.evaluate(y, 2);
    const TrailingProjection proj = trailing(eig_desc(b.hessian), k, gap_tol);
    return proj.projector * mean_shift(model, y);
}

Vector scms_surrogate_step(const DensityModel& model, const Vector& y, int k,
                           double scale, double gap_tol) {
    const DerivativeBundle b = model.evaluate(y, 2);
    if (!(b.value > 0.0))
        throw InvalidInputError("scms_surrogate_step: nonpositive density");
    const TrailingProjection proj = trailing(eig_desc(b.hessian), k, gap_tol);
    return proj.projector * (scale / b.value * b.gradient);
}

Vector alg1_step(const DensityModel& model, const Vector& y, int k, double gap_tol) {
    const RidgenessEval r = ridgeness_eval(model, y, k, true, gap_tol);
    const TrailingProjection proj = trailing(*r.eig_star, k, gap_tol);
    return proj.projector * r.grad_eta;
}

Vector alg2_step(const GridField& field, const Vector& y, int k, double gap_tol) {
    const SmoothedEval s = eta_tau_eval(field, y, 2);
    const TrailingProjection proj = trailing(eig_desc(s.hessian), k, gap_tol);
    return proj.projector * s.gradient;
}

FlowTrace run_flow(const StepRule& rule, const Vector& start, const FlowParams& params,
                   const DomainGuard& domain, bool scale_by_a) {
    FlowTrace trace;
    trace.start = start;
    if (params.record_trace) trace.iterates.push_back(start);

    Vector y = start;
    for (int j = 1; j <= params.max_iters; ++j) {
        Vector disp;
        try {
            disp = rule.step(y);
        } catch (const EigenGapError&) {
            trace.status = FlowStatus::DiscardedEigenGap;
            trace.final = y;
            trace.iterations = j;
            return trace;
        } catch (const DomainExitError&) {
            trace.status = FlowStatus::DiscardedDomainExit;
            trace.final = y;
            trace.iterations = j;
            return trace;
        }
        if (scale_by_a) disp *= params.a;
        const Vector next = y + disp;
        if (params.record_trace) trace.iterates.push_back(next);
        trace.iterations = j;
        if (!domain(next)) {
            trace.status = FlowStatus::DiscardedDomainExit;
            trace.final = next;
            return trace;
        }
        if (disp.norm() <= params.eps_tol) {
            trace.status = FlowStatus::Converged;
            trace.final = next;
            return trace;
        }
        y = next;
    }
    trace.status = FlowStatus::MaxItersExceeded;
    trace.final = y;
    return trace;
}

}  // namespace ridge
