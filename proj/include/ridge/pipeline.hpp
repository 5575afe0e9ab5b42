#ifndef RIDGE_PIPELINE_HPP
#define RIDGE_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ridge/flows.hpp"
#include "ridge/types.hpp"

namespace ridge {

enum class Algorithm { SCMS, Alg1, Alg2 };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct EtaThreshold {
    bool automatic = true;
    double value = 0.0;  // used when not automatic; must be <= 0

    static EtaThreshold Auto() { return EtaThreshold{true, 0.0}; }
    static EtaThreshold Fixed(double v) { return EtaThreshold{false, v}; }
};

struct ExtractionConfig {
    int k = 1;
    std::optional<double> h;   // bandwidth; empty = Silverman-style default
    Algorithm algorithm = Algorithm::Alg2;
    double tau = 0.0;          // Alg2; 0 = default 2h
    double rho = 0.0;          // Alg2; 0 = default tau/3
    SmoothingKernel kernel = SmoothingKernel::Quartic;
    FlowParams flow;
    double alpha = 0.05;       // pre-processing density quantile
    EtaThreshold eta_threshold = EtaThreshold::Auto();
    double jump_factor = 10.0;     // auto threshold: significant-gap multiplier
    double eta_sanity_cap = -0.5;  // auto threshold: gap upper value must exceed this
    double scms_surrogate_scale = 0.01;  // analytic-model SCMS only
    std::uint64_t seed = 0;

    void validate(int dimension) const;
};

enum class Stage { RetainedFinal, PrunedPre, PrunedEigen, PrunedEta, Discarded };

std::string stage_name(Stage s);

struct StartOutcome {
    Vector start;
    FlowTrace trace;
    Stage stage = Stage::Discarded;
};

struct ExtractionResult {
    std::vector<Vector> ridge_points;
    std::vector<StartOutcome> per_start;  // one entry per input point, in order
    double eps_f_used = 0.0;
    double eps_eta_used = 0.0;
};

// eps_f = empirical alpha-quantile (lower interpolation) of the densities at
// the sample points; retained indices keep f(X_i) >= eps_f.
std::pair<std::vector<int>, double> preprocess(const PointCloud& cloud,
                                               const DensityModel& model, double alpha);

// Location of the last significant jump of the sorted final-ridgeness values.
// A gap is significant when it exceeds jump_factor times the median positive
// gap; the threshold is the midpoint of the largest-index significant gap
// whose upper value is above sanity_cap. Fallback -0.1 when none qualifies.
double auto_eta_threshold(std::vector<double> final_etas, double jump_factor = 10.0,
                          double sanity_cap = -0.5);

// End-to-end extraction: model build, pre-processing, one flow per retained
// start (run in parallel, collected in start order), eigenvalue and
// ridgeness pruning.
ExtractionResult extract(const PointCloud& cloud, const ExtractionConfig& config);

// As extract, but against a caller-supplied analytic model (the cloud then
// only provides the start points). SCMS uses the gradient surrogate.
ExtractionResult extract_with_model(const PointCloud& starts,
                                    std::shared_ptr<const DensityModel> model,
                                    const ExtractionConfig& config);

// CSV: one row per start (start coords, final coords, stage, final_eta,
// final_lambda_k1, iterations).
void write_per_start_csv(const std::string& path, const ExtractionResult& result);
void write_ridge_points_csv(const std::string& path, const ExtractionResult& result);
// JSON summary: eps_f_used, eps_eta_used, per-stage counts.
void write_summary_json(const std::string& path, const ExtractionResult& result);

}  // namespace ridge

#endif
