#include "ridge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "ridge/example1.hpp"
#include "ridge/parallel.hpp"

namespace ridge {

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::SCMS: return "scms";
        case Algorithm::Alg1: return "alg1";
        case Algorithm::Alg2: return "alg2";
    }
    return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "scms") return Algorithm::SCMS;
    if (name == "alg1") return Algorithm::Alg1;
    if (name == "alg2") return Algorithm::Alg2;
    throw InvalidInputError("unknown algorithm: " + name);
}

std::string stage_name(Stage s) {
    switch (s) {
        case Stage::RetainedFinal: return "retained_final";
        case Stage::PrunedPre: return "pruned_pre";
        case Stage::PrunedEigen: return "pruned_eigen";
        case Stage::PrunedEta: return "pruned_eta";
        case Stage::Discarded: return "discarded";
    }
    return "unknown";
}

void ExtractionConfig::validate(int dimension) const {
    if (k < 1 || k >= dimension)
        throw InvalidInputError("ridge dimension k must satisfy 1 <= k <= d-1");
    if (h && !(*h > 0.0)) throw InvalidInputError("bandwidth must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInputError("alpha must be in (0,1)");
    if (!eta_threshold.automatic && eta_threshold.value > 0.0)
        throw InvalidInputError("fixed eta threshold must be <= 0");
    if (!(flow.a > 0.0)) throw InvalidInputError("step size a must be positive");
    if (!(flow.eps_tol > 0.0)) throw InvalidInputError("eps_tol must be positive");
    if (flow.max_iters < 1) throw InvalidInputError("max_iters must be >= 1");
    if (tau != 0.0 && !(tau > 0.0)) throw InvalidInputError("tau must be positive");
    if (rho != 0.0 && !(rho > 0.0)) throw InvalidInputError("rho must be positive");
    if (tau > 0.0 && rho > 0.0 && rho >= tau) throw InvalidInputError("need rho < tau");
    if (!(jump_factor > 0.0)) throw InvalidInputError("jump_factor must be positive");
}

std::pair<std::vector<int>, double> preprocess(const PointCloud& cloud,
                                               const DensityModel& model, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInputError("alpha must be in (0,1)");
    const int n = cloud.n();
    std::vector<double> dens(n);
    parallel_for(static_cast<size_t>(n), [&](size_t i) {
        dens[i] = model.evaluate(cloud.points.row(static_cast<long>(i)).transpose(), 0).value;
    });

    std::vector<double> sorted = dens;
    std::sort(sorted.begin(), sorted.end());
    const int idx = static_cast<int>(std::floor(alpha * (n - 1)));
    const double eps_f = sorted[idx];

    std::vector<int> retained;
    for (int i = 0; i < n; ++i)
        if (dens[i] >= eps_f) retained.push_back(i);
    return {retained, eps_f};
}

double auto_eta_threshold(std::vector<double> final_etas, double jump_factor,
                          double sanity_cap) {
    std::vector<double> vals;
    for (double v : final_etas)
        if (std::isfinite(v)) vals.push_back(v);
    if (vals.size() < 2)
        throw InvalidInputError("auto_eta_threshold needs at least 2 finite values");
    std::sort(vals.begin(), vals.end());

    std::vector<double> pos_gaps;
    for (size_t i = 0; i + 1 < vals.size(); ++i) {
        const double g = vals[i + 1] - vals[i];
        if (g > 0.0) pos_gaps.push_back(g);
    }
    if (pos_gaps.empty()) return vals.front() - 1e-12;  // all identical

    std::sort(pos_gaps.begin(), pos_gaps.end());
    const size_t m = pos_gaps.size();
    const double median =
        (m % 2 == 1) ? pos_gaps[m / 2] : 0.5 * (pos_gaps[m / 2 - 1] + pos_gaps[m / 2]);

    double threshold = 0.0;
    bool found = false;
    for (size_t i = 0; i + 1 < vals.size(); ++i) {
        const double g = vals[i + 1] - vals[i];
        if (g > jump_factor * median && vals[i + 1] > sanity_cap) {
            threshold = 0.5 * (vals[i] + vals[i + 1]);
            found = true;  // keep scanning: largest-index significant gap wins
        }
    }
    return found ? threshold : -0.1;
}

namespace {

double safe_eta(const DensityModel& model, const std::shared_ptr<const GridField>& field,
                Algorithm alg, const Vector& x, int k) {
    try {
        if (alg == Algorithm::Alg2 && field) return eta_tau_eval(*field, x, 0).value;
        return ridgeness_eval(model, x, k, false).eta;
    } catch (...) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double safe_lambda_k1(const DensityModel& model, const Vector& x, int k) {
    try {
        const DerivativeBundle b = model.evaluate(x, 2);
        return eig_desc(b.hessian).eigenvalues[k];
    } catch (...) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

ExtractionResult run_extraction(const PointCloud& starts,
                                std::shared_ptr<const DensityModel> model,
                                std::shared_ptr<const KdeModel> kde,
                                const ExtractionConfig& config) {
    const int n = starts.n();
    const int k = config.k;

    std::shared_ptr<const GridField> field;
    if (config.algorithm == Algorithm::Alg2) {
        double tau = config.tau;
        if (tau <= 0.0) {
            if (!kde) throw InvalidInputError("Alg2 with an analytic model requires tau");
            tau = 2.0 * kde->bandwidth();
        }
        const double rho = config.rho > 0.0 ? config.rho : tau / 3.0;
        field = std::make_shared<GridField>(
            build_grid_field(*model, k, model->domain(), tau, rho, config.kernel));
    }

    std::unique_ptr<StepRule> rule;
    bool scale_by_a = true;
    switch (config.algorithm) {
        case Algorithm::SCMS:
            if (kde)
                rule = std::make_unique<ScmsRule>(kde, k);
            else
                rule = std::make_unique<ScmsSurrogateRule>(model, k, config.scms_surrogate_scale);
            scale_by_a = false;  // the mean-shift update is self-scaling
            break;
        case Algorithm::Alg1:
            rule = std::make_unique<Alg1Rule>(model, k);
            break;
        case Algorithm::Alg2:
            rule = std::make_unique<Alg2Rule>(field, k);
            break;
    }

    auto [retained, eps_f] = preprocess(starts, *model, config.alpha);
    const Box box = model->domain();
    const DomainGuard guard = [&model, box, eps_f](const Vector& y) {
        return box.contains(y) && model->evaluate(y, 0).value >= eps_f;
    };

    ExtractionResult result;
    result.eps_f_used = eps_f;
    result.per_start.resize(n);
    for (int i = 0; i < n; ++i) {
        StartOutcome& o = result.per_start[i];
        o.start = starts.points.row(i).transpose();
        o.stage = Stage::PrunedPre;
        o.trace.start = o.start;
        o.trace.final = o.start;
    }

    parallel_for(retained.size(), [&](size_t r) {
        const int i = retained[r];
        StartOutcome& o = result.per_start[i];
        o.trace = run_flow(*rule, o.start, config.flow, guard, scale_by_a);
        o.trace.final_lambda_k1 = safe_lambda_k1(*model, o.trace.final, k);
        o.trace.final_eta = safe_eta(*model, field, config.algorithm, o.trace.final, k);
        o.stage = Stage::Discarded;  // refined below
    });

    // eigenvalue pruning, then ridgeness pruning
    std::vector<int> candidates;
    for (int i : retained) {
        StartOutcome& o = result.per_start[i];
        if (o.trace.status != FlowStatus::Converged) {
            o.stage = Stage::Discarded;
            continue;
        }
        if (!(o.trace.final_lambda_k1 < 0.0)) {
            o.stage = Stage::PrunedEigen;
            continue;
        }
        candidates.push_back(i);
    }

    double eps_eta;
    if (!config.eta_threshold.automatic) {
        eps_eta = config.eta_threshold.value;
    } else {
        std::vector<double> etas;
        for (int i : candidates) etas.push_back(result.per_start[i].trace.final_eta);
        size_t finite = 0;
        for (double v : etas)
            if (std::isfinite(v)) ++finite;
        if (finite >= 2)
            eps_eta = auto_eta_threshold(etas, config.jump_factor, config.eta_sanity_cap);
        else if (finite == 1)
            eps_eta = *std::max_element(etas.begin(), etas.end()) - 1e-12;
        else
            eps_eta = -0.1;
    }
    result.eps_eta_used = eps_eta;

    for (int i : candidates) {
        StartOutcome& o = result.per_start[i];
        if (std::isfinite(o.trace.final_eta) && o.trace.final_eta >= eps_eta) {
            o.stage = Stage::RetainedFinal;
            result.ridge_points.push_back(o.trace.final);
        } else {
            o.stage = Stage::PrunedEta;
        }
    }
    return result;
}

}  // namespace

ExtractionResult extract(const PointCloud& cloud, const ExtractionConfig& config) {
    config.validate(cloud.d());
    const double h = config.h ? *config.h : KdeModel::silverman_bandwidth(cloud);
    auto kde = build_kde(cloud, Bandwidth(h));
    return run_extraction(cloud, kde, kde, config);
}

ExtractionResult extract_with_model(const PointCloud& starts,
                                    std::shared_ptr<const DensityModel> model,
                                    const ExtractionConfig& config) {
    config.validate(model->dimension());
    if (starts.d() != model->dimension())
        throw InvalidInputError("start-point dimension does not match model");
    return run_extraction(starts, std::move(model), nullptr, config);
}

void write_per_start_csv(const std::string& path, const ExtractionResult& result) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write " + path);
    out.precision(17);
    const int d = result.per_start.empty() ? 0 : static_cast<int>(result.per_start[0].start.size());
    for (int j = 0; j < d; ++j) out << "start_" << (j + 1) << ",";
    for (int j = 0; j < d; ++j) out << "final_" << (j + 1) << ",";
    out << "stage,final_eta,final_lambda_k1,iterations\n";
    for (const auto& o : result.per_start) {
        for (int j = 0; j < d; ++j) out << o.start[j] << ",";
        for (int j = 0; j < d; ++j) out << o.trace.final[j] << ",";
        out << stage_name(o.stage) << "," << o.trace.final_eta << ","
            << o.trace.final_lambda_k1 << "," << o.trace.iterations << "\n";
    }
}

void write_ridge_points_csv(const std::string& path, const ExtractionResult& result) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write " + path);
    out.precision(17);
    const int d = result.ridge_points.empty() ? 0
                                              : static_cast<int>(result.ridge_points[0].size());
    for (int j = 0; j < d; ++j) out << (j ? "," : "") << "x" << (j + 1);
    out << "\n";
    for (const auto& p : result.ridge_points) {
        for (int j = 0; j < d; ++j) out << (j ? "," : "") << p[j];
        out << "\n";
    }
}

void write_summary_json(const std::string& path, const ExtractionResult& result) {
    std::map<std::string, int> counts;
    for (const auto& o : result.per_start) counts[stage_name(o.stage)]++;
    nlohmann::json j;
    j["eps_f_used"] = result.eps_f_used;
    j["eps_eta_used"] = result.eps_eta_used;
    j["n_starts"] = result.per_start.size();
    j["n_ridge_points"] = result.ridge_points.size();
    j["stage_counts"] = counts;
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace ridge
