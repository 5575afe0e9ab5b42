#include "ridge/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ridge/example1.hpp"
#include "ridge/flows.hpp"
#include "ridge/kde.hpp"
#include "ridge/parallel.hpp"

namespace ridge {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// Deterministic uniforms/normals on top of mt19937_64, independent of the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * kPi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

Vector vec2(double x, double y) {
    Vector v(2);
    v << x, y;
    return v;
}

std::vector<Vector> sample_segment(const Vector& a, const Vector& b, int count) {
    std::vector<Vector> out;
    out.reserve(count + 1);
    for (int i = 0; i <= count; ++i)
        out.push_back(a + (static_cast<double>(i) / count) * (b - a));
    return out;
}

struct SpiralTable {
    std::vector<double> theta;
    std::vector<double> arclen;  // cumulative
    double total() const { return arclen.back(); }

    SpiralTable() {
        const int m = 20000;
        theta.resize(m + 1);
        arclen.resize(m + 1);
        auto speed = [](double t) {
            const double r = 0.1 + 0.15 * t;
            return std::sqrt(r * r + 0.15 * 0.15);
        };
        arclen[0] = 0.0;
        for (int i = 0; i <= m; ++i) theta[i] = 4.0 * kPi * i / m;
        for (int i = 1; i <= m; ++i) {
            const double dt = theta[i] - theta[i - 1];
            arclen[i] = arclen[i - 1] + 0.5 * dt * (speed(theta[i - 1]) + speed(theta[i]));
        }
    }

    double theta_at_arclen(double s) const {
        const auto it = std::lower_bound(arclen.begin(), arclen.end(), s);
        if (it == arclen.begin()) return theta.front();
        if (it == arclen.end()) return theta.back();
        const size_t i = static_cast<size_t>(it - arclen.begin());
        const double w = (s - arclen[i - 1]) / (arclen[i] - arclen[i - 1]);
        return theta[i - 1] + w * (theta[i] - theta[i - 1]);
    }

    Vector point_at_theta(double t) const {
        const double r = 0.1 + 0.15 * t;
        return vec2(r * std::cos(t), r * std::sin(t));
    }
};

const SpiralTable& spiral_table() {
    static const SpiralTable table;
    return table;
}

}  // namespace

std::string shape_name(Shape s) {
    switch (s) {
        case Shape::XCross: return "xcross";
        case Shape::Circle: return "circle";
        case Shape::Spiral: return "spiral";
        case Shape::Example1: return "example1";
    }
    return "unknown";
}

Shape shape_from_name(const std::string& name) {
    if (name == "xcross") return Shape::XCross;
    if (name == "circle") return Shape::Circle;
    if (name == "spiral") return Shape::Spiral;
    if (name == "example1") return Shape::Example1;
    throw InvalidInputError("unknown shape: " + name);
}

std::pair<PointCloud, GroundTruth> generate(const SyntheticSpec& spec) {
    if (spec.n < 1) throw InvalidInputError("sample count must be >= 1");
    if (spec.noise_sigma < 0.0) throw InvalidInputError("noise_sigma must be >= 0");

    Rng rng(spec.seed);
    Matrix pts(spec.n, 2);
    GroundTruth truth;
    const int dense = 2000;  // per curve; arclength step well below 1e-3 of length

    switch (spec.shape) {
        case Shape::XCross: {
            const Vector a1 = vec2(-1, -1), b1 = vec2(1, 1);
            const Vector a2 = vec2(-1, 1), b2 = vec2(1, -1);
            for (int i = 0; i < spec.n; ++i) {
                const bool first = rng.uniform() < 0.5;
                const double t = rng.uniform();
                const Vector base = first ? (a1 + t * (b1 - a1)).eval() : (a2 + t * (b2 - a2)).eval();
                pts(i, 0) = base[0] + spec.noise_sigma * rng.normal();
                pts(i, 1) = base[1] + spec.noise_sigma * rng.normal();
            }
            truth.points = sample_segment(a1, b1, dense);
            const auto seg2 = sample_segment(a2, b2, dense);
            truth.points.insert(truth.points.end(), seg2.begin(), seg2.end());
            break;
        }
        case Shape::Circle: {
            for (int i = 0; i < spec.n; ++i) {
                const double t = 2.0 * kPi * rng.uniform();
                pts(i, 0) = std::cos(t) + spec.noise_sigma * rng.normal();
                pts(i, 1) = std::sin(t) + spec.noise_sigma * rng.normal();
            }
            for (int i = 0; i < 4 * dense; ++i) {
                const double t = 2.0 * kPi * i / (4 * dense);
                truth.points.push_back(vec2(std::cos(t), std::sin(t)));
            }
            break;
        }
        case Shape::Spiral: {
            const SpiralTable& table = spiral_table();
            for (int i = 0; i < spec.n; ++i) {
                const double t = table.theta_at_arclen(rng.uniform() * table.total());
                const Vector base = table.point_at_theta(t);
                pts(i, 0) = base[0] + spec.noise_sigma * rng.normal();
                pts(i, 1) = base[1] + spec.noise_sigma * rng.normal();
            }
            for (int i = 0; i <= 4 * dense; ++i) {
                const double t = table.theta_at_arclen(table.total() * i / (4.0 * dense));
                truth.points.push_back(table.point_at_theta(t));
            }
            break;
        }
        case Shape::Example1: {
            // rejection sampling; max of f on the rectangle is 0.75
            for (int i = 0; i < spec.n; ++i) {
                for (;;) {
                    const double u = 2.0 * rng.uniform() - 1.0;
                    const double v = 2.0 * rng.uniform();
                    const double w = 0.75 * rng.uniform();
                    if (w <= 0.375 * (1.0 - u * u) * v) {
                        pts(i, 0) = u;
                        pts(i, 1) = v;
                        break;
                    }
                }
            }
            truth.points = Example1Model::ridge_samples(dense);
            break;
        }
    }
    return {PointCloud::from_matrix(std::move(pts)), std::move(truth)};
}

double hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    if (a.empty() || b.empty()) throw InvalidInputError("hausdorff: empty point set");
    auto directed = [](const std::vector<Vector>& from, const std::vector<Vector>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, (p - q).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

Vector fd_gradient(const std::function<double(const Vector&)>& fun, const Vector& x,
                   double step) {
    if (!(step > 0.0)) throw InvalidInputError("fd step must be positive");
    Vector g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        g[i] = (fun(xp) - fun(xm)) / (2.0 * step);
    }
    return g;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& fun, const Vector& x,
                   double step) {
    if (!(step > 0.0)) throw InvalidInputError("fd step must be positive");
    Matrix j;
    for (int i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        const Vector col = (fun(xp) - fun(xm)) / (2.0 * step);
        if (j.size() == 0) j = Matrix(col.size(), x.size());
        j.col(i) = col;
    }
    return j;
}

std::vector<ConvergenceRow> convergence_experiment(Shape shape,
                                                   const std::vector<int>& n_list,
                                                   double h_scale, Algorithm algorithm,
                                                   int trials, std::uint64_t base_seed,
                                                   double noise_sigma) {
    if (n_list.empty()) throw InvalidInputError("n_list must be nonempty");
    for (size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw InvalidInputError("n_list must be strictly ascending");

    std::vector<ConvergenceRow> rows;
    for (int n : n_list) {
        std::vector<double> dh;
        for (int trial = 0; trial < trials; ++trial) {
            SyntheticSpec spec;
            spec.shape = shape;
            spec.n = n;
            spec.noise_sigma = noise_sigma;
            spec.seed = base_seed * 1000003ULL + static_cast<std::uint64_t>(n) * 131ULL +
                        static_cast<std::uint64_t>(trial);
            auto [cloud, truth] = generate(spec);

            ExtractionConfig config;
            config.k = 1;
            config.algorithm = algorithm;
            config.h = h_scale * std::pow(static_cast<double>(n), -0.125);
            // Fixed post-processing threshold; the automatic jump detector
            // misfires when every final lands in one tight cluster.
            config.eta_threshold = EtaThreshold::Fixed(-0.1);
            // Small fixed smoothing scale: tau of the order of the bandwidth
            // flattens the ridgeness dip and creates spurious secondary
            // ridges near the working-region boundary.
            if (algorithm == Algorithm::Alg2) config.tau = 0.1;
            const ExtractionResult result = extract(cloud, config);
            if (result.ridge_points.empty()) {
                dh.push_back(std::numeric_limits<double>::infinity());
                continue;
            }

            // restrict truth to the retained density region
            KdeModel kde(cloud, Bandwidth(*config.h));
            std::vector<Vector> truth_retained;
            for (const auto& p : truth.points)
                if (kde.evaluate(p, 0).value >= result.eps_f_used) truth_retained.push_back(p);
            if (truth_retained.empty()) {
                dh.push_back(std::numeric_limits<double>::infinity());
                continue;
            }
            dh.push_back(hausdorff(result.ridge_points, truth_retained));
        }
        std::sort(dh.begin(), dh.end());
        const size_t m = dh.size();
        const double median = (m % 2 == 1) ? dh[m / 2] : 0.5 * (dh[m / 2 - 1] + dh[m / 2]);
        rows.push_back({n, median});
    }
    return rows;
}

GapReport scms_gap_experiment() {
    auto model = build_example1();
    const int k = 1;

    // Common grid of starts, offset to avoid u = 0 exactly (points there are
    // fixed points of both flows by symmetry).
    std::vector<Vector> starts;
    for (double u = -0.85; u < 0.86; u += 0.1) {
        for (double v = 0.1; v < 1.91; v += 0.025) starts.push_back(vec2(u, v));
    }

    const Box box = model->domain();
    const DomainGuard guard = [&](const Vector& y) {
        return box.contains(y) && model->evaluate(y, 0).value > 1e-4;
    };

    auto collect = [&](const StepRule& rule, const FlowParams& params, bool scale_by_a) {
        std::vector<Vector> finals(starts.size(), Vector());
        parallel_for(starts.size(), [&](size_t i) {
            const FlowTrace t = run_flow(rule, starts[i], params, guard, scale_by_a);
            if (t.status != FlowStatus::Converged) return;
            const DerivativeBundle b = model->evaluate(t.final, 2);
            if (eig_desc(b.hessian).eigenvalues[k] < 0.0) finals[i] = t.final;
        });
        std::vector<Vector> out;
        for (auto& f : finals)
            if (f.size() > 0) out.push_back(std::move(f));
        return out;
    };

    FlowParams scms_params;
    scms_params.eps_tol = 1e-8;
    scms_params.max_iters = 50000;
    const ScmsSurrogateRule scms_rule(model, k, 0.02);
    const std::vector<Vector> scms_finals = collect(scms_rule, scms_params, false);

    FlowParams alg1_params;
    alg1_params.a = 0.01;
    // Near the ridge intersection the eta-Hessian eigenvalues almost tie and
    // the step contracts very slowly; a tighter tolerance strands those flows
    // in MaxIters and leaves a hole around the intersection point.
    alg1_params.eps_tol = 1e-6;
    alg1_params.max_iters = 50000;
    const Alg1Rule alg1_rule(model, k);
    const std::vector<Vector> alg1_finals = collect(alg1_rule, alg1_params, true);

    // The SCMS direction repels from the vertical segment below the curve
    // intersection (the second directional derivative along the trailing
    // eigenvector flips sign at v = 1/sqrt(2)); sample that piece, staying
    // 0.15 away from the intersection and the low-density endpoint.
    std::vector<Vector> segment;
    for (int i = 0; i <= 200; ++i)
        segment.push_back(vec2(0.0, 0.15 + (kInvSqrt2 - 0.30) * i / 200.0));

    auto coverage = [&](const std::vector<Vector>& finals) {
        double worst = 0.0;
        for (const auto& s : segment) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& f : finals) best = std::min(best, (s - f).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    auto nearest = [&](const std::vector<Vector>& finals, const Vector& p) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& f : finals) best = std::min(best, (p - f).norm());
        return best;
    };

    const Vector intersection = vec2(0.0, kInvSqrt2);
    GapReport report;
    report.coverage_scms = coverage(scms_finals);
    report.coverage_alg1 = coverage(alg1_finals);
    report.intersection_err_scms = nearest(scms_finals, intersection);
    report.intersection_err_alg1 = nearest(alg1_finals, intersection);
    report.n_finals_scms = static_cast<int>(scms_finals.size());
    report.n_finals_alg1 = static_cast<int>(alg1_finals.size());
    return report;
}

}  // namespace ridge
