#include "ridge/ridgeness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "ridge/parallel.hpp"

namespace ridge {

namespace detail {
bool g_flip_grad_eta_sign = false;
}

namespace {

constexpr double kSentinel = -std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846264338327950288;

// Analytic Jacobian of xi at x, plus the pieces it is built from.
struct XiEval {
    Vector xi;
    Matrix grad_xi;
    Vector grad_f;
    EigenSystem eig;
    TrailingProjection proj;
};

XiEval eval_xi(const DensityModel& model, const Vector& x, int k, double gap_tol) {
    XiEval e;
    const DerivativeBundle bundle = model.evaluate(x, 3);
    e.grad_f = bundle.gradient;
    e.eig = eig_desc(bundle.hessian);
    e.proj = trailing(e.eig, k, gap_tol);
    e.xi = e.proj.projector * bundle.gradient;

    const int d = model.dimension();
    const Matrix dP = projector_derivative(bundle, e.eig, k, gap_tol);
    e.grad_xi = Matrix(d, d);
    for (int l = 0; l < d; ++l) {
        const Matrix dPl = dP.col(l).reshaped(d, d);
        e.grad_xi.col(l) = dPl * bundle.gradient + e.proj.projector * bundle.hessian.col(l);
    }
    return e;
}

}  // namespace

RidgenessEval ridgeness_eval(const DensityModel& model, const Vector& x, int k,
                             bool need_hessian, double gap_tol) {
    if (!model.domain().contains(x))
        throw DomainExitError("ridgeness_eval: point outside model domain");
    const int d = model.dimension();

    XiEval e = eval_xi(model, x, k, gap_tol);

    RidgenessEval out;
    out.xi = e.xi;
    out.grad_xi = e.grad_xi;
    out.eta = -0.5 * (e.proj.v_perp.transpose() * e.grad_f).squaredNorm();
    out.grad_eta = -e.grad_xi.transpose() * e.xi;
    out.lambda_k1 = e.eig.eigenvalues[k];
    if (detail::g_flip_grad_eta_sign) out.grad_eta = -out.grad_eta;

    if (need_hessian) {
        const double delta = std::max(1e-5, 1e-5 * x.norm());
        Matrix hess(d, d);
        for (int l = 0; l < d; ++l) {
            Vector xp = x, xm = x;
            xp[l] += delta;
            xm[l] -= delta;
            const Matrix Dl =
                (eval_xi(model, xp, k, gap_tol).grad_xi - eval_xi(model, xm, k, gap_tol).grad_xi) /
                (2.0 * delta);
            hess.col(l) = -Dl.transpose() * e.xi - e.grad_xi.transpose() * e.grad_xi.col(l);
        }
        out.hess_eta = 0.5 * (hess + hess.transpose());
        out.eig_star = eig_desc(out.hess_eta);
    }
    return out;
}

double s_q_eval(const DensityModel& model, const Vector& x, int k, double q,
                double gap_tol) {
    if (q < 0.0) throw InvalidInputError("s_q_eval: q must be nonnegative");
    const DerivativeBundle b0 = model.evaluate(x, 0);
    if (!(b0.value > 0.0)) throw InvalidInputError("s_q_eval: nonpositive density");
    const RidgenessEval r = ridgeness_eval(model, x, k, false, gap_tol);
    return r.eta / std::pow(b0.value, q);
}

// ---------------------------------------------------------------------------
// Smoothing kernel L

std::string kernel_name(SmoothingKernel k) {
    return k == SmoothingKernel::Quartic ? "quartic" : "truncated_gaussian";
}

SmoothingKernel kernel_from_name(const std::string& name) {
    if (name == "quartic") return SmoothingKernel::Quartic;
    if (name == "truncated_gaussian") return SmoothingKernel::TruncatedGaussian;
    throw InvalidInputError("unknown smoothing kernel: " + name);
}

namespace {

double kernel_support_radius(SmoothingKernel k) {
    return k == SmoothingKernel::Quartic ? 1.0 : 3.0;
}

double unit_sphere_area(int d) {
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

// Normalization so that L integrates to 1 over R^d.
double kernel_norm_const(SmoothingKernel k, int d) {
    if (k == SmoothingKernel::Quartic) {
        // int_{|u|<=1} (1-|u|^2)^2 du = S_{d-1} (1/d - 2/(d+2) + 1/(d+4))
        const double radial = 1.0 / d - 2.0 / (d + 2) + 1.0 / (d + 4);
        return 1.0 / (unit_sphere_area(d) * radial);
    }
    // Gaussian truncated at radius 3: Simpson quadrature of the radial mass.
    const int m = 2000;
    const double hstep = 3.0 / m;
    double sum = 0.0;
    auto g = [&](double r) {
        return std::pow(r, d - 1) * std::exp(-0.5 * r * r);
    };
    for (int i = 0; i < m; ++i) {
        const double a = i * hstep, b = (i + 1) * hstep;
        sum += (b - a) / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b));
    }
    const double mass = unit_sphere_area(d) * std::pow(2.0 * kPi, -0.5 * d) * sum;
    return std::pow(2.0 * kPi, -0.5 * d) / mass;
}

double cached_norm_const(SmoothingKernel k, int d) {
    static constexpr int kMaxDim = 32;
    static std::atomic<double> cache[2][kMaxDim + 1] = {};
    const int ki = (k == SmoothingKernel::Quartic) ? 0 : 1;
    if (d < 1 || d > kMaxDim) return kernel_norm_const(k, d);
    double v = cache[ki][d].load(std::memory_order_relaxed);
    if (v == 0.0) {
        v = kernel_norm_const(k, d);
        cache[ki][d].store(v, std::memory_order_relaxed);
    }
    return v;
}

struct KernelEval {
    double value = 0.0;
    Vector grad;   // w.r.t. u
    Matrix hess;   // w.r.t. u
};

KernelEval eval_kernel(SmoothingKernel k, double norm_const, const Vector& u, int order) {
    const int d = static_cast<int>(u.size());
    const double s = u.squaredNorm();
    KernelEval out;
    if (order >= 1) out.grad = Vector::Zero(d);
    if (order >= 2) out.hess = Matrix::Zero(d, d);
    const double r2 = kernel_support_radius(k);
    if (s >= r2 * r2) return out;
    if (k == SmoothingKernel::Quartic) {
        const double t = 1.0 - s;
        out.value = norm_const * t * t;
        if (order >= 1) out.grad = -4.0 * norm_const * t * u;
        if (order >= 2)
            out.hess = -4.0 * norm_const * (t * Matrix::Identity(d, d) - 2.0 * u * u.transpose());
    } else {
        out.value = norm_const * std::exp(-0.5 * s);
        if (order >= 1) out.grad = -out.value * u;
        if (order >= 2)
            out.hess = out.value * (u * u.transpose() - Matrix::Identity(d, d));
    }
    return out;
}

// eta without the derivative chain; sentinel on eigengap failure.
double eta_or_sentinel(const DensityModel& model, const Vector& x, int k, double gap_tol) {
    const DerivativeBundle b = model.evaluate(x, 2);
    try {
        const EigenSystem eig = eig_desc(b.hessian);
        const TrailingProjection proj = trailing(eig, k, gap_tol);
        return -0.5 * (proj.v_perp.transpose() * b.gradient).squaredNorm();
    } catch (const EigenGapError&) {
        return kSentinel;
    }
}

}  // namespace

size_t GridField::node_count() const {
    size_t c = 1;
    for (int e : extents) c *= static_cast<size_t>(e);
    return c;
}

size_t GridField::flat_index(const std::vector<int>& idx) const {
    size_t f = 0;
    for (int a = 0; a < dim(); ++a) f = f * extents[a] + idx[a];
    return f;
}

Vector GridField::node_position(const std::vector<int>& idx) const {
    Vector p = origin;
    for (int a = 0; a < dim(); ++a) p[a] += spacing * idx[a];
    return p;
}

Box GridField::hull() const {
    Box b;
    b.lo = origin;
    b.hi = origin;
    for (int a = 0; a < dim(); ++a) b.hi[a] += spacing * (extents[a] - 1);
    return b;
}

bool GridField::convolution_valid(const Vector& x) const {
    const Box h = hull();
    const double margin = kernel_radius * tau;
    for (int a = 0; a < dim(); ++a) {
        if (x[a] - margin < h.lo[a] || x[a] + margin > h.hi[a]) return false;
    }
    return true;
}

GridField build_grid_field(const DensityModel& model, int k, const Box& domain,
                           double tau, double rho, SmoothingKernel kernel,
                           double gap_tol) {
    if (!(rho > 0.0) || !(tau > 0.0) || rho >= tau)
        throw InvalidInputError("build_grid_field: need 0 < rho < tau");
    const int d = domain.dim();
    if (d < 1 || !domain.lo.allFinite() || !domain.hi.allFinite() ||
        (domain.hi - domain.lo).minCoeff() <= 0.0)
        throw InvalidInputError("build_grid_field: empty or invalid domain");

    GridField field;
    field.spacing = rho;
    field.tau = tau;
    field.kernel = kernel;
    field.kernel_radius = kernel_support_radius(kernel);
    field.k = k;

    const double pad = field.kernel_radius * tau;
    field.origin = domain.lo;
    field.origin.array() -= pad;
    field.extents.resize(d);
    for (int a = 0; a < d; ++a) {
        const double extent = domain.hi[a] + pad - field.origin[a];
        field.extents[a] = static_cast<int>(std::ceil(extent / rho - 1e-12)) + 1;
    }

    const size_t count = field.node_count();
    field.values.assign(count, 0.0);
    parallel_for(count, [&](size_t flat) {
        std::vector<int> idx(d);
        size_t rem = flat;
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rem % field.extents[a]);
            rem /= field.extents[a];
        }
        field.values[flat] = eta_or_sentinel(model, field.node_position(idx), k, gap_tol);
    });
    for (double v : field.values) {
        if (v == kSentinel) {
            field.has_sentinel = true;
            break;
        }
    }
    return field;
}

SmoothedEval eta_tau_eval(const GridField& field, const Vector& x, int order) {
    if (order < 0 || order > 2) throw InvalidInputError("eta_tau_eval: order must be 0..2");
    const int d = field.dim();
    if (static_cast<int>(x.size()) != d)
        throw InvalidInputError("eta_tau_eval: dimension mismatch");
    if (!field.convolution_valid(x))
        throw DomainExitError("eta_tau_eval: point too close to grid boundary");

    const double norm_const = cached_norm_const(field.kernel, d);
    const double radius = field.kernel_radius * field.tau;

    // index window covering the support
    std::vector<int> lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
        lo[a] = std::max(0, static_cast<int>(std::ceil((x[a] - radius - field.origin[a]) / field.spacing)));
        hi[a] = std::min(field.extents[a] - 1,
                         static_cast<int>(std::floor((x[a] + radius - field.origin[a]) / field.spacing)));
    }

    // accumulators: weighted eta sum A, valid weight Sv, total weight Sa
    double A = 0.0, Sv = 0.0, Sa = 0.0;
    Vector gA, gSv, gSa;
    Matrix hA, hSv, hSa;
    if (order >= 1) gA = gSv = gSa = Vector::Zero(d);
    if (order >= 2) hA = hSv = hSa = Matrix::Zero(d, d);
    bool saw_sentinel = false;

    std::vector<int> idx = lo;
    for (;;) {
        const Vector pos = field.node_position(idx);
        const Vector u = (x - pos) / field.tau;
        if (u.squaredNorm() < field.kernel_radius * field.kernel_radius) {
            const KernelEval ke = eval_kernel(field.kernel, norm_const, u, order);
            const double eta = field.values[field.flat_index(idx)];
            // d/dx of L((x - x_i)/tau) = (1/tau) dL/du
            Vector g;
            Matrix hm;
            if (order >= 1) g = ke.grad / field.tau;
            if (order >= 2) hm = ke.hess / (field.tau * field.tau);
            Sa += ke.value;
            if (order >= 1) gSa += g;
            if (order >= 2) hSa += hm;
            if (eta == kSentinel) {
                saw_sentinel = true;
            } else {
                A += ke.value * eta;
                Sv += ke.value;
                if (order >= 1) {
                    gA += g * eta;
                    gSv += g;
                }
                if (order >= 2) {
                    hA += hm * eta;
                    hSv += hm;
                }
            }
        }
        int a = d - 1;
        for (; a >= 0; --a) {
            if (++idx[a] <= hi[a]) break;
            idx[a] = lo[a];
        }
        if (a < 0) break;
    }

    const double scale = std::pow(field.spacing / field.tau, d);
    SmoothedEval out;
    if (!saw_sentinel) {
        out.value = scale * A;
        if (order >= 1) out.gradient = scale * gA;
        if (order >= 2) out.hessian = scale * 0.5 * (hA + hA.transpose());
        return out;
    }
    if (!(Sv > 0.0))
        throw DomainExitError("eta_tau_eval: no valid nodes within kernel support");

    // Renormalized value v = scale * A * Sa / Sv with exact derivatives.
    const double r = Sa / Sv;
    out.value = scale * A * r;
    if (order >= 1) {
        const Vector gU = gA * Sa + A * gSa;  // grad of U = A*Sa
        out.gradient = scale * (gU / Sv - (A * Sa) * gSv / (Sv * Sv));
    }
    if (order >= 2) {
        const double U = A * Sa;
        const Vector gU = gA * Sa + A * gSa;
        const Matrix hU = hA * Sa + gA * gSa.transpose() + gSa * gA.transpose() + A * hSa;
        Matrix hm = hU / Sv - (gU * gSv.transpose() + gSv * gU.transpose()) / (Sv * Sv) -
                    U * hSv / (Sv * Sv) + 2.0 * U * gSv * gSv.transpose() / (Sv * Sv * Sv);
        out.hessian = scale * 0.5 * (hm + hm.transpose());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

void save_grid_field(const GridField& field, const std::string& path_prefix) {
    nlohmann::json j;
    j["origin"] = std::vector<double>(field.origin.data(), field.origin.data() + field.origin.size());
    j["spacing"] = field.spacing;
    j["extents"] = field.extents;
    j["tau"] = field.tau;
    j["kernel_radius"] = field.kernel_radius;
    j["kernel"] = kernel_name(field.kernel);
    j["k"] = field.k;
    j["has_sentinel"] = field.has_sentinel;
    std::ofstream header(path_prefix + ".json");
    if (!header) throw InvalidInputError("cannot write " + path_prefix + ".json");
    header << j.dump(2) << "\n";

    std::ofstream csv(path_prefix + ".csv");
    if (!csv) throw InvalidInputError("cannot write " + path_prefix + ".csv");
    csv << "value\n";
    csv.precision(17);
    for (double v : field.values) {
        if (v == kSentinel)
            csv << "-inf\n";
        else
            csv << v << "\n";
    }
}

GridField load_grid_field(const std::string& path_prefix) {
    std::ifstream header(path_prefix + ".json");
    if (!header) throw InvalidInputError("cannot read " + path_prefix + ".json");
    nlohmann::json j;
    header >> j;

    GridField field;
    const std::vector<double> origin = j.at("origin").get<std::vector<double>>();
    field.origin = Eigen::Map<const Vector>(origin.data(), static_cast<long>(origin.size()));
    field.spacing = j.at("spacing").get<double>();
    field.extents = j.at("extents").get<std::vector<int>>();
    field.tau = j.at("tau").get<double>();
    field.kernel_radius = j.at("kernel_radius").get<double>();
    field.kernel = kernel_from_name(j.at("kernel").get<std::string>());
    field.k = j.at("k").get<int>();
    field.has_sentinel = j.at("has_sentinel").get<bool>();

    std::ifstream csv(path_prefix + ".csv");
    if (!csv) throw InvalidInputError("cannot read " + path_prefix + ".csv");
    std::string line;
    std::getline(csv, line);  // header
    field.values.reserve(field.node_count());
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        field.values.push_back(line == "-inf" ? kSentinel : std::stod(line));
    }
    if (field.values.size() != field.node_count())
        throw InvalidInputError("grid field value count mismatch in " + path_prefix + ".csv");
    return field;
}

}  // namespace ridge
