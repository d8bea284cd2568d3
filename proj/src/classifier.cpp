#include "levykato/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "levykato/quadrature.hpp"

namespace levykato {

const char* label_name(Label l) {
    switch (l) {
        case Label::CompoundPoisson: return "CompoundPoisson";
        case Label::A: return "A";
        case Label::B: return "B";
        case Label::C: return "C";
        case Label::Aprime: return "Aprime";
        case Label::Bprime: return "Bprime";
        case Label::Cprime: return "Cprime";
        case Label::D_gt1_H0: return "D_gt1_H0";
    }
    return "?";
}

namespace {

double shell_integral(const std::function<double(double)>& f, double a,
                      double b, const ClassifierConfig& cfg) {
    if (!cfg.oscillatory)
        return quad::adaptive(f, a, b, 1e-12, 1e-8, 24).value;
    // equidistributed lattice average for almost-periodic integrands
    const double golden = 0.6180339887498949;
    double s = 0.0, u = 0.5 * golden;
    for (int i = 0; i < cfg.lattice_n; ++i) {
        s += f(a + (b - a) * u);
        u += golden;
        if (u >= 1.0) u -= 1.0;
    }
    return (b - a) * s / cfg.lattice_n;
}

double loglog_slope(const std::vector<double>& R, const std::vector<double>& I,
                    int window) {
    int n = (int)R.size();
    int w = std::min(window, n);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = n - w; i < n; ++i) {
        double x = std::log(R[(std::size_t)i]);
        double y = std::log(std::max(I[(std::size_t)i], 1e-300));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double denom = w * sxx - sx * sx;
    return denom > 0 ? (w * sxy - sx * sy) / denom : 0.0;
}

} // namespace

DivergenceDiagnostic regularity_integral(
    const std::function<std::complex<double>(double)>& psi, double lambda,
    const ClassifierConfig& cfg) {
    if (!(lambda > 0)) throw InvalidSpec("lambda must be positive");
    auto f = [&](double z) {
        std::complex<double> w = lambda + psi(z);
        double re = (1.0 / w).real();
        return re > 0.0 ? re : 0.0; // Re(1/(lambda+psi)) >= 0 in exact math
    };
    DivergenceDiagnostic d;
    d.lambda = lambda;
    double total = 0.0;
    std::vector<double> incs;
    int small_tail = 0, persistent_growth = 0;
    for (int k = 0; k <= cfg.k_max; ++k) {
        double a = k == 0 ? 0.0 : std::pow(2.0, k - 1);
        double b = std::pow(2.0, k);
        double inc = shell_integral(f, a, b, cfg);
        total += inc;
        incs.push_back(inc);
        d.radii.push_back(b);
        d.partial_integrals.push_back(total);

        if (k >= 3) {
            if (inc < cfg.tail_rel * total && inc <= incs[incs.size() - 2])
                ++small_tail;
            else
                small_tail = 0;
            if (small_tail >= 3) {
                d.verdict = DivergenceDiagnostic::Verdict::Converges;
                double prev = incs[incs.size() - 2];
                double ratio = prev > 0 ? inc / prev : 0.0;
                d.limit = total +
                          (ratio > 0 && ratio < 0.95
                               ? inc * ratio / (1.0 - ratio)
                               : 0.0);
                d.slope = loglog_slope(d.radii, d.partial_integrals, cfg.window);
                return d;
            }
            if (inc > 0.01 * total) ++persistent_growth;
            else persistent_growth = 0;
            if (persistent_growth >= 12 && k >= 2 * cfg.window) {
                double s = loglog_slope(d.radii, d.partial_integrals, cfg.window);
                if (s > 5 * cfg.slope_min) {
                    d.slope = s;
                    d.verdict = DivergenceDiagnostic::Verdict::Diverges;
                    return d;
                }
            }
        }
    }
    d.slope = loglog_slope(d.radii, d.partial_integrals, cfg.window);
    bool growth_rule = incs.size() >= 5;
    for (std::size_t i = incs.size() >= 5 ? incs.size() - 5 : 0;
         i < incs.size(); ++i)
        if (incs[i] < 0.01 * d.partial_integrals[i]) growth_rule = false;
    if (d.slope > cfg.slope_min || growth_rule)
        d.verdict = DivergenceDiagnostic::Verdict::Diverges;
    else
        d.verdict = DivergenceDiagnostic::Verdict::Inconclusive;
    return d;
}

namespace {

Classification classify_1d(const ProcessSpec& spec, double lambda,
                           const ClassifierConfig& config) {
    Classification out;
    out.gaussian_nonzero =
        (spec.kind == ProcessSpec::Kind::Family && spec.family == "brownian") ||
        (spec.kind == ProcessSpec::Kind::Triplet && spec.triplet.A > 0.0);

    if (spec.is_compound_poisson()) {
        out.label = Label::CompoundPoisson;
        out.gamma0 = 0.0;
        out.finite_variation = true;
        out.zero_regular = true; // the process sits at its start point
        return out;
    }

    DriftResult g = drift_gamma0(spec);
    if (g.defined) out.gamma0 = g.gamma0;
    bool fv = false;
    switch (spec.kind) {
        case ProcessSpec::Kind::Triplet:
            fv = finite_variation(spec.triplet.nu);
            break;
        case ProcessSpec::Kind::Subordinator:
            fv = true;
            break;
        case ProcessSpec::Kind::Family:
            if (spec.family == "brownian") fv = true;
            else if (spec.family == "stable") fv = spec.stable_alpha < 1.0;
            else if (spec.family == "example511") fv = spec.e511_alpha < 1.0;
            else fv = true; // cp
            break;
        default:
            break;
    }
    out.finite_variation = fv;

    if (!out.gaussian_nonzero && fv && g.defined && std::isfinite(g.gamma0) &&
        std::abs(g.gamma0) > 1e-10) {
        out.label = Label::B;
        return out;
    }
    if (out.gaussian_nonzero) {
        out.label = Label::C;
        out.zero_regular = true;
        return out;
    }

    ClassifierConfig cfg = config;
    cfg.oscillatory =
        (spec.kind == ProcessSpec::Kind::Family &&
         spec.family == "example511") ||
        (spec.kind == ProcessSpec::Kind::Triplet &&
         spec.triplet.nu.kind == LevyMeasureSpec::Kind::Atoms);
    CharExponent psi(spec);
    DivergenceDiagnostic diag = regularity_integral(
        [&](double z) { return psi(z); }, lambda, cfg);
    out.regularity = diag;
    switch (diag.verdict) {
        case DivergenceDiagnostic::Verdict::Diverges:
            out.label = Label::A;
            out.point_polar = true;
            return out;
        case DivergenceDiagnostic::Verdict::Converges:
            out.label = Label::C;
            out.zero_regular = true;
            return out;
        case DivergenceDiagnostic::Verdict::Inconclusive:
            throw InconclusiveIntegral("regularity integral inconclusive",
                                       diag);
    }
    return out;
}

} // namespace

Classification classify(const ProcessSpec& spec, double lambda,
                        const ClassifierConfig& config) {
    spec.validate();
    if (spec.kind == ProcessSpec::Kind::Product) {
        const ProductDecomposition& pd = *spec.product;
        if (pd.spacetime) {
            // (t, X_t): nondegenerate in d+1 dimensions and 0 is never
            // regular; points are never hit (the time coordinate is strictly
            // increasing)
            Classification out;
            out.label = Label::D_gt1_H0;
            out.point_polar = true;
            out.v_note = "space-time embedding (t, X_t)";
            return out;
        }
        Classification z = classify_1d(pd.z_component, lambda, config);
        switch (z.label) {
            case Label::A: z.label = Label::Aprime; break;
            case Label::B: z.label = Label::Bprime; break;
            case Label::C: z.label = Label::Cprime; break;
            default:
                throw InvalidSpec(
                    "declared Z component must not be compound Poisson");
        }
        z.v_note = "declared one-dimensional subspace V";
        return z;
    }
    if (spec.dimension > 1) {
        if (!spec.h0)
            throw MissingDecomposition(
                "degenerate d>1 spec requires a declared product decomposition");
        Classification out;
        out.label = Label::D_gt1_H0;
        out.point_polar = true;
        return out;
    }
    return classify_1d(spec, lambda, config);
}

std::vector<double> hitting_transform(const KernelGrid& kernel,
                                      const Classification& cls) {
    if (cls.label == Label::CompoundPoisson)
        throw WrongCase("no density route for compound Poisson");
    std::vector<double> h(kernel.values.size(), 0.0);
    if (cls.label == Label::A || cls.label == Label::Aprime ||
        cls.label == Label::D_gt1_H0)
        return h; // polar: identically zero
    double norm = 0.0;
    if (cls.label == Label::C || cls.label == Label::Cprime) {
        // G(x)/G(0); locate the grid point nearest 0
        std::size_t i0 = 0;
        for (std::size_t i = 1; i < kernel.grid.size(); ++i)
            if (std::abs(kernel.grid[i]) < std::abs(kernel.grid[i0])) i0 = i;
        norm = kernel.values[i0];
    } else {
        // case B: the constant is unidentifiable from the grid; shape only
        norm = *std::max_element(kernel.values.begin(), kernel.values.end());
    }
    if (!(norm > 0.0)) throw QuadratureFailure("degenerate kernel normalization");
    for (std::size_t i = 0; i < h.size(); ++i)
        h[i] = std::clamp(kernel.values[i] / norm, 0.0, 1.0);
    return h;
}

} // namespace levykato
