#include "levykato/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "levykato/quadrature.hpp"

namespace levykato {

int worker_threads() {
    if (const char* env = std::getenv("LEVY_KATO_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

double KernelGrid::interp(double x) const {
    if (grid.empty()) return 0.0;
    if (x <= grid.front() || x >= grid.back()) {
        if (x == grid.front()) return values.front();
        if (x == grid.back()) return values.back();
        return 0.0;
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = (std::size_t)(it - grid.begin());
    double x0 = grid[i - 1], x1 = grid[i];
    double w = (x - x0) / (x1 - x0);
    return (1.0 - w) * values[i - 1] + w * values[i];
}

std::vector<double> uniform_grid(double xmin, double xmax, int n) {
    if (n < 2 || !(xmax > xmin)) throw InvalidSpec("bad grid request");
    std::vector<double> g((std::size_t)n);
    for (int i = 0; i < n; ++i)
        g[(std::size_t)i] = xmin + (xmax - xmin) * i / (n - 1.0);
    return g;
}

std::vector<double> refined_grid(double xmax, int n_uniform, double x_core,
                                 bool include_zero) {
    if (!(xmax > 0) || n_uniform < 3 || !(x_core > 0) || x_core >= xmax)
        throw InvalidSpec("bad grid request");
    std::vector<double> g;
    double h = 2.0 * xmax / (n_uniform - 1);
    for (double x = h; x <= xmax + 1e-12 * xmax; x += h) g.push_back(x);
    // geometric refinement from h down to x_core, ~8 points per octave
    for (double x = h; x > x_core;) {
        double next = x * std::pow(0.5, 1.0 / 8.0);
        if (next < x_core) next = x_core;
        g.push_back(next);
        x = next;
    }
    std::vector<double> full;
    for (double x : g) full.push_back(-x);
    if (include_zero) full.push_back(0.0);
    for (double x : g) full.push_back(x);
    std::sort(full.begin(), full.end());
    full.erase(std::unique(full.begin(), full.end()), full.end());
    return full;
}

namespace {

struct PointVal {
    double value;
    double err;
};

// (1/pi) * int_0^inf [Re g(xi) cos(x xi) + Im g(xi) sin(x xi)] dxi
// for a multiplier with conjugate symmetry sampled on xi >= 0.
template <class G>
PointVal invert_multiplier(const G& g, double x, bool symmetric, double tol) {
    const double pi = 3.14159265358979323846;
    auto re = [&](double xi) { return g(xi).real(); };
    quad::Result rc = quad::fourier_oscillatory(re, x, false, tol);
    double v = rc.value, e = rc.abs_err;
    if (!symmetric) {
        auto im = [&](double xi) { return g(xi).imag(); };
        quad::Result rs = quad::fourier_oscillatory(im, x, true, tol);
        v += rs.value;
        e += rs.abs_err;
    }
    return {v / pi, e / pi};
}

template <class G>
PointVal invert_decaying(const G& g, double x, bool symmetric, double xi_cut,
                         double tol) {
    const double pi = 3.14159265358979323846;
    auto re = [&](double xi) { return g(xi).real(); };
    quad::Result rc = quad::fourier_decay(re, x, false, xi_cut, tol);
    double v = rc.value, e = rc.abs_err;
    if (!symmetric) {
        auto im = [&](double xi) { return g(xi).imag(); };
        quad::Result rs = quad::fourier_decay(im, x, true, xi_cut, tol);
        v += rs.value;
        e += rs.abs_err;
    }
    return {v / pi, e / pi};
}

// shared post-processing: clip tiny negative noise, compute trapezoid mass
void finalize(KernelGrid& k) {
    double vmax = 0.0;
    for (double v : k.values) vmax = std::max(vmax, std::abs(v));
    double floor_val = -1e-10 * std::max(vmax, 1.0);
    for (double& v : k.values) {
        if (v < floor_val)
            throw QuadratureFailure("kernel density negative beyond noise level");
        if (v < 0.0) v = 0.0;
    }
    double mass = 0.0, err = 0.0;
    for (std::size_t i = 1; i < k.grid.size(); ++i)
        mass += 0.5 * (k.values[i] + k.values[i - 1]) *
                (k.grid[i] - k.grid[i - 1]);
    for (double e : k.errors) err = std::max(err, e);
    k.mass_estimate = mass;
    k.quadrature_error = err;
}

double find_decay_cutoff(const CharExponent& psi, double t) {
    // smallest xi with t*Re psi(xi) >= 46 (integrand below ~1e-20)
    double xi = 1.0;
    for (int i = 0; i < 80; ++i) {
        if (t * psi(xi).real() >= 46.0) {
            // refine one octave down by bisection
            double lo = xi / 2.0, hi = xi;
            for (int j = 0; j < 20; ++j) {
                double mid = 0.5 * (lo + hi);
                (t * psi(mid).real() >= 46.0 ? hi : lo) = mid;
            }
            return hi;
        }
        xi *= 2.0;
        if (xi > 1e8) break;
    }
    throw TailNotIntegrable("e^{-t Re psi} has no usable integrability cutoff");
}

// partial-integral probe of int_0^inf Re(1/(lambda+psi)); true if convergent
bool resolvent_integrable(const CharExponent& psi, double lambda) {
    auto f = [&](double z) {
        std::complex<double> w = lambda + psi(z);
        return (1.0 / w).real();
    };
    double prev = HUGE_VAL;
    int shrinking = 0;
    double total = 0.0;
    for (int k = 0; k < 64; ++k) {
        double a = std::pow(2.0, k) - 1.0, b = std::pow(2.0, k + 1) - 1.0;
        double inc = quad::adaptive(f, a, b, 1e-12, 1e-7, 22).value;
        total += inc;
        if (k >= 8) {
            if (inc < 0.95 * prev) ++shrinking;
            else shrinking = 0;
            if (shrinking >= 6 && inc < 1e-7 * std::max(total, 1e-300))
                return true;
        }
        prev = inc;
    }
    return false;
}

} // namespace

KernelGrid transition_density(const CharExponent& psi, double t,
                              const std::vector<double>& grid, bool parallel) {
    if (psi.spec().is_compound_poisson())
        throw AtomAtOrigin("compound Poisson transition law has an atom at 0");
    if (!(t > 0)) throw InvalidSpec("t must be positive");
    double cut = find_decay_cutoff(psi, t);
    KernelGrid out;
    out.grid = grid;
    out.values.assign(grid.size(), 0.0);
    out.errors.assign(grid.size(), 0.0);
    out.lambda = 0.0;
    out.t = t;
    const bool sym = psi.symmetric();
    auto g = [&](double xi) { return std::exp(-t * psi(xi)); };
    const int nthreads = parallel ? worker_threads() : 1;
    (void)nthreads;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nthreads) if (parallel)
#endif
    for (long i = 0; i < (long)grid.size(); ++i) {
        PointVal pv = invert_decaying(g, grid[(std::size_t)i], sym, cut, 1e-11);
        out.values[(std::size_t)i] = pv.value;
        out.errors[(std::size_t)i] = pv.err;
    }
    finalize(out);
    return out;
}

KernelGrid potential_density(const CharExponent& psi, double lambda,
                             const std::vector<double>& grid, bool parallel,
                             bool require_bounded) {
    if (!(lambda > 0)) throw InvalidSpec("lambda must be positive");
    if (psi.spec().is_compound_poisson())
        throw AtomAtOrigin("compound Poisson resolvent has an atom at 0");
    if (require_bounded && !resolvent_integrable(psi, lambda))
        throw CaseAViolation("int Re(1/(lambda+psi)) diverges; no bounded density");
    KernelGrid out;
    out.grid = grid;
    out.values.assign(grid.size(), 0.0);
    out.errors.assign(grid.size(), 0.0);
    out.lambda = lambda;
    const bool sym = psi.symmetric();
    auto g = [&](double xi) { return 1.0 / (lambda + psi(xi)); };
    const int nthreads = parallel ? worker_threads() : 1;
    (void)nthreads;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nthreads) if (parallel)
#endif
    for (long i = 0; i < (long)grid.size(); ++i) {
        PointVal pv = invert_multiplier(g, grid[(std::size_t)i], sym, 1e-10);
        out.values[(std::size_t)i] = pv.value;
        out.errors[(std::size_t)i] = pv.err;
    }
    finalize(out);
    return out;
}

namespace {

// (1 - e^{-t w})/w, stable for small |t w|
std::complex<double> trunc_multiplier(std::complex<double> w, double t) {
    std::complex<double> tw = t * w;
    if (std::abs(tw) < 1e-6)
        return t * (1.0 - 0.5 * tw + tw * tw / 6.0);
    return (1.0 - std::exp(-tw)) / w;
}

} // namespace

KernelGrid truncated_potential(const CharExponent& psi, double lambda, double t,
                               const std::vector<double>& grid, bool parallel,
                               TruncRoute route) {
    if (!(lambda >= 0)) throw InvalidSpec("lambda must be nonnegative");
    if (!(t > 0)) throw InvalidSpec("t must be positive");
    if (psi.spec().is_compound_poisson())
        throw AtomAtOrigin("compound Poisson kernel has an atom at 0");
    KernelGrid out;
    out.grid = grid;
    out.values.assign(grid.size(), 0.0);
    out.errors.assign(grid.size(), 0.0);
    out.lambda = lambda;
    out.t = t;
    const bool sym = psi.symmetric();
    if (route == TruncRoute::Multiplier) {
        auto g = [&](double xi) {
            return trunc_multiplier(lambda + psi(xi), t);
        };
        const int nthreads = parallel ? worker_threads() : 1;
        (void)nthreads;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nthreads) if (parallel)
#endif
        for (long i = 0; i < (long)grid.size(); ++i) {
            PointVal pv =
                invert_multiplier(g, grid[(std::size_t)i], sym, 1e-10);
            out.values[(std::size_t)i] = pv.value;
            out.errors[(std::size_t)i] = pv.err;
        }
    } else {
        // reference route: time quadrature over transition-density slices,
        // geometric u-panels down to u_min = 1e-6 t; intentionally serial
        const double u_min = 1e-6 * t;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double x = grid[i];
            auto p_at = [&](double u) {
                double cut = find_decay_cutoff(psi, u);
                auto gg = [&](double xi) { return std::exp(-u * psi(xi)); };
                PointVal pv = invert_decaying(gg, x, sym, cut, 1e-10);
                return std::exp(-lambda * u) * pv.value;
            };
            double hi = t, v = 0.0, e = 0.0;
            double panel = 0.0, prev_panel = 0.0;
            while (hi > u_min) {
                double lo = std::max(u_min, 0.5 * hi);
                quad::Result r = quad::gk15(p_at, lo, hi);
                prev_panel = panel;
                panel = r.value;
                v += r.value;
                e += r.abs_err;
                hi = lo;
            }
            // geometric extrapolation of the remaining (0, u_min) mass from
            // the last two halving panels; generous error share since the
            // ratio is only asymptotically constant
            double tail = 0.0;
            if (prev_panel > 0.0 && panel > 0.0) {
                double ratio = panel / prev_panel;
                if (ratio < 0.95) tail = panel * ratio / (1.0 - ratio);
            }
            out.values[i] = v + tail;
            out.errors[i] = e + 0.5 * tail + u_min;
        }
    }
    finalize(out);
    return out;
}

KernelGrid subordinator_weight(const LaplaceExponent& phi,
                               const std::vector<double>& zgrid) {
    if (phi.family == LaplaceExponent::Family::Custom && !phi.custom_deriv)
        throw MissingDerivative("weight needs phi'");
    KernelGrid out;
    out.grid = zgrid;
    out.values.reserve(zgrid.size());
    out.errors.assign(zgrid.size(), 0.0);
    for (double z : zgrid) {
        if (!(z > 0.0 && z <= 1.0))
            throw InvalidSpec("weight grid must lie in (0,1]");
        double u = 1.0 / z;
        double p = phi(u);
        out.values.push_back(phi.deriv(u) / (z * z * p * p));
    }
    finalize(out);
    return out;
}

DiscreteKernel cp_kernel(const ProcessSpec& cp_spec, double lambda, double t) {
    if (!(cp_spec.kind == ProcessSpec::Kind::Family && cp_spec.family == "cp"))
        throw InvalidSpec("cp_kernel needs a compound Poisson family spec");
    cp_spec.validate();
    const double rate = cp_spec.cp_rate;
    const double beta = lambda + rate;
    const bool infinite_t = !std::isfinite(t);
    if (infinite_t && !(lambda > 0))
        throw InvalidSpec("lambda = 0 with t = inf has infinite mass");

    // regularized lower incomplete gamma recursion for the time weights
    const double x = infinite_t ? HUGE_VAL : beta * t;
    double p_n = infinite_t ? 1.0 : -std::expm1(-x); // P(1, x)
    double term = infinite_t ? 0.0 : std::exp(-x);   // e^{-x} x^n / n!
    double coef = 1.0 / beta;                        // rho^n / beta^{n+1}
    const double rho_over_beta = rate / beta;

    // normalized jump law
    std::map<double, double> cur{{0.0, 1.0}};
    std::map<double, double> acc;
    double total = 0.0;
    for (int n = 0; n < 400; ++n) {
        double c_n = coef * p_n;
        for (const auto& [z, m] : cur) acc[z] += c_n * m;
        total += c_n;
        if (n > 5 && c_n < 1e-14 * total) break;
        // advance the convolution power
        std::map<double, double> next;
        for (const auto& [z, m] : cur)
            for (const auto& a : cp_spec.cp_jumps)
                next[z + a.z] += m * (a.mass / rate);
        cur = std::move(next);
        coef *= rho_over_beta;
        if (!infinite_t) {
            term *= x / (n + 1.0);
            p_n -= term;
            if (p_n < 0.0) p_n = 0.0;
        }
    }
    DiscreteKernel out;
    out.lambda = lambda;
    out.t = t;
    out.total_mass = total;
    out.atoms.reserve(acc.size());
    for (const auto& [z, m] : acc)
        if (m > 0.0) out.atoms.push_back({z, m});
    return out;
}

} // namespace levykato
