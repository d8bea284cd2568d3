#include "levykato/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace levykato {

namespace {

const double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// standard symmetric alpha-stable draw (E e^{i xi S} = e^{-|xi|^alpha})
double cms_symmetric(double alpha, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-0.5 * kPi, 0.5 * kPi);
    std::exponential_distribution<double> expo(1.0);
    double u = unif(rng);
    double e = expo(rng);
    if (std::abs(alpha - 1.0) < 1e-12) return std::tan(u);
    double s = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
    double w = std::pow(std::cos((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
    return s * w;
}

struct AtomPicker {
    std::vector<double> z;
    std::vector<double> w;
    double rate = 0.0;
    double dropped_bias = 0.0;

    AtomPicker(const std::vector<Atom>& atoms, double eps_J) {
        for (const auto& a : atoms) {
            if (std::abs(a.z) < eps_J) {
                dropped_bias += std::abs(a.z) * a.mass;
                continue;
            }
            z.push_back(a.z);
            w.push_back(a.mass);
            rate += a.mass;
        }
    }
    double pick(std::mt19937_64& rng) const {
        std::discrete_distribution<std::size_t> d(w.begin(), w.end());
        return z[d(rng)];
    }
};

} // namespace

PathSampler PathSampler::for_spec(const ProcessSpec& spec, std::uint64_t seed) {
    PathSampler s;
    s.spec = spec;
    s.seed = seed;
    if (spec.dimension != 1)
        throw UnsupportedSampler("samplers are one-dimensional");
    switch (spec.kind) {
        case ProcessSpec::Kind::Family:
            if (spec.family == "brownian") {
                s.scheme = Scheme::Brownian;
            } else if (spec.family == "stable") {
                s.scheme = Scheme::Stable1D;
            } else if (spec.family == "cp") {
                s.scheme = Scheme::CompoundPoisson;
            } else {
                throw UnsupportedSampler("no sampler for family " +
                                         spec.family);
            }
            break;
        case ProcessSpec::Kind::Subordinator:
            if (spec.phi.family != LaplaceExponent::Family::StableShifted ||
                spec.phi.alpha != 0.5 || spec.phi.m != 0.0)
                throw UnsupportedSampler(
                    "only the 1/2-stable subordinator has an exact sampler");
            s.scheme = Scheme::StableSubordinator;
            break;
        case ProcessSpec::Kind::Triplet: {
            if (spec.triplet.A != 0.0)
                throw UnsupportedSampler("Gaussian triplets: use the family");
            if (spec.triplet.nu.kind != LevyMeasureSpec::Kind::Atoms &&
                spec.triplet.nu.kind != LevyMeasureSpec::Kind::None)
                throw UnsupportedSampler(
                    "triplet sampling needs an atomic jump measure");
            s.scheme = Scheme::DriftFV;
            break;
        }
        default:
            throw UnsupportedSampler("no sampler for this spec kind");
    }
    if (s.scheme == Scheme::DriftFV) {
        AtomPicker p(s.spec.triplet.nu.atoms, s.eps_J);
        s.truncation_bias = p.dropped_bias;
    }
    return s;
}

std::mt19937_64 PathSampler::path_rng(std::uint64_t path_index) const {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(path_index)));
}

double PathSampler::increment(double dt, std::mt19937_64& rng) const {
    switch (scheme) {
        case Scheme::Brownian: {
            std::normal_distribution<double> n(
                0.0, std::sqrt(2.0 * spec.brownian_A * dt));
            return n(rng);
        }
        case Scheme::Stable1D: {
            double c = std::pow(spec.stable_scale * dt,
                                1.0 / spec.stable_alpha);
            return c * cms_symmetric(spec.stable_alpha, rng);
        }
        case Scheme::StableSubordinator: {
            // Laplace e^{-t delta sqrt(u)}: X = (t delta)^2 / (2 N^2)
            std::normal_distribution<double> n(0.0, 1.0);
            double g = 0.0;
            while (g == 0.0) g = n(rng);
            double td = dt * spec.phi.delta;
            return td * td / (2.0 * g * g);
        }
        case Scheme::CompoundPoisson: {
            std::poisson_distribution<int> pois(spec.cp_rate * dt);
            AtomPicker p(spec.cp_jumps, 0.0);
            int m = pois(rng);
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += p.pick(rng);
            return s;
        }
        case Scheme::DriftFV: {
            AtomPicker p(spec.triplet.nu.atoms, eps_J);
            double g0 = drift_gamma0(spec).gamma0;
            std::poisson_distribution<int> pois(p.rate * dt);
            double s = g0 * dt;
            int m = p.rate > 0.0 ? pois(rng) : 0;
            for (int j = 0; j < m; ++j) s += p.pick(rng);
            return s;
        }
    }
    return 0.0;
}

double PathSampler::draw_at(double t, std::mt19937_64& rng) const {
    return increment(t, rng);
}

bool PathSampler::exact_at_fixed_time() const { return true; }

// ---------------------------------------------------------------------------

namespace {

struct Moments {
    double sum = 0.0, sum2 = 0.0;
};

template <typename PerPath>
MCEstimate run_paths(std::size_t n_paths, const PerPath& per_path) {
    std::vector<double> vals(n_paths);
    std::int64_t n = (std::int64_t)n_paths;
    int workers = worker_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers)
#endif
    for (std::int64_t i = 0; i < n; ++i) vals[(std::size_t)i] = per_path((std::uint64_t)i);
    (void)workers;
    Moments m;
    for (double v : vals) {
        m.sum += v;
        m.sum2 += v * v;
    }
    MCEstimate e;
    e.n_paths = n_paths;
    e.value = m.sum / (double)n_paths;
    double var =
        std::max(0.0, m.sum2 / (double)n_paths - e.value * e.value);
    e.std_error = std::sqrt(var / (double)n_paths);
    return e;
}

} // namespace

MCEstimate estimate_time_functional(const PathSampler& sampler,
                                    const Potential& q, double x, double t,
                                    std::size_t n_paths, double delta) {
    if (delta <= 0.0) delta = t / 1000.0;
    std::size_t m = (std::size_t)std::ceil(t / delta - 1e-12);
    double d = t / (double)m;
    MCEstimate e = run_paths(n_paths, [&](std::uint64_t i) {
        auto rng = sampler.path_rng(i);
        double pos = 0.0, acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            acc += q(pos + x);
            pos += sampler.increment(d, rng);
        }
        return d * acc;
    });
    e.delta = d;
    e.horizon = t;
    e.bias_bound = sampler.truncation_bias * t;
    return e;
}

MCEstimate estimate_space_functional(const PathSampler& sampler,
                                     const Potential& q, double x,
                                     double lambda, double r, double horizon,
                                     std::size_t n_paths, double delta) {
    auto v = estimate_space_profile(sampler, q, x, lambda, {r}, horizon,
                                    n_paths, delta);
    return v.front();
}

std::vector<MCEstimate> estimate_space_profile(
    const PathSampler& sampler, const Potential& q, double x, double lambda,
    const std::vector<double>& r_grid, double horizon, std::size_t n_paths,
    double delta) {
    if (lambda <= 0.0) throw InvalidSpec("space functional needs lambda > 0");
    double r_min = *std::min_element(r_grid.begin(), r_grid.end());
    if (delta <= 0.0)
        delta = std::min(horizon / 1000.0, r_min * r_min / 16.0);
    std::size_t m = (std::size_t)std::ceil(horizon / delta - 1e-12);
    double d = horizon / (double)m;

    std::size_t nr = r_grid.size();
    // one pass per path scores every radius (common random numbers)
    std::vector<std::vector<double>> vals(nr,
                                          std::vector<double>(n_paths, 0.0));
    std::int64_t n = (std::int64_t)n_paths;
    int workers = worker_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        auto rng = sampler.path_rng((std::uint64_t)i);
        double pos = 0.0;
        std::vector<double> acc(nr, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            double disc = std::exp(-lambda * (double)k * d);
            double qq = q(pos + x);
            if (qq != 0.0)
                for (std::size_t j = 0; j < nr; ++j)
                    if (std::abs(pos) < r_grid[j]) acc[j] += disc * qq;
            pos += sampler.increment(d, rng);
        }
        for (std::size_t j = 0; j < nr; ++j)
            vals[j][(std::size_t)i] = d * acc[j];
    }
    (void)workers;

    std::vector<MCEstimate> out(nr);
    for (std::size_t j = 0; j < nr; ++j) {
        Moments mo;
        for (double v : vals[j]) {
            mo.sum += v;
            mo.sum2 += v * v;
        }
        MCEstimate& e = out[j];
        e.n_paths = n_paths;
        e.value = mo.sum / (double)n_paths;
        double var =
            std::max(0.0, mo.sum2 / (double)n_paths - e.value * e.value);
        e.std_error = std::sqrt(var / (double)n_paths);
        e.delta = d;
        e.horizon = horizon;
        e.bias_bound = sampler.truncation_bias / lambda;
        // discount tail must be negligible against the running value
        double tail = std::exp(-lambda * horizon) / lambda;
        if (e.value > 0.0 && tail >= 0.01 * e.value)
            throw HorizonTooShort("discount tail " + std::to_string(tail) +
                                  " not under 1% of estimate " +
                                  std::to_string(e.value));
    }
    return out;
}

ValidationReport validate_sampler(const PathSampler& sampler,
                                  const CharExponent& psi, double t,
                                  std::size_t n_paths, double bias) {
    ValidationReport rep;
    for (int j = 1; j <= 16; ++j) rep.xi.push_back(0.25 * j);
    rep.threshold = 4.0 / std::sqrt((double)n_paths);

    std::size_t nxi = rep.xi.size();
    std::vector<std::complex<double>> acc(nxi, 0.0);
    std::vector<double> draws(n_paths);
    std::int64_t n = (std::int64_t)n_paths;
    int workers = worker_threads();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        auto rng = sampler.path_rng((std::uint64_t)i);
        draws[(std::size_t)i] = sampler.draw_at(t, rng) + bias * t;
    }
    (void)workers;
    for (double xv : draws)
        for (std::size_t j = 0; j < nxi; ++j)
            acc[j] += std::exp(std::complex<double>(0.0, rep.xi[j] * xv));

    rep.passed = true;
    for (std::size_t j = 0; j < nxi; ++j) {
        std::complex<double> ecf = acc[j] / (double)n_paths;
        std::complex<double> exact = std::exp(-t * psi(rep.xi[j]));
        double dist = std::abs(ecf - exact);
        rep.ecf_dist.push_back(dist);
        if (dist > rep.threshold) rep.passed = false;
    }
    if (!rep.passed)
        throw SamplerMismatch(
            "empirical characteristic function deviates beyond 4/sqrt(n)");
    return rep;
}

} // namespace levykato
