#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "levykato/kato.hpp"
#include "levykato/levy_model.hpp"

namespace levykato {

struct SamplerMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HorizonTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedSampler : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact-increment samplers for the supported families; infinite-variation
// densities are not simulated here. Each path gets its own RNG stream seeded
// from (seed, path index) so results do not depend on scheduling.
struct PathSampler {
    enum class Scheme {
        Brownian,          // N(0, 2At) increments
        CompoundPoisson,   // exponential holding times, atom jumps
        StableSubordinator,// alpha = 1/2 exact: S = delta^2/(2 N^2), N ~ N(0,1)
        Stable1D,          // symmetric alpha-stable via the CMS transform
        DriftFV,           // drift gamma0 plus finite-activity atom jumps
    };
    Scheme scheme = Scheme::Brownian;
    ProcessSpec spec;
    std::uint64_t seed = 1;

    // jumps with |z| < eps_J are dropped (DriftFV only); the resulting bias
    // bound sum_{|z|<eps_J} |z| nu({z}) is reported, never hidden
    double eps_J = 0.0;
    double truncation_bias = 0.0;

    static PathSampler for_spec(const ProcessSpec& spec, std::uint64_t seed);

    // one increment over time dt using the given per-path engine
    double increment(double dt, std::mt19937_64& rng) const;
    // position at time t started from 0 (single exact draw where possible)
    double draw_at(double t, std::mt19937_64& rng) const;
    bool exact_at_fixed_time() const; // draw_at is one exact draw

    std::mt19937_64 path_rng(std::uint64_t path_index) const;
};

struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double delta = 0.0;     // Riemann step
    double horizon = 0.0;   // simulated time span
    double bias_bound = 0.0;
    double lo() const { return value - 3.0 * std_error; }
    double hi() const { return value + 3.0 * std_error; }
};

// E^x int_0^t |q(X_u)| du by the Riemann sum delta * sum q(X_{k delta} + x)
MCEstimate estimate_time_functional(const PathSampler& sampler,
                                    const Potential& q, double x, double t,
                                    std::size_t n_paths, double delta = 0.0);

// E^x int_0^inf e^{-lambda u} 1_{B(x,r)}(X_u + x) |q(X_u + x)| du, truncated
// at an adaptive horizon T; throws HorizonTooShort when the discount tail
// cannot be brought under 1% of the running value.
MCEstimate estimate_space_functional(const PathSampler& sampler,
                                     const Potential& q, double x,
                                     double lambda, double r, double horizon,
                                     std::size_t n_paths, double delta = 0.0);

// space profile over a shrinking r-grid with common random numbers
std::vector<MCEstimate> estimate_space_profile(const PathSampler& sampler,
                                               const Potential& q, double x,
                                               double lambda,
                                               const std::vector<double>& r_grid,
                                               double horizon,
                                               std::size_t n_paths,
                                               double delta = 0.0);

// Empirical characteristic function against e^{-t psi} at 16 frequencies;
// throws SamplerMismatch past 4/sqrt(n). `bias` injects a deliberate offset
// into every draw (negative control).
struct ValidationReport {
    std::vector<double> xi;
    std::vector<double> ecf_dist; // |ecf - exact| per frequency
    double threshold = 0.0;
    bool passed = false;
};
ValidationReport validate_sampler(const PathSampler& sampler,
                                  const CharExponent& psi, double t,
                                  std::size_t n_paths, double bias = 0.0);

} // namespace levykato
