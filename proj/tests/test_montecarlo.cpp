#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levykato/montecarlo.hpp"
#include "levykato/potential.hpp"

using namespace levykato;

namespace {

ProcessSpec brownian() {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Family;
    s.family = "brownian";
    return s;
}

ProcessSpec stable(double a) {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Family;
    s.family = "stable";
    s.stable_alpha = a;
    return s;
}

ProcessSpec cp_unit() {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Family;
    s.family = "cp";
    s.cp_rate = 1.0;
    s.cp_jumps = {{1.0, 1.0}};
    return s;
}

ProcessSpec half_stable_sub() {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Subordinator;
    s.phi.family = LaplaceExponent::Family::StableShifted;
    s.phi.alpha = 0.5;
    s.phi.m = 0.0;
    return s;
}

Potential box(double lo, double hi) {
    return Potential::closed_form([](double) { return 1.0; }, lo, hi, {},
                                  "box", true, 1.0);
}

} // namespace

TEST_CASE("time functional: q = 1 integrates to t exactly") {
    PathSampler s = PathSampler::for_spec(brownian(), 7);
    MCEstimate e =
        estimate_time_functional(s, Potential::constant(1.0), 0.0, 0.8, 200);
    CHECK(e.value == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(e.std_error == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("time functional: compound Poisson occupation of the start") {
    // the path sits in (-1/2, 1/2) exactly until the first unit jump
    PathSampler s = PathSampler::for_spec(cp_unit(), 11);
    MCEstimate e = estimate_time_functional(s, box(-0.5, 0.5), 0.0, 1.0,
                                            100000);
    double exact = 1.0 - std::exp(-1.0);
    CHECK(std::abs(e.value - exact) < 3.0 * e.std_error + e.delta);
    CHECK(e.std_error > 0.0);
}

TEST_CASE("time functional: Brownian strip occupation matches quadrature") {
    CharExponent psi(brownian());
    KernelGrid g = truncated_potential(psi, 0.0, 1.0, uniform_grid(-8, 8, 801));
    double oracle = 0.0;
    for (std::size_t i = 1; i < g.grid.size(); ++i) {
        double z0 = g.grid[i - 1], z1 = g.grid[i];
        if (z0 < 0.0 || z1 > 1.0) continue;
        oracle += 0.5 * (g.values[i - 1] + g.values[i]) * (z1 - z0);
    }
    PathSampler s = PathSampler::for_spec(brownian(), 13);
    MCEstimate e = estimate_time_functional(s, box(0.0, 1.0), 0.0, 1.0, 100000);
    CHECK(std::abs(e.value - oracle) < 3.0 * e.std_error + 2.0 * e.delta);
}

TEST_CASE("time functional: translation invariance in the start point") {
    PathSampler s = PathSampler::for_spec(brownian(), 17);
    PathSampler s2 = PathSampler::for_spec(brownian(), 23);
    MCEstimate a = estimate_time_functional(s, box(0.0, 1.0), 0.3, 0.5, 40000);
    MCEstimate b =
        estimate_time_functional(s2, box(-0.3, 0.7), 0.0, 0.5, 40000);
    CHECK(std::abs(a.value - b.value) < 3.0 * (a.std_error + b.std_error));
}

TEST_CASE("time functional: halving the step moves the estimate < 3 SE") {
    PathSampler s = PathSampler::for_spec(stable(1.5), 29);
    MCEstimate coarse = estimate_time_functional(s, box(-1.0, 1.0), 0.0, 1.0,
                                                 40000, 1.0 / 500.0);
    MCEstimate fine = estimate_time_functional(s, box(-1.0, 1.0), 0.0, 1.0,
                                               40000, 1.0 / 1000.0);
    CHECK(std::abs(coarse.value - fine.value) <
          3.0 * (coarse.std_error + fine.std_error) + 1e-3);
}

TEST_CASE("space functional: q = 1, huge ball gives the discount mass") {
    PathSampler s = PathSampler::for_spec(brownian(), 31);
    double lambda = 1.0, T = 8.0;
    MCEstimate e = estimate_space_functional(s, Potential::constant(1.0), 0.0,
                                             lambda, 1e9, T, 500, 0.01);
    double exact = (1.0 - std::exp(-lambda * T)) / lambda;
    CHECK(e.value == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("space functional: horizon guard") {
    PathSampler s = PathSampler::for_spec(brownian(), 37);
    CHECK_THROWS_AS(estimate_space_functional(s, Potential::constant(1.0), 0.0,
                                              0.5, 1e9, 0.5, 200, 0.01),
                    HorizonTooShort);
}

TEST_CASE("space functional: compound Poisson start-point mass floor") {
    PathSampler s = PathSampler::for_spec(cp_unit(), 41);
    double lambda = 1.0;
    auto prof = estimate_space_profile(s, Potential::constant(1.0), 0.0, lambda,
                                       {0.1, 0.05, 0.02}, 10.0, 4000, 0.005);
    // the origin atom alone contributes about 1/(lambda + rate) = 1/2
    for (const auto& e : prof) CHECK(e.value > 0.4);
    // common random numbers: profile monotone in r pathwise
    CHECK(prof[0].value >= prof[1].value);
    CHECK(prof[1].value >= prof[2].value);
}

TEST_CASE("sampler validation passes for every exact scheme") {
    for (const ProcessSpec& spec :
         {brownian(), stable(1.5), stable(1.0), stable(0.7), cp_unit(),
          half_stable_sub()}) {
        PathSampler s = PathSampler::for_spec(spec, 101);
        CharExponent psi(spec);
        ValidationReport rep = validate_sampler(s, psi, 0.7, 100000);
        CHECK(rep.passed);
        CHECK(rep.xi.size() == 16);
    }
}

TEST_CASE("sampler validation catches a biased sampler (negative control)") {
    PathSampler s = PathSampler::for_spec(brownian(), 103);
    CharExponent psi(brownian());
    CHECK_THROWS_AS(validate_sampler(s, psi, 0.7, 100000, 0.5),
                    SamplerMismatch);
}

TEST_CASE("jump truncation: dropping all jumps biases the drift sampler") {
    ProcessSpec t;
    t.kind = ProcessSpec::Kind::Triplet;
    t.triplet.gamma = 1.0;
    t.triplet.A = 0.0;
    t.triplet.nu.kind = LevyMeasureSpec::Kind::Atoms;
    t.triplet.nu.atoms = {{0.5, 2.0}};

    PathSampler ok = PathSampler::for_spec(t, 107);
    CHECK(ok.truncation_bias == 0.0);
    CharExponent psi(t);
    CHECK(validate_sampler(ok, psi, 0.5, 100000).passed);

    PathSampler trunc = PathSampler::for_spec(t, 107);
    trunc.eps_J = 1.0; // swallows the 0.5 jumps entirely
    CHECK_THROWS_AS(validate_sampler(trunc, psi, 0.5, 100000),
                    SamplerMismatch);
}

TEST_CASE("determinism: same seed, same estimate") {
    PathSampler s = PathSampler::for_spec(stable(1.2), 997);
    MCEstimate a = estimate_time_functional(s, box(-1, 1), 0.0, 0.5, 5000);
    MCEstimate b = estimate_time_functional(s, box(-1, 1), 0.0, 0.5, 5000);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("unsupported specs are refused") {
    ProcessSpec s = brownian();
    s.dimension = 2;
    CHECK_THROWS_AS(PathSampler::for_spec(s, 1), UnsupportedSampler);
    ProcessSpec e511;
    e511.kind = ProcessSpec::Kind::Family;
    e511.family = "example511";
    CHECK_THROWS_AS(PathSampler::for_spec(e511, 1), UnsupportedSampler);
}
