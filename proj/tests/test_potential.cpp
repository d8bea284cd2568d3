#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levykato/potential.hpp"

using namespace levykato;

namespace {

const double kPi = 3.14159265358979323846;

ProcessSpec brownian() {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Family;
    s.family = "brownian";
    return s;
}

ProcessSpec cauchy() {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Family;
    s.family = "stable";
    s.stable_alpha = 1.0;
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

} // namespace

TEST_CASE("transition density: Brownian p(1,0) = 1/(2 sqrt(pi))") {
    CharExponent psi(brownian());
    KernelGrid k = transition_density(psi, 1.0, uniform_grid(-10, 10, 401));
    CHECK(k.interp(0.0) == doctest::Approx(1.0 / (2 * std::sqrt(kPi)))
                               .epsilon(1e-6));
    CHECK(k.mass_estimate == doctest::Approx(1.0).epsilon(1e-4));
    // symmetry
    CHECK(k.interp(1.7) == doctest::Approx(k.interp(-1.7)).epsilon(1e-9));
}

TEST_CASE("transition density: Cauchy closed form") {
    CharExponent psi(cauchy());
    KernelGrid k = transition_density(psi, 0.7, uniform_grid(-30, 30, 601));
    for (double x : {0.0, 0.5, 2.0}) {
        double exact = 0.7 / (kPi * (0.49 + x * x));
        CHECK(k.interp(x) == doctest::Approx(exact).epsilon(1e-4));
    }
}

TEST_CASE("transition density refuses the compound Poisson route") {
    CharExponent psi(cp_unit());
    CHECK_THROWS_AS(transition_density(psi, 1.0, uniform_grid(-2, 2, 11)),
                    AtomAtOrigin);
}

TEST_CASE("potential density: Brownian G^1 = e^{-|x|}/2") {
    CharExponent psi(brownian());
    KernelGrid k = potential_density(psi, 1.0, uniform_grid(-8, 8, 801));
    double max_err = 0.0;
    for (std::size_t i = 0; i < k.grid.size(); ++i)
        max_err = std::max(
            max_err,
            std::abs(k.values[i] - 0.5 * std::exp(-std::abs(k.grid[i]))));
    CHECK(max_err < 1e-6);
}

TEST_CASE("potential density mass: int G^lambda = 1/lambda") {
    CharExponent psi(brownian());
    for (double lambda : {0.5, 1.0, 2.0}) {
        KernelGrid k = potential_density(psi, lambda, uniform_grid(-40, 40, 2001));
        CHECK(k.mass_estimate == doctest::Approx(1.0 / lambda).epsilon(1e-4));
    }
}

TEST_CASE("potential density rejects the divergent case") {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Family;
    s.family = "stable";
    s.stable_alpha = 0.5;
    CharExponent psi(s);
    CHECK_THROWS_AS(potential_density(psi, 1.0, uniform_grid(-2, 2, 11)),
                    CaseAViolation);
}

TEST_CASE("truncated potential: Brownian G_1^0(0) = 1/sqrt(pi)") {
    CharExponent psi(brownian());
    KernelGrid k =
        truncated_potential(psi, 0.0, 1.0, uniform_grid(-10, 10, 1601));
    CHECK(k.interp(0.0) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-4));
    CHECK(k.mass_estimate == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("truncated potential monotone in t and below G^lambda") {
    CharExponent psi(brownian());
    auto grid = uniform_grid(-6, 6, 121);
    KernelGrid g_half = truncated_potential(psi, 1.0, 0.5, grid);
    KernelGrid g_two = truncated_potential(psi, 1.0, 2.0, grid);
    KernelGrid g_inf = potential_density(psi, 1.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(g_half.values[i] <= g_two.values[i] + 1e-9);
        CHECK(g_two.values[i] <= g_inf.values[i] + 1e-9);
    }
}

TEST_CASE("kernel sandwich: e^{-lambda t} G_t^0 <= G_t^lambda <= G_t^0") {
    CharExponent psi(cauchy());
    auto grid = uniform_grid(-5, 5, 81);
    double lambda = 1.3, t = 0.8;
    KernelGrid g0 = truncated_potential(psi, 0.0, t, grid);
    KernelGrid gl = truncated_potential(psi, lambda, t, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(gl.values[i] <= g0.values[i] + 1e-8);
        CHECK(gl.values[i] >= std::exp(-lambda * t) * g0.values[i] - 1e-8);
    }
}

TEST_CASE("multiplier route agrees with the serial time-quadrature reference") {
    CharExponent psi(brownian());
    auto grid = uniform_grid(-3, 3, 25);
    KernelGrid fast =
        truncated_potential(psi, 0.5, 1.0, grid, true, TruncRoute::Multiplier);
    KernelGrid ref = truncated_potential(psi, 0.5, 1.0, grid, false,
                                         TruncRoute::TimeQuadrature);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(fast.values[i] == doctest::Approx(ref.values[i]).epsilon(5e-4));
}

TEST_CASE("serial and parallel kernel paths agree") {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Family;
    s.family = "stable";
    s.stable_alpha = 1.5;
    CharExponent psi(s);
    auto grid = uniform_grid(-4, 4, 101);
    KernelGrid par = potential_density(psi, 1.0, grid, true);
    KernelGrid ser = potential_density(psi, 1.0, grid, false);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(par.values[i] == doctest::Approx(ser.values[i]).epsilon(1e-12));
}

TEST_CASE("Chapman-Kolmogorov spot check") {
    CharExponent psi(brownian());
    auto grid = uniform_grid(-12, 12, 481);
    KernelGrid p_s = transition_density(psi, 0.4, grid);
    KernelGrid p_t = transition_density(psi, 0.6, grid);
    KernelGrid p_st = transition_density(psi, 1.0, grid);
    for (double x : {0.0, 0.8, -1.5}) {
        double conv = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            double y0 = grid[i - 1], y1 = grid[i];
            conv += 0.5 *
                    (p_s.interp(y0) * p_t.interp(x - y0) +
                     p_s.interp(y1) * p_t.interp(x - y1)) *
                    (y1 - y0);
        }
        CHECK(conv == doctest::Approx(p_st.interp(x)).epsilon(1e-3));
    }
}

TEST_CASE("subordinator weight: phi = sqrt gives z^{-1/2}/2") {
    LaplaceExponent phi;
    phi.family = LaplaceExponent::Family::StableShifted;
    phi.alpha = 0.5;
    phi.m = 0.0;
    std::vector<double> zg;
    for (int i = 1; i <= 100; ++i) zg.push_back(i / 100.0);
    KernelGrid w = subordinator_weight(phi, zg);
    for (std::size_t i = 0; i < zg.size(); ++i)
        CHECK(w.values[i] ==
              doctest::Approx(0.5 / std::sqrt(zg[i])).epsilon(1e-12));
}

TEST_CASE("subordinator weight vs exact stable potential: constant ratio") {
    // exact G^0 density for the 1/2-stable subordinator: z^{-1/2}/Gamma(1/2)
    LaplaceExponent phi;
    phi.family = LaplaceExponent::Family::StableShifted;
    phi.alpha = 0.5;
    phi.m = 0.0;
    std::vector<double> zg;
    for (double z = 0.01; z <= 1.0; z += 0.01) zg.push_back(z);
    KernelGrid w = subordinator_weight(phi, zg);
    double expect = 0.5 * std::sqrt(kPi); // w/G0 = (1/2)/(1/sqrt(pi))
    for (std::size_t i = 0; i < zg.size(); ++i) {
        double g0 = 1.0 / std::sqrt(kPi * zg[i]);
        CHECK(w.values[i] / g0 == doctest::Approx(expect).epsilon(0.01));
    }
}

TEST_CASE("log-subordinator weight matches its closed form") {
    LaplaceExponent phi;
    phi.family = LaplaceExponent::Family::Log;
    phi.alpha = 1.0;
    std::vector<double> zg = {0.01, 0.1, 0.5, 1.0};
    KernelGrid w = subordinator_weight(phi, zg);
    for (std::size_t i = 0; i < zg.size(); ++i) {
        double z = zg[i];
        double u = 1.0 / z;
        double exact = (1.0 / (1.0 + u)) / (z * z * std::pow(std::log1p(u), 2));
        CHECK(w.values[i] == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("compound Poisson kernel atoms") {
    // G^lambda({n}) = rate^n/(lambda+rate)^{n+1} for unit-jump cp
    DiscreteKernel k = cp_kernel(cp_unit(), 1.0,
                                 std::numeric_limits<double>::infinity());
    CHECK(k.total_mass == doctest::Approx(1.0).epsilon(1e-10));
    for (const auto& a : k.atoms) {
        int n = (int)std::lround(a.z);
        CHECK(a.mass == doctest::Approx(std::pow(0.5, n + 1)).epsilon(1e-9));
    }
    // G_t^0 total mass is t
    DiscreteKernel kt = cp_kernel(cp_unit(), 0.0, 0.7);
    CHECK(kt.total_mass == doctest::Approx(0.7).epsilon(1e-10));
    // occupation of the start point up to the first jump: (1-e^{-t})/1
    CHECK(kt.atoms[0].z == 0.0);
    CHECK(kt.atoms[0].mass == doctest::Approx(1.0 - std::exp(-0.7)).epsilon(1e-10));
}

TEST_CASE("refined grid shape") {
    auto g = refined_grid(4.0, 81, 1e-4, true);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(std::count(g.begin(), g.end(), 0.0) == 1);
    // symmetric
    for (double x : g)
        CHECK(std::find(g.begin(), g.end(), -x) != g.end());
    auto g2 = refined_grid(4.0, 81, 1e-4, false);
    CHECK(std::count(g2.begin(), g2.end(), 0.0) == 0);
}
