#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levykato/kato.hpp"

using namespace levykato;

namespace {

const double kPi = 3.14159265358979323846;

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

// pure drift plus a single finite-activity jump: finite variation, gamma0 != 0
ProcessSpec drift_fv() {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Triplet;
    s.triplet.gamma = 1.0;
    s.triplet.A = 0.0;
    s.triplet.nu.kind = LevyMeasureSpec::Kind::Atoms;
    s.triplet.nu.atoms = {{0.5, 1.0}};
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

Potential indicator() {
    return Potential::closed_form([](double) { return 1.0; }, -1.0, 1.0, {},
                                  "indicator", true, 1.0);
}

Potential power_cusp(double p) {
    return Potential::closed_form(
        [p](double x) { return x > 0.0 ? std::pow(x, -p) : 0.0; }, 0.0, 1.0,
        {0.0}, "cusp");
}

} // namespace

TEST_CASE("potential: comb takes value 2^k on its blocks") {
    Potential q = Potential::comb();
    CHECK(q(1.0 + std::pow(2.0, -2)) == 2.0);   // inside block k = 1
    CHECK(q(3.0 + std::pow(2.0, -4)) == 8.0);   // inside block k = 3
    CHECK(q(2.5) == 0.0);                       // between blocks
    CHECK(q(0.5) == 0.0);
    auto c = q.sup_candidates(0.0, 10.0);
    CHECK(std::find_if(c.begin(), c.end(), [](double x) {
              return std::abs(x - (3.0 + 0.5 * std::pow(2.0, -3))) < 1e-15;
          }) != c.end());
}

TEST_CASE("potential: closed form clips to support and grids interpolate") {
    Potential q = indicator();
    CHECK(q(0.3) == 1.0);
    CHECK(q(1.5) == 0.0);
    Potential g = Potential::from_grid({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0}, "hat");
    CHECK(g(0.5) == doctest::Approx(1.0));
    CHECK(g(3.0) == 0.0);
}

TEST_CASE("limit rule") {
    using V = std::vector<double>;
    double inf = std::numeric_limits<double>::infinity();
    CHECK(limit_decision(V{0, 0, 0}, false) == Membership::In);
    CHECK(limit_decision(V{1.0, 1e-2, 1e-3, 1e-4, 1e-5}, false) ==
          Membership::In);
    CHECK(limit_decision(V{1.0, 0.8, 0.700, 0.699, 0.698}, false) ==
          Membership::Out);
    CHECK(limit_decision(V{1.0, 0.5, 0.25, 0.12, 0.06}, false) ==
          Membership::Inconclusive);
    CHECK(limit_decision(V{1.0, 1e-4, 1e-5}, true) == Membership::Out);
    CHECK(limit_decision(V{1.0, inf, inf}, false) == Membership::Out);
}

TEST_CASE("closed forms: Brownian (regular case) on simple q") {
    KatoVerdict vz = verdict(Potential::zero(), brownian());
    CHECK(vz.label == Label::C);
    CHECK_FALSE(vz.expected_equivalent);
    CHECK(vz.membership_K == Membership::In);
    CHECK(vz.membership_calK == Membership::In);

    KatoVerdict vc = verdict(Potential::constant(1.0), brownian());
    CHECK(vc.membership_K == Membership::In);
    CHECK(vc.membership_calK == Membership::In);
}

TEST_CASE("closed forms: the comb splits the two classes for Brownian") {
    KatoVerdict v = verdict(Potential::comb(), brownian());
    CHECK(v.label == Label::C);
    CHECK(v.membership_K == Membership::In);      // uniformly locally integrable
    CHECK(v.membership_calK == Membership::Out);  // window mass does not vanish
    CHECK_FALSE(v.expected_equivalent);
}

TEST_CASE("closed forms: compound Poisson") {
    CHECK(verdict(Potential::zero(), cp_unit()).membership_calK ==
          Membership::In);
    KatoVerdict v1 = verdict(Potential::constant(1.0), cp_unit());
    CHECK(v1.label == Label::CompoundPoisson);
    CHECK(v1.expected_equivalent == false);
    CHECK(v1.membership_K == Membership::In);     // bounded
    CHECK(v1.membership_calK == Membership::Out); // nonzero
    KatoVerdict v2 = verdict(Potential::comb(), cp_unit());
    CHECK(v2.membership_K == Membership::Out);    // unbounded heights
}

TEST_CASE("closed forms: drift case collapses both classes to one criterion") {
    KatoVerdict vi = verdict(indicator(), drift_fv());
    CHECK(vi.label == Label::B);
    CHECK(vi.expected_equivalent);
    CHECK(vi.membership_K == vi.membership_calK);
    CHECK(vi.membership_K == Membership::In);

    KatoVerdict vcomb = verdict(Potential::comb(), drift_fv());
    CHECK(vcomb.membership_K == vcomb.membership_calK);
    CHECK(vcomb.membership_K == Membership::Out);
}

TEST_CASE("numeric time condition: Brownian occupation of a strip shrinks") {
    Profile p = eval_time_condition(indicator(), brownian(),
                                    {1.0, 1e-2, 1e-4, 1e-6, 1e-8});
    CHECK(p.decision == Membership::In);
    // small-t occupation of a full-width strip is t itself
    CHECK(p.sup_value.back() ==
          doctest::Approx(1e-8).epsilon(0.05));
    for (std::size_t i = 1; i < p.sup_value.size(); ++i)
        CHECK(p.sup_value[i] < p.sup_value[i - 1]);
}

TEST_CASE("numeric space condition: Brownian resolvent mass vanishes") {
    Profile p = eval_space_condition(indicator(), brownian(), 1.0,
                                     {1.0, 1e-2, 1e-4, 1e-6});
    CHECK(p.decision == Membership::In);
    // int_{-r}^{r} e^{-|z|}/2 dz ~ r for small r
    CHECK(p.sup_value.back() == doctest::Approx(1e-6).epsilon(0.05));
}

TEST_CASE("numeric space condition sees the compound Poisson origin atom") {
    Profile p = eval_space_condition(Potential::constant(1.0), cp_unit(), 1.0,
                                     {1.0, 1e-1, 1e-2, 1e-3});
    CHECK(p.decision == Membership::Out);
    // the mass at 0 is 1/(lambda + rate)
    CHECK(p.sup_value.back() >= 0.5 - 1e-9);
}

TEST_CASE("comb: time profile falls while the window mass holds its floor") {
    Potential q = Potential::comb();
    std::vector<double> ts = {0.2, 0.1, 0.05, 0.02};
    Profile pt = eval_time_condition(q, brownian(), ts);
    for (std::size_t i = 1; i < pt.sup_value.size(); ++i)
        CHECK(pt.sup_value[i] < pt.sup_value[i - 1]);

    Profile ps = eval_space_condition(q, brownian(), 1.0, ts);
    // each window of radius r >= 2^{-k} swallows a whole unit-mass block;
    // G^1 >= e^{-1}/2 on it once the block sits within distance 1
    for (std::size_t i = 0; i < ps.sup_value.size(); ++i) {
        double bound = 0.5 * std::exp(-1.0); // block mass 1 times min kernel
        CHECK(ps.sup_value[i] >= 0.5 * bound);
    }
}

TEST_CASE("identities: time vs coupled time-space verdicts agree") {
    for (const ProcessSpec& s : {brownian(), stable(1.5)}) {
        for (const Potential& q : {indicator(), Potential::comb()}) {
            Profile a = eval_time_condition(q, s, {1.0, 1e-2, 1e-4, 1e-6});
            Profile b = eval_timespace_condition(q, s, {1.0, 1e-2, 1e-4, 1e-6});
            CHECK(a.decision == b.decision);
        }
    }
}

TEST_CASE("identities: space condition is robust in lambda and truncation") {
    Potential q = indicator();
    std::vector<double> rg = {1.0, 1e-2, 1e-4, 1e-6};
    Profile base = eval_space_condition(q, stable(1.5), 1.0, rg);
    for (double lam : {0.5, 2.0}) {
        Profile p = eval_space_condition(q, stable(1.5), lam, rg);
        CHECK(p.decision == base.decision);
    }
    for (double t : {0.5, 2.0}) {
        Profile p = eval_trunc_space_condition(q, stable(1.5), 1.0, t, rg);
        CHECK(p.decision == base.decision);
    }
}

TEST_CASE("subordinator weight criterion: the cusp exponent flips the verdict") {
    KatoConfig cfg;
    cfg.r_grid = {1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12, 1e-14, 1e-16};
    KatoVerdict in = verdict(power_cusp(0.25), half_stable_sub(), cfg);
    CHECK(in.label == Label::A);
    CHECK(in.expected_equivalent);
    CHECK(in.membership_K == Membership::In);
    CHECK(in.membership_calK == Membership::In);

    KatoVerdict out = verdict(power_cusp(0.75), half_stable_sub(), cfg);
    CHECK(out.membership_K == Membership::Out);
    CHECK(out.membership_calK == Membership::Out);

    // analytic threshold: int_0^r z^{-p} z^{-1/2} dz/2 with p = 1/4
    const Profile& wp = in.profiles.at("weight");
    for (std::size_t i = 0; i < wp.param.size(); ++i) {
        double r = wp.param[i];
        double exact = 0.5 * std::pow(r, 0.25) / 0.25;
        CHECK(wp.sup_value[i] == doctest::Approx(exact).epsilon(0.02));
    }
}

TEST_CASE("radial weights d = 3: unit-ball potential gives 2 pi t") {
    Potential q = indicator(); // radial: 1 on |z| < 1
    Profile p = aizenman_simon_weights(q, 3, {0.64, 0.16, 0.04, 0.01});
    for (std::size_t i = 0; i < p.param.size(); ++i)
        CHECK(p.sup_value[i] ==
              doctest::Approx(2.0 * kPi * p.param[i]).epsilon(1e-3));
    CHECK(p.decision == Membership::Inconclusive); // quadratic decay, short grid
}

TEST_CASE("radial weights d = 3: |z|^{-2} is flagged divergent") {
    Potential q = power_cusp(2.0);
    Profile p = aizenman_simon_weights(q, 3, {0.25, 0.04});
    for (double v : p.sup_value) CHECK(std::isinf(v));
    CHECK(p.decision == Membership::Out);
}

TEST_CASE("radial weights d = 2 accept the log weight, reject d = 1") {
    Potential q = indicator();
    Profile p = aizenman_simon_weights(q, 2, {0.25, 0.04});
    CHECK(p.sup_value[0] > 0.0);
    CHECK(p.sup_value[1] < p.sup_value[0]);
    CHECK_THROWS_AS(aizenman_simon_weights(q, 1, {0.25}), DimensionUnsupported);
}

TEST_CASE("unimodal kernel bound holds with slack for Gaussian and Cauchy") {
    ProcessSpec b3 = brownian();
    b3.dimension = 3;
    double t = 0.5;
    double r = coupled_radius(b3, t);
    CHECK(r == doctest::Approx(std::sqrt(t)).epsilon(1e-6)); // psi*(u) = u^2
    BoundReport rep = unimodal_bound_check(indicator(), b3, t, r, t);
    CHECK(rep.slack >= 0.0);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.fitted_c > 0.0);

    ProcessSpec c3 = stable(1.0);
    c3.dimension = 3;
    double rc = coupled_radius(c3, t);
    CHECK(rc == doctest::Approx(t).epsilon(1e-6)); // psi*(u) = u
    BoundReport repc = unimodal_bound_check(indicator(), c3, t, rc, t);
    CHECK(repc.slack >= 0.0);
}

TEST_CASE("verdicts carry the containment lattice") {
    // whatever the decision path, In-space must imply In-time
    for (const ProcessSpec& s : {brownian(), stable(1.5), cp_unit()}) {
        for (const Potential& q :
             {Potential::zero(), Potential::constant(0.3), indicator(),
              Potential::comb()}) {
            KatoVerdict v = verdict(q, s);
            bool violates = v.membership_calK == Membership::In &&
                            v.membership_K == Membership::Out;
            CHECK_FALSE(violates);
        }
    }
}
