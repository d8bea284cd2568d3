#include "levykato/battery.hpp"

#include <cmath>

namespace levykato {

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

ProcessSpec declared_product(const ProcessSpec& z) {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Product;
    s.dimension = 2;
    s.h0 = false;
    s.product = std::make_shared<ProductDecomposition>();
    s.product->spacetime = false;
    s.product->z_component = z;
    s.product->v_direction = {1.0, 0.0};
    return s;
}

ProcessSpec spacetime() {
    ProcessSpec s;
    s.kind = ProcessSpec::Kind::Product;
    s.dimension = 2;
    s.h0 = false;
    s.product = std::make_shared<ProductDecomposition>();
    s.product->spacetime = true;
    s.product->base = brownian();
    return s;
}

Potential indicator() {
    return Potential::closed_form([](double) { return 1.0; }, -1.0, 1.0, {},
                                  "indicator", true, 1.0);
}

Potential cusp(double p) {
    return Potential::closed_form(
        [p](double x) { return x > 0.0 ? std::pow(x, -p) : 0.0; }, 0.0, 1.0,
        {0.0}, "cusp");
}

bool coincide_expected(Label l) {
    switch (l) {
        case Label::A:
        case Label::Aprime:
        case Label::B:
        case Label::Bprime:
        case Label::D_gt1_H0:
            return true;
        default:
            return false;
    }
}

} // namespace

std::vector<BatteryCase> builtin_battery() {
    using M = Membership;
    std::vector<BatteryCase> v;
    auto add = [&](std::string name, ProcessSpec s, Potential q, Label l,
                   std::optional<M> K, std::optional<M> calK) {
        v.push_back({std::move(name), std::move(s), std::move(q), l, K, calK});
    };
    add("brownian/zero", brownian(), Potential::zero(), Label::C, M::In,
        M::In);
    add("brownian/constant", brownian(), Potential::constant(1.0), Label::C,
        M::In, M::In);
    add("brownian/comb", brownian(), Potential::comb(), Label::C, M::In,
        M::Out);
    add("brownian/sqrt-cusp", brownian(), cusp(0.5), Label::C, M::In, M::In);
    add("stable1.5/indicator", stable(1.5), indicator(), Label::C, M::In,
        M::In);
    add("stable0.5/indicator", stable(0.5), indicator(), Label::A, M::In,
        M::In);
    add("stable1.0/indicator", stable(1.0), indicator(), Label::A, M::In,
        M::In);
    add("cp/zero", cp_unit(), Potential::zero(), Label::CompoundPoisson,
        M::In, M::In);
    add("cp/constant", cp_unit(), Potential::constant(1.0),
        Label::CompoundPoisson, M::In, M::Out);
    add("cp/comb", cp_unit(), Potential::comb(), Label::CompoundPoisson,
        M::Out, M::Out);
    add("driftfv/indicator", drift_fv(), indicator(), Label::B, M::In, M::In);
    add("driftfv/comb", drift_fv(), Potential::comb(), Label::B, M::Out,
        M::Out);
    add("product-brownian/indicator", declared_product(brownian()),
        indicator(), Label::Cprime, M::In, M::In);
    add("product-stable0.5/indicator", declared_product(stable(0.5)),
        indicator(), Label::Aprime, M::In, M::In);
    add("product-driftfv/comb", declared_product(drift_fv()),
        Potential::comb(), Label::Bprime, M::Out, M::Out);
    add("spacetime-brownian/indicator", spacetime(), indicator(),
        Label::D_gt1_H0, std::nullopt, std::nullopt);
    add("halfsub/cusp0.25", half_stable_sub(), cusp(0.25), Label::A,
        std::nullopt, std::nullopt);
    add("halfsub/cusp0.75", half_stable_sub(), cusp(0.75), Label::A, M::Out,
        M::Out);
    return v;
}

BatteryReport run_battery(const KatoConfig& cfg) {
    BatteryReport rep;
    for (const BatteryCase& c : builtin_battery()) {
        BatteryOutcome o;
        o.name = c.name;
        try {
            KatoVerdict v = verdict(c.q, c.spec, cfg);
            o.label = v.label;
            o.K = v.membership_K;
            o.calK = v.membership_calK;
            o.label_ok = v.label == c.expected_label;
            o.memberships_ok =
                (!c.expected_K || *c.expected_K == o.K) &&
                (!c.expected_calK || *c.expected_calK == o.calK);
            o.lattice_ok = !(o.calK == Membership::In &&
                             o.K == Membership::Out);
            o.coincidence_ok = !coincide_expected(o.label) || o.K == o.calK;
            o.note = v.characterization_used;
        } catch (const std::exception& e) {
            o.note = std::string("exception: ") + e.what();
        }
        rep.all_pass = rep.all_pass && o.pass();
        rep.outcomes.push_back(std::move(o));
    }
    return rep;
}

} // namespace levykato
