#include "levykato/spec_io.hpp"

#include <cmath>
#include <fstream>

namespace levykato {

using nlohmann::json;

namespace {

void require_schema(const json& j, const char* what) {
    if (!j.is_object())
        throw InvalidSpec(std::string(what) + ": expected a JSON object");
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
        throw InvalidSpec(std::string(what) + ": missing schema_version");
    int v = j["schema_version"].get<int>();
    if (v != kSchemaVersion)
        throw InvalidSpec(std::string(what) + ": unsupported schema_version " +
                          std::to_string(v));
}

double num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw InvalidSpec(std::string(key) + " must be a number");
    return j[key].get<double>();
}

double num_req(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw InvalidSpec(std::string("missing numeric field ") + key);
    return j[key].get<double>();
}

std::string str_req(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw InvalidSpec(std::string("missing string field ") + key);
    return j[key].get<std::string>();
}

std::vector<Atom> parse_atoms(const json& j, const char* key) {
    std::vector<Atom> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array())
        throw InvalidSpec(std::string(key) + " must be [[z, mass], ...]");
    for (const auto& a : j[key]) {
        if (!a.is_array() || a.size() != 2)
            throw InvalidSpec(std::string(key) + " entries are [z, mass]");
        out.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return out;
}

LaplaceExponent parse_phi(const json& j) {
    LaplaceExponent phi;
    std::string fam = str_req(j, "family");
    if (fam == "stable_subordinator") {
        phi.family = LaplaceExponent::Family::StableShifted;
        phi.m = 0.0;
    } else if (fam == "shifted_stable_sub") {
        phi.family = LaplaceExponent::Family::StableShifted;
        phi.m = num(j, "m", 1.0);
    } else if (fam == "log_sub") {
        phi.family = LaplaceExponent::Family::Log;
    } else if (fam == "u_over_log_sub") {
        phi.family = LaplaceExponent::Family::OverLog;
    } else {
        throw InvalidSpec("unknown subordinator family: " + fam);
    }
    phi.delta = num(j, "delta", 1.0);
    phi.alpha = num(j, "alpha", 0.5);
    return phi;
}

LevyMeasureSpec parse_measure(const json& j) {
    LevyMeasureSpec nu;
    if (j.is_null()) return nu;
    std::string type = str_req(j, "type");
    if (type == "none") {
        nu.kind = LevyMeasureSpec::Kind::None;
    } else if (type == "atoms") {
        nu.kind = LevyMeasureSpec::Kind::Atoms;
        nu.atoms = parse_atoms(j, "atoms");
    } else if (type == "stable") {
        nu.kind = LevyMeasureSpec::Kind::Stable;
        nu.stable_alpha = num_req(j, "alpha");
        nu.stable_scale = num(j, "scale", 1.0);
    } else {
        throw InvalidSpec("unknown measure type: " + type);
    }
    return nu;
}

ProcessSpec parse_spec_inner(const json& j);

std::shared_ptr<ProductDecomposition> parse_product(const json& j) {
    auto p = std::make_shared<ProductDecomposition>();
    p->spacetime = j.contains("spacetime") && j["spacetime"].get<bool>();
    if (p->spacetime) {
        if (!j.contains("base"))
            throw InvalidSpec("space-time product needs a base spec");
        p->base = parse_spec_inner(j["base"]);
    } else {
        if (!j.contains("z"))
            throw InvalidSpec("declared product needs the 1D z component");
        p->z_component = parse_spec_inner(j["z"]);
        if (!j.contains("v") || !j["v"].is_array() || j["v"].empty())
            throw InvalidSpec("declared product needs a direction v");
        for (const auto& c : j["v"]) p->v_direction.push_back(c.get<double>());
        p->y_rate = num(j, "y_rate", 0.0);
        p->y_jumps = parse_atoms(j, "y_jumps");
    }
    return p;
}

ProcessSpec parse_spec_inner(const json& j) {
    ProcessSpec s;
    std::string kind = str_req(j, "kind");
    s.dimension = (int)num(j, "dimension", 1.0);
    if (j.contains("h0")) s.h0 = j["h0"].get<bool>();
    if (kind == "family") {
        s.kind = ProcessSpec::Kind::Family;
        s.family = str_req(j, "family");
        s.brownian_A = num(j, "A", 1.0);
        s.stable_alpha = num(j, "alpha", 1.0);
        s.stable_scale = num(j, "scale", 1.0);
        if (j.contains("e511")) {
            const json& e = j["e511"];
            s.e511_m = num(e, "m", 1.0);
            s.e511_beta = num(e, "beta", 1.0);
            s.e511_delta = num(e, "delta", 1.0);
            s.e511_alpha = num(e, "alpha", 1.0);
        }
        s.cp_rate = num(j, "rate", 1.0);
        s.cp_jumps = parse_atoms(j, "jumps");
    } else if (kind == "triplet") {
        s.kind = ProcessSpec::Kind::Triplet;
        s.triplet.gamma = num(j, "gamma", 0.0);
        s.triplet.A = num(j, "gaussian", 0.0);
        s.triplet.nu =
            parse_measure(j.contains("measure") ? j["measure"] : json());
    } else if (kind == "subordinator") {
        s.kind = ProcessSpec::Kind::Subordinator;
        if (!j.contains("phi"))
            throw InvalidSpec("subordinator spec needs a phi object");
        s.phi = parse_phi(j["phi"]);
    } else if (kind == "product") {
        s.kind = ProcessSpec::Kind::Product;
        if (s.dimension < 2) s.dimension = 2;
        if (!j.contains("product"))
            throw InvalidSpec("product spec needs a product object");
        s.product = parse_product(j["product"]);
    } else {
        throw InvalidSpec("unknown spec kind: " + kind);
    }
    s.validate();
    return s;
}

} // namespace

ProcessSpec parse_process_spec(const json& j) {
    require_schema(j, "process spec");
    return parse_spec_inner(j);
}

Potential parse_potential(const json& j) {
    require_schema(j, "potential");
    std::string kind = str_req(j, "kind");
    if (kind == "zero") return Potential::zero();
    if (kind == "constant") return Potential::constant(num_req(j, "c"));
    if (kind == "comb") return Potential::comb((int)num(j, "kmax", 40.0));
    if (kind == "indicator") {
        double lo = num_req(j, "lo"), hi = num_req(j, "hi");
        double c = num(j, "c", 1.0);
        return Potential::closed_form([c](double) { return c; }, lo, hi, {},
                                      "indicator", true, std::abs(c));
    }
    if (kind == "power") {
        // c * |x - center|^{-p} on [lo, hi]
        double p = num_req(j, "p");
        double c = num(j, "c", 1.0);
        double center = num(j, "center", 0.0);
        double lo = num_req(j, "lo"), hi = num_req(j, "hi");
        std::vector<double> sing;
        if (p > 0.0 && center >= lo && center <= hi) sing.push_back(center);
        return Potential::closed_form(
            [c, p, center](double x) {
                double d = std::abs(x - center);
                return d > 0.0 ? c * std::pow(d, -p)
                               : std::numeric_limits<double>::infinity();
            },
            lo, hi, sing, "power", p <= 0.0);
    }
    if (kind == "grid") {
        if (!j.contains("x") || !j.contains("values"))
            throw InvalidSpec("grid potential needs x and values arrays");
        return Potential::from_grid(j["x"].get<std::vector<double>>(),
                                    j["values"].get<std::vector<double>>(),
                                    "grid");
    }
    throw InvalidSpec("unknown potential kind: " + kind);
}

namespace {
json load_json(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw InvalidSpec(std::string("cannot open ") + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InvalidSpec(std::string(what) + " " + path + ": " + e.what());
    }
    return j;
}
} // namespace

ProcessSpec load_process_spec(const std::string& path) {
    return parse_process_spec(load_json(path, "process spec"));
}

Potential load_potential(const std::string& path) {
    return parse_potential(load_json(path, "potential"));
}

json diagnostic_json(const DivergenceDiagnostic& d) {
    const char* v = d.verdict == DivergenceDiagnostic::Verdict::Diverges
                        ? "Diverges"
                        : d.verdict == DivergenceDiagnostic::Verdict::Converges
                              ? "Converges"
                              : "Inconclusive";
    return json{{"radii", d.radii},
                {"partial_integrals", d.partial_integrals},
                {"slope", d.slope},
                {"verdict", v},
                {"lambda", d.lambda},
                {"limit", d.limit}};
}

json classification_json(const Classification& c) {
    json j{{"schema_version", kSchemaVersion},
           {"label", label_name(c.label)},
           {"finite_variation", c.finite_variation},
           {"gaussian_nonzero", c.gaussian_nonzero},
           {"zero_regular", c.zero_regular},
           {"point_polar", c.point_polar},
           {"kato_equivalent", c.kato_equivalent()}};
    if (c.gamma0) j["gamma0"] = *c.gamma0;
    if (c.regularity) j["regularity"] = diagnostic_json(*c.regularity);
    if (!c.v_note.empty()) j["v_note"] = c.v_note;
    return j;
}

json profile_json(const Profile& p) {
    return json{{"condition", p.condition},
                {"param", p.param},
                {"sup_value", p.sup_value},
                {"arg_sup", p.arg_sup},
                {"window_exhausted", p.window_exhausted},
                {"decision", membership_name(p.decision)}};
}

json verdict_json(const KatoVerdict& v) {
    json profiles = json::object();
    for (const auto& [name, p] : v.profiles) profiles[name] = profile_json(p);
    return json{{"schema_version", kSchemaVersion},
                {"label", label_name(v.label)},
                {"time_class", membership_name(v.membership_K)},
                {"space_class", membership_name(v.membership_calK)},
                {"characterization", v.characterization_used},
                {"expected_equivalent", v.expected_equivalent},
                {"profiles", profiles}};
}

json estimate_json(const MCEstimate& e) {
    return json{{"schema_version", kSchemaVersion},
                {"value", e.value},
                {"std_error", e.std_error},
                {"interval", {e.lo(), e.hi()}},
                {"n_paths", e.n_paths},
                {"delta", e.delta},
                {"horizon", e.horizon},
                {"bias_bound", e.bias_bound}};
}

void write_kernel_csv(const KernelGrid& k, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidSpec("cannot write " + path);
    out << "x,value,err\n";
    out.precision(17);
    for (std::size_t i = 0; i < k.grid.size(); ++i)
        out << k.grid[i] << ',' << k.values[i] << ','
            << (i < k.errors.size() ? k.errors[i] : 0.0) << '\n';
}

} // namespace levykato
