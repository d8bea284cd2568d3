#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "levykato/battery.hpp"
#include "levykato/spec_io.hpp"

using namespace levykato;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kInconclusive = 2 };

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw InvalidSpec("cannot write " + out_path);
    out << j.dump(2) << "\n";
}

int cmd_classify(const std::string& spec_path, double lambda,
                 const std::string& out_path) {
    ProcessSpec spec = load_process_spec(spec_path);
    try {
        Classification c = classify(spec, lambda);
        emit(classification_json(c), out_path);
        return kOk;
    } catch (const InconclusiveIntegral& e) {
        json j{{"schema_version", kSchemaVersion},
               {"label", "Inconclusive"},
               {"reason", e.what()},
               {"regularity", diagnostic_json(e.diagnostic)}};
        emit(j, out_path);
        return kInconclusive;
    }
}

int cmd_kernel(const std::string& spec_path, double lambda, double t,
               double xmax, int n, const std::string& out_path) {
    ProcessSpec spec = load_process_spec(spec_path);
    CharExponent psi(spec);
    auto grid = uniform_grid(-xmax, xmax, n);
    KernelGrid k = std::isfinite(t) && lambda == 0.0
                       ? truncated_potential(psi, 0.0, t, grid)
                   : std::isfinite(t)
                       ? truncated_potential(psi, lambda, t, grid)
                       : potential_density(psi, lambda, grid);
    if (out_path.empty()) {
        std::printf("x,value,err\n");
        for (std::size_t i = 0; i < k.grid.size(); ++i)
            std::printf("%.17g,%.17g,%.17g\n", k.grid[i], k.values[i],
                        i < k.errors.size() ? k.errors[i] : 0.0);
    } else {
        write_kernel_csv(k, out_path);
    }
    return kOk;
}

int cmd_kato_check(const std::string& spec_path, const std::string& q_path,
                   const std::string& conditions, double lambda,
                   const std::string& out_path) {
    ProcessSpec spec = load_process_spec(spec_path);
    Potential q = load_potential(q_path);
    KatoConfig cfg;
    cfg.lambda = lambda;

    KatoVerdict v = verdict(q, spec, cfg);
    // extra profiles on request, beyond what the verdict dispatch ran
    auto wants = [&](const std::string& name) {
        return conditions.find(name) != std::string::npos;
    };
    if (wants("time") && !v.profiles.count("time"))
        v.profiles["time"] = eval_time_condition(q, spec, cfg.defaulted_t(), cfg);
    if (wants("space") && !v.profiles.count("space"))
        v.profiles["space"] =
            eval_space_condition(q, spec, lambda, cfg.defaulted_r(), cfg);
    if (wants("timespace"))
        v.profiles["timespace"] =
            eval_timespace_condition(q, spec, cfg.defaulted_r(), cfg);
    emit(verdict_json(v), out_path);
    return v.membership_K == Membership::Inconclusive ||
                   v.membership_calK == Membership::Inconclusive
               ? kInconclusive
               : kOk;
}

int cmd_simulate(const std::string& spec_path, const std::string& q_path,
                 double x, double t, std::size_t paths, std::uint64_t seed,
                 const std::string& out_path) {
    ProcessSpec spec = load_process_spec(spec_path);
    Potential q = load_potential(q_path);
    PathSampler sampler = PathSampler::for_spec(spec, seed);
    MCEstimate e = estimate_time_functional(sampler, q, x, t, paths);
    emit(estimate_json(e), out_path);
    return kOk;
}

int cmd_battery(const std::string& out_path) {
    BatteryReport rep = run_battery();
    json cases = json::array();
    for (const auto& o : rep.outcomes) {
        cases.push_back({{"name", o.name},
                         {"label", label_name(o.label)},
                         {"time_class", membership_name(o.K)},
                         {"space_class", membership_name(o.calK)},
                         {"label_ok", o.label_ok},
                         {"memberships_ok", o.memberships_ok},
                         {"lattice_ok", o.lattice_ok},
                         {"coincidence_ok", o.coincidence_ok},
                         {"pass", o.pass()},
                         {"note", o.note}});
    }
    json j{{"schema_version", kSchemaVersion},
           {"all_pass", rep.all_pass},
           {"cases", cases}};
    emit(j, out_path);
    return rep.all_pass ? kOk : kInconclusive;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kato-class analysis for one-dimensional Levy processes"};
    app.require_subcommand(1);

    std::string spec_path, q_path, out_path, conditions = "time,space,closed";
    double lambda = 1.0, t = std::numeric_limits<double>::infinity();
    double x = 0.0, xmax = 8.0;
    int n = 801;
    std::size_t paths = 100000;
    std::uint64_t seed = 42;
    bool battery_flag = false;

    auto* classify_cmd = app.add_subcommand("classify", "label a process spec");
    classify_cmd->add_option("--spec", spec_path, "process spec JSON")
        ->required();
    classify_cmd->add_option("--lambda", lambda, "resolvent parameter");
    classify_cmd->add_option("--out", out_path, "output JSON path");

    auto* kernel_cmd =
        app.add_subcommand("kernel", "potential / truncated kernel as CSV");
    kernel_cmd->add_option("--spec", spec_path)->required();
    kernel_cmd->add_option("--lambda", lambda);
    kernel_cmd->add_option("--t", t, "truncation time (omit for G^lambda)");
    kernel_cmd->add_option("--xmax", xmax);
    kernel_cmd->add_option("--n", n);
    kernel_cmd->add_option("--out", out_path, "output CSV path");

    auto* kato_cmd =
        app.add_subcommand("kato-check", "full membership verdict");
    kato_cmd->add_option("--spec", spec_path);
    kato_cmd->add_option("--q", q_path, "potential JSON");
    kato_cmd->add_option("--conditions", conditions,
                         "comma list: time,space,timespace,closed");
    kato_cmd->add_option("--lambda", lambda);
    kato_cmd->add_option("--out", out_path);
    kato_cmd->add_flag("--battery", battery_flag,
                       "run the built-in ground-truth suite instead");

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo oracle");
    sim_cmd->add_option("--spec", spec_path)->required();
    sim_cmd->add_option("--q", q_path)->required();
    sim_cmd->add_option("--x", x, "start point");
    sim_cmd->add_option("--t", t, "time horizon")->required();
    sim_cmd->add_option("--paths", paths);
    sim_cmd->add_option("--seed", seed);
    sim_cmd->add_option("--out", out_path);

    auto* battery_cmd =
        app.add_subcommand("battery", "ground-truth suite, nonzero on failure");
    battery_cmd->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (classify_cmd->parsed())
            return cmd_classify(spec_path, lambda, out_path);
        if (kernel_cmd->parsed())
            return cmd_kernel(spec_path, lambda, t, xmax, n, out_path);
        if (kato_cmd->parsed()) {
            if (battery_flag) return cmd_battery(out_path);
            if (spec_path.empty() || q_path.empty()) {
                std::cerr << "kato-check needs --spec and --q\n";
                return kInputError;
            }
            return cmd_kato_check(spec_path, q_path, conditions, lambda,
                                  out_path);
        }
        if (sim_cmd->parsed())
            return cmd_simulate(spec_path, q_path, x, t, paths, seed,
                                out_path);
        if (battery_cmd->parsed()) return cmd_battery(out_path);
    } catch (const InvalidSpec& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const InconclusiveIntegral& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return kInconclusive;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
