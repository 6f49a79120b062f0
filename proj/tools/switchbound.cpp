// switchbound command-line interface.
//
// Exit status: 0 success, 1 validation error, 2 verification findings, 64 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "switchbound/certificate.hpp"
#include "switchbound/config.hpp"
#include "switchbound/demos.hpp"
#include "switchbound/error.hpp"
#include "switchbound/integrate.hpp"
#include "switchbound/safety.hpp"
#include "switchbound/symbolic.hpp"
#include "switchbound/verify.hpp"

using namespace switchbound;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitFindings = 2;
constexpr int kExitUsage = 64;

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool json = false;
    bool strict = false;
};

std::string fmt(double v, int digits = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string box_text(const Box& b) {
    std::string s;
    for (std::size_t i = 0; i < b.dim(); ++i) {
        if (i) s += " x ";
        s += "[" + fmt(b.lower()[static_cast<Eigen::Index>(i)]) + ", " + fmt(b.upper()[static_cast<Eigen::Index>(i)]) + "]";
    }
    return s;
}

void emit(const Common& c, const json& j) {
    if (c.out.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw ValidationError("cannot write " + c.out);
    f << j.dump(2) << '\n';
}

SystemConfig load(const Common& c) {
    if (c.config.empty()) throw ValidationError("--config is required");
    SystemConfig cfg = load_config(c.config);
    if (c.seed) cfg.workflow.seed = *c.seed;
    return cfg;
}

/// Runs the sampled certificate checks; failures are warnings unless --strict.
json certificate_checks(const SystemConfig& cfg, const Common& c, std::ostream& log) {
    const auto report = check_certificate(cfg.system, cfg.certificate, cfg.safe, cfg.workflow.check_grid);
    json j = json::object();
    for (const auto& r : report.checks) {
        j[r.name] = {{"passed", r.passed}, {"worst_excess", r.worst_excess}, {"samples", r.samples}};
        if (!r.passed)
            log << "warning: certificate check " << r.name << " failed (worst excess " << fmt(r.worst_excess, 4)
                << " at " << r.worst_sample << ")\n";
    }
    if (c.strict && !report.passed()) throw ValidationError("certificate checks failed (--strict)");
    return j;
}

double epsilon2_of(const SystemConfig& cfg, std::optional<double> override_eps2) {
    return override_eps2 ? *override_eps2 : cfg.workflow.epsilon2;
}

SymbolicModel abstraction(const SystemConfig& cfg, double eps2) {
    SymbolicOptions opt;
    opt.dt = cfg.step();
    opt.max_states = cfg.workflow.grid_cap;
    opt.epsilon2 = eps2;
    const double eta = max_eta(cfg.certificate, cfg.tau, eps2);
    opt.eta_limit = eta;
    return build_symbolic(cfg.system, cfg.safe, eta, cfg.tau, opt);
}

SymbolicModel read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model " + path);
    return load_symbolic(in);
}

int cmd_bound(const Common& c, std::optional<double> nu_override, std::size_t per_switch) {
    SystemConfig cfg = load(c);
    certificate_checks(cfg, c, std::cerr);
    double nu = 0.0;
    if (nu_override) {
        nu = *nu_override;
    } else if (cfg.certificate.nu) {
        nu = *cfg.certificate.nu;
    } else {
        const auto est = estimate_nu(cfg.system, cfg.certificate, cfg.safe, cfg.workflow.check_grid);
        nu = est.value;
        std::cerr << "note: nu estimated on the safe box as " << fmt(nu) << "\n";
    }
    const auto b = compute_bound(cfg.certificate, nu, cfg.tau, cfg.delta0, per_switch);
    if (c.json) {
        emit(c, bound_to_json(b));
        return kExitOk;
    }
    std::cout << "kind " << (b.params.kind == CertificateKind::Common ? "common" : "multiple") << "\n"
              << "epsilon " << fmt(b.epsilon) << "\n"
              << "dwell_time_ok " << (b.dwell_time_ok ? "true" : "false") << "\n"
              << "per_switch";
    for (std::size_t k = 0; k < std::min<std::size_t>(b.per_switch.size(), 8); ++k) std::cout << ' ' << fmt(b.per_switch[k], 6);
    std::cout << (b.per_switch.size() > 8 ? " ...\n" : "\n");
    if (!c.out.empty()) emit(c, bound_to_json(b));
    return kExitOk;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("invalid number '" + item + "'");
        }
    }
    return v;
}

int cmd_simulate(const Common& c, const std::string& x0_text, const std::string& modes_text, std::size_t periods,
                 bool delayed) {
    SystemConfig cfg = load(c);
    const auto x0v = parse_list(x0_text);
    if (x0v.size() != cfg.system.dim()) throw ValidationError("--x0 needs " + std::to_string(cfg.system.dim()) + " values");
    const Vec x0 = Eigen::Map<const Vec>(x0v.data(), static_cast<Eigen::Index>(x0v.size()));
    std::vector<Mode> modes;
    if (!modes_text.empty()) {
        std::stringstream ss(modes_text);
        std::string name;
        std::vector<Mode> cycle;
        while (std::getline(ss, name, ',')) cycle.push_back(cfg.system.mode_index(name));
        for (std::size_t k = 0; k < periods; ++k) modes.push_back(cycle[k % cycle.size()]);
    } else if (cfg.controller) {
        Vec x = x0;
        for (std::size_t k = 0; k < periods; ++k) {
            modes.push_back((*cfg.controller)(x));
            x = flow_constant(cfg.system, x, modes.back(), cfg.tau, cfg.step());
        }
    } else {
        throw ValidationError("--modes is required when the configuration has no controller");
    }
    const double horizon = static_cast<double>(periods) * cfg.tau;
    SwitchingSignal sig = make_periodic_signal(cfg.tau, modes, horizon);
    if (delayed) {
        const auto d = trial_delays(2, modes.size() - 1, cfg.delta0, cfg.workflow.seed);
        sig = make_delayed_signal(sig, cfg.delta0, d);
    }
    const auto traj = simulate(cfg.system, sig, x0, horizon, cfg.step());
    if (c.out.empty()) {
        write_trajectory_csv(std::cout, traj, cfg.system);
    } else {
        std::ofstream f(c.out);
        if (!f) throw ValidationError("cannot write " + c.out);
        write_trajectory_csv(f, traj, cfg.system);
    }
    return kExitOk;
}

int cmd_abstract(const Common& c, std::optional<double> eps2_override) {
    SystemConfig cfg = load(c);
    certificate_checks(cfg, c, std::cerr);
    const double eps2 = epsilon2_of(cfg, eps2_override);
    const auto model = abstraction(cfg, eps2);
    for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
    if (!c.out.empty()) {
        std::ofstream f(c.out);
        if (!f) throw ValidationError("cannot write " + c.out);
        save_symbolic(f, model);
    }
    json summary{{"epsilon2", eps2}, {"eta", model.eta()}, {"counts", model.counts()}, {"states", model.state_count()}};
    if (c.json) std::cout << summary.dump(2) << '\n';
    else std::cout << "epsilon2 " << fmt(eps2) << "\neta " << fmt(model.eta()) << "\nstates " << model.state_count() << "\n";
    return kExitOk;
}

int cmd_synthesize(const Common& c, const std::string& model_path, std::optional<double> eps2_override) {
    SystemConfig cfg = load(c);
    certificate_checks(cfg, c, std::cerr);
    const auto bound = config_bound(cfg);
    const SymbolicModel model = model_path.empty() ? abstraction(cfg, epsilon2_of(cfg, eps2_override)) : read_model(model_path);
    const Box target = shrink_box(model.box(), bound.epsilon + model.epsilon2());
    const auto ctrl = synthesize_safety(model, target);
    if (!c.out.empty()) {
        std::ofstream f(c.out);
        if (!f) throw ValidationError("cannot write " + c.out);
        save_controller(f, ctrl, model);
    }
    json summary{{"epsilon1", bound.epsilon}, {"epsilon2", model.epsilon2()}, {"safe_states", ctrl.safe_count()},
                 {"states", model.state_count()}, {"empty", ctrl.empty()}};
    if (c.json) std::cout << summary.dump(2) << '\n';
    else std::cout << "target " << box_text(target) << "\nsafe_states " << ctrl.safe_count() << " of "
                   << model.state_count() << (ctrl.empty() ? " (empty)" : "") << "\n";
    return kExitOk;
}

ClosedLoopReport run_verification(const SystemConfig& cfg, const BoundResult& bound, const SymbolicModel* model,
                                  const SafetyController* ctrl, std::ostream& log) {
    ClosedLoopOptions opt;
    opt.trials = cfg.workflow.trials;
    opt.seed = cfg.workflow.seed;
    opt.dt = cfg.step();
    if (ctrl) {
        if (ctrl->empty()) throw ValidationError("controller has an empty safe set; nothing to verify");
        return verify_closed_loop(cfg.system, *ctrl, *model, bound, cfg.delta0, cfg.workflow.horizon, opt);
    }
    if (!cfg.controller) throw ValidationError("no controller: pass --model and --controller or configure one");
    const Box start = shrink_box(cfg.safe, bound.epsilon);
    log << "threshold controller, initial states in " << box_text(start) << "\n";
    const auto plans = feedback_plan(cfg.system, start, *cfg.controller, cfg.tau, cfg.step(), cfg.workflow.horizon);
    return verify_closed_loop(cfg.system, cfg.safe, bound.epsilon, cfg.tau, cfg.delta0, plans, opt);
}

void print_report(const ClosedLoopReport& r, std::ostream& os) {
    os << "trials " << r.trials.size() << "\n"
       << "violations " << r.violations << "\n"
       << "worst_nominal_margin " << fmt(r.worst_nominal_margin, 6) << "\n"
       << "worst_delayed_margin " << fmt(r.worst_delayed_margin, 6) << "\n"
       << "worst_gap " << fmt(r.worst_gap, 6) << " (epsilon " << fmt(r.epsilon1) << ")\n"
       << "containment " << (r.passed() ? "PASS" : "FAIL") << "\n";
}

int cmd_verify(const Common& c, const std::string& model_path, const std::string& ctrl_path) {
    SystemConfig cfg = load(c);
    certificate_checks(cfg, c, std::cerr);
    const auto bound = config_bound(cfg);
    ClosedLoopReport report;
    if (!ctrl_path.empty()) {
        if (model_path.empty()) throw ValidationError("--controller needs --model");
        const auto model = read_model(model_path);
        std::ifstream in(ctrl_path);
        if (!in) throw ValidationError("cannot open controller " + ctrl_path);
        const auto ctrl = load_controller(in, model);
        report = run_verification(cfg, bound, &model, &ctrl, std::cerr);
    } else {
        report = run_verification(cfg, bound, nullptr, nullptr, std::cerr);
    }
    if (!c.out.empty()) {
        std::ofstream f(c.out);
        if (!f) throw ValidationError("cannot write " + c.out);
        write_report_json(f, report);
    }
    if (c.json) write_report_json(std::cout, report);
    else print_report(report, std::cout);
    return report.passed() ? kExitOk : kExitFindings;
}

int cmd_demo(const Common& c, const std::string& name, const std::string& emit_path, std::optional<double> eps2_override) {
    if (!emit_path.empty()) {
        std::ofstream f(emit_path);
        if (!f) throw ValidationError("cannot write " + emit_path);
        f << demo_config_text(name) << '\n';
        std::cout << "wrote " << emit_path << "\n";
        return kExitOk;
    }
    SystemConfig cfg = demo_config(name);
    if (c.seed) cfg.workflow.seed = *c.seed;
    std::ostringstream text;
    json out;
    out["demo"] = name;

    text << "demo " << name << "\n";
    out["certificate_checks"] = certificate_checks(cfg, c, text);
    const auto nu = estimate_nu(cfg.system, cfg.certificate, cfg.safe, cfg.workflow.check_grid, 1.0);
    const bool nu_ok = nu.raw_max <= cfg.pinned_nu();
    text << "nu sampled max " << fmt(nu.raw_max, 6) << " vs pinned " << fmt(cfg.pinned_nu()) << (nu_ok ? " OK" : " EXCEEDED") << "\n";
    out["nu"] = {{"sampled_max", nu.raw_max}, {"pinned", cfg.pinned_nu()}, {"ok", nu_ok}};

    const auto bound = config_bound(cfg);
    text << "epsilon " << fmt(bound.epsilon) << "\n"
         << "dwell_time_ok " << (bound.dwell_time_ok ? "true" : "false") << "\n";
    out["bound"] = bound_to_json(bound);

    bool passed = true;
    std::optional<ClosedLoopReport> report;
    if (cfg.controller) {
        report = run_verification(cfg, bound, nullptr, nullptr, text);
    } else {
        const double eps2 = epsilon2_of(cfg, eps2_override);
        const auto model = abstraction(cfg, eps2);
        text << "epsilon2 " << fmt(eps2) << "\neta " << fmt(model.eta()) << "\ngrid";
        for (auto n : model.counts()) text << ' ' << n;
        text << " (" << model.state_count() << " states)\n";
        out["abstraction"] = {{"epsilon2", eps2}, {"eta", model.eta()}, {"counts", model.counts()}};
        const Box target = shrink_box(model.box(), bound.epsilon + eps2);
        const auto ctrl = synthesize_safety(model, target);
        text << "target " << box_text(target) << "\n"
             << "safe_states " << ctrl.safe_count() << (ctrl.empty() ? " (empty controller)" : "") << "\n";
        out["controller"] = {{"safe_states", ctrl.safe_count()}, {"target", {{"lower", std::vector<double>(target.lower().begin(), target.lower().end())},
                                                                           {"upper", std::vector<double>(target.upper().begin(), target.upper().end())}}}};
        if (ctrl.empty()) passed = false;
        else report = run_verification(cfg, bound, &model, &ctrl, text);
    }
    if (report) {
        print_report(*report, text);
        passed = passed && report->passed();
        out["verification"] = {{"violations", report->violations},
                               {"worst_nominal_margin", report->worst_nominal_margin},
                               {"worst_delayed_margin", report->worst_delayed_margin},
                               {"worst_gap", report->worst_gap},
                               {"passed", report->passed()}};
    }
    text << "result " << (passed ? "PASS" : "FAIL") << "\n";
    out["passed"] = passed;
    if (c.json) std::cout << out.dump(2) << '\n';
    else std::cout << text.str();
    if (!c.out.empty()) emit(c, out);
    return passed ? kExitOk : kExitFindings;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-error bounds and safety workflow for periodically switched systems", "switchbound"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config) sub->add_option("--config", common.config, "System configuration (JSON)")->required();
        sub->add_option("--out", common.out, "Output file");
        sub->add_option("--seed", common.seed, "Random seed");
        sub->add_flag("--json", common.json, "Machine-readable output");
        sub->add_flag("--strict", common.strict, "Abort when the sampled certificate checks fail");
    };

    auto* bound = app.add_subcommand("bound", "Delay-induced error bound");
    add_common(bound, true);
    std::optional<double> nu;
    std::size_t per_switch = kDefaultPerSwitchLength;
    bound->add_option("--nu", nu, "Override the intermode derivative bound");
    bound->add_option("--per-switch", per_switch, "Length of the per-switch sequence");

    auto* sim = app.add_subcommand("simulate", "Simulate one trajectory to CSV");
    add_common(sim, true);
    std::string x0, modes;
    std::size_t periods = 10;
    bool delayed = false;
    sim->add_option("--x0", x0, "Initial state, comma separated")->required();
    sim->add_option("--modes", modes, "Mode names per period, comma separated (repeated cyclically)");
    sim->add_option("--periods", periods, "Number of periods");
    sim->add_flag("--delayed", delayed, "Apply random switching delays up to delta0");

    std::optional<double> eps2;
    auto* abs = app.add_subcommand("abstract", "Build the grid abstraction of the delay-free system");
    add_common(abs, true);
    abs->add_option("--epsilon2", eps2, "Abstraction precision");

    std::string model_path, ctrl_path;
    auto* syn = app.add_subcommand("synthesize", "Safety controller on the shrunk safe box");
    add_common(syn, true);
    syn->add_option("--model", model_path, "Symbolic model written by 'abstract'");
    syn->add_option("--epsilon2", eps2, "Abstraction precision");

    auto* ver = app.add_subcommand("verify", "Closed-loop check under random delays");
    add_common(ver, true);
    ver->add_option("--model", model_path, "Symbolic model written by 'abstract'");
    ver->add_option("--controller", ctrl_path, "Controller written by 'synthesize'");

    auto* demo = app.add_subcommand("demo", "End-to-end run of a built-in system");
    add_common(demo, false);
    std::string demo_name, emit_path;
    demo->add_option("name", demo_name, "dcdc or watertank")->required()->check(CLI::IsMember({"dcdc", "watertank"}));
    demo->add_option("--emit-config", emit_path, "Write the embedded configuration to this file");
    demo->add_option("--epsilon2", eps2, "Abstraction precision (dcdc)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*bound) return cmd_bound(common, nu, per_switch);
        if (*sim) return cmd_simulate(common, x0, modes, periods, delayed);
        if (*abs) return cmd_abstract(common, eps2);
        if (*syn) return cmd_synthesize(common, model_path, eps2);
        if (*ver) return cmd_verify(common, model_path, ctrl_path);
        if (*demo) return cmd_demo(common, demo_name, emit_path, eps2);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
