#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "switchbound/bound.hpp"
#include "switchbound/certificate.hpp"
#include "switchbound/config.hpp"
#include "switchbound/demos.hpp"
#include "switchbound/error.hpp"
#include "switchbound/integrate.hpp"
#include "switchbound/safety.hpp"
#include "switchbound/signal.hpp"
#include "switchbound/symbolic.hpp"
#include "switchbound/verify.hpp"

namespace py = pybind11;
using namespace switchbound;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict bound_dict(const BoundResult& b) {
    py::dict d = to_python(bound_to_json(b));
    d["fixed_point"] = b.fixed_point;
    return d;
}

std::vector<Mode> mode_indices(const SwitchedSystem& sys, const std::vector<std::string>& names) {
    std::vector<Mode> out;
    for (const auto& n : names) out.push_back(sys.mode_index(n));
    return out;
}

py::tuple trajectory_arrays(const Trajectory& t) {
    Mat xs(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.dim()));
    std::vector<Mode> modes(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        xs.row(static_cast<Eigen::Index>(i)) = t.state(i).transpose();
        modes[i] = t.mode(i);
    }
    return py::make_tuple(t.times(), xs, modes);
}

BoundResult bound_for(const SystemConfig& c, std::optional<double> nu, std::size_t per_switch) {
    return nu ? compute_bound(c.certificate, *nu, c.tau, c.delta0, per_switch) : config_bound(c, per_switch);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Delay-robust bounds and safety synthesis for periodically switched systems";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<OutOfRangeError>(m, "OutOfRangeError", error.ptr());
    py::register_exception<IntegrationError>(m, "IntegrationError", error.ptr());

    py::class_<Box>(m, "Box")
        .def(py::init<Vec, Vec>(), py::arg("lower"), py::arg("upper"))
        .def_property_readonly("lower", &Box::lower)
        .def_property_readonly("upper", &Box::upper)
        .def("contains", &Box::contains, py::arg("x"), py::arg("tol") = 0.0)
        .def("shrink", &shrink_box, py::arg("margin"))
        .def("__repr__", [](const Box& b) {
            std::ostringstream os;
            os << "Box(" << b.lower().transpose() << " .. " << b.upper().transpose() << ")";
            return os.str();
        });

    py::class_<SystemConfig>(m, "Config")
        .def_readonly("name", &SystemConfig::name)
        .def_readonly("tau", &SystemConfig::tau)
        .def_readonly("delta0", &SystemConfig::delta0)
        .def_readonly("safe", &SystemConfig::safe)
        .def_property_readonly("modes", [](const SystemConfig& c) { return c.system.modes(); })
        .def_property_readonly("dimension", [](const SystemConfig& c) { return c.system.dim(); })
        .def_property_readonly("step", &SystemConfig::step)
        .def_property_readonly("nu", [](const SystemConfig& c) { return c.certificate.nu; })
        .def_property_readonly("kappa", [](const SystemConfig& c) { return c.certificate.kappa; })
        .def_property_readonly("mu", [](const SystemConfig& c) { return c.certificate.mu; })
        .def("to_dict", [](const SystemConfig& c) { return to_python(config_to_json(c)); })
        .def("save", [](const SystemConfig& c, const std::filesystem::path& p) { save_config(p, c); });

    m.def("demo_names", &demo_names);
    m.def("demo_config", [](const std::string& name) { return demo_config(name); }, py::arg("name"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def("parse_config", &parse_config, py::arg("text"), py::arg("base") = std::filesystem::path());

    m.def(
        "bound",
        [](const SystemConfig& c, std::optional<double> nu, std::size_t per_switch) {
            return bound_dict(bound_for(c, nu, per_switch));
        },
        py::arg("config"), py::arg("nu") = py::none(), py::arg("per_switch") = kDefaultPerSwitchLength,
        "Delay bound of a configuration; nu defaults to the pinned constant.");

    m.def(
        "delay_bound",
        [](double tau, double delta0, double kappa, double nu, double mu, double alpha, double exponent,
           std::size_t per_switch) {
            LyapunovCertificate cert;
            cert.kind = mu == 1.0 ? CertificateKind::Common : CertificateKind::Multiple;
            cert.alpha_lo = exponent == 1.0 ? ClassK::linear(alpha) : ClassK::power(alpha, exponent);
            cert.kappa = kappa;
            cert.mu = mu;
            return bound_dict(compute_bound(cert, nu, tau, delta0, per_switch));
        },
        py::arg("tau"), py::arg("delta0"), py::arg("kappa"), py::arg("nu"), py::arg("mu") = 1.0,
        py::arg("alpha") = 1.0, py::arg("exponent") = 1.0, py::arg("per_switch") = kDefaultPerSwitchLength,
        "Bound for a lower class-K function alpha * s^exponent.");

    m.def(
        "check_certificate",
        [](const SystemConfig& c, std::optional<std::size_t> grid) {
            const auto rep = check_certificate(c.system, c.certificate, c.safe, grid.value_or(c.workflow.check_grid));
            py::list out;
            for (const auto& chk : rep.checks) {
                py::dict d;
                d["name"] = chk.name;
                d["passed"] = chk.passed;
                d["worst_excess"] = chk.worst_excess;
                d["samples"] = chk.samples;
                d["worst_sample"] = chk.worst_sample;
                out.append(d);
            }
            return out;
        },
        py::arg("config"), py::arg("grid") = py::none());

    m.def(
        "estimate_nu",
        [](const SystemConfig& c, std::optional<std::size_t> grid, double factor) {
            const auto e = estimate_nu(c.system, c.certificate, c.safe, grid.value_or(c.workflow.check_grid), factor);
            py::dict d;
            d["raw_max"] = e.raw_max;
            d["value"] = e.value;
            d["safety_factor"] = e.safety_factor;
            d["samples"] = e.samples;
            return d;
        },
        py::arg("config"), py::arg("grid") = py::none(), py::arg("safety_factor") = kDefaultNuSafetyFactor);

    m.def(
        "simulate",
        [](const SystemConfig& c, const Vec& x0, const std::vector<std::string>& modes,
           std::optional<std::vector<double>> delays, std::optional<double> dt) {
            const auto idx = mode_indices(c.system, modes);
            const double horizon = c.tau * static_cast<double>(idx.size());
            auto sig = make_periodic_signal(c.tau, idx, horizon);
            if (delays) sig = make_delayed_signal(sig, c.delta0, *delays);
            return trajectory_arrays(simulate(c.system, sig, x0, horizon, dt.value_or(c.step())));
        },
        py::arg("config"), py::arg("x0"), py::arg("modes"), py::arg("delays") = py::none(), py::arg("dt") = py::none(),
        "Returns (times, states, mode indices); delays move the switches after time 0.");

    py::class_<SymbolicModel>(m, "SymbolicModel")
        .def_property_readonly("eta", &SymbolicModel::eta)
        .def_property_readonly("tau", &SymbolicModel::tau)
        .def_property_readonly("epsilon2", &SymbolicModel::epsilon2)
        .def_property_readonly("box", &SymbolicModel::box)
        .def_property_readonly("counts", &SymbolicModel::counts)
        .def_property_readonly("state_count", &SymbolicModel::state_count)
        .def_property_readonly("sink", &SymbolicModel::sink)
        .def_property_readonly("modes", &SymbolicModel::mode_names)
        .def_readonly("warnings", &SymbolicModel::warnings)
        .def("successor", &SymbolicModel::successor, py::arg("state"), py::arg("mode"))
        .def("point", &SymbolicModel::point, py::arg("state"))
        .def("nearest", &SymbolicModel::nearest, py::arg("x"))
        .def("save",
             [](const SymbolicModel& mdl) {
                 std::ostringstream os;
                 save_symbolic(os, mdl);
                 return os.str();
             })
        .def_static("load", [](const std::string& text) {
            std::istringstream is(text);
            return load_symbolic(is);
        });

    m.def("max_eta", [](const SystemConfig& c, double eps2) { return max_eta(c.certificate, c.tau, eps2); },
          py::arg("config"), py::arg("epsilon2"));

    m.def(
        "abstract",
        [](const SystemConfig& c, std::optional<double> eps2, std::optional<Box> box) {
            SymbolicOptions opt;
            opt.dt = c.step();
            opt.epsilon2 = eps2.value_or(c.workflow.epsilon2);
            opt.max_states = c.workflow.grid_cap;
            const double eta = max_eta(c.certificate, c.tau, opt.epsilon2);
            py::gil_scoped_release release;
            return build_symbolic(c.system, box.value_or(c.safe), eta, c.tau, opt);
        },
        py::arg("config"), py::arg("epsilon2") = py::none(), py::arg("box") = py::none());

    py::class_<SafetyController>(m, "Controller")
        .def_property_readonly("safe_count", &SafetyController::safe_count)
        .def_property_readonly("empty", &SafetyController::empty)
        .def_property_readonly("target", &SafetyController::target)
        .def("is_safe", &SafetyController::is_safe, py::arg("state"))
        .def("allowed_modes", &SafetyController::allowed_modes, py::arg("state"))
        .def("safe_states", &SafetyController::safe_states);

    m.def(
        "synthesize",
        [](const SymbolicModel& model, const Box& target) {
            py::gil_scoped_release release;
            return synthesize_safety(model, target);
        },
        py::arg("model"), py::arg("target"));

    m.def(
        "verify",
        [](const SystemConfig& c, const SafetyController& ctrl, const SymbolicModel& model, std::size_t trials,
           std::size_t horizon, std::uint64_t seed) {
            ClosedLoopOptions opt;
            opt.trials = trials;
            opt.dt = c.step();
            opt.seed = seed;
            const auto b = config_bound(c);
            std::ostringstream os;
            {
                py::gil_scoped_release release;
                write_report_json(os, verify_closed_loop(c.system, ctrl, model, b, c.delta0, horizon, opt));
            }
            return py::module_::import("json").attr("loads")(os.str());
        },
        py::arg("config"), py::arg("controller"), py::arg("model"), py::arg("trials") = 100,
        py::arg("horizon") = 100, py::arg("seed") = 1);

    m.def(
        "verify_threshold",
        [](const SystemConfig& c, std::size_t trials, std::size_t horizon, std::optional<Box> region,
           std::uint64_t seed) {
            if (!c.controller) throw ValidationError("configuration has no threshold controller");
            const auto b = config_bound(c);
            const Box start = region.value_or(shrink_box(c.safe, b.epsilon));
            ClosedLoopOptions opt;
            opt.trials = trials;
            opt.dt = c.step();
            opt.seed = seed;
            const auto plans = feedback_plan(c.system, start, *c.controller, c.tau, c.step(), horizon);
            std::ostringstream os;
            {
                py::gil_scoped_release release;
                write_report_json(os, verify_closed_loop(c.system, c.safe, b.epsilon, c.tau, c.delta0, plans, opt));
            }
            return py::module_::import("json").attr("loads")(os.str());
        },
        py::arg("config"), py::arg("trials") = 100, py::arg("horizon") = 100, py::arg("region") = py::none(),
        py::arg("seed") = 1);
}
