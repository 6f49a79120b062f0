#include "switchbound/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "switchbound/error.hpp"

namespace switchbound {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError((path.empty() ? std::string("/") : path) + ": " + what);
}

/// Read-only view of a JSON value that remembers its pointer path for error messages.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    [[nodiscard]] const json& raw() const { return j_; }
    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

    [[nodiscard]] Node at(const std::string& key) const {
        if (!j_.is_object()) fail(path_, "expected an object");
        if (!j_.contains(key)) fail(path_ + "/" + key, "missing field");
        return {j_.at(key), path_ + "/" + key};
    }
    [[nodiscard]] Node at(std::size_t i) const {
        if (!j_.is_array() || i >= j_.size()) fail(path_ + "/" + std::to_string(i), "missing element");
        return {j_.at(i), path_ + "/" + std::to_string(i)};
    }
    [[nodiscard]] std::size_t size() const {
        if (!j_.is_array()) fail(path_, "expected an array");
        return j_.size();
    }

    /// A number, or a string holding a constant expression such as "2*sqrt(6)/3".
    [[nodiscard]] double number() const {
        double v = 0.0;
        if (j_.is_number()) {
            v = j_.get<double>();
        } else if (j_.is_string()) {
            try {
                v = parse_expression(j_.get<std::string>(), {}).eval(std::span<const double>{});
            } catch (const Error& e) {
                fail(path_, e.what());
            }
        } else {
            fail(path_, "expected a number");
        }
        if (!std::isfinite(v)) fail(path_, "must be finite");
        return v;
    }
    [[nodiscard]] double positive() const {
        const double v = number();
        if (!(v > 0)) fail(path_, "must be positive");
        return v;
    }
    [[nodiscard]] std::size_t count() const {
        if (!j_.is_number_unsigned()) fail(path_, "expected a nonnegative integer");
        return j_.get<std::size_t>();
    }
    [[nodiscard]] std::string string() const {
        if (!j_.is_string()) fail(path_, "expected a string");
        return j_.get<std::string>();
    }
    [[nodiscard]] Vec vector(std::size_t n) const {
        if (size() != n) fail(path_, "expected " + std::to_string(n) + " entries");
        Vec v(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
        return v;
    }
    [[nodiscard]] Mat matrix(std::size_t n) const {
        if (size() != n) fail(path_, "expected " + std::to_string(n) + " rows");
        Mat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) m.row(static_cast<Eigen::Index>(i)) = at(i).vector(n).transpose();
        return m;
    }

private:
    const json& j_;
    std::string path_;
};

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError& e) {
        fail(path, e.what());
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        if (!what.empty() && what[0] == '/') throw;
        fail(path, what);
    }
}

json vec_json(const Vec& v) { return std::vector<double>(v.begin(), v.end()); }

json mat_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
    return rows;
}

Box box_from(const Node& n, std::size_t dim) {
    return wrap(n.path(), [&] { return Box(n.at("lower").vector(dim), n.at("upper").vector(dim)); });
}

json box_json(const Box& b) { return {{"lower", vec_json(b.lower())}, {"upper", vec_json(b.upper())}}; }

ClassK classk_from(const Node& n) {
    const json& j = n.raw();
    if (j.is_number() || j.is_string()) return wrap(n.path(), [&] { return ClassK::linear(n.positive()); });
    const double s_max = n.has("s_max") ? n.at("s_max").positive() : ClassK::kUnbounded;
    if (n.has("linear")) return wrap(n.path(), [&] { return ClassK::linear(n.at("linear").positive(), s_max); });
    if (n.has("power")) {
        const Node p = n.at("power");
        return wrap(n.path(), [&] { return ClassK::power(p.at("c").positive(), p.at("q").positive(), s_max); });
    }
    if (n.has("expr")) {
        if (!std::isfinite(s_max)) fail(n.path() + "/s_max", "required for expression class-K functions");
        return wrap(n.path(), [&] { return ClassK::expression(n.at("expr").string(), s_max); });
    }
    fail(n.path(), "expected a number, {\"linear\"}, {\"power\"} or {\"expr\"}");
}

PairFunction pair_from(const Node& n, std::size_t dim) {
    if (n.raw().is_string()) return wrap(n.path(), [&] { return PairFunction::expression(n.string(), dim); });
    if (n.has("M")) return wrap(n.path(), [&] { return PairFunction::quadratic(n.at("M").matrix(dim)); });
    fail(n.path(), "expected an expression string or {\"M\": matrix}");
}

json pair_json(const PairFunction& V) {
    if (const Mat* M = V.matrix()) return {{"M", mat_json(*M)}};
    return V.expr()->to_string();
}

LyapunovCertificate certificate_from(const Node& n, const SwitchedSystem& sys) {
    LyapunovCertificate c;
    const std::string kind = n.at("kind").string();
    if (kind == "common") c.kind = CertificateKind::Common;
    else if (kind == "multiple") c.kind = CertificateKind::Multiple;
    else fail(n.path() + "/kind", "expected \"common\" or \"multiple\"");

    const Node v = n.at("V");
    if (c.kind == CertificateKind::Common) {
        c.V.push_back(pair_from(v, sys.dim()));
    } else {
        if (!v.raw().is_object() || v.has("M")) fail(v.path(), "multiple certificates need one function per mode");
        for (const auto& name : sys.modes()) c.V.push_back(pair_from(v.at(name), sys.dim()));
        if (v.raw().size() != sys.mode_count()) fail(v.path(), "functions given for unknown modes");
    }
    c.alpha_lo = classk_from(n.at("alpha_lo"));
    c.alpha_hi = classk_from(n.at("alpha_hi"));
    c.kappa = n.at("kappa").positive();
    c.mu = n.has("mu") ? n.at("mu").number() : 1.0;
    if (c.mu < 1) fail(n.path() + "/mu", "must be >= 1");
    if (c.kind == CertificateKind::Common && c.mu != 1) fail(n.path() + "/mu", "must be 1 for a common certificate");
    if (n.has("gamma")) {
        c.gamma = classk_from(n.at("gamma"));
    } else if (auto L = c.V.front().lipschitz_bound(); L && c.kind == CertificateKind::Common) {
        c.gamma = ClassK::linear(*L);
    } else {
        c.gamma = c.alpha_hi;
    }
    if (n.has("nu")) c.nu = n.at("nu").positive();
    wrap(n.path(), [&] {
        c.validate(sys);
        return 0;
    });
    return c;
}

SwitchedSystem system_from(const Node& root) {
    const std::size_t dim = root.at("dimension").count();
    if (dim == 0) fail("/dimension", "must be positive");
    const Node modes = root.at("modes");
    if (modes.size() == 0) fail(modes.path(), "at least one mode is required");
    std::vector<std::string> names;
    std::vector<VectorField> fields;
    const auto vars = state_variable_names(dim);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Node m = modes.at(i);
        names.push_back(m.at("name").string());
        if (m.has("f")) {
            const Node f = m.at("f");
            if (f.size() != dim) fail(f.path(), "expected " + std::to_string(dim) + " components");
            ExprField ef;
            for (std::size_t k = 0; k < dim; ++k) {
                const Node c = f.at(k);
                ef.components.push_back(wrap(c.path(), [&] { return parse_expression(c.string(), vars); }));
            }
            fields.emplace_back(std::move(ef));
        } else {
            Vec b = m.has("b") ? m.at("b").vector(dim) : Vec::Zero(static_cast<Eigen::Index>(dim));
            fields.emplace_back(AffineField{m.at("A").matrix(dim), std::move(b)});
        }
    }
    return wrap("/modes", [&] { return SwitchedSystem(dim, std::move(names), std::move(fields)); });
}

json system_modes_json(const SwitchedSystem& sys) {
    json modes = json::array();
    for (Mode p = 0; p < sys.mode_count(); ++p) {
        json m{{"name", sys.mode_name(p)}};
        const VectorField& f = sys.field(p);
        if (const auto* a = f.affine()) {
            m["A"] = mat_json(a->A);
            m["b"] = vec_json(a->b);
        } else {
            json comps = json::array();
            for (const auto& e : f.expression()->components) comps.push_back(e.to_string());
            m["f"] = std::move(comps);
        }
        modes.push_back(std::move(m));
    }
    return modes;
}

}  // namespace

double SystemConfig::pinned_nu() const {
    if (!certificate.nu) throw ValidationError("/certificate/nu: no pinned intermode bound; estimate one first");
    return *certificate.nu;
}

ClassK classk_from_json(const json& j) { return classk_from(Node(j, "")); }

json classk_to_json(const ClassK& f) {
    json j;
    switch (f.form()) {
    case ClassK::Form::Linear:
        j["linear"] = f.coefficient();
        break;
    case ClassK::Form::Power:
        j["power"] = {{"c", f.coefficient()}, {"q", f.exponent()}};
        break;
    case ClassK::Form::Expression:
        j["expr"] = f.expr().to_string();
        break;
    }
    if (std::isfinite(f.s_max())) j["s_max"] = f.s_max();
    return j;
}

LyapunovCertificate certificate_from_json(const json& j, const SwitchedSystem& sys) {
    return certificate_from(Node(j, ""), sys);
}

json certificate_to_json(const LyapunovCertificate& cert, const SwitchedSystem& sys) {
    json j;
    j["kind"] = cert.kind == CertificateKind::Common ? "common" : "multiple";
    if (cert.kind == CertificateKind::Common) {
        j["V"] = pair_json(cert.V.at(0));
    } else {
        json v = json::object();
        for (Mode p = 0; p < sys.mode_count(); ++p) v[sys.mode_name(p)] = pair_json(cert.V.at(p));
        j["V"] = std::move(v);
    }
    j["alpha_lo"] = classk_to_json(cert.alpha_lo);
    j["alpha_hi"] = classk_to_json(cert.alpha_hi);
    j["gamma"] = classk_to_json(cert.gamma);
    j["kappa"] = cert.kappa;
    j["mu"] = cert.mu;
    if (cert.nu) j["nu"] = *cert.nu;
    return j;
}

SystemConfig config_from_json(const json& j, const std::filesystem::path& base) {
    const Node root(j, "");
    if (!j.is_object()) fail("", "configuration must be a JSON object");
    SwitchedSystem sys = system_from(root);
    const double tau = root.at("tau").positive();
    const double delta0 = root.at("delta0").number();
    if (delta0 < 0) fail("/delta0", "must be nonnegative");
    if (!(delta0 < tau)) fail("/delta0", "delay bound must be < period");
    Box safe = box_from(root.at("safe_box"), sys.dim());

    json cert_json;
    std::string cert_path = "/certificate";
    if (root.has("certificate")) {
        cert_json = j.at("certificate");
    } else if (root.has("certificate_file")) {
        const auto file = base / root.at("certificate_file").string();
        std::ifstream in(file);
        if (!in) fail("/certificate_file", "cannot open " + file.string());
        try {
            in >> cert_json;
        } catch (const json::parse_error& e) {
            throw ParseError(file.string() + ": " + e.what(), e.byte);
        }
        cert_path = "/certificate_file";
    } else {
        fail("/certificate", "missing field");
    }
    LyapunovCertificate cert = certificate_from(Node(cert_json, cert_path), sys);

    WorkflowParams wf;
    if (root.has("workflow")) {
        const Node w = root.at("workflow");
        if (w.has("epsilon2")) wf.epsilon2 = w.at("epsilon2").positive();
        if (w.has("grid_cap")) wf.grid_cap = w.at("grid_cap").count();
        if (w.has("dt")) wf.dt = w.at("dt").positive();
        if (w.has("seed")) wf.seed = w.at("seed").count();
        if (w.has("trials")) wf.trials = w.at("trials").count();
        if (w.has("horizon")) wf.horizon = w.at("horizon").count();
        if (w.has("check_grid")) wf.check_grid = w.at("check_grid").count();
        if (wf.trials == 0) fail("/workflow/trials", "must be positive");
        if (wf.horizon == 0) fail("/workflow/horizon", "must be positive");
        if (wf.check_grid < 2) fail("/workflow/check_grid", "must be at least 2");
    }

    std::optional<ThresholdPolicy> controller;
    if (root.has("controller")) {
        const Node c = root.at("controller");
        if (c.at("type").string() != "threshold") fail(c.path() + "/type", "only \"threshold\" is supported");
        ThresholdPolicy t;
        t.axis = c.at("axis").count();
        if (t.axis < 1 || t.axis > sys.dim()) fail(c.path() + "/axis", "must be between 1 and the dimension");
        t.axis -= 1;
        t.level = c.at("level").number();
        t.below = wrap(c.path() + "/below", [&] { return sys.mode_index(c.at("below").string()); });
        t.above = wrap(c.path() + "/above", [&] { return sys.mode_index(c.at("above").string()); });
        controller = t;
    }

    std::string name = root.has("name") ? root.at("name").string() : std::string();
    return SystemConfig{std::move(name), std::move(sys), tau, delta0, std::move(safe), std::move(cert), wf, controller};
}

SystemConfig parse_config(const std::string& text, const std::filesystem::path& base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
    }
    return config_from_json(j, base);
}

SystemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open configuration " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

json config_to_json(const SystemConfig& c) {
    json j;
    if (!c.name.empty()) j["name"] = c.name;
    j["dimension"] = c.system.dim();
    j["modes"] = system_modes_json(c.system);
    j["tau"] = c.tau;
    j["delta0"] = c.delta0;
    j["safe_box"] = box_json(c.safe);
    j["certificate"] = certificate_to_json(c.certificate, c.system);
    j["workflow"] = {{"epsilon2", c.workflow.epsilon2}, {"grid_cap", c.workflow.grid_cap},
                     {"seed", c.workflow.seed},         {"trials", c.workflow.trials},
                     {"horizon", c.workflow.horizon},   {"check_grid", c.workflow.check_grid}};
    if (c.workflow.dt > 0) j["workflow"]["dt"] = c.workflow.dt;
    if (c.controller) {
        j["controller"] = {{"type", "threshold"},
                           {"axis", c.controller->axis + 1},
                           {"level", c.controller->level},
                           {"below", c.system.mode_name(c.controller->below)},
                           {"above", c.system.mode_name(c.controller->above)}};
    }
    return j;
}

void save_config(const std::filesystem::path& path, const SystemConfig& config) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << config_to_json(config).dump(2) << '\n';
}

BoundResult config_bound(const SystemConfig& config, std::size_t per_switch_len) {
    return compute_bound(config.certificate, config.pinned_nu(), config.tau, config.delta0, per_switch_len);
}

json bound_to_json(const BoundResult& b) {
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json per = json::array();
    for (double v : b.per_switch) per.push_back(finite_or_null(v));
    return {{"epsilon", finite_or_null(b.epsilon)},
            {"per_switch", std::move(per)},
            {"dwell_time_ok", b.dwell_time_ok},
            {"params",
             {{"kind", b.params.kind == CertificateKind::Common ? "common" : "multiple"},
              {"tau", b.params.tau},
              {"delta0", b.params.delta0},
              {"kappa", b.params.kappa},
              {"nu", b.params.nu},
              {"mu", b.params.mu}}}};
}

}  // namespace switchbound
