#include "switchbound/symbolic.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "switchbound/error.hpp"
#include "switchbound/integrate.hpp"
#include "switchbound/parallel.hpp"

namespace switchbound {

std::vector<std::size_t> grid_counts(const Box& box, double eta) {
    if (!(eta > 0) || !std::isfinite(eta)) throw ValidationError("grid spacing must be positive and finite");
    std::vector<std::size_t> counts(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        const double cells = std::floor((box.upper()[i] - box.lower()[i]) / eta + 1e-9);
        if (cells > 1e12) throw OutOfRangeError("grid spacing too small for axis " + std::to_string(i + 1));
        counts[i] = static_cast<std::size_t>(cells) + 1;
    }
    return counts;
}

SymbolicModel::SymbolicModel(Box box, double eta, double tau, double epsilon2, std::vector<std::string> mode_names)
    : box_(std::move(box)), eta_(eta), tau_(tau), epsilon2_(epsilon2), mode_names_(std::move(mode_names)) {
    if (!(tau > 0)) throw ValidationError("period must be positive");
    if (mode_names_.empty()) throw ValidationError("symbolic model needs at least one mode");
    counts_ = grid_counts(box_, eta);
    double total = 1.0;
    for (auto c : counts_) total *= static_cast<double>(c);
    if (total * static_cast<double>(mode_names_.size()) >= 4.0e9)
        throw OutOfRangeError("grid too large for 32-bit state indices");
    states_ = static_cast<std::size_t>(total);
    trans_.assign(states_ * mode_names_.size(), sink());
}

std::vector<std::size_t> SymbolicModel::index_tuple(State q) const {
    if (q >= states_) throw OutOfRangeError("state index out of range");
    std::vector<std::size_t> tuple(counts_.size());
    std::size_t rest = q;
    for (std::size_t i = counts_.size(); i-- > 0;) {
        tuple[i] = rest % counts_[i];
        rest /= counts_[i];
    }
    return tuple;
}

SymbolicModel::State SymbolicModel::state_of(const std::vector<std::size_t>& tuple) const {
    if (tuple.size() != counts_.size()) throw ValidationError("index tuple has wrong length");
    std::size_t q = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (tuple[i] >= counts_[i]) throw OutOfRangeError("grid index out of range on axis " + std::to_string(i + 1));
        q = q * counts_[i] + tuple[i];
    }
    return static_cast<State>(q);
}

Vec SymbolicModel::point(State q) const {
    const auto tuple = index_tuple(q);
    Vec x(static_cast<Eigen::Index>(tuple.size()));
    for (std::size_t i = 0; i < tuple.size(); ++i)
        x[static_cast<Eigen::Index>(i)] = box_.lower()[static_cast<Eigen::Index>(i)] + static_cast<double>(tuple[i]) * eta_;
    return x;
}

SymbolicModel::State SymbolicModel::nearest(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != counts_.size()) throw ValidationError("state has wrong dimension");
    if (!box_.contains(x)) return sink();
    std::size_t q = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        const auto ei = static_cast<Eigen::Index>(i);
        const double f = (x[ei] - box_.lower()[ei]) / eta_;
        double k = std::ceil(f - 0.5);
        k = std::clamp(k, 0.0, static_cast<double>(counts_[i] - 1));
        q = q * counts_[i] + static_cast<std::size_t>(k);
    }
    return static_cast<State>(q);
}

SymbolicModel::State SymbolicModel::successor(State q, Mode p) const {
    if (q == sink()) return sink();
    if (q > sink() || p >= mode_names_.size()) throw OutOfRangeError("state or mode out of range");
    return trans_[static_cast<std::size_t>(q) * mode_names_.size() + p];
}

void SymbolicModel::set_successor(State q, Mode p, State target) {
    if (q >= sink() || p >= mode_names_.size() || target > sink())
        throw OutOfRangeError("state or mode out of range");
    trans_[static_cast<std::size_t>(q) * mode_names_.size() + p] = target;
}

double max_eta(const LyapunovCertificate& cert, double tau, double epsilon2) {
    if (!(epsilon2 > 0)) throw ValidationError("precision epsilon2 must be positive");
    if (!(tau > 0)) throw ValidationError("period must be positive");
    return cert.gamma.inverse(-std::expm1(-cert.kappa * tau) * cert.alpha_lo(epsilon2));
}

AffineStep affine_period_map(const AffineField& f, double tau) {
    const auto n = f.A.rows();
    Mat aug = Mat::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = f.A * tau;
    aug.topRightCorner(n, 1) = f.b * tau;
    const Mat expm = aug.exp();
    return {expm.topLeftCorner(n, n), expm.topRightCorner(n, 1)};
}

SymbolicModel build_symbolic(const SwitchedSystem& sys, const Box& box, double eta, double tau,
                             const SymbolicOptions& options) {
    if (box.dim() != sys.dim()) throw ValidationError("box dimension does not match the system");
    const auto counts = grid_counts(box, eta);
    double total = 1.0;
    for (auto c : counts) total *= static_cast<double>(c);
    if (total > static_cast<double>(options.max_states))
        throw OutOfRangeError("grid of " + std::to_string(static_cast<long long>(total)) + " states exceeds the cap of " +
                              std::to_string(options.max_states) + "; use a larger epsilon2");
    const bool fast = options.affine_fast_path && sys.all_affine();
    if (!fast && !(options.dt > 0)) throw ValidationError("integration step must be positive");

    SymbolicModel model(box, eta, tau, options.epsilon2, sys.modes());
    if (options.eta_limit && eta > *options.eta_limit)
        model.warnings.push_back("grid spacing " + std::to_string(eta) + " exceeds the feasibility limit " +
                                 std::to_string(*options.eta_limit));

    std::vector<AffineStep> maps;
    if (fast)
        for (Mode p = 0; p < sys.mode_count(); ++p) maps.push_back(affine_period_map(*sys.field(p).affine(), tau));

    const std::size_t n = model.state_count();
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t q = begin; q < end; ++q) {
            const auto s = static_cast<SymbolicModel::State>(q);
            const Vec x = model.point(s);
            for (Mode p = 0; p < sys.mode_count(); ++p) {
                SymbolicModel::State target = model.sink();
                try {
                    const Vec y = fast ? maps[p](x) : flow_constant(sys, x, p, tau, options.dt);
                    target = model.nearest(y);
                } catch (const IntegrationError&) {
                }
                model.set_successor(s, p, target);
            }
        }
    });
    return model;
}

void save_symbolic(std::ostream& os, const SymbolicModel& model) {
    nlohmann::json j;
    j["box"] = {{"lower", std::vector<double>(model.box().lower().begin(), model.box().lower().end())},
                {"upper", std::vector<double>(model.box().upper().begin(), model.box().upper().end())}};
    j["eta"] = model.eta();
    j["tau"] = model.tau();
    j["epsilon2"] = model.epsilon2();
    j["counts"] = model.counts();
    j["modes"] = model.mode_names();
    j["sink"] = model.sink();
    j["transitions"] = model.transitions();
    os << j.dump() << '\n';
}

SymbolicModel load_symbolic(std::istream& is) {
    nlohmann::json j;
    try {
        is >> j;
        const auto lower = j.at("box").at("lower").get<std::vector<double>>();
        const auto upper = j.at("box").at("upper").get<std::vector<double>>();
        Box box(Eigen::Map<const Vec>(lower.data(), static_cast<Eigen::Index>(lower.size())),
                Eigen::Map<const Vec>(upper.data(), static_cast<Eigen::Index>(upper.size())));
        SymbolicModel model(box, j.at("eta").get<double>(), j.at("tau").get<double>(),
                            j.at("epsilon2").get<double>(), j.at("modes").get<std::vector<std::string>>());
        if (j.at("counts").get<std::vector<std::size_t>>() != model.counts())
            throw ValidationError("symbolic model counts do not match box and eta");
        const auto trans = j.at("transitions").get<std::vector<SymbolicModel::State>>();
        if (trans.size() != model.state_count() * model.mode_count())
            throw ValidationError("symbolic model transition table has the wrong size");
        for (std::size_t q = 0; q < model.state_count(); ++q)
            for (Mode p = 0; p < model.mode_count(); ++p)
                model.set_successor(static_cast<SymbolicModel::State>(q), p, trans[q * model.mode_count() + p]);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("symbolic model: ") + e.what());
    }
}

}  // namespace switchbound
