#include "switchbound/safety.hpp"

#include <bit>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "switchbound/error.hpp"

namespace switchbound {

Box shrink_box(const Box& box, double margin) {
    if (!(margin >= 0) || !std::isfinite(margin)) throw ValidationError("shrink margin must be nonnegative and finite");
    Vec lo = box.lower().array() + margin;
    Vec hi = box.upper().array() - margin;
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (margin > 0 && !(lo[i] < hi[i])) {
            std::ostringstream msg;
            msg << "shrunk box is empty on axis " << i + 1 << " (width " << box.upper()[i] - box.lower()[i]
                << " < 2*" << margin << ", deficit " << lo[i] - hi[i] << ")";
            throw ValidationError(msg.str());
        }
    }
    return margin == 0 ? box : Box(lo, hi);
}

SafetyController::SafetyController(Box target, std::vector<std::uint64_t> allowed)
    : target_(std::move(target)), allowed_(std::move(allowed)) {
    for (auto m : allowed_)
        if (m != 0) ++safe_count_;
}

std::vector<Mode> SafetyController::allowed_modes(State q) const {
    std::vector<Mode> out;
    for (std::uint64_t m = allowed_mask(q); m != 0; m &= m - 1) out.push_back(static_cast<Mode>(std::countr_zero(m)));
    return out;
}

std::vector<SafetyController::State> SafetyController::safe_states() const {
    std::vector<State> out;
    out.reserve(safe_count_);
    for (std::size_t q = 0; q < allowed_.size(); ++q)
        if (allowed_[q] != 0) out.push_back(static_cast<State>(q));
    return out;
}

namespace {

class Bitset {
public:
    explicit Bitset(std::size_t n) : words_((n + 63) / 64, 0) {}
    [[nodiscard]] bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

private:
    std::vector<std::uint64_t> words_;
};

}  // namespace

SafetyController synthesize_safety(const SymbolicModel& model, const std::vector<bool>& initial, const Box& target) {
    const std::size_t n = model.state_count();
    const std::size_t m = model.mode_count();
    if (initial.size() != n) throw ValidationError("initial set size does not match the model");
    if (m > 64) throw ValidationError("safety synthesis supports at most 64 modes");

    // Sink is index n and never enters the set.
    Bitset in(n + 1);
    for (std::size_t q = 0; q < n; ++q)
        if (initial[q]) in.set(q);

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t q = 0; q < n; ++q) {
            if (!in.test(q)) continue;
            bool keep = false;
            for (Mode p = 0; p < m && !keep; ++p) keep = in.test(model.successor(static_cast<SymbolicModel::State>(q), p));
            if (!keep) {
                in.reset(q);
                changed = true;
            }
        }
    }

    std::vector<std::uint64_t> allowed(n, 0);
    for (std::size_t q = 0; q < n; ++q) {
        if (!in.test(q)) continue;
        for (Mode p = 0; p < m; ++p)
            if (in.test(model.successor(static_cast<SymbolicModel::State>(q), p))) allowed[q] |= std::uint64_t{1} << p;
    }
    return SafetyController(target, std::move(allowed));
}

SafetyController synthesize_safety(const SymbolicModel& model, const Box& target) {
    const Box& grid = model.box();
    if (target.dim() != grid.dim()) throw ValidationError("target dimension does not match the model");
    for (Eigen::Index i = 0; i < target.lower().size(); ++i)
        if (target.lower()[i] < grid.lower()[i] || target.upper()[i] > grid.upper()[i])
            throw ValidationError("target box is not contained in the model box on axis " + std::to_string(i + 1));
    std::vector<bool> initial(model.state_count());
    for (std::size_t q = 0; q < initial.size(); ++q)
        initial[q] = target.contains(model.point(static_cast<SymbolicModel::State>(q)));
    return synthesize_safety(model, initial, target);
}

ExtractedSignal extract_signal(const SafetyController& ctrl, const SymbolicModel& model, SafetyController::State q0,
                               std::size_t horizon, SignalPolicy policy, std::uint64_t seed) {
    if (!ctrl.is_safe(q0)) throw ValidationError("initial symbolic state " + std::to_string(q0) + " is not in the safe set");
    if (horizon < 1) throw ValidationError("horizon must be at least one period");
    std::mt19937_64 rng(seed);
    std::vector<SafetyController::State> trace{q0};
    std::vector<Mode> modes;
    SafetyController::State q = q0;
    for (std::size_t k = 0; k < horizon; ++k) {
        const std::uint64_t mask = ctrl.allowed_mask(q);
        Mode p = 0;
        switch (policy) {
        case SignalPolicy::LeastMode:
            p = static_cast<Mode>(std::countr_zero(mask));
            break;
        case SignalPolicy::RoundRobin: {
            const Mode m = model.mode_count();
            const Mode start = modes.empty() ? 0 : (modes.back() + 1) % m;
            for (Mode i = 0; i < m; ++i) {
                const Mode c = (start + i) % m;
                if ((mask >> c) & 1U) {
                    p = c;
                    break;
                }
            }
            break;
        }
        case SignalPolicy::SeededRandom: {
            const auto choices = ctrl.allowed_modes(q);
            std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
            p = choices[pick(rng)];
            break;
        }
        }
        modes.push_back(p);
        q = model.successor(q, p);
        trace.push_back(q);
    }
    const double horizon_time = static_cast<double>(horizon) * model.tau();
    return {make_periodic_signal(model.tau(), modes, horizon_time), std::move(trace), std::move(modes)};
}

void save_controller(std::ostream& os, const SafetyController& ctrl, const SymbolicModel& model) {
    nlohmann::json j;
    j["target"] = {{"lower", std::vector<double>(ctrl.target().lower().begin(), ctrl.target().lower().end())},
                   {"upper", std::vector<double>(ctrl.target().upper().begin(), ctrl.target().upper().end())}};
    j["safe_count"] = ctrl.safe_count();
    j["state_count"] = model.state_count();
    nlohmann::json entries = nlohmann::json::array();
    for (auto q : ctrl.safe_states()) {
        std::vector<std::string> names;
        for (Mode p : ctrl.allowed_modes(q)) names.push_back(model.mode_names()[p]);
        std::sort(names.begin(), names.end());
        entries.push_back({{"index", model.index_tuple(q)}, {"modes", names}});
    }
    j["allowed"] = std::move(entries);
    os << j.dump() << '\n';
}

SafetyController load_controller(std::istream& is, const SymbolicModel& model) {
    try {
        nlohmann::json j;
        is >> j;
        const auto lower = j.at("target").at("lower").get<std::vector<double>>();
        const auto upper = j.at("target").at("upper").get<std::vector<double>>();
        Box target(Eigen::Map<const Vec>(lower.data(), static_cast<Eigen::Index>(lower.size())),
                   Eigen::Map<const Vec>(upper.data(), static_cast<Eigen::Index>(upper.size())));
        if (j.at("state_count").get<std::size_t>() != model.state_count())
            throw ValidationError("controller does not match the symbolic model");
        std::vector<std::uint64_t> allowed(model.state_count(), 0);
        for (const auto& e : j.at("allowed")) {
            const auto q = model.state_of(e.at("index").get<std::vector<std::size_t>>());
            for (const auto& name : e.at("modes")) {
                const auto& names = model.mode_names();
                const auto it = std::find(names.begin(), names.end(), name.get<std::string>());
                if (it == names.end()) throw ValidationError("unknown mode in controller: " + name.get<std::string>());
                allowed[q] |= std::uint64_t{1} << static_cast<std::size_t>(it - names.begin());
            }
        }
        return SafetyController(std::move(target), std::move(allowed));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("controller: ") + e.what());
    }
}

}  // namespace switchbound
