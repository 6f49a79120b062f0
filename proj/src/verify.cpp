#include "switchbound/verify.hpp"

#include <ostream>
#include <random>

#include <json.hpp>

#include "switchbound/bisim.hpp"
#include "switchbound/error.hpp"
#include "switchbound/integrate.hpp"
#include "switchbound/parallel.hpp"

namespace switchbound {

PlanSource symbolic_plan(const SafetyController& ctrl, const SymbolicModel& model, std::size_t horizon) {
    if (ctrl.empty()) throw ValidationError("controller has an empty safe set");
    auto safe = std::make_shared<const std::vector<SafetyController::State>>(ctrl.safe_states());
    return [&ctrl, &model, safe, horizon](std::size_t, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, safe->size() - 1);
        const auto q0 = (*safe)[pick(rng)];
        auto sig = extract_signal(ctrl, model, q0, horizon, SignalPolicy::SeededRandom, rng());
        return TrialPlan{model.point(q0), std::move(sig.modes)};
    };
}

PlanSource feedback_plan(const SwitchedSystem& sys, const Box& region, std::function<Mode(const Vec&)> policy,
                         double tau, double dt, std::size_t horizon) {
    return [&sys, region, policy = std::move(policy), tau, dt, horizon](std::size_t, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Vec x(static_cast<Eigen::Index>(region.dim()));
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x[i] = region.lower()[i] + u(rng) * (region.upper()[i] - region.lower()[i]);
        TrialPlan plan{x, {}};
        for (std::size_t k = 0; k < horizon; ++k) {
            const Mode p = policy(x);
            plan.modes.push_back(p);
            x = flow_constant(sys, x, p, tau, dt, static_cast<double>(k) * tau);
        }
        return plan;
    };
}

std::vector<double> trial_delays(std::size_t trial, std::size_t count, double delta0, std::uint64_t seed,
                                 DelayKind* kind) {
    const DelayKind k = trial == 0 ? DelayKind::Zero : trial == 1 ? DelayKind::Max : DelayKind::Uniform;
    if (kind) *kind = k;
    if (k == DelayKind::Zero) return std::vector<double>(count, 0.0);
    if (k == DelayKind::Max) return std::vector<double>(count, delta0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> d(count);
    for (auto& v : d) v = std::min(delta0, u(rng) * delta0);
    return d;
}

namespace {

double min_margin(const Trajectory& traj, const Box& box) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) m = std::min(m, box.margin(traj.state(i)));
    return m;
}

}  // namespace

ClosedLoopReport verify_closed_loop(const SwitchedSystem& sys, const Box& safe, double epsilon1, double tau,
                                    double delta0, const PlanSource& plans, const ClosedLoopOptions& options) {
    if (options.trials < 1) throw ValidationError("verification needs at least one trial");
    if (!(options.dt > 0)) throw ValidationError("integration step must be positive");
    if (!(delta0 >= 0 && delta0 < tau)) throw ValidationError("delay bound must be < period");
    const Box inner = shrink_box(safe, epsilon1);

    std::vector<TrialResult> results(options.trials);
    parallel_for(options.trials, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            TrialResult& r = results[t];
            r.trial = t;
            const TrialPlan plan = plans(t, derive_seed(options.seed, 2 * t));
            if (plan.modes.empty()) throw ValidationError("trial plan has no modes");
            const double horizon = static_cast<double>(plan.modes.size()) * tau;
            const auto nominal_sig = make_periodic_signal(tau, plan.modes, horizon);
            const auto delays =
                trial_delays(t, plan.modes.size() - 1, delta0, derive_seed(options.seed, 2 * t + 1), &r.delays);
            const auto delayed_sig = make_delayed_signal(nominal_sig, delta0, delays);
            const auto nominal = simulate(sys, nominal_sig, plan.x0, horizon, options.dt);
            const auto delayed = simulate(sys, delayed_sig, plan.x0, horizon, options.dt);
            r.nominal_margin = min_margin(nominal, inner);
            r.delayed_margin = min_margin(delayed, safe);
            const auto gap = compare_trajectories(delayed, nominal, tau);
            r.max_gap = gap.max;
            r.per_period_gap = gap.per_period;
            r.nominal_ok = r.nominal_margin >= -options.containment_tolerance;
            r.delayed_ok = r.delayed_margin >= -options.containment_tolerance;
            r.gap_ok = r.max_gap <= epsilon1 + options.gap_tolerance;
        }
    });

    ClosedLoopReport report;
    report.epsilon1 = epsilon1;
    for (const auto& r : results) {
        if (!r.passed()) ++report.violations;
        report.worst_nominal_margin = std::min(report.worst_nominal_margin, r.nominal_margin);
        report.worst_delayed_margin = std::min(report.worst_delayed_margin, r.delayed_margin);
        report.worst_gap = std::max(report.worst_gap, r.max_gap);
    }
    report.trials = std::move(results);
    return report;
}

ClosedLoopReport verify_closed_loop(const SwitchedSystem& sys, const SafetyController& ctrl,
                                    const SymbolicModel& model, const BoundResult& bound, double delta0,
                                    std::size_t horizon, const ClosedLoopOptions& options) {
    return verify_closed_loop(sys, model.box(), bound.epsilon, model.tau(), delta0,
                              symbolic_plan(ctrl, model, horizon), options);
}

void write_report_json(std::ostream& os, const ClosedLoopReport& report) {
    nlohmann::json j;
    j["passed"] = report.passed();
    j["violations"] = report.violations;
    j["epsilon1"] = report.epsilon1;
    j["worst_nominal_margin"] = report.worst_nominal_margin;
    j["worst_delayed_margin"] = report.worst_delayed_margin;
    j["worst_gap"] = report.worst_gap;
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& r : report.trials) {
        const char* kind = r.delays == DelayKind::Zero ? "zero" : r.delays == DelayKind::Max ? "max" : "uniform";
        trials.push_back({{"trial", r.trial},
                          {"delays", kind},
                          {"nominal_margin", r.nominal_margin},
                          {"delayed_margin", r.delayed_margin},
                          {"max_gap", r.max_gap},
                          {"passed", r.passed()}});
    }
    j["trials"] = std::move(trials);
    os << j.dump(2) << '\n';
}

}  // namespace switchbound
