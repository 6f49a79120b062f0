#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "switchbound/bound.hpp"
#include "switchbound/safety.hpp"

namespace switchbound {

/// Initial state and per-period modes of one closed-loop trial.
struct TrialPlan {
    Vec x0;
    std::vector<Mode> modes;
};

/// Produces the plan for trial `trial` from a trial-specific seed.
using PlanSource = std::function<TrialPlan(std::size_t trial, std::uint64_t seed)>;

/// Random safe symbolic state, seeded-random extracted signal, x0 at the grid point.
[[nodiscard]] PlanSource symbolic_plan(const SafetyController& ctrl, const SymbolicModel& model,
                                       std::size_t horizon);

/// x0 uniform in `region`; the mode of each period is policy(x) evaluated on the
/// delay-free trajectory at the period start.
[[nodiscard]] PlanSource feedback_plan(const SwitchedSystem& sys, const Box& region,
                                       std::function<Mode(const Vec&)> policy, double tau, double dt,
                                       std::size_t horizon);

enum class DelayKind { Zero, Max, Uniform };

/// Delays for switches 1..count: trial 0 all zero, trial 1 all delta0, later trials uniform.
[[nodiscard]] std::vector<double> trial_delays(std::size_t trial, std::size_t count, double delta0,
                                               std::uint64_t seed, DelayKind* kind = nullptr);

struct ClosedLoopOptions {
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    double dt = 0.0;
    double gap_tolerance = 1e-6;
    /// Tolerance on box containment checks.
    double containment_tolerance = 1e-9;
};

struct TrialResult {
    std::size_t trial = 0;
    DelayKind delays = DelayKind::Uniform;
    /// Smallest margin of the nominal trajectory to the shrunk box (negative = outside).
    double nominal_margin = 0.0;
    /// Smallest margin of the delayed trajectory to the safe box.
    double delayed_margin = 0.0;
    double max_gap = 0.0;
    /// max_gap per period.
    std::vector<double> per_period_gap;
    bool nominal_ok = true;
    bool delayed_ok = true;
    bool gap_ok = true;
    [[nodiscard]] bool passed() const { return nominal_ok && delayed_ok && gap_ok; }
};

struct ClosedLoopReport {
    std::vector<TrialResult> trials;
    std::size_t violations = 0;
    double worst_nominal_margin = std::numeric_limits<double>::infinity();
    double worst_delayed_margin = std::numeric_limits<double>::infinity();
    double worst_gap = 0.0;
    double epsilon1 = 0.0;
    [[nodiscard]] bool passed() const { return violations == 0 && !trials.empty(); }
};

/// For each trial: simulate the plan without delays and with delays up to delta0, then check
/// (a) nominal inside shrink_box(safe, epsilon1), (b) delayed inside safe, (c) gap <= epsilon1 + tolerance.
[[nodiscard]] ClosedLoopReport verify_closed_loop(const SwitchedSystem& sys, const Box& safe, double epsilon1,
                                                  double tau, double delta0, const PlanSource& plans,
                                                  const ClosedLoopOptions& options);

/// Symbolic-controller workflow: the safe box is the model box and epsilon1 the bound's epsilon.
[[nodiscard]] ClosedLoopReport verify_closed_loop(const SwitchedSystem& sys, const SafetyController& ctrl,
                                                  const SymbolicModel& model, const BoundResult& bound,
                                                  double delta0, std::size_t horizon,
                                                  const ClosedLoopOptions& options);

void write_report_json(std::ostream& os, const ClosedLoopReport& report);

}  // namespace switchbound
