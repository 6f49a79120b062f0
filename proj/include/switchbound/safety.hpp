#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "switchbound/signal.hpp"
#include "switchbound/symbolic.hpp"

namespace switchbound {

/// Moves every face of `box` inward by `margin`. Throws ValidationError naming the
/// first axis that becomes empty.
[[nodiscard]] Box shrink_box(const Box& box, double margin);

/// Maximal controlled-invariant subset of a symbolic model with its permitted modes.
class SafetyController {
public:
    using State = SymbolicModel::State;

    SafetyController(Box target, std::vector<std::uint64_t> allowed);

    [[nodiscard]] const Box& target() const noexcept { return target_; }
    [[nodiscard]] bool is_safe(State q) const { return q < allowed_.size() && allowed_[q] != 0; }
    /// Bit p set when mode p keeps q inside the safe set (0 outside it).
    [[nodiscard]] std::uint64_t allowed_mask(State q) const { return q < allowed_.size() ? allowed_[q] : 0; }
    [[nodiscard]] std::vector<Mode> allowed_modes(State q) const;
    [[nodiscard]] std::size_t safe_count() const noexcept { return safe_count_; }
    [[nodiscard]] bool empty() const noexcept { return safe_count_ == 0; }
    [[nodiscard]] std::vector<State> safe_states() const;
    [[nodiscard]] const std::vector<std::uint64_t>& masks() const noexcept { return allowed_; }

private:
    Box target_;
    std::vector<std::uint64_t> allowed_;
    std::size_t safe_count_ = 0;
};

/// Greatest fixed point of S -> {q in S : some mode maps q into S} starting from the
/// grid states inside `target`.
[[nodiscard]] SafetyController synthesize_safety(const SymbolicModel& model, const Box& target);

/// Same fixed point starting from an explicit initial set (initial[q] for every non-Sink state).
[[nodiscard]] SafetyController synthesize_safety(const SymbolicModel& model, const std::vector<bool>& initial,
                                                 const Box& target);

enum class SignalPolicy { LeastMode, RoundRobin, SeededRandom };

struct ExtractedSignal {
    SwitchingSignal signal;
    /// Visited symbolic states, trace[0] = q0 and trace.size() = horizon + 1.
    std::vector<SafetyController::State> trace;
    std::vector<Mode> modes;
};

/// Walks the symbolic closed loop for `horizon` periods and returns the open-loop
/// tau-periodic signal of the chosen modes. Throws ValidationError when q0 is unsafe.
[[nodiscard]] ExtractedSignal extract_signal(const SafetyController& ctrl, const SymbolicModel& model,
                                             SafetyController::State q0, std::size_t horizon, SignalPolicy policy,
                                             std::uint64_t seed = 0);

/// JSON: target box, safe count and a map from index tuple to sorted mode names.
void save_controller(std::ostream& os, const SafetyController& ctrl, const SymbolicModel& model);
[[nodiscard]] SafetyController load_controller(std::istream& is, const SymbolicModel& model);

}  // namespace switchbound
