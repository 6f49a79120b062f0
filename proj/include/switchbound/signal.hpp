#pragma once

#include <span>
#include <vector>

#include "switchbound/system.hpp"

namespace switchbound {

struct SwitchEvent {
    double time;
    Mode mode;

    bool operator==(const SwitchEvent&) const = default;
};

/// Piecewise-constant, right-continuous mode schedule on [0, horizon] whose k-th
/// event (k >= 1) lies in [k*period, k*period + delay_bound].
class SwitchingSignal {
public:
    /// Validates the event list; throws ValidationError.
    SwitchingSignal(double period, double delay_bound, std::vector<SwitchEvent> events, double horizon);

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] double delay_bound() const noexcept { return delay_bound_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] const std::vector<SwitchEvent>& events() const noexcept { return events_; }

    /// Mode of the last event with time <= s.
    [[nodiscard]] Mode mode_at(double s) const;

    bool operator==(const SwitchingSignal&) const = default;

private:
    double period_;
    double delay_bound_;
    std::vector<SwitchEvent> events_;
    double horizon_;
};

/// Events at 0, tau, 2tau, ... covering ceil(horizon / tau) periods.
[[nodiscard]] SwitchingSignal make_periodic_signal(double tau, std::span<const Mode> modes, double horizon);

/// Moves the event at k*tau (k >= 1) to k*tau + delays[k-1]. The event at 0 is never delayed.
[[nodiscard]] SwitchingSignal make_delayed_signal(const SwitchingSignal& base, double delta0,
                                                  std::span<const double> delays);

/// Number of periods needed to cover `horizon`.
[[nodiscard]] std::size_t periods_covering(double tau, double horizon);

}  // namespace switchbound
