#include "switchbound/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "switchbound/error.hpp"

namespace switchbound {

namespace {
// Event times are k*tau computed directly; this absorbs rounding in the membership test.
constexpr double kTimeSlack = 1e-12;
}  // namespace

SwitchingSignal::SwitchingSignal(double period, double delay_bound, std::vector<SwitchEvent> events,
                                 double horizon)
    : period_(period), delay_bound_(delay_bound), events_(std::move(events)), horizon_(horizon) {
    if (!(period_ > 0) || !std::isfinite(period_)) throw ValidationError("period must be positive");
    if (!(delay_bound_ >= 0) || !(delay_bound_ < period_))
        throw ValidationError("delay bound must satisfy 0 <= delta0 < period");
    if (events_.empty() || events_.front().time != 0.0)
        throw ValidationError("a switching signal must start with an event at t = 0");
    if (!(horizon_ > 0) || !std::isfinite(horizon_)) throw ValidationError("horizon must be positive and finite");
    const double slack = kTimeSlack * std::max(1.0, horizon_);
    for (std::size_t k = 1; k < events_.size(); ++k) {
        const double t = events_[k].time;
        if (!(t > events_[k - 1].time)) throw ValidationError("event times must be strictly increasing");
        const double lo = static_cast<double>(k) * period_;
        if (t < lo - slack || t > lo + delay_bound_ + slack)
            throw ValidationError("event " + std::to_string(k) + " at t = " + std::to_string(t) +
                                  " lies outside [k*tau, k*tau + delta0]");
    }
}

Mode SwitchingSignal::mode_at(double s) const {
    auto it = std::upper_bound(events_.begin(), events_.end(), s,
                               [](double v, const SwitchEvent& e) { return v < e.time; });
    if (it == events_.begin()) return events_.front().mode;
    return std::prev(it)->mode;
}

std::size_t periods_covering(double tau, double horizon) {
    const double ratio = horizon / tau;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio)) return static_cast<std::size_t>(rounded);
    return static_cast<std::size_t>(std::ceil(ratio));
}

SwitchingSignal make_periodic_signal(double tau, std::span<const Mode> modes, double horizon) {
    if (!(tau > 0) || !std::isfinite(tau)) throw ValidationError("period must be positive");
    if (modes.empty()) throw ValidationError("mode sequence is empty");
    if (!(horizon >= tau)) throw ValidationError("horizon must be at least one period");
    const std::size_t needed = periods_covering(tau, horizon);
    if (modes.size() < needed)
        throw ValidationError("mode sequence too short: " + std::to_string(modes.size()) + " given, " +
                              std::to_string(needed) + " periods needed");
    std::vector<SwitchEvent> events;
    events.reserve(needed);
    for (std::size_t k = 0; k < needed; ++k) events.push_back({static_cast<double>(k) * tau, modes[k]});
    return SwitchingSignal(tau, 0.0, std::move(events), horizon);
}

SwitchingSignal make_delayed_signal(const SwitchingSignal& base, double delta0, std::span<const double> delays) {
    if (base.delay_bound() != 0.0) throw ValidationError("base signal must be delay-free");
    if (!(delta0 >= 0) || !(delta0 < base.period()))
        throw ValidationError("delay bound must be < period (delta0 = " + std::to_string(delta0) + ")");
    const auto& ev = base.events();
    if (delays.size() + 1 < ev.size())
        throw ValidationError("need " + std::to_string(ev.size() - 1) + " delays, got " +
                              std::to_string(delays.size()));
    std::vector<SwitchEvent> out = ev;
    for (std::size_t k = 1; k < out.size(); ++k) {
        const double d = delays[k - 1];
        if (!(d >= 0) || !(d <= delta0))
            throw ValidationError("delay " + std::to_string(d) + " for switch " + std::to_string(k) +
                                  " outside [0, delta0]");
        out[k].time = static_cast<double>(k) * base.period() + d;
    }
    return SwitchingSignal(base.period(), delta0, std::move(out), base.horizon());
}

}  // namespace switchbound
