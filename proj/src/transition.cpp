#include "switchbound/transition.hpp"

#include <cmath>
#include <limits>

#include "switchbound/error.hpp"
#include "switchbound/integrate.hpp"

namespace switchbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double time_slack(const TSTiming& timing, double t) { return 1e-12 * std::max({1.0, std::abs(t), timing.tau}); }

bool is_period_multiple(double t, const TSTiming& timing) {
    const double k = std::round(t / timing.tau);
    return k >= 0 && std::abs(t - k * timing.tau) <= time_slack(timing, t);
}

bool matched(const TSState& a, const TSState& b, const TSTiming& timing) {
    if (a.p != b.p || !is_period_multiple(b.t, timing)) return false;
    const double slack = time_slack(timing, a.t);
    return a.t >= b.t - slack && a.t <= b.t + timing.delta0 + slack;
}

}  // namespace

bool is_switching_time(double t, const TSTiming& timing) {
    if (t < 0) return false;
    const double k = std::floor(t / timing.tau + 1e-12);
    const double lo = k * timing.tau;
    const double slack = time_slack(timing, t);
    return t >= lo - slack && t <= lo + timing.delta0 + slack;
}

TSState ts_successor(const SwitchedSystem& sys, const TSState& q, double t_next, Mode next, double dt) {
    if (!(t_next >= q.t)) throw ValidationError("successor time precedes the source state");
    return TSState{flow_constant(sys, q.x, q.p, t_next - q.t, dt, q.t), t_next, next};
}

double premetric(const TSState& a, const TSState& b, const SwitchedSystem& sys, const TSTiming& timing) {
    if (!matched(a, b, timing)) return kInf;
    const double lag = std::max(0.0, a.t - b.t);
    return (a.x - flow_constant(sys, b.x, a.p, lag, timing.dt, b.t)).norm();
}

double relation_value(const TSState& a, const TSState& b, const SwitchedSystem& sys,
                      const LyapunovCertificate& cert, const TSTiming& timing) {
    if (!matched(a, b, timing)) return kInf;
    const double lag = std::max(0.0, a.t - b.t);
    return cert.for_mode(a.p)(a.x, flow_constant(sys, b.x, b.p, lag, timing.dt, b.t));
}

}  // namespace switchbound
