#pragma once

// Transition-system view of a periodic switched system. A state (x, t, p) marks a
// switching instant: x is the continuous state at time t and p the mode entered.
// Labels are modes, outputs are states themselves (identity embedding) and initial
// states have t = 0.

#include "switchbound/certificate.hpp"
#include "switchbound/system.hpp"

namespace switchbound {

struct TSState {
    Vec x;
    double t = 0.0;
    Mode p = 0;
};

/// Timing of the two transition systems being related.
struct TSTiming {
    double tau = 0.0;
    double delta0 = 0.0;
    /// RK4 step used for the flows inside the premetric.
    double dt = 0.0;
};

/// True when t lies in [k tau, k tau + delta0] for some integer k >= 0.
[[nodiscard]] bool is_switching_time(double t, const TSTiming& timing);

/// Successor of (x, t, p) switching into `next` at time t_next.
[[nodiscard]] TSState ts_successor(const SwitchedSystem& sys, const TSState& q, double t_next, Mode next,
                                   double dt);

/// Output premetric between a delayed-system state `a` and a delay-free state `b`:
/// |a.x - flow(b.x, a.p, a.t - b.t)| when a.p == b.p, b.t = k tau and
/// a.t in [b.t, b.t + delta0]; +inf otherwise. Not symmetric: `a` is the delayed state.
[[nodiscard]] double premetric(const TSState& a, const TSState& b, const SwitchedSystem& sys,
                               const TSTiming& timing);

/// Lyapunov-valued relation measure V_{a.p}(a.x, flow(b.x, b.p, a.t - b.t)) under the
/// same matching conditions as premetric(); +inf otherwise.
[[nodiscard]] double relation_value(const TSState& a, const TSState& b, const SwitchedSystem& sys,
                                    const LyapunovCertificate& cert, const TSTiming& timing);

}  // namespace switchbound
