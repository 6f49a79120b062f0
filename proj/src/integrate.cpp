#include "switchbound/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "switchbound/error.hpp"

namespace switchbound {

void Trajectory::push(double t, const Vec& x, Mode mode) {
    times_.push_back(t);
    states_.insert(states_.end(), x.data(), x.data() + x.size());
    modes_.push_back(mode);
}

void Trajectory::reserve(std::size_t samples) {
    times_.reserve(samples);
    states_.reserve(samples * dim_);
    modes_.reserve(samples);
}

Eigen::Map<const Vec> Trajectory::state(std::size_t i) const {
    if (i >= times_.size()) throw ValidationError("trajectory sample index out of range");
    return Eigen::Map<const Vec>(states_.data() + i * dim_, static_cast<Eigen::Index>(dim_));
}

Rk4Stepper::Rk4Stepper(std::size_t dim)
    : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

void Rk4Stepper::step(const VectorField& field, Vec& x, double h) {
    field.eval(x, k1_);
    tmp_ = x + (0.5 * h) * k1_;
    field.eval(tmp_, k2_);
    tmp_ = x + (0.5 * h) * k2_;
    field.eval(tmp_, k3_);
    tmp_ = x + h * k3_;
    field.eval(tmp_, k4_);
    x += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

namespace {

void check_state(const Vec& x, double t) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || std::abs(x[i]) > kDivergenceLimit)
            throw IntegrationError("state diverged", t);
}

void guarded_step(Rk4Stepper& rk, const VectorField& field, Vec& x, double h, double t) {
    try {
        rk.step(field, x, h);
    } catch (const DomainError& e) {
        throw IntegrationError(std::string("vector field evaluation failed: ") + e.what(), t);
    }
    check_state(x, t + h);
}

}  // namespace

Vec flow_constant(const SwitchedSystem& sys, const Vec& x0, Mode p, double duration, double dt, double t0) {
    if (!(duration >= 0)) throw ValidationError("flow duration must be nonnegative");
    if (!(dt > 0)) throw ValidationError("integration step must be positive");
    if (static_cast<std::size_t>(x0.size()) != sys.dim()) throw ValidationError("initial state has wrong dimension");
    Vec x = x0;
    if (duration == 0.0) return x;
    const VectorField& field = sys.field(p);
    Rk4Stepper rk(sys.dim());
    auto full = static_cast<std::size_t>(std::floor(duration / dt));
    double rest = duration - static_cast<double>(full) * dt;
    // A remainder at rounding level is folded into the last full step.
    if (full > 0 && rest < 1e-9 * dt) {
        --full;
        rest += dt;
    }
    for (std::size_t k = 0; k < full; ++k) guarded_step(rk, field, x, dt, t0 + static_cast<double>(k) * dt);
    if (rest > 0) guarded_step(rk, field, x, rest, t0 + static_cast<double>(full) * dt);
    return x;
}

Trajectory simulate(const SwitchedSystem& sys, const SwitchingSignal& sig, const Vec& x0, double t_end, double dt) {
    if (!(dt > 0)) throw ValidationError("integration step must be positive");
    if (!(t_end >= 0)) throw ValidationError("end time must be nonnegative");
    if (t_end > sig.horizon() * (1 + 1e-12)) throw ValidationError("end time exceeds the signal horizon");
    if (static_cast<std::size_t>(x0.size()) != sys.dim()) throw ValidationError("initial state has wrong dimension");

    // Merge the dt grid with the switching times; grid points within rounding of a
    // switching time are replaced by it.
    const double snap = 1e-9 * dt;
    std::vector<double> times;
    const auto& events = sig.events();
    std::size_t e = 0;
    for (std::size_t j = 0;; ++j) {
        const double g = static_cast<double>(j) * dt;
        if (g > t_end - snap) break;
        while (e < events.size() && events[e].time < g - snap && events[e].time <= t_end) times.push_back(events[e++].time);
        if (e < events.size() && std::abs(events[e].time - g) <= snap) {
            times.push_back(events[e++].time);
            continue;
        }
        times.push_back(g);
    }
    while (e < events.size() && events[e].time < t_end - snap) times.push_back(events[e++].time);
    if (times.empty() || times.back() < t_end) times.push_back(t_end);

    Trajectory traj(sys.dim(), dt);
    traj.reserve(times.size());
    Vec x = x0;
    check_state(x, 0.0);
    Rk4Stepper rk(sys.dim());
    traj.push(times[0], x, sig.mode_at(times[0]));
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double a = times[i - 1];
        const Mode p = sig.mode_at(a);
        guarded_step(rk, sys.field(p), x, times[i] - a, a);
        traj.push(times[i], x, sig.mode_at(times[i]));
    }
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const SwitchedSystem& sys) {
    os << "t";
    for (std::size_t i = 1; i <= traj.dim(); ++i) os << ",x" << i;
    os << ",mode\n";
    char buf[40];
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.time(k));
        os << buf;
        const auto x = traj.state(k);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", x[i]);
            os << ',' << buf;
        }
        os << ',' << sys.mode_name(traj.mode(k)) << '\n';
    }
}

DeviationProfile compare_trajectories(const Trajectory& a, const Trajectory& b, double tau) {
    if (a.dim() != b.dim()) throw ValidationError("trajectories have different dimensions");
    DeviationProfile out;
    if (a.size() == 0 || b.size() == 0) return out;
    const double tol = 1e-9 * std::min(a.step_size(), b.step_size());
    const double t_last = std::min(a.time(a.size() - 1), b.time(b.size() - 1));
    // The closing sample at a period boundary belongs to the last period.
    const auto k_last = static_cast<std::size_t>(std::max(0.0, std::ceil(t_last / tau - 1e-9) - 1.0));
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double ta = a.time(i), tb = b.time(j);
        if (std::abs(ta - tb) <= tol) {
            const double gap = (a.state(i) - b.state(j)).norm();
            const auto k = std::min(k_last, static_cast<std::size_t>(std::floor(ta / tau + 1e-9)));
            if (out.per_period.size() <= k) out.per_period.resize(k + 1, 0.0);
            out.per_period[k] = std::max(out.per_period[k], gap);
            out.max = std::max(out.max, gap);
            ++out.compared;
            ++i;
            ++j;
        } else if (ta < tb) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

}  // namespace switchbound
