#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "switchbound/signal.hpp"
#include "switchbound/system.hpp"

namespace switchbound {

/// States with any coordinate above this magnitude abort integration.
inline constexpr double kDivergenceLimit = 1e12;

/// Sampled trajectory stored column-major: state(i) is the i-th sample.
class Trajectory {
public:
    Trajectory(std::size_t dim, double step) : dim_(dim), step_(step) {}

    void push(double t, const Vec& x, Mode mode);
    void reserve(std::size_t samples);

    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] double step_size() const noexcept { return step_; }
    [[nodiscard]] double time(std::size_t i) const { return times_.at(i); }
    [[nodiscard]] Mode mode(std::size_t i) const { return modes_.at(i); }
    [[nodiscard]] Eigen::Map<const Vec> state(std::size_t i) const;
    [[nodiscard]] Vec final_state() const { return state(size() - 1); }
    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }

    bool operator==(const Trajectory&) const = default;

private:
    std::size_t dim_;
    double step_;
    std::vector<double> times_;
    std::vector<double> states_;
    std::vector<Mode> modes_;
};

/// Classical RK4 with a reusable workspace.
class Rk4Stepper {
public:
    explicit Rk4Stepper(std::size_t dim);
    /// Advances x by one step of length h under `field`, in place.
    void step(const VectorField& field, Vec& x, double h);

private:
    Vec k1_, k2_, k3_, k4_, tmp_;
};

/// State reached from x0 after `duration` under constant mode p: fixed-step RK4
/// whose last step is shortened to land exactly on `duration`.
/// `t0` only offsets the time reported in an IntegrationError.
[[nodiscard]] Vec flow_constant(const SwitchedSystem& sys, const Vec& x0, Mode p, double duration, double dt,
                                double t0 = 0.0);

/// Piecewise integration split exactly at every switching time <= t_end.
/// Samples are taken at multiples of dt, at every switching time and at t_end.
[[nodiscard]] Trajectory simulate(const SwitchedSystem& sys, const SwitchingSignal& sig, const Vec& x0,
                                  double t_end, double dt);

/// Writes `t,x1,...,xn,mode` rows with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const SwitchedSystem& sys);

/// Pointwise Euclidean gap between two trajectories over their common sample times.
struct DeviationProfile {
    double max = 0.0;
    /// per_period[k]: largest gap at common sample times in [k*tau, (k+1)*tau).
    std::vector<double> per_period;
    std::size_t compared = 0;
};

[[nodiscard]] DeviationProfile compare_trajectories(const Trajectory& a, const Trajectory& b, double tau);

}  // namespace switchbound
