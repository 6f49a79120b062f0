#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "switchbound/certificate.hpp"
#include "switchbound/system.hpp"

namespace switchbound {

inline constexpr std::size_t kDefaultGridCap = 5'000'000;

/// Uniform grid abstraction of the delay-free sampled system. States are grid points
/// lower + i*eta (row-major, last axis fastest); index state_count() is the absorbing Sink.
class SymbolicModel {
public:
    using State = std::uint32_t;

    SymbolicModel(Box box, double eta, double tau, double epsilon2, std::vector<std::string> mode_names);

    [[nodiscard]] const Box& box() const noexcept { return box_; }
    [[nodiscard]] double eta() const noexcept { return eta_; }
    [[nodiscard]] double tau() const noexcept { return tau_; }
    [[nodiscard]] double epsilon2() const noexcept { return epsilon2_; }
    [[nodiscard]] std::size_t dim() const noexcept { return counts_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& counts() const noexcept { return counts_; }
    [[nodiscard]] std::size_t state_count() const noexcept { return states_; }
    [[nodiscard]] State sink() const noexcept { return static_cast<State>(states_); }
    [[nodiscard]] std::size_t mode_count() const noexcept { return mode_names_.size(); }
    [[nodiscard]] const std::vector<std::string>& mode_names() const noexcept { return mode_names_; }

    [[nodiscard]] std::vector<std::size_t> index_tuple(State q) const;
    [[nodiscard]] State state_of(const std::vector<std::size_t>& tuple) const;
    /// Continuous coordinates of grid state q.
    [[nodiscard]] Vec point(State q) const;
    /// Nearest grid point (ties toward the lower index on each axis); Sink outside the box.
    [[nodiscard]] State nearest(const Vec& x) const;

    [[nodiscard]] State successor(State q, Mode p) const;
    void set_successor(State q, Mode p, State target);
    [[nodiscard]] const std::vector<State>& transitions() const noexcept { return trans_; }

    /// Non-fatal remarks collected while building (for example an eta above the feasibility limit).
    std::vector<std::string> warnings;

private:
    Box box_;
    double eta_;
    double tau_;
    double epsilon2_;
    std::vector<std::string> mode_names_;
    std::vector<std::size_t> counts_;
    std::size_t states_ = 0;
    std::vector<State> trans_;
};

/// Largest grid spacing with gamma(eta) <= (1 - exp(-kappa tau)) alpha_lo(epsilon2).
[[nodiscard]] double max_eta(const LyapunovCertificate& cert, double tau, double epsilon2);

/// Grid point count per axis: floor(width / eta) + 1.
[[nodiscard]] std::vector<std::size_t> grid_counts(const Box& box, double eta);

struct SymbolicOptions {
    double dt = 0.0;
    std::size_t max_states = kDefaultGridCap;
    /// Use the exact one-period affine map when every mode is affine.
    bool affine_fast_path = true;
    double epsilon2 = 0.0;
    /// When set, an eta above this value adds a warning to the model.
    std::optional<double> eta_limit;
};

[[nodiscard]] SymbolicModel build_symbolic(const SwitchedSystem& sys, const Box& box, double eta, double tau,
                                           const SymbolicOptions& options);

/// Exact map x -> E x + c of one period of length tau under an affine mode.
struct AffineStep {
    Mat E;
    Vec c;
    [[nodiscard]] Vec operator()(const Vec& x) const { return E * x + c; }
};

[[nodiscard]] AffineStep affine_period_map(const AffineField& f, double tau);

void save_symbolic(std::ostream& os, const SymbolicModel& model);
[[nodiscard]] SymbolicModel load_symbolic(std::istream& is);

}  // namespace switchbound
