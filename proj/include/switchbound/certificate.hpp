#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "switchbound/classk.hpp"
#include "switchbound/system.hpp"

namespace switchbound {

/// Axis-aligned box lower <= x <= upper with lower < upper on every axis.
class Box {
public:
    Box(Vec lower, Vec upper);

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(lower_.size()); }
    [[nodiscard]] const Vec& lower() const noexcept { return lower_; }
    [[nodiscard]] const Vec& upper() const noexcept { return upper_; }
    [[nodiscard]] Vec center() const { return 0.5 * (lower_ + upper_); }
    [[nodiscard]] bool contains(const Vec& x, double tol = 0.0) const;
    /// Smallest per-axis slack to the boundary (negative when x is outside).
    [[nodiscard]] double margin(const Vec& x) const;
    /// Point at `index` of a grid with `per_axis` points per axis including both ends.
    [[nodiscard]] Vec grid_point(std::size_t index, std::size_t per_axis) const;
    [[nodiscard]] std::size_t grid_size(std::size_t per_axis) const;

    bool operator==(const Box& o) const { return lower_ == o.lower_ && upper_ == o.upper_; }

private:
    Vec lower_, upper_;
};

/// Incremental Lyapunov function V(x, y) >= 0, either sqrt((x-y)^T M (x-y)) or an
/// expression over x1..xn, y1..yn.
class PairFunction {
public:
    [[nodiscard]] static PairFunction quadratic(Mat M);
    [[nodiscard]] static PairFunction expression(Expression e);
    [[nodiscard]] static PairFunction expression(const std::string& source, std::size_t dim);

    [[nodiscard]] double operator()(const Vec& x, const Vec& y) const;

    /// dV/dx and dV/dy. Analytic for the quadratic form (zero on the diagonal);
    /// forward-mode differentiation of the expression otherwise.
    void gradient(const Vec& x, const Vec& y, Vec& gx, Vec& gy) const;

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const Mat* matrix() const noexcept { return std::get_if<Mat>(&form_); }
    [[nodiscard]] const Expression* expr() const noexcept { return std::get_if<Expression>(&form_); }
    /// sqrt(lambda_max(M)) for the quadratic form: the Lipschitz constant of V in each argument.
    [[nodiscard]] std::optional<double> lipschitz_bound() const;

private:
    PairFunction() = default;

    std::variant<Mat, Expression> form_;
    std::size_t dim_ = 0;
};

/// Variable names x1..xn, y1..yn used by pair-function expressions.
[[nodiscard]] std::vector<std::string> pair_variable_names(std::size_t dim);

enum class CertificateKind { Common, Multiple };

/// Common or multiple incremental Lyapunov certificate with its aggregated constants.
struct LyapunovCertificate {
    CertificateKind kind = CertificateKind::Common;
    /// One function for Common; one per mode (in mode order) for Multiple.
    std::vector<PairFunction> V;
    ClassK alpha_lo = ClassK::linear(1.0);
    ClassK alpha_hi = ClassK::linear(1.0);
    double kappa = 0.0;
    /// V_p <= mu V_p' (Multiple); 1 for Common.
    double mu = 1.0;
    /// Used by the symbolic step: |V(x,y) - V(x,z)| <= gamma(|y - z|).
    ClassK gamma = ClassK::linear(1.0);
    /// Pinned intermode derivative bound, when published.
    std::optional<double> nu;

    [[nodiscard]] const PairFunction& for_mode(Mode p) const {
        return kind == CertificateKind::Common ? V.at(0) : V.at(p);
    }
    /// Throws ValidationError when the structure does not match `sys`.
    void validate(const SwitchedSystem& sys) const;
};

/// Outcome of one sampled inequality.
struct CheckResult {
    std::string name;
    bool passed = true;
    /// max(lhs - rhs) over the samples; <= slack when passed.
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::size_t samples = 0;
    std::string worst_sample;
};

struct CertificateReport {
    std::vector<CheckResult> checks;
    [[nodiscard]] bool passed() const;
};

/// Slack used by every sampled certificate inequality.
inline constexpr double kCertificateSlack = 1e-9;
/// Pairs closer than this are treated as diagonal (V and its Lie derivative vanish).
inline constexpr double kDiagonalExclusion = 1e-6;

/// Samples the sandwich bounds, the decay inequality and (Multiple) the mode-ratio
/// bound on grid x grid pairs of `box` with `per_axis` points per axis.
[[nodiscard]] CertificateReport check_certificate(const SwitchedSystem& sys, const LyapunovCertificate& cert,
                                                  const Box& box, std::size_t per_axis = 11);

struct NuEstimate {
    /// Largest sampled intermode derivative, clamped at 0.
    double raw_max = 0.0;
    /// raw_max * safety_factor.
    double value = 0.0;
    double safety_factor = 1.0;
    Vec argmax_x, argmax_y;
    Mode from_mode = 0, to_mode = 0;
    std::size_t samples = 0;
};

inline constexpr double kDefaultNuSafetyFactor = 1.05;

/// Grid maximum over distinct ordered mode pairs (p, p') and (x, y) in box x box of
/// dV/dx f_p(x) + dV/dy f_p'(y), where V is the common function or V_p' (Multiple).
[[nodiscard]] NuEstimate estimate_nu(const SwitchedSystem& sys, const LyapunovCertificate& cert, const Box& box,
                                     std::size_t per_axis, double safety_factor = kDefaultNuSafetyFactor);

}  // namespace switchbound
