#pragma once

#include <limits>
#include <string>

#include "switchbound/expr.hpp"

namespace switchbound {

/// Continuous, strictly increasing f: [0, s_max] -> R+ with f(0) = 0.
class ClassK {
public:
    enum class Form { Linear, Power, Expression };

    static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

    /// f(s) = c*s.
    [[nodiscard]] static ClassK linear(double c, double s_max = kUnbounded);
    /// f(s) = c*s^q.
    [[nodiscard]] static ClassK power(double c, double q, double s_max = kUnbounded);
    /// f given by an expression in `s`, sampled for monotonicity on [0, s_max] (64 points).
    [[nodiscard]] static ClassK expression(Expression e, double s_max);
    [[nodiscard]] static ClassK expression(const std::string& source, double s_max);

    [[nodiscard]] double operator()(double s) const;

    /// Closed form for linear/power; bisection on [0, s_max] to 1e-12 otherwise.
    /// Throws OutOfRangeError when y > f(s_max).
    [[nodiscard]] double inverse(double y) const;

    [[nodiscard]] Form form() const noexcept { return form_; }
    [[nodiscard]] double coefficient() const noexcept { return c_; }
    [[nodiscard]] double exponent() const noexcept { return q_; }
    [[nodiscard]] double s_max() const noexcept { return s_max_; }
    [[nodiscard]] const Expression& expr() const noexcept { return expr_; }
    [[nodiscard]] std::string describe() const;

private:
    ClassK() = default;

    Form form_ = Form::Linear;
    double c_ = 1.0;
    double q_ = 1.0;
    double s_max_ = kUnbounded;
    Expression expr_;
};

}  // namespace switchbound
