#include "switchbound/classk.hpp"

#include <cmath>
#include <sstream>

#include "switchbound/error.hpp"

namespace switchbound {

ClassK ClassK::linear(double c, double s_max) {
    if (!(c > 0) || !std::isfinite(c)) throw ValidationError("linear class-K coefficient must be positive");
    if (!(s_max > 0)) throw ValidationError("class-K domain bound must be positive");
    ClassK f;
    f.form_ = Form::Linear;
    f.c_ = c;
    f.s_max_ = s_max;
    return f;
}

ClassK ClassK::power(double c, double q, double s_max) {
    if (!(c > 0) || !(q > 0) || !std::isfinite(c) || !std::isfinite(q))
        throw ValidationError("power class-K needs c > 0 and q > 0");
    if (!(s_max > 0)) throw ValidationError("class-K domain bound must be positive");
    ClassK f;
    f.form_ = Form::Power;
    f.c_ = c;
    f.q_ = q;
    f.s_max_ = s_max;
    return f;
}

ClassK ClassK::expression(Expression e, double s_max) {
    if (!(s_max > 0) || !std::isfinite(s_max))
        throw ValidationError("expression class-K needs a finite positive s_max");
    ClassK f;
    f.form_ = Form::Expression;
    f.expr_ = std::move(e);
    f.s_max_ = s_max;
    const double f0 = f(0.0);
    if (std::abs(f0) > 1e-12) throw ValidationError("class-K function must vanish at 0, got " + std::to_string(f0));
    constexpr int kSamples = 64;
    double prev = f0;
    for (int i = 1; i < kSamples; ++i) {
        const double v = f(s_max * i / (kSamples - 1));
        if (v < prev - 1e-12)
            throw ValidationError("class-K function '" + f.expr_.to_string() + "' is not increasing on [0, s_max]");
        prev = v;
    }
    if (!(prev > f0)) throw ValidationError("class-K function is constant on [0, s_max]");
    return f;
}

ClassK ClassK::expression(const std::string& source, double s_max) {
    return expression(parse_expression(source, {"s"}), s_max);
}

double ClassK::operator()(double s) const {
    switch (form_) {
        case Form::Linear: return c_ * s;
        case Form::Power: return c_ * std::pow(s, q_);
        case Form::Expression: {
            const double v[1] = {s};
            return expr_.eval(v);
        }
    }
    return 0.0;
}

double ClassK::inverse(double y) const {
    if (!(y >= 0)) throw OutOfRangeError("class-K inverse needs y >= 0");
    if (y == 0) return 0.0;
    if (std::isinf(y) && std::isinf(s_max_)) return y;
    const double top = std::isinf(s_max_) ? kUnbounded : (*this)(s_max_);
    if (y > top) {
        std::ostringstream msg;
        msg << "class-K inverse: y = " << y << " exceeds f(s_max) = " << top << " (s_max = " << s_max_ << ")";
        throw OutOfRangeError(msg.str());
    }
    switch (form_) {
        case Form::Linear: return y / c_;
        case Form::Power: return std::pow(y / c_, 1.0 / q_);
        case Form::Expression: break;
    }
    double lo = 0.0, hi = s_max_;
    for (int it = 0; it < 400 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((*this)(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::string ClassK::describe() const {
    std::ostringstream os;
    switch (form_) {
        case Form::Linear: os << c_ << "*s"; break;
        case Form::Power: os << c_ << "*s^" << q_; break;
        case Form::Expression: os << expr_.to_string(); break;
    }
    if (!std::isinf(s_max_)) os << " on [0, " << s_max_ << "]";
    return os.str();
}

}  // namespace switchbound
