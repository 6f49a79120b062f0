#pragma once

#include <cmath>
#include <random>

#include "switchbound/demos.hpp"
#include "switchbound/system.hpp"

namespace testing {

using namespace switchbound;

/// x' = -x (single mode "decay").
inline SwitchedSystem decay_1d() {
    Mat A(1, 1);
    A << -1.0;
    return SwitchedSystem(1, {"decay"}, {VectorField(AffineField{A, Vec::Zero(1)})});
}

/// Two scalar affine modes x' = -x + 1 and x' = -2x.
inline SwitchedSystem two_mode_1d() {
    Mat A1(1, 1), A2(1, 1);
    A1 << -1.0;
    A2 << -2.0;
    Vec b1(1), b2(1);
    b1 << 1.0;
    b2 << 0.0;
    return SwitchedSystem(1, {"up", "down"}, {VectorField(AffineField{A1, b1}), VectorField(AffineField{A2, b2})});
}

inline Vec vec(std::initializer_list<double> v) {
    Vec x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

inline const SystemConfig& dcdc() {
    static const SystemConfig c = demo_config("dcdc");
    return c;
}

inline const SystemConfig& watertank() {
    static const SystemConfig c = demo_config("watertank");
    return c;
}

}  // namespace testing
