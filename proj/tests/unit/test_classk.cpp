#include <doctest.h>

#include <cmath>
#include <random>

#include "switchbound/classk.hpp"
#include "switchbound/error.hpp"

using namespace switchbound;

TEST_SUITE("classk") {

TEST_CASE("closed-form inverses") {
    CHECK(ClassK::linear(1.0).inverse(0.029418) == 0.029418);
    CHECK(ClassK::linear(std::sqrt(6.0)).inverse(std::sqrt(6.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ClassK::power(2.0, 3.0).inverse(16.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ClassK::linear(3.0)(2.0) == 6.0);
    CHECK(ClassK::power(1.0, 2.0)(3.0) == 9.0);
}

TEST_CASE("bisection inverse of an expression") {
    const auto sq = ClassK::expression("s^2", 10.0);
    CHECK(std::abs(sq.inverse(2.0) - std::sqrt(2.0)) <= 1e-10);
    CHECK(sq.inverse(0.0) == 0.0);
    try {
        (void)sq.inverse(101.0);
        FAIL("expected out-of-range");
    } catch (const OutOfRangeError& e) {
        CHECK(std::string(e.what()).find("s_max") != std::string::npos);
    }
    CHECK_THROWS_AS((void)sq.inverse(-1.0), OutOfRangeError);
    CHECK_THROWS_AS((void)ClassK::linear(2.0, 1.0).inverse(3.0), OutOfRangeError);
}

TEST_CASE("construction rejects functions that are not class-K") {
    CHECK_THROWS_AS((void)ClassK::expression("sin(s)", 10.0), ValidationError);
    CHECK_THROWS_AS((void)ClassK::expression("s+1", 1.0), ValidationError);
    CHECK_THROWS_AS((void)ClassK::expression("-s", 1.0), ValidationError);
    CHECK_THROWS_AS((void)ClassK::linear(0.0), ValidationError);
    CHECK_THROWS_AS((void)ClassK::power(1.0, -1.0), ValidationError);
    CHECK_THROWS_AS((void)ClassK::expression("x", 1.0), ParseError);
}

TEST_CASE("inverse is a right inverse on random values") {
    std::mt19937_64 rng(5);
    const std::vector<ClassK> forms{ClassK::linear(1.0), ClassK::linear(std::sqrt(6.0)), ClassK::power(0.5, 1.7),
                                    ClassK::expression("s^2+s", 20.0), ClassK::expression("exp(s)-1", 5.0),
                                    ClassK::expression("s/(1+s)", 50.0)};
    for (const auto& f : forms) {
        const double top = std::isfinite(f.s_max()) ? f(f.s_max()) : 100.0;
        std::uniform_real_distribution<double> u(0.0, top);
        for (int i = 0; i < 100; ++i) {
            const double y = u(rng);
            CHECK(std::abs(f(f.inverse(y)) - y) <= 1e-10 * std::max(1.0, y));
        }
    }
}

}
