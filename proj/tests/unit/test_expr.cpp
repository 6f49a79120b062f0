#include <doctest.h>

#include <cmath>
#include <random>

#include "switchbound/error.hpp"
#include "switchbound/expr.hpp"

using namespace switchbound;
using K = ExprNode::Kind;
using Env = std::map<std::string, double>;

TEST_SUITE("expr") {

TEST_CASE("water-tank fields parse into the expected trees") {
    const auto e = parse_expression("-0.2*sqrt(x1)", {"x1"});
    const auto& root = *e.root();
    REQUIRE(root.kind == K::Mul);
    CHECK(root.args[0]->kind == K::Neg);
    CHECK(root.args[0]->args[0]->kind == K::Const);
    CHECK(root.args[0]->args[0]->value == 0.2);
    CHECK(root.args[1]->kind == K::Call);
    CHECK(root.args[1]->func == Func::Sqrt);
    CHECK(root.args[1]->args[0]->kind == K::Var);

    const auto on = parse_expression("0.1*(11-x1)", {"x1"});
    CHECK(on.root()->kind == K::Mul);
    CHECK(on.root()->args[1]->kind == K::Sub);
    const double x = 1.0;
    CHECK(on.eval(std::span<const double>(&x, 1)) == doctest::Approx(1.0));
}

TEST_CASE("evaluation") {
    CHECK(parse_expression("-0.2*sqrt(x1)", {"x1"}).eval({{"x1", 4.0}}) == doctest::Approx(-0.4).epsilon(1e-15));
    const auto v = parse_expression("abs(exp(sqrt(x1))-exp(sqrt(x2)))", {"x1", "x2"});
    CHECK(v.eval({{"x1", 4.0}, {"x2", 1.0}}) == doctest::Approx(std::exp(2.0) - std::exp(1.0)).epsilon(1e-15));
    CHECK(v.eval({{"x1", 4.0}, {"x2", 1.0}}) == doctest::Approx(4.670774).epsilon(1e-6));
    CHECK(parse_expression("1 + 2*3", {}).eval(Env{}) == 7);
    CHECK(parse_expression("2^3^2", {}).eval(Env{}) == 512);
    CHECK(parse_expression("-2^2", {}).eval(Env{}) == -4);
    CHECK(parse_expression("2^-1", {}).eval(Env{}) == 0.5);
    CHECK(parse_expression("(1+2)*3", {}).eval(Env{}) == 9);
    CHECK(parse_expression("8/4/2", {}).eval(Env{}) == 1);
    CHECK(parse_expression("10-4-3", {}).eval(Env{}) == 3);
    CHECK(parse_expression("min(3, max(1, 2))", {}).eval(Env{}) == 2);
    CHECK(parse_expression("1.5e2", {}).eval(Env{}) == 150);
    CHECK(parse_expression("  cos( 0 ) + sin(0)\t", {}).eval(Env{}) == 1);
    CHECK(parse_expression("log(exp(2))", {}).eval(Env{}) == doctest::Approx(2.0));
    CHECK(parse_expression("(-2)^3", {}).eval(Env{}) == -8);
    CHECK(parse_expression("3^10", {}).eval(Env{}) == 59049);
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        (void)parse_expression("2*+3", {});
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 2);
    }
    CHECK_THROWS_AS((void)parse_expression("", {}), ParseError);
    CHECK_THROWS_AS((void)parse_expression("1+", {}), ParseError);
    CHECK_THROWS_AS((void)parse_expression("(1", {}), ParseError);
    CHECK_THROWS_AS((void)parse_expression("1)", {}), ParseError);
    CHECK_THROWS_AS((void)parse_expression("x3", {"x1"}), ParseError);
    CHECK_THROWS_AS((void)parse_expression("foo(1)", {}), ParseError);
    CHECK_THROWS_AS((void)parse_expression("sqrt(1, 2)", {}), ParseError);
    CHECK_THROWS_AS((void)parse_expression("min(1)", {}), ParseError);
    CHECK_THROWS_AS((void)parse_expression(std::string(500, '(') + "1" + std::string(500, ')'), {}), ParseError);
}

TEST_CASE("domain errors are reported") {
    CHECK_THROWS_AS((void)parse_expression("sqrt(x1)", {"x1"}).eval({{"x1", -1.0}}), DomainError);
    CHECK_THROWS_AS((void)parse_expression("log(0)", {}).eval(Env{}), DomainError);
    CHECK_THROWS_AS((void)parse_expression("1/0", {}).eval(Env{}), DomainError);
    CHECK_THROWS_AS((void)parse_expression("(-2)^0.5", {}).eval(Env{}), DomainError);
    CHECK_THROWS_AS((void)parse_expression("exp(1000)", {}).eval(Env{}), DomainError);
    CHECK_THROWS_AS((void)parse_expression("x1", {"x1"}).eval({{"x2", 1.0}}), Error);
}

namespace {

ExprPtr random_tree(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_int_distribution<int> small(0, 9);
    switch (pick(rng)) {
    case 0: {
        const double v = static_cast<double>(small(rng)) / 2.0;
        return expr::constant(v);
    }
    case 1: return expr::variable(std::uniform_int_distribution<std::size_t>(0, 1)(rng));
    case 2: return expr::negate(random_tree(rng, depth - 1));
    case 3: return expr::binary(K::Add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 4: return expr::binary(K::Sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 5: return expr::binary(K::Mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 6: return expr::binary(K::Div, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 7: return expr::binary(K::Pow, random_tree(rng, depth - 1), expr::constant(std::uniform_int_distribution<int>(0, 3)(rng)));
    case 8: return expr::call(Func::Abs, {random_tree(rng, depth - 1)});
    default: return expr::call(Func::Max, {random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
    }
}

}  // namespace

TEST_CASE("printing then parsing preserves trees and values") {
    std::mt19937_64 rng(7);
    const std::vector<std::string> vars{"x1", "x2"};
    const double values[2] = {1.25, -0.75};
    for (int i = 0; i < 2000; ++i) {
        const ExprPtr tree = random_tree(rng, 5);
        const std::string printed = print_node(*tree, vars);
        const Expression back = parse_expression(printed, vars);
        INFO(printed);
        CHECK(expr::equal(*tree, *back.root()));
        CHECK(back.to_string() == printed);
        bool threw = false;
        double direct = 0;
        try {
            direct = eval_node(*tree, values);
        } catch (const DomainError&) {
            threw = true;
        }
        if (threw) {
            CHECK_THROWS_AS((void)back.eval(values), DomainError);
        } else {
            CHECK(back.eval(values) == direct);
        }
    }
}

TEST_CASE("pretty printing is idempotent on hand-written inputs") {
    for (const char* src : {"-0.2*sqrt(x1)", "0.1*(11-x1)", "a-(b-c)", "a/(b*c)", "(a^b)^c", "-(a+b)", "a^-b",
                            "abs(exp(sqrt(a))-exp(sqrt(b)))", "min(a,max(b,-c))", "-a^2", "(-a)^2"}) {
        const auto once = parse_expression(src, {"a", "b", "c", "x1"}).to_string();
        const auto twice = parse_expression(once, {"a", "b", "c", "x1"}).to_string();
        CHECK(once == twice);
    }
}

TEST_CASE("parser never fails with anything but ParseError on arbitrary bytes") {
    std::mt19937_64 rng(11);
    const std::string alphabet = "0123456789.eE+-*/^(), \txysqrtlogabminxcep\x01\xff";
    std::uniform_int_distribution<std::size_t> len(0, 24);
    for (int i = 0; i < 20000; ++i) {
        std::string s(len(rng), ' ');
        for (auto& ch : s) {
            if (rng() % 8 == 0) ch = static_cast<char>(rng() & 0xff);
            else ch = alphabet[rng() % alphabet.size()];
        }
        try {
            (void)parse_expression(s, {"x", "y"});
        } catch (const ParseError&) {
        } catch (const std::exception& e) {
            FAIL("unexpected exception for input '" << s << "': " << e.what());
        }
    }
}

TEST_CASE("partial derivatives") {
    const auto v = parse_expression("abs(exp(sqrt(x1))-exp(sqrt(y1)))", {"x1", "y1"});
    const double at[] = {4.0, 1.0};
    CHECK(v.partial(at, 0) == doctest::Approx(std::exp(2.0) / 4.0).epsilon(1e-15));
    CHECK(v.partial(at, 1) == doctest::Approx(-std::exp(1.0) / 2.0).epsilon(1e-15));
    const double swapped[] = {1.0, 4.0};
    CHECK(v.partial(swapped, 0) == doctest::Approx(-std::exp(1.0) / 2.0).epsilon(1e-15));

    const auto w = parse_expression("x1^3/x2 + log(x2)*sin(x1) - min(x1, x2) + x2^x1 + cos(2*x2)", {"x1", "x2"});
    const double p[] = {1.3, 0.7};
    const double x = 1.3, y = 0.7;
    CHECK(w.partial(p, 0) ==
          doctest::Approx(3 * x * x / y + std::log(y) * std::cos(x) - 0.0 + std::pow(y, x) * std::log(y)).epsilon(1e-14));
    CHECK(w.partial(p, 1) ==
          doctest::Approx(-x * x * x / (y * y) + std::sin(x) / y - 1.0 + x * std::pow(y, x - 1) - 2 * std::sin(2 * y))
              .epsilon(1e-14));
    const double zero[] = {0.0, 1.0};
    CHECK(parse_expression("abs(x1)", {"x1", "x2"}).partial(zero, 0) == 0.0);
    CHECK_THROWS_AS((void)parse_expression("sqrt(x1)", {"x1"}).partial(zero, 0), DomainError);
}

}
