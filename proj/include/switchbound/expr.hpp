#pragma once

// Scalar arithmetic expressions used for vector-field components, Lyapunov
// functions and class-K functions in configuration files.
//
// Grammar (whitespace insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: sqrt exp log abs sin cos (one argument), min max (two).

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace switchbound {

enum class Func { Sqrt, Exp, Log, Abs, Sin, Cos, Min, Max };

struct ExprNode {
    enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

    Kind kind = Kind::Const;
    double value = 0.0;     // Const
    std::size_t var = 0;    // Var: index into the variable list
    Func func = Func::Sqrt; // Call
    std::vector<std::shared_ptr<const ExprNode>> args;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

/// Immutable parsed expression over an ordered list of variable names.
class Expression {
public:
    Expression() = default;
    Expression(ExprPtr root, std::vector<std::string> vars);

    /// Evaluates with values given in variable-list order.
    /// Throws DomainError on sqrt/log/pow domain faults, division by zero, or overflow.
    [[nodiscard]] double eval(std::span<const double> values) const;
    [[nodiscard]] double eval(const std::map<std::string, double>& env) const;
    /// Partial derivative with respect to variable `var` by forward-mode differentiation.
    /// abs has derivative 0 at 0; min and max follow the selected argument.
    [[nodiscard]] double partial(std::span<const double> values, std::size_t var) const;

    [[nodiscard]] const ExprPtr& root() const noexcept { return root_; }
    [[nodiscard]] const std::vector<std::string>& variables() const noexcept { return vars_; }
    [[nodiscard]] bool empty() const noexcept { return root_ == nullptr; }

    /// Minimal-parenthesis rendering; parse(to_string()) rebuilds the same tree.
    [[nodiscard]] std::string to_string() const;

private:
    ExprPtr root_;
    std::vector<std::string> vars_;
};

/// Parses `source` over the variable names `vars`. Throws ParseError.
[[nodiscard]] Expression parse_expression(std::string_view source, std::vector<std::string> vars);

/// Evaluates a bare node tree (used by tests that build trees directly).
[[nodiscard]] double eval_node(const ExprNode& node, std::span<const double> values);

/// Renders a node tree with variable names.
[[nodiscard]] std::string print_node(const ExprNode& node, const std::vector<std::string>& vars);

/// Node constructors.
namespace expr {
[[nodiscard]] ExprPtr constant(double v);
[[nodiscard]] ExprPtr variable(std::size_t index);
[[nodiscard]] ExprPtr negate(ExprPtr a);
[[nodiscard]] ExprPtr binary(ExprNode::Kind kind, ExprPtr a, ExprPtr b);
[[nodiscard]] ExprPtr call(Func f, std::vector<ExprPtr> args);
[[nodiscard]] bool equal(const ExprNode& a, const ExprNode& b);
}  // namespace expr

}  // namespace switchbound
