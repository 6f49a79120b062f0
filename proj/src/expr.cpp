#include "switchbound/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include "switchbound/error.hpp"

namespace switchbound {

namespace {

struct FuncInfo {
    std::string_view name;
    Func func;
    std::size_t arity;
};

constexpr std::array<FuncInfo, 8> kFunctions{{
    {"sqrt", Func::Sqrt, 1},
    {"exp", Func::Exp, 1},
    {"log", Func::Log, 1},
    {"abs", Func::Abs, 1},
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
}};

const FuncInfo& info(Func f) {
    for (const auto& fi : kFunctions)
        if (fi.func == f) return fi;
    return kFunctions.front();
}

constexpr std::size_t kMaxDepth = 200;

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    ExprPtr parse() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ < src_.size())
            throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : parser(p) {
            if (++parser.depth_ > kMaxDepth) throw ParseError("expression nested too deeply", parser.pos_);
        }
        ~DepthGuard() { --parser.depth_; }
        Parser& parser;
    };

    ExprPtr parse_expr() {
        DepthGuard guard(*this);
        ExprPtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = expr::binary(ExprNode::Kind::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = expr::binary(ExprNode::Kind::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = expr::binary(ExprNode::Kind::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = expr::binary(ExprNode::Kind::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    ExprPtr parse_unary() {
        DepthGuard guard(*this);
        if (accept('-')) return expr::negate(parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (accept('^')) return expr::binary(ExprNode::Kind::Pow, base, parse_unary());
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (is_digit(c) || c == '.') return parse_number();
        if (is_ident_start(c)) return parse_identifier();
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        std::size_t i = pos_;
        bool digits = false;
        while (i < src_.size() && is_digit(src_[i])) ++i, digits = true;
        if (i < src_.size() && src_[i] == '.') {
            ++i;
            while (i < src_.size() && is_digit(src_[i])) ++i, digits = true;
        }
        if (!digits) throw ParseError("malformed number", start);
        if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
            std::size_t j = i + 1;
            if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
            if (j >= src_.size() || !is_digit(src_[j])) throw ParseError("malformed exponent", i);
            while (j < src_.size() && is_digit(src_[j])) ++j;
            i = j;
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + i, value);
        if (ec != std::errc{} || ptr != src_.data() + i || !std::isfinite(value))
            throw ParseError("number out of range", start);
        pos_ = i;
        return expr::constant(value);
    }

    ExprPtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            auto it = std::find_if(kFunctions.begin(), kFunctions.end(),
                                   [&](const FuncInfo& fi) { return fi.name == name; });
            if (it == kFunctions.end()) throw ParseError("unknown function '" + std::string(name) + "'", start);
            ++pos_;
            std::vector<ExprPtr> args;
            if (!accept(')')) {
                do {
                    args.push_back(parse_expr());
                } while (accept(','));
                if (!accept(')')) throw ParseError("expected ')'", pos_);
            }
            if (args.size() != it->arity)
                throw ParseError("function '" + std::string(name) + "' expects " + std::to_string(it->arity) +
                                     " argument(s), got " + std::to_string(args.size()),
                                 start);
            return expr::call(it->func, std::move(args));
        }
        for (std::size_t k = 0; k < vars_.size(); ++k)
            if (vars_[k] == name) return expr::variable(k);
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
    std::size_t depth_ = 0;
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double power(double x, double y) {
    if (y == std::floor(y) && std::abs(y) <= 64.0) {
        const int n = static_cast<int>(std::abs(y));
        double r = 1.0;
        for (int k = 0; k < n; ++k) r *= x;
        if (y < 0) {
            if (r == 0.0) throw DomainError("division by zero in '^'");
            r = 1.0 / r;
        }
        return checked(r, "'^'");
    }
    if (y == std::floor(y)) return checked(std::pow(x, y), "'^'");
    if (x < 0) throw DomainError("negative base with non-integer exponent in '^'");
    if (x == 0) {
        if (y < 0) throw DomainError("division by zero in '^'");
        return 0.0;
    }
    return checked(std::exp(y * std::log(x)), "'^'");
}

int precedence(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::Add:
        case ExprNode::Kind::Sub: return 1;
        case ExprNode::Kind::Mul:
        case ExprNode::Kind::Div: return 2;
        case ExprNode::Kind::Neg: return 3;
        case ExprNode::Kind::Pow: return 4;
        case ExprNode::Kind::Const: return n.value < 0 ? 0 : 5;
        default: return 5;
    }
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

void print_into(const ExprNode& n, const std::vector<std::string>& vars, std::string& out);

void print_child(const ExprNode& child, bool parens, const std::vector<std::string>& vars,
                 std::string& out) {
    if (parens) out += '(';
    print_into(child, vars, out);
    if (parens) out += ')';
}

void print_into(const ExprNode& n, const std::vector<std::string>& vars, std::string& out) {
    using K = ExprNode::Kind;
    switch (n.kind) {
        case K::Const: out += format_number(n.value); return;
        case K::Var:
            out += n.var < vars.size() ? vars[n.var] : "x" + std::to_string(n.var + 1);
            return;
        case K::Neg:
            out += '-';
            print_child(*n.args[0], precedence(*n.args[0]) < 3, vars, out);
            return;
        case K::Pow:
            print_child(*n.args[0], precedence(*n.args[0]) <= 4, vars, out);
            out += '^';
            print_child(*n.args[1], precedence(*n.args[1]) < 3, vars, out);
            return;
        case K::Add:
        case K::Sub:
        case K::Mul:
        case K::Div: {
            const int p = precedence(n);
            print_child(*n.args[0], precedence(*n.args[0]) < p, vars, out);
            out += n.kind == K::Add ? " + " : n.kind == K::Sub ? " - " : n.kind == K::Mul ? "*" : "/";
            // Right operands at equal precedence keep their parentheses so the
            // tree shape (and hence the floating-point result) survives a reparse.
            print_child(*n.args[1], precedence(*n.args[1]) <= p, vars, out);
            return;
        }
        case K::Call: {
            out += info(n.func).name;
            out += '(';
            for (std::size_t k = 0; k < n.args.size(); ++k) {
                if (k) out += ", ";
                print_into(*n.args[k], vars, out);
            }
            out += ')';
            return;
        }
    }
}

}  // namespace

namespace expr {

ExprPtr constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Const;
    n->value = v;
    return n;
}

ExprPtr variable(std::size_t index) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Var;
    n->var = index;
    return n;
}

ExprPtr negate(ExprPtr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Neg;
    n->args.push_back(std::move(a));
    return n;
}

ExprPtr binary(ExprNode::Kind kind, ExprPtr a, ExprPtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return n;
}

ExprPtr call(Func f, std::vector<ExprPtr> args) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Call;
    n->func = f;
    n->args = std::move(args);
    return n;
}

bool equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    switch (a.kind) {
        case ExprNode::Kind::Const: return a.value == b.value;
        case ExprNode::Kind::Var: return a.var == b.var;
        case ExprNode::Kind::Call:
            if (a.func != b.func) return false;
            break;
        default: break;
    }
    for (std::size_t k = 0; k < a.args.size(); ++k)
        if (!equal(*a.args[k], *b.args[k])) return false;
    return true;
}

}  // namespace expr

double eval_node(const ExprNode& n, std::span<const double> values) {
    using K = ExprNode::Kind;
    switch (n.kind) {
        case K::Const: return n.value;
        case K::Var:
            if (n.var >= values.size()) throw DomainError("unbound variable");
            return values[n.var];
        case K::Neg: return -eval_node(*n.args[0], values);
        case K::Add: return checked(eval_node(*n.args[0], values) + eval_node(*n.args[1], values), "'+'");
        case K::Sub: return checked(eval_node(*n.args[0], values) - eval_node(*n.args[1], values), "'-'");
        case K::Mul: return checked(eval_node(*n.args[0], values) * eval_node(*n.args[1], values), "'*'");
        case K::Div: {
            const double num = eval_node(*n.args[0], values);
            const double den = eval_node(*n.args[1], values);
            if (den == 0.0) throw DomainError("division by zero");
            return checked(num / den, "'/'");
        }
        case K::Pow: return power(eval_node(*n.args[0], values), eval_node(*n.args[1], values));
        case K::Call: {
            const double a = eval_node(*n.args[0], values);
            switch (n.func) {
                case Func::Sqrt:
                    if (a < 0) throw DomainError("sqrt of negative value " + format_number(a));
                    return std::sqrt(a);
                case Func::Exp: return checked(std::exp(a), "exp");
                case Func::Log:
                    if (a <= 0) throw DomainError("log of nonpositive value " + format_number(a));
                    return std::log(a);
                case Func::Abs: return std::abs(a);
                case Func::Sin: return checked(std::sin(a), "sin");
                case Func::Cos: return checked(std::cos(a), "cos");
                case Func::Min: return std::min(a, eval_node(*n.args[1], values));
                case Func::Max: return std::max(a, eval_node(*n.args[1], values));
            }
        }
    }
    throw DomainError("corrupt expression node");
}

namespace {

struct Dual {
    double v;
    double d;
};

Dual eval_dual(const ExprNode& n, std::span<const double> values, std::size_t wrt) {
    using K = ExprNode::Kind;
    switch (n.kind) {
        case K::Const: return {n.value, 0.0};
        case K::Var:
            if (n.var >= values.size()) throw DomainError("unbound variable");
            return {values[n.var], n.var == wrt ? 1.0 : 0.0};
        case K::Neg: {
            const Dual a = eval_dual(*n.args[0], values, wrt);
            return {-a.v, -a.d};
        }
        case K::Add:
        case K::Sub:
        case K::Mul:
        case K::Div:
        case K::Pow: {
            const Dual a = eval_dual(*n.args[0], values, wrt);
            const Dual b = eval_dual(*n.args[1], values, wrt);
            switch (n.kind) {
                case K::Add: return {a.v + b.v, a.d + b.d};
                case K::Sub: return {a.v - b.v, a.d - b.d};
                case K::Mul: return {a.v * b.v, a.d * b.v + a.v * b.d};
                case K::Div:
                    if (b.v == 0.0) throw DomainError("division by zero");
                    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
                default: break;
            }
            const double v = power(a.v, b.v);
            if (b.d == 0.0) return {v, a.d == 0.0 ? 0.0 : b.v * power(a.v, b.v - 1.0) * a.d};
            if (a.v <= 0) throw DomainError("derivative of a variable exponent needs a positive base");
            return {v, v * (b.d * std::log(a.v) + b.v * a.d / a.v)};
        }
        case K::Call: {
            const Dual a = eval_dual(*n.args[0], values, wrt);
            switch (n.func) {
                case Func::Sqrt: {
                    if (a.v < 0) throw DomainError("sqrt of negative value " + format_number(a.v));
                    const double r = std::sqrt(a.v);
                    if (a.d == 0.0) return {r, 0.0};
                    if (r == 0.0) throw DomainError("sqrt is not differentiable at 0");
                    return {r, a.d / (2.0 * r)};
                }
                case Func::Exp: {
                    const double e = checked(std::exp(a.v), "exp");
                    return {e, e * a.d};
                }
                case Func::Log:
                    if (a.v <= 0) throw DomainError("log of nonpositive value " + format_number(a.v));
                    return {std::log(a.v), a.d / a.v};
                case Func::Abs: return {std::abs(a.v), a.v > 0 ? a.d : a.v < 0 ? -a.d : 0.0};
                case Func::Sin: return {std::sin(a.v), std::cos(a.v) * a.d};
                case Func::Cos: return {std::cos(a.v), -std::sin(a.v) * a.d};
                case Func::Min:
                case Func::Max: {
                    const Dual b = eval_dual(*n.args[1], values, wrt);
                    const bool first = n.func == Func::Min ? a.v <= b.v : a.v >= b.v;
                    return first ? a : b;
                }
            }
        }
    }
    throw DomainError("corrupt expression node");
}

}  // namespace

std::string print_node(const ExprNode& node, const std::vector<std::string>& vars) {
    std::string out;
    print_into(node, vars, out);
    return out;
}

Expression::Expression(ExprPtr root, std::vector<std::string> vars)
    : root_(std::move(root)), vars_(std::move(vars)) {}

double Expression::partial(std::span<const double> values, std::size_t var) const {
    if (!root_) throw DomainError("evaluating an empty expression");
    if (values.size() < vars_.size()) throw DomainError("too few variable values");
    return checked(eval_dual(*root_, values, var).d, "derivative");
}

double Expression::eval(std::span<const double> values) const {
    if (!root_) throw DomainError("evaluating an empty expression");
    if (values.size() < vars_.size()) throw DomainError("too few variable values");
    return checked(eval_node(*root_, values), "expression");
}

double Expression::eval(const std::map<std::string, double>& env) const {
    std::vector<double> values;
    values.reserve(vars_.size());
    for (const auto& name : vars_) {
        auto it = env.find(name);
        if (it == env.end()) throw DomainError("variable '" + name + "' is not bound");
        values.push_back(it->second);
    }
    return eval(values);
}

std::string Expression::to_string() const { return root_ ? print_node(*root_, vars_) : std::string{}; }

Expression parse_expression(std::string_view source, std::vector<std::string> vars) {
    Parser parser(source, vars);
    ExprPtr root = parser.parse();
    return Expression(std::move(root), std::move(vars));
}

}  // namespace switchbound
