#include "hho/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hho {

enum class Op { constant, x, y, add, sub, mul, div, pow, neg, sin, cos, exp };

struct Expression::Node {
    Op op = Op::constant;
    double value = 0.0;
    int exponent = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0, int exponent = 0)
{
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    n->value = value;
    n->exponent = exponent;
    return n;
}

NodePtr constant_node(double c) { return make(Op::constant, nullptr, nullptr, c); }

bool is_value(const NodePtr& n, double v) { return n->op == Op::constant && n->value == v; }

double eval_node(const Expression::Node& n, double x, double y)
{
    switch (n.op) {
    case Op::constant: return n.value;
    case Op::x: return x;
    case Op::y: return y;
    case Op::add: return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
    case Op::sub: return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
    case Op::mul: return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
    case Op::div: return eval_node(*n.a, x, y) / eval_node(*n.b, x, y);
    case Op::pow: {
        const double base = eval_node(*n.a, x, y);
        double r = 1.0;
        for (int i = 0; i < n.exponent; ++i) r *= base;
        return r;
    }
    case Op::neg: return -eval_node(*n.a, x, y);
    case Op::sin: return std::sin(eval_node(*n.a, x, y));
    case Op::cos: return std::cos(eval_node(*n.a, x, y));
    case Op::exp: return std::exp(eval_node(*n.a, x, y));
    }
    return 0.0;
}

// Constructors with constant folding and the usual 0/1 identities.
NodePtr add(NodePtr a, NodePtr b)
{
    if (a->op == Op::constant && b->op == Op::constant) return constant_node(a->value + b->value);
    if (is_value(a, 0.0)) return b;
    if (is_value(b, 0.0)) return a;
    return make(Op::add, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a)
{
    if (a->op == Op::constant) return constant_node(-a->value);
    if (a->op == Op::neg) return a->a;
    return make(Op::neg, std::move(a));
}

NodePtr sub(NodePtr a, NodePtr b)
{
    if (a->op == Op::constant && b->op == Op::constant) return constant_node(a->value - b->value);
    if (is_value(b, 0.0)) return a;
    if (is_value(a, 0.0)) return neg(std::move(b));
    return make(Op::sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b)
{
    if (a->op == Op::constant && b->op == Op::constant) return constant_node(a->value * b->value);
    if (is_value(a, 0.0) || is_value(b, 0.0)) return constant_node(0.0);
    if (is_value(a, 1.0)) return b;
    if (is_value(b, 1.0)) return a;
    if (b->op == Op::constant) std::swap(a, b);
    return make(Op::mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b)
{
    if (a->op == Op::constant && b->op == Op::constant) return constant_node(a->value / b->value);
    if (is_value(a, 0.0)) return constant_node(0.0);
    if (is_value(b, 1.0)) return a;
    return make(Op::div, std::move(a), std::move(b));
}

NodePtr power(NodePtr a, int n)
{
    if (n == 0) return constant_node(1.0);
    if (n == 1) return a;
    if (a->op == Op::constant) return constant_node(eval_node(*make(Op::pow, a, nullptr, 0.0, n), 0.0, 0.0));
    return make(Op::pow, std::move(a), nullptr, 0.0, n);
}

NodePtr unary(Op op, NodePtr a)
{
    if (a->op == Op::constant) return constant_node(eval_node(*make(op, a), 0.0, 0.0));
    return make(op, std::move(a));
}

NodePtr derive(const NodePtr& n, int var)
{
    switch (n->op) {
    case Op::constant: return constant_node(0.0);
    case Op::x: return constant_node(var == 0 ? 1.0 : 0.0);
    case Op::y: return constant_node(var == 1 ? 1.0 : 0.0);
    case Op::add: return add(derive(n->a, var), derive(n->b, var));
    case Op::sub: return sub(derive(n->a, var), derive(n->b, var));
    case Op::mul: return add(mul(derive(n->a, var), n->b), mul(n->a, derive(n->b, var)));
    case Op::div:
        return div(sub(mul(derive(n->a, var), n->b), mul(n->a, derive(n->b, var))), power(n->b, 2));
    case Op::pow:
        return mul(mul(constant_node(n->exponent), power(n->a, n->exponent - 1)), derive(n->a, var));
    case Op::neg: return neg(derive(n->a, var));
    case Op::sin: return mul(unary(Op::cos, n->a), derive(n->a, var));
    case Op::cos: return neg(mul(unary(Op::sin, n->a), derive(n->a, var)));
    case Op::exp: return mul(n, derive(n->a, var));
    }
    return constant_node(0.0);
}

void print(std::ostream& out, const Expression::Node& n)
{
    switch (n.op) {
    case Op::constant: {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, n.value);
        (void)ec;
        if (n.value < 0) out << '(' << std::string_view(buf, std::size_t(end - buf)) << ')';
        else out << std::string_view(buf, std::size_t(end - buf));
        return;
    }
    case Op::x: out << 'x'; return;
    case Op::y: out << 'y'; return;
    case Op::neg: out << "(-"; print(out, *n.a); out << ')'; return;
    case Op::sin: out << "sin("; print(out, *n.a); out << ')'; return;
    case Op::cos: out << "cos("; print(out, *n.a); out << ')'; return;
    case Op::exp: out << "exp("; print(out, *n.a); out << ')'; return;
    case Op::pow: out << '('; print(out, *n.a); out << ")^" << n.exponent; return;
    default: break;
    }
    const char sym = n.op == Op::add ? '+' : n.op == Op::sub ? '-' : n.op == Op::mul ? '*' : '/';
    out << '(';
    print(out, *n.a);
    out << ' ' << sym << ' ';
    print(out, *n.b);
    out << ')';
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr parse()
    {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ExpressionError(what, pos_); }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr()
    {
        NodePtr e = term();
        for (;;) {
            if (accept('+')) e = add(e, term());
            else if (accept('-')) e = sub(e, term());
            else return e;
        }
    }

    NodePtr term()
    {
        NodePtr e = signed_factor();
        for (;;) {
            if (accept('*')) e = mul(e, signed_factor());
            else if (accept('/')) e = div(e, signed_factor());
            else return e;
        }
    }

    NodePtr signed_factor()
    {
        if (accept('-')) return neg(signed_factor());
        NodePtr base = primary();
        if (accept('^')) {
            skip();
            int n = 0;
            auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), n);
            if (ec != std::errc() || n < 0) fail("expected a non-negative integer exponent");
            pos_ = std::size_t(end - s_.data());
            return power(base, n);
        }
        return base;
    }

    NodePtr primary()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc()) fail("malformed number");
            pos_ = std::size_t(end - s_.data());
            return constant_node(v);
        }
        if (accept('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string_view name = s_.substr(start, pos_ - start);
            if (name == "x" || name == "x1") return make(Op::x);
            if (name == "y" || name == "x2") return make(Op::y);
            if (name == "pi") return constant_node(std::numbers::pi);
            Op op;
            if (name == "sin") op = Op::sin;
            else if (name == "cos") op = Op::cos;
            else if (name == "exp") op = Op::exp;
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            expect('(');
            NodePtr arg = expr();
            expect(')');
            return unary(op, arg);
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : node_(constant_node(0.0)) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }
Expression Expression::constant(double c) { return Expression(constant_node(c)); }
Expression Expression::x() { return Expression(make(Op::x)); }
Expression Expression::y() { return Expression(make(Op::y)); }

double Expression::eval(double x, double y) const { return eval_node(*node_, x, y); }

Expression Expression::derivative(int variable) const
{
    if (variable != 0 && variable != 1) throw std::invalid_argument("derivative: variable must be 0 or 1");
    return Expression(derive(node_, variable));
}

Expression Expression::laplacian() const
{
    return Expression(add(derive(derive(node_, 0), 0), derive(derive(node_, 1), 1)));
}

bool Expression::is_constant() const { return node_->op == Op::constant; }

std::string Expression::str() const
{
    std::ostringstream out;
    print(out, *node_);
    return out.str();
}

ScalarFunction Expression::function() const
{
    return [node = node_](const Point& p) { return eval_node(*node, p.x(), p.y()); };
}

Expression operator+(const Expression& a, const Expression& b) { return Expression(add(a.node_, b.node_)); }
Expression operator-(const Expression& a, const Expression& b) { return Expression(sub(a.node_, b.node_)); }
Expression operator*(const Expression& a, const Expression& b) { return Expression(mul(a.node_, b.node_)); }
Expression operator/(const Expression& a, const Expression& b) { return Expression(div(a.node_, b.node_)); }
Expression operator-(const Expression& a) { return Expression(neg(a.node_)); }
Expression sin(const Expression& a) { return Expression(unary(Op::sin, a.node_)); }
Expression cos(const Expression& a) { return Expression(unary(Op::cos, a.node_)); }
Expression exp(const Expression& a) { return Expression(unary(Op::exp, a.node_)); }
Expression pow(const Expression& a, int n)
{
    if (n < 0) throw std::invalid_argument("pow: negative exponent");
    return Expression(power(a.node_, n));
}

}  // namespace hho
