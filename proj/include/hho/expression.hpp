// Closed-form scalar expressions in (x, y) with symbolic differentiation.
//
// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' integer)?
//   primary := number | 'x' | 'x1' | 'y' | 'x2' | 'pi'
//            | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'

#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hho/space.hpp"

namespace hho {

class ExpressionError : public std::runtime_error {
public:
    ExpressionError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position)
    {
    }
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class Expression {
public:
    struct Node;

    Expression();  // the constant 0
    static Expression parse(std::string_view text);
    static Expression constant(double c);
    static Expression x();
    static Expression y();

    double eval(double x, double y) const;
    double operator()(const Point& p) const { return eval(p.x(), p.y()); }

    /// Partial derivative with respect to x (variable 0) or y (variable 1).
    Expression derivative(int variable) const;
    Expression laplacian() const;

    bool is_constant() const;
    std::string str() const;

    /// Callable sharing this expression tree.
    ScalarFunction function() const;

    friend Expression operator+(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a, const Expression& b);
    friend Expression operator*(const Expression& a, const Expression& b);
    friend Expression operator/(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a);
    friend Expression sin(const Expression& a);
    friend Expression cos(const Expression& a);
    friend Expression exp(const Expression& a);
    friend Expression pow(const Expression& a, int n);

private:
    explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

}  // namespace hho
