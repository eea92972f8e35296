#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace porocontact {

class ExpressionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Analytic data expression in x, y and t. Accepted grammar:
///   numbers, pi, x, y, t, + - * / ^, parentheses, sin(.), cos(.)
/// with these restrictions: polynomial parts have total degree <= 2,
/// exponents are non-negative integer literals, divisors are constants, and
/// sin/cos arguments are at most linear.
class Expression {
public:
    Expression();  // identically zero
    static Expression parse(const std::string& text);

    double operator()(double x, double y, double t) const;
    const std::string& text() const { return text_; }
    bool is_zero_literal() const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace porocontact
