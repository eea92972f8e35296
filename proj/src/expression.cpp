#include "porocontact/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string_view>
#include <vector>

namespace porocontact {

struct Expression::Node {
    enum class Kind { Number, X, Y, T, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos };
    Kind kind = Kind::Number;
    double value = 0.0;
    std::vector<std::shared_ptr<const Node>> args;
    int degree = 0;         // polynomial degree of the node
    bool transcendental = false;

    double eval(double x, double y, double t) const
    {
        switch (kind) {
        case Kind::Number: return value;
        case Kind::X: return x;
        case Kind::Y: return y;
        case Kind::T: return t;
        case Kind::Add: return args[0]->eval(x, y, t) + args[1]->eval(x, y, t);
        case Kind::Sub: return args[0]->eval(x, y, t) - args[1]->eval(x, y, t);
        case Kind::Mul: return args[0]->eval(x, y, t) * args[1]->eval(x, y, t);
        case Kind::Div: return args[0]->eval(x, y, t) / args[1]->eval(x, y, t);
        case Kind::Pow: return std::pow(args[0]->eval(x, y, t), args[1]->value);
        case Kind::Neg: return -args[0]->eval(x, y, t);
        case Kind::Sin: return std::sin(args[0]->eval(x, y, t));
        case Kind::Cos: return std::cos(args[0]->eval(x, y, t));
        }
        return 0.0;
    }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

constexpr int kMaxDegree = 2;

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse()
    {
        NodePtr root = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ExpressionError("expression '" + std::string(text_) + "': " + what + " at position " +
                              std::to_string(pos_));
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr make(Node::Kind kind, std::vector<NodePtr> args)
    {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->args = std::move(args);
        const auto& a = n->args;
        switch (kind) {
        case Node::Kind::Add:
        case Node::Kind::Sub:
            n->degree = std::max(a[0]->degree, a[1]->degree);
            n->transcendental = a[0]->transcendental || a[1]->transcendental;
            break;
        case Node::Kind::Mul:
            n->degree = a[0]->degree + a[1]->degree;
            n->transcendental = a[0]->transcendental || a[1]->transcendental;
            break;
        case Node::Kind::Div:
            if (a[1]->degree != 0 || a[1]->transcendental) fail("division by a non-constant");
            n->degree = a[0]->degree;
            n->transcendental = a[0]->transcendental;
            break;
        case Node::Kind::Neg:
            n->degree = a[0]->degree;
            n->transcendental = a[0]->transcendental;
            break;
        case Node::Kind::Sin:
        case Node::Kind::Cos:
            if (a[0]->degree > 1 || a[0]->transcendental) fail("sin/cos argument must be at most linear");
            n->degree = 0;
            n->transcendental = true;
            break;
        default:
            break;
        }
        if (n->degree > kMaxDegree) fail("polynomial degree exceeds 2");
        return n;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Node::Kind::Add, {lhs, term()});
            else if (accept('-')) lhs = make(Node::Kind::Sub, {lhs, term()});
            else return lhs;
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Node::Kind::Mul, {lhs, unary()});
            else if (accept('/')) lhs = make(Node::Kind::Div, {lhs, unary()});
            else return lhs;
        }
    }

    NodePtr unary()
    {
        if (accept('-')) return make(Node::Kind::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power()
    {
        NodePtr base = primary();
        if (!accept('^')) return base;
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("exponent must be a non-negative integer literal");
        const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
        if (base->transcendental && e > 2) fail("trigonometric power too high");
        auto exponent = std::make_shared<Node>();
        exponent->value = e;
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Pow;
        n->args = {base, exponent};
        n->degree = base->degree * e;
        n->transcendental = base->transcendental;
        if (n->degree > kMaxDegree) fail("polynomial degree exceeds 2");
        return n;
    }

    NodePtr primary()
    {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::string rest(text_.substr(pos_));
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(rest, &used);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += used;
            auto n = std::make_shared<Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            auto n = std::make_shared<Node>();
            if (name == "x" || name == "y" || name == "t") {
                n->kind = name == "x" ? Node::Kind::X : name == "y" ? Node::Kind::Y : Node::Kind::T;
                n->degree = 1;
                return n;
            }
            if (name == "pi") {
                n->value = std::numbers::pi;
                return n;
            }
            if (name == "sin" || name == "cos") {
                if (!accept('(')) fail("expected '(' after " + std::string(name));
                NodePtr arg = expr();
                if (!accept(')')) fail("expected ')'");
                return make(name == "sin" ? Node::Kind::Sin : Node::Kind::Cos, {arg});
            }
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : root_(std::make_shared<Node>()), text_("0") {}

Expression Expression::parse(const std::string& text)
{
    Expression e;
    e.root_ = Parser(text).parse();
    e.text_ = text;
    return e;
}

double Expression::operator()(double x, double y, double t) const
{
    return root_->eval(x, y, t);
}

bool Expression::is_zero_literal() const
{
    return root_->kind == Node::Kind::Number && root_->value == 0.0;
}

}  // namespace porocontact
