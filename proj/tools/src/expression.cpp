#include "expression.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <numbers>
#include <utility>

namespace hjfb::cli {

struct Expression::Node {
    enum class Op { Num, X, Y, Add, Sub, Mul, Div, Pow, Neg, Call };
    Op op = Op::Num;
    double value = 0.0;
    std::string fn;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

struct FunctionInfo {
    const char* name;
    int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", 1}, {"cos", 1},  {"tan", 1}, {"exp", 1}, {"log", 1}, {"sqrt", 1},
    {"abs", 1}, {"tanh", 1}, {"min", 2}, {"max", 2}, {"pow", 2},
};

NodePtr make(Node::Op op, std::vector<NodePtr> args = {}, double value = 0.0, std::string fn = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    n->value = value;
    n->fn = std::move(fn);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse_all() {
        NodePtr n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return n;
    }

    bool uses_y = false;

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ExpressionError(what + " at position " + std::to_string(pos_) + " in '" + s_ + "'");
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Node::Op::Add, {lhs, term()});
            else if (accept('-')) lhs = make(Node::Op::Sub, {lhs, term()});
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Node::Op::Mul, {lhs, unary()});
            else if (accept('/')) lhs = make(Node::Op::Div, {lhs, unary()});
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Op::Neg, {unary()});
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Node::Op::Pow, {base, unary()});
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (accept('(')) {
            NodePtr n = expr();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character");
    }

    NodePtr number() {
        double v = 0.0;
        const char* begin = s_.data() + pos_;
        const auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
        if (ec != std::errc() || end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make(Node::Op::Num, {}, v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = s_.substr(start, pos_ - start);
        if (accept('(')) {
            for (const auto& f : kFunctions) {
                if (name != f.name) continue;
                std::vector<NodePtr> args{expr()};
                while (accept(',')) args.push_back(expr());
                if (!accept(')')) fail("expected ')' after arguments of " + name);
                if (static_cast<int>(args.size()) != f.arity) {
                    fail(name + " takes " + std::to_string(f.arity) + " argument(s)");
                }
                return make(Node::Op::Call, std::move(args), 0.0, name);
            }
            fail("unknown function '" + name + "'");
        }
        if (name == "x") return make(Node::Op::X);
        if (name == "y") {
            uses_y = true;
            return make(Node::Op::Y);
        }
        if (name == "pi") return make(Node::Op::Num, {}, std::numbers::pi);
        if (name == "e") return make(Node::Op::Num, {}, std::numbers::e);
        fail("unknown identifier '" + name + "'");
    }
};

double call(const std::string& fn, double a, double b) {
    if (fn == "sin") return std::sin(a);
    if (fn == "cos") return std::cos(a);
    if (fn == "tan") return std::tan(a);
    if (fn == "exp") return std::exp(a);
    if (fn == "log") return std::log(a);
    if (fn == "sqrt") return std::sqrt(a);
    if (fn == "abs") return std::abs(a);
    if (fn == "tanh") return std::tanh(a);
    if (fn == "min") return std::min(a, b);
    if (fn == "max") return std::max(a, b);
    return std::pow(a, b);
}

double evaluate(const Node& n, double x, double y) {
    auto arg = [&](std::size_t k) { return evaluate(*n.args[k], x, y); };
    switch (n.op) {
        case Node::Op::Num: return n.value;
        case Node::Op::X: return x;
        case Node::Op::Y: return y;
        case Node::Op::Add: return arg(0) + arg(1);
        case Node::Op::Sub: return arg(0) - arg(1);
        case Node::Op::Mul: return arg(0) * arg(1);
        case Node::Op::Div: return arg(0) / arg(1);
        case Node::Op::Pow: return std::pow(arg(0), arg(1));
        case Node::Op::Neg: return -arg(0);
        case Node::Op::Call: return call(n.fn, arg(0), n.args.size() > 1 ? arg(1) : 0.0);
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
    Parser p(text);
    Expression e;
    e.root_ = p.parse_all();
    e.text_ = text;
    e.uses_y_ = p.uses_y;
    return e;
}

Expression Expression::constant(double value) {
    Expression e;
    e.root_ = make(Node::Op::Num, {}, value);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    e.text_ = buf;
    return e;
}

double Expression::eval(double x, double y) const { return evaluate(*root_, x, y); }

}  // namespace hjfb::cli
