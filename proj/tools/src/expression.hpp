#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjfb::cli {

class ExpressionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arithmetic expression in the variables x and y.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses, numeric
/// literals, the constants pi and e, and the functions
/// sin cos tan exp log sqrt abs tanh min max pow.
class Expression {
public:
    /// Throws ExpressionError with the offending position.
    static Expression parse(const std::string& text);
    static Expression constant(double value);

    [[nodiscard]] double eval(double x, double y = 0.0) const;
    [[nodiscard]] bool uses_y() const noexcept { return uses_y_; }
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
    bool uses_y_ = false;
};

}  // namespace hjfb::cli
