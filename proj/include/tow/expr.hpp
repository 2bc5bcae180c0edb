#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tow/errors.hpp"
#include "tow/vec.hpp"

namespace tow::expr {

struct SyntaxError : Error {
    SyntaxError(std::size_t offset_, std::string expected_)
        : Error("syntax error at offset " + std::to_string(offset_) +
                ", expected " + expected_),
          offset(offset_), expected(std::move(expected_)) {}
    std::size_t offset;
    std::string expected;
};

struct EvalError : Error {
    enum class Kind { DivByZero, NegativeSqrt };
    EvalError(Kind kind_, std::size_t offset_)
        : Error(std::string(kind_ == Kind::DivByZero ? "division by zero"
                                                     : "sqrt of negative value") +
                " at offset " + std::to_string(offset_)),
          kind(kind_), offset(offset_) {}
    Kind kind;
    std::size_t offset;
};

enum class Op : std::uint8_t {
    Lit, VarX, VarY,
    Add, Sub, Mul, Div, Pow,
    Neg, Abs, Sqrt,
    Min, Max,
};

struct Node {
    Op op;
    double value = 0.0;   // Lit only
    int lhs = -1;
    int rhs = -1;
    std::uint32_t offset = 0; // byte offset of the token that produced this node
};

/// Parsed arithmetic expression over variables x, y.
///
/// Grammar: + - * / ^, unary minus, abs/min/max/sqrt, parentheses.
/// ^ binds tightest and is right-associative; + - * / associate left.
class Expr {
public:
    static Expr parse(std::string_view src);

    double eval(double x, double y) const;
    double eval(Vec p) const { return eval(p[0], p[1]); }

    /// Prints with minimal parentheses; parse(str()) reproduces the tree.
    std::string str() const;

    bool same_structure(const Expr& other) const;

    /// True when the expression references neither x nor y.
    bool is_constant() const;

    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }

    // Direct construction, used by tests and random generators.
    Expr(std::vector<Node> nodes, int root) : nodes_(std::move(nodes)), root_(root) {}
    Expr() = default;

private:
    std::vector<Node> nodes_;
    int root_ = -1;
};

/// Discrete Lipschitz constant of e over the sampled points:
/// max over pairs of |e(p) - e(q)| / |p - q|.
double lipschitz_on(const Expr& e, std::span<const Vec> points);

} // namespace tow::expr
