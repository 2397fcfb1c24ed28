#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "pathsum/errors.hpp"

namespace pathsum::expr {

enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Exp, Sin, Cos, Sinh, Cosh, Sqrt, Log };

struct Node;
using ExprPtr = std::shared_ptr<const Node>;

// Immutable expression tree over one time variable `t`.
struct Node {
    Kind kind = Kind::Number;
    double number = 0.0;
    Func func = Func::Exp;
    ExprPtr lhs; // unary operand / call argument / binary left
    ExprPtr rhs; // binary right
};

// Syntax error carrying the byte offset into the source and what was expected there.
struct ParseError : InputError {
    std::size_t offset;
    std::string expected;
    ParseError(std::size_t off, std::string what_was_expected);
};

// Grammar: ^ (right-assoc) binds tighter than unary minus, then * /, then + -.
// Functions: exp, sin, cos, sinh, cosh, sqrt, log. Whitespace-insensitive.
ExprPtr parse(std::string_view src);

// IEEE double evaluation. Domain errors (division by zero, log of a non-positive
// value, sqrt of a negative, fractional power of a negative base) throw
// NumericError instead of producing a silent NaN.
double evaluate(const Node& e, double t);
inline double evaluate(const ExprPtr& e, double t) { return evaluate(*e, t); }

// Canonical printer with minimal parentheses; parse(to_string(parse(s)))
// yields the same tree as parse(s).
std::string to_string(const Node& e);
inline std::string to_string(const ExprPtr& e) { return to_string(*e); }

bool equal(const Node& a, const Node& b);
inline bool equal(const ExprPtr& a, const ExprPtr& b) { return equal(*a, *b); }

// Tree builders, mainly for tests and generated specs.
ExprPtr make_number(double v);
ExprPtr make_var();
ExprPtr make_neg(ExprPtr a);
ExprPtr make_binary(Kind op, ExprPtr a, ExprPtr b);
ExprPtr make_call(Func f, ExprPtr a);

} // namespace pathsum::expr
