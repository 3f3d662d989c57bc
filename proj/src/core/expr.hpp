#pragma once

#include <memory>
#include <string>

#include "group.hpp"

namespace hvar {

/// Closed-form scalar expression over a point of H^N. Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := primary ('^' unary)?         -- right associative, -x^2 = -(x^2)
///   primary:= number | ident | fn '(' expr (',' expr)* ')' | '(' expr ')'
/// Identifiers: x1..xN, y1..yN, t, knorm (x, y alias the first pair);
/// functions: sin, cos, exp, min, max. Parse errors carry the position.
class Expression {
public:
    static Expression parse(const std::string& text, int n);

    /// Evaluate at a point; division by zero or a non-finite intermediate
    /// raises a usage error naming the sample point.
    double eval(const GroupElement& p) const;

    const std::string& text() const { return text_; }

    struct Node;

private:
    Expression() = default;
    std::string text_;
    std::shared_ptr<const Node> root_;
    int n_ = 1;
};

}  // namespace hvar
