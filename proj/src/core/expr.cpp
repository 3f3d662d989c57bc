#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace hvar {

namespace {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Min, Max };

// Variable encoding: 0..N-1 = x_k, N..2N-1 = y_k, 2N = t, 2N+1 = knorm.
struct VarSlot {
    static int x(int k, int n) { (void)n; return k; }
    static int y(int k, int n) { return n + k; }
    static int t(int n) { return 2 * n; }
    static int knorm(int n) { return 2 * n + 1; }
};

}  // namespace

struct Expression::Node {
    Op op = Op::Const;
    double value = 0.0;  // Const
    int var = 0;         // Var
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_node(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

[[noreturn]] void parse_fail(const std::string& text, std::size_t pos, const std::string& what) {
    std::ostringstream msg;
    msg << "expression error at position " << pos << ": " << what << " in \"" << text << "\"";
    throw UsageError(msg.str());
}

class Parser {
public:
    Parser(const std::string& text, int n) : text_(text), n_(n) {}

    NodePtr run() {
        skip_ws();
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size()) parse_fail(text_, pos_, "unexpected trailing input");
        return e;
    }

private:
    const std::string& text_;
    int n_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) lhs = make_node(Op::Add, lhs, term());
            else if (eat('-')) lhs = make_node(Op::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (eat('*')) lhs = make_node(Op::Mul, lhs, factor());
            else if (eat('/')) lhs = make_node(Op::Div, lhs, factor());
            else return lhs;
        }
    }

    NodePtr factor() { return unary(); }

    // '^' binds tighter than unary minus: -x^2 parses as -(x^2).
    NodePtr unary() {
        if (eat('-')) return make_node(Op::Neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return make_node(Op::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) parse_fail(text_, pos_, "unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (eat('(')) {
            NodePtr e = expr();
            if (!eat(')')) parse_fail(text_, pos_, "missing ')'");
            return e;
        }
        parse_fail(text_, pos_, std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) parse_fail(text_, pos_, "malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::Const;
        n->value = v;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);

        if (name == "sin" || name == "cos" || name == "exp") {
            if (!eat('(')) parse_fail(text_, pos_, name + " expects '('");
            NodePtr a = expr();
            if (!eat(')')) parse_fail(text_, pos_, "missing ')'");
            return make_node(name == "sin" ? Op::Sin : name == "cos" ? Op::Cos : Op::Exp, a);
        }
        if (name == "min" || name == "max") {
            if (!eat('(')) parse_fail(text_, pos_, name + " expects '('");
            NodePtr a = expr();
            if (!eat(',')) parse_fail(text_, pos_, name + " expects two arguments");
            NodePtr b = expr();
            if (!eat(')')) parse_fail(text_, pos_, "missing ')'");
            return make_node(name == "min" ? Op::Min : Op::Max, a, b);
        }

        auto var_node = [](int slot) {
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::Var;
            n->var = slot;
            return NodePtr(n);
        };
        if (name == "t") return var_node(VarSlot::t(n_));
        if (name == "knorm") return var_node(VarSlot::knorm(n_));
        if (name == "x") return var_node(VarSlot::x(0, n_));
        if (name == "y") return var_node(VarSlot::y(0, n_));
        if ((name[0] == 'x' || name[0] == 'y') && name.size() > 1) {
            bool digits = true;
            for (std::size_t k = 1; k < name.size(); ++k)
                if (!std::isdigit(static_cast<unsigned char>(name[k]))) digits = false;
            if (digits) {
                const int k = std::atoi(name.c_str() + 1);
                if (k >= 1 && k <= n_)
                    return var_node(name[0] == 'x' ? VarSlot::x(k - 1, n_)
                                                   : VarSlot::y(k - 1, n_));
                parse_fail(text_, start, "component index out of range for N=" +
                                             std::to_string(n_));
            }
        }
        parse_fail(text_, start, "unknown identifier '" + name + "'");
    }
};

double eval_node(const Expression::Node& node, const GroupElement& p, const std::string& text) {
    auto sub = [&](const NodePtr& n) { return eval_node(*n, p, text); };
    switch (node.op) {
        case Op::Const: return node.value;
        case Op::Var: {
            const int n = p.dim();
            if (node.var < n) return p.x()(node.var);
            if (node.var < 2 * n) return p.y()(node.var - n);
            if (node.var == 2 * n) return p.t();
            return knorm(p);
        }
        case Op::Neg: return -sub(node.a);
        case Op::Add: return sub(node.a) + sub(node.b);
        case Op::Sub: return sub(node.a) - sub(node.b);
        case Op::Mul: return sub(node.a) * sub(node.b);
        case Op::Div: {
            const double den = sub(node.b);
            if (den == 0.0)
                throw UsageError("expression \"" + text + "\": division by zero at a sample point");
            return sub(node.a) / den;
        }
        case Op::Pow: return std::pow(sub(node.a), sub(node.b));
        case Op::Sin: return std::sin(sub(node.a));
        case Op::Cos: return std::cos(sub(node.a));
        case Op::Exp: return std::exp(sub(node.a));
        case Op::Min: return std::min(sub(node.a), sub(node.b));
        case Op::Max: return std::max(sub(node.a), sub(node.b));
    }
    throw UsageError("expression: corrupt syntax tree");
}

}  // namespace

Expression Expression::parse(const std::string& text, int n) {
    if (n < 1) throw UsageError("expression: N must be >= 1");
    Expression e;
    e.text_ = text;
    e.n_ = n;
    e.root_ = Parser(text, n).run();
    return e;
}

double Expression::eval(const GroupElement& p) const {
    if (!root_) throw UsageError("expression: evaluated before parsing");
    if (p.dim() != n_) throw UsageError("expression: dimension mismatch");
    const double v = eval_node(*root_, p, text_);
    if (!std::isfinite(v))
        throw UsageError("expression \"" + text_ + "\": non-finite value at a sample point");
    return v;
}

}  // namespace hvar
