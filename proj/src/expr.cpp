#include "pathsum/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>

namespace pathsum::expr {

namespace {

struct FuncName {
    const char* name;
    Func func;
};

constexpr std::array<FuncName, 7> kFuncs = {{
    {"exp", Func::Exp},
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"sinh", Func::Sinh},
    {"cosh", Func::Cosh},
    {"sqrt", Func::Sqrt},
    {"log", Func::Log},
}};

const char* func_name(Func f) {
    for (const auto& fn : kFuncs)
        if (fn.func == f) return fn.name;
    return "?";
}

ExprPtr node(Node n) { return std::make_shared<const Node>(std::move(n)); }

struct Parser {
    std::string_view src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' ||
                                    src[pos] == '\n' || src[pos] == '\r'))
            ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= src.size();
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    bool consume(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(std::size_t at, std::string expected) {
        throw ParseError(at, std::move(expected));
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        while (true) {
            if (consume('+')) {
                lhs = make_binary(Kind::Add, lhs, parse_term());
            } else if (consume('-')) {
                lhs = make_binary(Kind::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        while (true) {
            if (consume('*')) {
                lhs = make_binary(Kind::Mul, lhs, parse_unary());
            } else if (consume('/')) {
                lhs = make_binary(Kind::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_unary() {
        if (consume('-')) return make_neg(parse_unary());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (consume('^')) return make_binary(Kind::Pow, base, parse_unary());
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos >= src.size())
            fail(pos, "a number, 't', a function name, or '('");
        const char c = src[pos];

        if (c == '(') {
            ++pos;
            ExprPtr inner = parse_expr();
            if (!consume(')')) fail(pos, "')'");
            return inner;
        }

        if ((c >= '0' && c <= '9') || c == '.') {
            double v = 0.0;
            const char* begin = src.data() + pos;
            const char* end = src.data() + src.size();
            auto res = std::from_chars(begin, end, v);
            if (res.ec != std::errc{} || res.ptr == begin) fail(pos, "a number");
            pos += static_cast<std::size_t>(res.ptr - begin);
            return make_number(v);
        }

        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            const std::size_t start = pos;
            while (pos < src.size() &&
                   ((src[pos] >= 'a' && src[pos] <= 'z') ||
                    (src[pos] >= 'A' && src[pos] <= 'Z') ||
                    (src[pos] >= '0' && src[pos] <= '9') || src[pos] == '_'))
                ++pos;
            std::string_view ident = src.substr(start, pos - start);
            if (ident == "t") return make_var();
            for (const auto& fn : kFuncs) {
                if (ident == fn.name) {
                    if (!consume('(')) fail(pos, "'(' after function name");
                    ExprPtr arg = parse_expr();
                    if (!consume(')')) fail(pos, "')'");
                    return make_call(fn.func, arg);
                }
            }
            fail(start, "unknown identifier '" + std::string(ident) + "'");
        }

        fail(pos, "a number, 't', a function name, or '('");
    }
};

double eval_call(Func f, double v) {
    switch (f) {
        case Func::Exp: return std::exp(v);
        case Func::Sin: return std::sin(v);
        case Func::Cos: return std::cos(v);
        case Func::Sinh: return std::sinh(v);
        case Func::Cosh: return std::cosh(v);
        case Func::Sqrt:
            if (v < 0.0) throw NumericError("sqrt of a negative value");
            return std::sqrt(v);
        case Func::Log:
            if (v <= 0.0) throw NumericError("log of a non-positive value");
            return std::log(v);
    }
    throw NumericError("unknown function");
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Precedence levels used by the printer: add/sub 1, mul/div 2, neg 3, pow 4, atoms 5.
int precedence(const Node& e) {
    switch (e.kind) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        case Kind::Number: return e.number < 0.0 ? 3 : 5;
        default: return 5;
    }
}

void print(const Node& e, std::string& out);

void print_child(const Node& child, int min_prec, std::string& out) {
    if (precedence(child) < min_prec) {
        out += '(';
        print(child, out);
        out += ')';
    } else {
        print(child, out);
    }
}

void print(const Node& e, std::string& out) {
    switch (e.kind) {
        case Kind::Number:
            out += format_number(e.number);
            return;
        case Kind::Var:
            out += 't';
            return;
        case Kind::Neg:
            out += '-';
            print_child(*e.lhs, 3, out);
            return;
        case Kind::Add:
            print_child(*e.lhs, 1, out);
            out += '+';
            print_child(*e.rhs, 2, out);
            return;
        case Kind::Sub:
            print_child(*e.lhs, 1, out);
            out += '-';
            print_child(*e.rhs, 2, out);
            return;
        case Kind::Mul:
            print_child(*e.lhs, 2, out);
            out += '*';
            print_child(*e.rhs, 3, out);
            return;
        case Kind::Div:
            print_child(*e.lhs, 2, out);
            out += '/';
            print_child(*e.rhs, 3, out);
            return;
        case Kind::Pow:
            print_child(*e.lhs, 5, out);
            out += '^';
            print_child(*e.rhs, 3, out);
            return;
        case Kind::Call:
            out += func_name(e.func);
            out += '(';
            print(*e.lhs, out);
            out += ')';
            return;
    }
}

} // namespace

ParseError::ParseError(std::size_t off, std::string what_was_expected)
    : InputError("syntax error at byte " + std::to_string(off) + ": expected " +
                 what_was_expected),
      offset(off),
      expected(std::move(what_was_expected)) {}

ExprPtr parse(std::string_view src) {
    Parser p{src};
    ExprPtr e = p.parse_expr();
    if (!p.at_end()) p.fail(p.pos, "an operator or end of input");
    return e;
}

double evaluate(const Node& e, double t) {
    switch (e.kind) {
        case Kind::Number: return e.number;
        case Kind::Var: return t;
        case Kind::Neg: return -evaluate(*e.lhs, t);
        case Kind::Add: return evaluate(*e.lhs, t) + evaluate(*e.rhs, t);
        case Kind::Sub: return evaluate(*e.lhs, t) - evaluate(*e.rhs, t);
        case Kind::Mul: return evaluate(*e.lhs, t) * evaluate(*e.rhs, t);
        case Kind::Div: {
            const double denom = evaluate(*e.rhs, t);
            if (denom == 0.0) throw NumericError("division by zero");
            return evaluate(*e.lhs, t) / denom;
        }
        case Kind::Pow: {
            const double base = evaluate(*e.lhs, t);
            const double expo = evaluate(*e.rhs, t);
            if (base == 0.0 && expo < 0.0)
                throw NumericError("zero raised to a negative power");
            if (base < 0.0 && expo != std::floor(expo))
                throw NumericError("fractional power of a negative base");
            return std::pow(base, expo);
        }
        case Kind::Call: return eval_call(e.func, evaluate(*e.lhs, t));
    }
    throw NumericError("unknown expression node");
}

std::string to_string(const Node& e) {
    std::string out;
    print(e, out);
    return out;
}

bool equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Kind::Number: return a.number == b.number;
        case Kind::Var: return true;
        case Kind::Neg: return equal(*a.lhs, *b.lhs);
        case Kind::Call: return a.func == b.func && equal(*a.lhs, *b.lhs);
        default: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    }
}

ExprPtr make_number(double v) {
    Node n;
    n.kind = Kind::Number;
    n.number = v;
    return node(std::move(n));
}

ExprPtr make_var() {
    Node n;
    n.kind = Kind::Var;
    return node(std::move(n));
}

ExprPtr make_neg(ExprPtr a) {
    Node n;
    n.kind = Kind::Neg;
    n.lhs = std::move(a);
    return node(std::move(n));
}

ExprPtr make_binary(Kind op, ExprPtr a, ExprPtr b) {
    Node n;
    n.kind = op;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return node(std::move(n));
}

ExprPtr make_call(Func f, ExprPtr a) {
    Node n;
    n.kind = Kind::Call;
    n.func = f;
    n.lhs = std::move(a);
    return node(std::move(n));
}

} // namespace pathsum::expr
