#include "tow/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

namespace tow::expr {

namespace {

enum class Tok : std::uint8_t {
    Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End,
};

struct Token {
    Tok kind;
    std::size_t offset;
    double number = 0.0;
    std::string_view text;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }

    Token take() {
        Token t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        cur_.offset = pos_;
        if (pos_ >= src_.size()) {
            cur_.kind = Tok::End;
            return;
        }
        char c = src_[pos_];
        switch (c) {
        case '+': cur_.kind = Tok::Plus; ++pos_; return;
        case '-': cur_.kind = Tok::Minus; ++pos_; return;
        case '*': cur_.kind = Tok::Star; ++pos_; return;
        case '/': cur_.kind = Tok::Slash; ++pos_; return;
        case '^': cur_.kind = Tok::Caret; ++pos_; return;
        case '(': cur_.kind = Tok::LParen; ++pos_; return;
        case ')': cur_.kind = Tok::RParen; ++pos_; return;
        case ',': cur_.kind = Tok::Comma; ++pos_; return;
        default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t mark = pos_;
                ++pos_;
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                    ++pos_;
                if (pos_ < src_.size() &&
                    std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    while (pos_ < src_.size() &&
                           std::isdigit(static_cast<unsigned char>(src_[pos_])))
                        ++pos_;
                } else {
                    pos_ = mark; // bare 'e' is not part of the number
                }
            }
            cur_.kind = Tok::Number;
            cur_.text = src_.substr(start, pos_ - start);
            double v = 0.0;
            auto [p, ec] = std::from_chars(cur_.text.data(), cur_.text.data() + cur_.text.size(), v);
            if (ec != std::errc() || p != cur_.text.data() + cur_.text.size())
                throw SyntaxError(start, "a numeric literal");
            cur_.number = v;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   std::isalnum(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            cur_.kind = Tok::Ident;
            cur_.text = src_.substr(start, pos_ - start);
            return;
        }
        throw SyntaxError(pos_, "a token");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token cur_{};
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) {}

    Expr run() {
        int root = parse_sum();
        if (lex_.peek().kind != Tok::End)
            throw SyntaxError(lex_.peek().offset, "end of input or an operator");
        return Expr(std::move(nodes_), root);
    }

private:
    int add(Op op, std::uint32_t off, int a = -1, int b = -1, double v = 0.0) {
        nodes_.push_back(Node{op, v, a, b, off});
        return static_cast<int>(nodes_.size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_term();
        for (;;) {
            Tok k = lex_.peek().kind;
            if (k != Tok::Plus && k != Tok::Minus) return lhs;
            Token t = lex_.take();
            int rhs = parse_term();
            lhs = add(k == Tok::Plus ? Op::Add : Op::Sub,
                      static_cast<std::uint32_t>(t.offset), lhs, rhs);
        }
    }

    int parse_term() {
        int lhs = parse_factor();
        for (;;) {
            Tok k = lex_.peek().kind;
            if (k != Tok::Star && k != Tok::Slash) return lhs;
            Token t = lex_.take();
            int rhs = parse_factor();
            lhs = add(k == Tok::Star ? Op::Mul : Op::Div,
                      static_cast<std::uint32_t>(t.offset), lhs, rhs);
        }
    }

    // factor handles unary minus below ^, so -x^2 reads as -(x^2).
    int parse_factor() {
        if (lex_.peek().kind == Tok::Minus) {
            Token t = lex_.take();
            int arg = parse_factor();
            return add(Op::Neg, static_cast<std::uint32_t>(t.offset), arg);
        }
        return parse_power();
    }

    int parse_power() {
        int base = parse_atom();
        if (lex_.peek().kind == Tok::Caret) {
            Token t = lex_.take();
            int exp = parse_factor(); // right associative, allows 2^-3
            return add(Op::Pow, static_cast<std::uint32_t>(t.offset), base, exp);
        }
        return base;
    }

    int parse_atom() {
        const Token& p = lex_.peek();
        switch (p.kind) {
        case Tok::Number: {
            Token t = lex_.take();
            return add(Op::Lit, static_cast<std::uint32_t>(t.offset), -1, -1, t.number);
        }
        case Tok::LParen: {
            lex_.take();
            int inner = parse_sum();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::Ident: {
            Token t = lex_.take();
            auto off = static_cast<std::uint32_t>(t.offset);
            if (t.text == "x") return add(Op::VarX, off);
            if (t.text == "y") return add(Op::VarY, off);
            if (t.text == "abs" || t.text == "sqrt") {
                expect(Tok::LParen, "'('");
                int arg = parse_sum();
                expect(Tok::RParen, "')'");
                return add(t.text == "abs" ? Op::Abs : Op::Sqrt, off, arg);
            }
            if (t.text == "min" || t.text == "max") {
                expect(Tok::LParen, "'('");
                int a = parse_sum();
                expect(Tok::Comma, "','");
                int b = parse_sum();
                expect(Tok::RParen, "')'");
                return add(t.text == "min" ? Op::Min : Op::Max, off, a, b);
            }
            throw SyntaxError(t.offset, "one of x, y, abs, min, max, sqrt");
        }
        default:
            throw SyntaxError(p.offset, "a literal, variable, function, or '('");
        }
    }

    void expect(Tok kind, const char* what) {
        if (lex_.peek().kind != kind)
            throw SyntaxError(lex_.peek().offset, what);
        lex_.take();
    }

    Lexer lex_;
    std::vector<Node> nodes_;
};

int precedence(Op op) {
    switch (op) {
    case Op::Add: case Op::Sub: return 1;
    case Op::Mul: case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
    }
}

std::string format_literal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Expr Expr::parse(std::string_view src) {
    if (src.empty()) throw SyntaxError(0, "a nonempty expression");
    return Parser(src).run();
}

double Expr::eval(double x, double y) const {
    std::function<double(int)> go = [&](int i) -> double {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.op) {
        case Op::Lit: return n.value;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Add: return go(n.lhs) + go(n.rhs);
        case Op::Sub: return go(n.lhs) - go(n.rhs);
        case Op::Mul: return go(n.lhs) * go(n.rhs);
        case Op::Div: {
            double num = go(n.lhs);
            double den = go(n.rhs);
            if (den == 0.0) throw EvalError(EvalError::Kind::DivByZero, n.offset);
            return num / den;
        }
        case Op::Pow: return std::pow(go(n.lhs), go(n.rhs));
        case Op::Neg: return -go(n.lhs);
        case Op::Abs: return std::fabs(go(n.lhs));
        case Op::Sqrt: {
            double a = go(n.lhs);
            if (a < 0.0) throw EvalError(EvalError::Kind::NegativeSqrt, n.offset);
            return std::sqrt(a);
        }
        case Op::Min: return std::min(go(n.lhs), go(n.rhs));
        case Op::Max: return std::max(go(n.lhs), go(n.rhs));
        }
        return 0.0;
    };
    return go(root_);
}

std::string Expr::str() const {
    // need = minimum precedence a child may have without parentheses
    std::function<std::string(int, int)> go = [&](int i, int need) -> std::string {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        std::string out;
        int prec = precedence(n.op);
        switch (n.op) {
        case Op::Lit: out = format_literal(n.value); break;
        case Op::VarX: out = "x"; break;
        case Op::VarY: out = "y"; break;
        case Op::Add: out = go(n.lhs, 1) + " + " + go(n.rhs, 2); break;
        case Op::Sub: out = go(n.lhs, 1) + " - " + go(n.rhs, 2); break;
        case Op::Mul: out = go(n.lhs, 2) + " * " + go(n.rhs, 3); break;
        case Op::Div: out = go(n.lhs, 2) + " / " + go(n.rhs, 3); break;
        case Op::Neg: out = "-" + go(n.lhs, 3); break;
        case Op::Pow: out = go(n.lhs, 5) + "^" + go(n.rhs, 3); break;
        case Op::Abs: out = "abs(" + go(n.lhs, 0) + ")"; break;
        case Op::Sqrt: out = "sqrt(" + go(n.lhs, 0) + ")"; break;
        case Op::Min: out = "min(" + go(n.lhs, 0) + ", " + go(n.rhs, 0) + ")"; break;
        case Op::Max: out = "max(" + go(n.lhs, 0) + ", " + go(n.rhs, 0) + ")"; break;
        }
        if (prec < need &&
            n.op != Op::Abs && n.op != Op::Sqrt && n.op != Op::Min && n.op != Op::Max &&
            n.op != Op::Lit && n.op != Op::VarX && n.op != Op::VarY)
            return "(" + out + ")";
        return out;
    };
    return go(root_, 0);
}

bool Expr::same_structure(const Expr& other) const {
    std::function<bool(int, int)> eq = [&](int a, int b) -> bool {
        if (a < 0 || b < 0) return a == b;
        const Node& na = nodes_[static_cast<std::size_t>(a)];
        const Node& nb = other.nodes_[static_cast<std::size_t>(b)];
        if (na.op != nb.op) return false;
        if (na.op == Op::Lit && na.value != nb.value) return false;
        return eq(na.lhs, nb.lhs) && eq(na.rhs, nb.rhs);
    };
    return eq(root_, other.root_);
}

bool Expr::is_constant() const {
    for (const Node& n : nodes_)
        if (n.op == Op::VarX || n.op == Op::VarY) return false;
    return true;
}

double lipschitz_on(const Expr& e, std::span<const Vec> points) {
    if (points.size() < 2) throw TooFewNodes("lipschitz_on needs at least 2 nodes");
    std::vector<double> vals(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) vals[i] = e.eval(points[i]);
    double best = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            double d = dist(points[i], points[j]);
            if (d < 1e-15) continue;
            best = std::max(best, std::fabs(vals[i] - vals[j]) / d);
        }
    }
    return best;
}

} // namespace tow::expr
