#include <doctest.h>

#include <cmath>
#include <vector>

#include "tow/expr.hpp"
#include "tow/rng.hpp"

using tow::Vec;
using tow::expr::Expr;
using tow::expr::Node;
using tow::expr::Op;

TEST_CASE("single variable") {
    Expr e = Expr::parse("x");
    CHECK(e.eval(0.25, 0.9) == 0.25);
    CHECK(!e.is_constant());
}

TEST_CASE("abs sum") {
    Expr e = Expr::parse("abs(x) + abs(y)");
    CHECK(e.eval(-1, 2) == 3);
}

TEST_CASE("min times literal") {
    Expr e = Expr::parse("min(x, y) * 4");
    CHECK(e.eval(0.5, 0.25) == 1.0);
}

TEST_CASE("nested max structure") {
    Expr e = Expr::parse("max(0, 1 - abs(y - 0.5))");
    CHECK(e.eval(0, 0.5) == 1.0);
    CHECK(e.eval(0, 2.0) == 0.0);
    CHECK(e.eval(3, 0.25) == 0.75);
}

TEST_CASE("power is right associative") {
    CHECK(Expr::parse("2^3^2").eval(0, 0) == 512.0);
    CHECK(Expr::parse("(2^3)^2").eval(0, 0) == 64.0);
}

TEST_CASE("unary minus binds looser than power") {
    CHECK(Expr::parse("-x^2").eval(3, 0) == -9.0);
    CHECK(Expr::parse("(-x)^2").eval(3, 0) == 9.0);
    CHECK(Expr::parse("2^-2").eval(0, 0) == 0.25);
}

TEST_CASE("precedence and associativity") {
    CHECK(Expr::parse("2 + 3 * 4").eval(0, 0) == 14.0);
    CHECK(Expr::parse("10 - 4 - 3").eval(0, 0) == 3.0);
    CHECK(Expr::parse("16 / 4 / 2").eval(0, 0) == 2.0);
    CHECK(Expr::parse("1 - x*1000").eval(0, 7) == 1.0);
}

TEST_CASE("sqrt") {
    CHECK(Expr::parse("sqrt(x*x)").eval(-3, 0) == 3.0);
}

TEST_CASE("syntax errors carry offsets") {
    CHECK_THROWS_AS(Expr::parse("x +"), tow::expr::SyntaxError);
    try {
        Expr::parse("x +");
    } catch (const tow::expr::SyntaxError& e) {
        CHECK(e.offset == 3);
    }
    CHECK_THROWS_AS(Expr::parse(""), tow::expr::SyntaxError);
    CHECK_THROWS_AS(Expr::parse("foo(1)"), tow::expr::SyntaxError);
    CHECK_THROWS_AS(Expr::parse("min(x)"), tow::expr::SyntaxError);
    CHECK_THROWS_AS(Expr::parse("(x"), tow::expr::SyntaxError);
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(Expr::parse("1 / (x - x)").eval(1, 0), tow::expr::EvalError);
    CHECK_THROWS_AS(Expr::parse("sqrt(0 - 1)").eval(0, 0), tow::expr::EvalError);
}

TEST_CASE("is_constant") {
    CHECK(Expr::parse("1").is_constant());
    CHECK(Expr::parse("2 * (3 + 1)").is_constant());
    CHECK(!Expr::parse("y").is_constant());
}

namespace {

// random AST for round-trip checks
int gen(std::vector<Node>& nodes, const tow::CounterRng& rng, std::uint64_t& ctr, int depth) {
    auto add = [&](Node n) {
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    };
    std::uint64_t d = rng.draw(ctr++);
    if (depth >= 5 || d % 3 == 0) {
        switch (d % 4) {
        case 0: return add({Op::VarX});
        case 1: return add({Op::VarY});
        default: {
            Node n{Op::Lit};
            n.value = static_cast<double>(rng.draw(ctr++) % 1000) / 8.0;
            return add(n);
        }
        }
    }
    Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow, Op::Neg,
                Op::Abs, Op::Sqrt, Op::Min, Op::Max};
    Op op = ops[d % 10];
    Node n{op};
    n.lhs = gen(nodes, rng, ctr, depth + 1);
    if (op != Op::Neg && op != Op::Abs && op != Op::Sqrt)
        n.rhs = gen(nodes, rng, ctr, depth + 1);
    return add(n);
}

} // namespace

TEST_CASE("print/parse round trip on random expressions") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        tow::CounterRng rng(seed, 77);
        std::vector<Node> nodes;
        std::uint64_t ctr = 0;
        int root = gen(nodes, rng, ctr, 0);
        Expr e(std::move(nodes), root);
        std::string s = e.str();
        Expr back = Expr::parse(s);
        CAPTURE(s);
        CHECK(back.same_structure(e));
        CHECK(back.str() == s);
    }
}

TEST_CASE("round trip preserves evaluation bits") {
    const char* samples[] = {
        "x", "1 - x*1000", "max(0, 1 - abs(y - 0.5))", "2^3^2", "-x^2 + y/3",
        "sqrt(abs(x*y)) - min(x, max(y, 0.125))",
    };
    for (const char* s : samples) {
        Expr e = Expr::parse(s);
        Expr back = Expr::parse(e.str());
        for (double x : {0.0, 0.3, -1.5})
            for (double y : {0.0, 0.7, 2.25}) CHECK(e.eval(x, y) == back.eval(x, y));
    }
}

TEST_CASE("lipschitz of identity and constants") {
    std::vector<Vec> pts;
    for (int i = 0; i <= 4; ++i) pts.push_back({i * 0.25, 0});
    CHECK(tow::expr::lipschitz_on(Expr::parse("x"), pts) == doctest::Approx(1.0));
    CHECK(tow::expr::lipschitz_on(Expr::parse("0"), pts) == 0.0);
}

TEST_CASE("lipschitz of a tent on a boundary segment") {
    std::vector<Vec> pts;
    for (int i = 0; i <= 4; ++i) pts.push_back({0, i * 0.25});
    CHECK(tow::expr::lipschitz_on(Expr::parse("abs(y-0.5)"), pts) == doctest::Approx(1.0));
}

TEST_CASE("lipschitz is permutation invariant and monotone in the node set") {
    Expr e = Expr::parse("x*x - y");
    std::vector<Vec> pts{{0, 0}, {0.5, 0.25}, {1, 1}, {0.25, 0.75}};
    std::vector<Vec> perm{pts[2], pts[0], pts[3], pts[1]};
    CHECK(tow::expr::lipschitz_on(e, pts) == tow::expr::lipschitz_on(e, perm));
    std::vector<Vec> sub(pts.begin(), pts.begin() + 2);
    CHECK(tow::expr::lipschitz_on(e, sub) <= tow::expr::lipschitz_on(e, pts));
}

TEST_CASE("lipschitz requires two nodes") {
    std::vector<Vec> one{{0, 0}};
    CHECK_THROWS_AS(tow::expr::lipschitz_on(Expr::parse("x"), one), tow::TooFewNodes);
}
