#include <doctest.h>
#include <cstring>

#include <cmath>

#include "pacfin/chart.hpp"
#include "pacfin/expr.hpp"

using namespace pacfin;

namespace {

Point pt(std::vector<double> x, std::vector<double> y) { return Point{std::move(x), std::move(y)}; }

// Central finite difference, the independent oracle for symbolic derivatives.
double central_diff(const Expr& e, Var v, const Point& p, double h = 1e-5) {
    Point hi = p, lo = p;
    auto& vals_hi = v.kind == VarKind::Base ? hi.x : hi.y;
    auto& vals_lo = v.kind == VarKind::Base ? lo.x : lo.y;
    vals_hi[std::size_t(v.index)] += h;
    vals_lo[std::size_t(v.index)] -= h;
    return (e.eval(hi) - e.eval(lo)) / (2.0 * h);
}

}  // namespace

TEST_CASE("parse: zero literal produces the zero constant") {
    Expr e = parse("0", 3, 3);
    CHECK(e.is_zero());
}

TEST_CASE("parse and evaluate direct arithmetic") {
    Expr e = parse("x1*y2 + sin(x2)", 2, 3);
    CHECK(e.eval(pt({0.5, 0.0}, {1.0, 3.0, 0.0})) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("second derivative of x1^3 via finite differences") {
    Expr e = parse("x1^3", 1, 1);
    Var v{VarKind::Base, 0};
    Expr dd = e.diff(v).diff(v);
    Point p = pt({2.0}, {0.0});
    CHECK(dd.eval(p) == doctest::Approx(12.0).epsilon(1e-12));
    // oracle: second central difference of the original expression
    double h = 1e-4;
    Point pp = pt({2.0 + h}, {0.0}), pm = pt({2.0 - h}, {0.0});
    double fd2 = (e.eval(pp) - 2.0 * e.eval(p) + e.eval(pm)) / (h * h);
    CHECK(dd.eval(p) == doctest::Approx(fd2).epsilon(1e-6));
}

TEST_CASE("derivative basics") {
    CHECK(Expr::constant(7.25).diff({VarKind::Base, 0}).is_zero());
    Expr s = parse("sin(x1)", 1, 1);
    CHECK(s.diff({VarKind::Base, 0}).eval(pt({0.0}, {0.0})) == doctest::Approx(1.0));
}

TEST_CASE("random polynomials match the finite-difference oracle") {
    SplitMix64 rng(911);
    for (int trial = 0; trial < 40; ++trial) {
        Expr e = random_polynomial(rng, 3, 3, 4, 6);
        Var v{trial % 2 == 0 ? VarKind::Base : VarKind::Fibre, trial % 3};
        Expr de = e.diff(v);
        for (int k = 0; k < 20; ++k) {
            Point p;
            for (int i = 0; i < 3; ++i) p.x.push_back(rng.uniform(-1.0, 1.0));
            for (int i = 0; i < 3; ++i) p.y.push_back(rng.uniform(-1.0, 1.0));
            CHECK(std::abs(de.eval(p) - central_diff(e, v, p)) < 1e-6);
        }
    }
}

TEST_CASE("evaluate: constants, domain errors") {
    CHECK(parse("1", 1, 1).eval(pt({0.0}, {0.0})) == 1.0);
    CHECK(parse("exp(0)*cosh(0)", 1, 1).eval(pt({5.0}, {0.0})) == 1.0);
    Expr e = parse("x1/x1", 1, 1);
    CHECK_THROWS_AS(e.eval(pt({0.0}, {0.0})), EvalError);
    CHECK_THROWS_AS(parse("log(x1)", 1, 1).eval(pt({-1.0}, {0.0})), EvalError);
    CHECK_THROWS_AS(parse("sqrt(x1)", 1, 1).eval(pt({-4.0}, {0.0})), EvalError);
}

TEST_CASE("simplify folds and elides") {
    CHECK(parse("0*x1 + y1", 1, 1).str() == "y1");
    CHECK(parse("x1^1", 1, 1).str() == "x1");
    CHECK(parse("x1^0", 1, 1).is_one());

    SplitMix64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        Expr e = random_polynomial(rng, 2, 2, 3, 5);
        Expr s = e.simplified();
        for (int k = 0; k < 100; ++k) {
            Point p;
            for (int i = 0; i < 2; ++i) p.x.push_back(rng.uniform(-1.0, 1.0));
            for (int i = 0; i < 2; ++i) p.y.push_back(rng.uniform(-1.0, 1.0));
            CHECK(std::abs(e.eval(p) - s.eval(p)) < 1e-12);
        }
    }
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse("x1 +", 1, 1), ParseError);
    CHECK_THROWS_AS(parse("x9 + 1", 1, 1), ParseError);
    CHECK_THROWS_AS(parse("sin(x1", 1, 1), ParseError);
    CHECK_THROWS_AS(parse("x1^-2", 1, 1), ParseError);
    CHECK_THROWS_AS(parse("bogus(x1)", 1, 1), ParseError);
    try {
        parse("1 + zz", 1, 1);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.position == 4);
    }
}

TEST_CASE("precedence: power binds tighter than unary minus") {
    Expr e = parse("-x1^2", 1, 1);
    CHECK(e.eval(pt({3.0}, {0.0})) == doctest::Approx(-9.0));
    // explicit parenthesization flips it
    CHECK(parse("(-x1)^2", 1, 1).eval(pt({3.0}, {0.0})) == doctest::Approx(9.0));
}

TEST_CASE("linearity of differentiation at sample points") {
    SplitMix64 rng(4242);
    Var v{VarKind::Base, 1};
    for (int trial = 0; trial < 10; ++trial) {
        Expr e1 = random_polynomial(rng, 3, 3, 3, 4);
        Expr e2 = random_polynomial(rng, 3, 3, 3, 4);
        double a = rng.uniform(-2.0, 2.0);
        Expr lhs = (Expr::constant(a) * e1 + e2).diff(v);
        Expr rhs = Expr::constant(a) * e1.diff(v) + e2.diff(v);
        for (int k = 0; k < 20; ++k) {
            Point p;
            for (int i = 0; i < 3; ++i) p.x.push_back(rng.uniform(-1.0, 1.0));
            for (int i = 0; i < 3; ++i) p.y.push_back(rng.uniform(-1.0, 1.0));
            CHECK(std::abs(lhs.eval(p) - rhs.eval(p)) < 1e-12);
        }
    }
}

TEST_CASE("mixed partials commute") {
    SplitMix64 rng(515);
    Var vx{VarKind::Base, 0}, vy{VarKind::Fibre, 2};
    for (int trial = 0; trial < 10; ++trial) {
        Expr e = random_polynomial(rng, 2, 3, 4, 5) * pacfin::sin(Expr::x(1));
        Expr xy = e.diff(vx).diff(vy);
        Expr yx = e.diff(vy).diff(vx);
        for (int k = 0; k < 20; ++k) {
            Point p;
            for (int i = 0; i < 2; ++i) p.x.push_back(rng.uniform(-1.0, 1.0));
            for (int i = 0; i < 3; ++i) p.y.push_back(rng.uniform(-1.0, 1.0));
            CHECK(std::abs(xy.eval(p) - yx.eval(p)) < 1e-12);
        }
    }
}

TEST_CASE("canonical printer round-trips") {
    const char* samples[] = {
        "x1*y2 + sin(x2)",
        "x1^3 - 2*x2/(y1 + 4)",
        "-x1^2 + (-x2)^2",
        "exp(x1)*log(y1 + 2) - sqrt(x2 + 5)",
        "cosh(x1)*sinh(y1) - cos(x2)/(1 + x1^2)",
        "x1 - (x2 - y1) - y2",
        "1.5e-3*x1 + 0.25",
    };
    for (const char* s : samples) {
        Expr once = parse(s, 2, 2);
        Expr twice = parse(once.str(), 2, 2);
        CHECK(structurally_equal(once, twice));
        CHECK(once.str() == twice.str());
    }
    // derivatives round-trip too (exercises the full node vocabulary)
    SplitMix64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        Expr e = random_polynomial(rng, 2, 2, 3, 4) / (Expr::constant(3.0) + pow_int(Expr::y(0), 2));
        Expr d = e.diff({VarKind::Fibre, 0});
        Expr re = parse(d.str(), 2, 2);
        CHECK(structurally_equal(d, re));
    }
}

TEST_CASE("evaluation is deterministic bit for bit") {
    SplitMix64 rng(99);
    Expr e = random_polynomial(rng, 3, 3, 4, 8);
    Point p;
    for (int i = 0; i < 3; ++i) p.x.push_back(rng.uniform(-1.0, 1.0));
    for (int i = 0; i < 3; ++i) p.y.push_back(rng.uniform(-1.0, 1.0));
    double a = e.eval(p), b = e.eval(p);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}
