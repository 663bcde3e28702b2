#include <doctest.h>

#include <cmath>

#include "pacfin/dtensor.hpp"

using namespace pacfin;

namespace {

Bundle flat_bundle() { return Bundle::flat(Chart{1, 1}); }

std::vector<Point> box_points(const Chart& c, int count, std::uint64_t seed) {
    return sample_points(SampleBox::cube(c, -0.8, 0.8), count, seed);
}

VecField random_field(const Bundle& B, SplitMix64& rng) {
    VecField X = VecField::zero(B.chart);
    for (auto& e : X.h) e = random_polynomial(rng, 3, 3, 2, 3);
    for (auto& e : X.v) e = random_polynomial(rng, 3, 3, 2, 3);
    return X;
}

ExprMat identity_mat(int d) {
    ExprMat m = expr_zeros(d, d);
    for (int i = 0; i < d; ++i) m[std::size_t(i)][std::size_t(i)] = Expr::constant(1.0);
    return m;
}

}  // namespace

TEST_CASE("metric application: identity blocks and block orthogonality") {
    Bundle B = flat_bundle();
    Metric G{identity_mat(3), identity_mat(3)};
    VecField d1 = frame_delta(B, 0);
    auto pts = box_points(B.chart, 10, 3);
    for (const auto& p : pts) CHECK(metric_apply(G, d1, d1).eval(p) == 1.0);
    SplitMix64 rng(17);
    VecField Xh = h_proj(random_field(B, rng)), Yv = v_proj(random_field(B, rng));
    for (const auto& p : pts) CHECK(metric_apply(G, Xh, Yv).eval(p) == 0.0);
}

TEST_CASE("metric application matches a hand contraction for diagonal blocks") {
    Bundle B = flat_bundle();
    SplitMix64 rng(29);
    Metric G{expr_zeros(3, 3), expr_zeros(3, 3)};
    for (int i = 0; i < 3; ++i) {
        G.g[std::size_t(i)][std::size_t(i)] = Expr::constant(1.0) + pow_int(Expr::x(i), 2);
        G.h[std::size_t(i)][std::size_t(i)] = Expr::constant(2.0) + pow_int(Expr::y(i), 2);
    }
    VecField X = random_field(B, rng), Y = random_field(B, rng);
    Expr v = metric_apply(G, X, Y);
    for (const auto& p : box_points(B.chart, 50, 31)) {
        double acc = 0.0;
        auto xv = eval_field(X, p), yv = eval_field(Y, p);
        for (int i = 0; i < 3; ++i)
            acc += G.g[std::size_t(i)][std::size_t(i)].eval(p) * xv[std::size_t(i)] * yv[std::size_t(i)];
        for (int a = 0; a < 3; ++a)
            acc += G.h[std::size_t(a)][std::size_t(a)].eval(p) * xv[std::size_t(3 + a)] * yv[std::size_t(3 + a)];
        CHECK(std::abs(v.eval(p) - acc) < 1e-13);
    }
}

TEST_CASE("numeric block inverses") {
    Bundle B = flat_bundle();
    Point p{{0.1, -0.2, 0.3}, {0.0, 0.4, -0.1}};

    Metric id{identity_mat(3), identity_mat(3)};
    auto [gi, hi] = inverse_blocks_at(id, p);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(gi(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

    Metric diag{expr_zeros(3, 3), identity_mat(3)};
    double dvals[3] = {2.0, 3.0, 5.0};
    for (int i = 0; i < 3; ++i) diag.g[std::size_t(i)][std::size_t(i)] = Expr::constant(dvals[i]);
    auto [gi2, hi2] = inverse_blocks_at(diag, p);
    for (int i = 0; i < 3; ++i) CHECK(gi2(i, i) == doctest::Approx(1.0 / dvals[i]).epsilon(1e-14));

    // random positive-definite perturbation: g g^-1 = I to 1e-10
    SplitMix64 rng(41);
    Metric pert{expr_zeros(3, 3), identity_mat(3)};
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Expr e = (i == j ? Expr::constant(1.5) : Expr::constant(0.0)) +
                     Expr::constant(0.2) * random_polynomial(rng, 3, 3, 2, 2);
            pert.g[std::size_t(i)][std::size_t(j)] = e;
            pert.g[std::size_t(j)][std::size_t(i)] = e;
        }
    for (const auto& q : box_points(B.chart, 20, 43)) {
        auto [gp, hp] = inverse_blocks_at(pert, q);
        MatD gnum = eval_mat(pert.g, q);
        MatD prod = matmul(gnum, gp);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
    }

    Metric sing{expr_zeros(3, 3), identity_mat(3)};
    CHECK_THROWS_AS(inverse_blocks_at(sing, p), SingularMetricError);
}

TEST_CASE("symbolic inverse agrees with the numeric route") {
    Bundle B = flat_bundle();
    SplitMix64 rng(47);
    ExprMat g = expr_zeros(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Expr e = (i == j ? Expr::constant(2.0) : Expr::constant(0.0)) +
                     Expr::constant(0.3) * random_polynomial(rng, 3, 3, 2, 2);
            g[std::size_t(i)][std::size_t(j)] = e;
            g[std::size_t(j)][std::size_t(i)] = e;
        }
    ExprMat gi = symbolic_inverse(g);
    for (const auto& p : box_points(B.chart, 20, 53)) {
        MatD gnum = eval_mat(g, p);
        auto ginv = try_invert(gnum);
        REQUIRE(ginv.has_value());
        MatD gsym = eval_mat(gi, p);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::abs(gsym(i, j) - (*ginv)(i, j)) < 1e-11);
    }
}

TEST_CASE("exterior derivative of an exact form vanishes") {
    Bundle B = flat_bundle();
    SplitMix64 rng(59);
    Expr f = random_polynomial(rng, 3, 3, 3, 5);
    OneForm df = OneForm::zero(B.chart);
    for (int i = 0; i < 3; ++i) df.h[std::size_t(i)] = delta_derivative(f, i, B);
    for (int a = 0; a < 3; ++a) df.v[std::size_t(a)] = partial_y(f, a);
    VecField X = random_field(B, rng), Y = random_field(B, rng);
    Expr d2 = d_oneform(B, df, X, Y);
    for (const auto& p : box_points(B.chart, 30, 61)) CHECK(std::abs(d2.eval(p)) < 1e-12);
}

TEST_CASE("exterior derivative of x2 dx1 on the flat chart") {
    Bundle B = flat_bundle();
    OneForm w = OneForm::zero(B.chart);
    w.h[0] = Expr::x(1);
    Expr d = d_oneform(B, w, frame_delta(B, 0), frame_delta(B, 1));
    for (const auto& p : box_points(B.chart, 5, 67)) CHECK(d.eval(p) == doctest::Approx(-1.0));
}

TEST_CASE("Lie derivative consistency with the exterior derivative") {
    // (L_xi w)(X) + dw(X, xi) - X(w(xi)) = 0
    Bundle B = flat_bundle();
    SplitMix64 rng(71);
    OneForm w = OneForm::zero(B.chart);
    for (auto& e : w.h) e = random_polynomial(rng, 3, 3, 2, 3);
    for (auto& e : w.v) e = random_polynomial(rng, 3, 3, 2, 3);
    VecField xi = random_field(B, rng), X = random_field(B, rng);
    Expr lie = field_apply(B, xi, form_apply(w, X)) - form_apply(w, bracket(B, xi, X));
    Expr resid = lie + d_oneform(B, w, X, xi) - field_apply(B, X, form_apply(w, xi));
    for (const auto& p : box_points(B.chart, 30, 73)) CHECK(std::abs(resid.eval(p)) < 1e-11);
}

TEST_CASE("frame components of d reproduce the direct evaluation") {
    Bundle B = flat_bundle();
    SplitMix64 rng(79);
    for (auto& row : B.nc.N)
        for (auto& e : row) e = random_polynomial(rng, 3, 3, 2, 2);
    OneForm w = OneForm::zero(B.chart);
    for (auto& e : w.h) e = random_polynomial(rng, 3, 3, 2, 3);
    for (auto& e : w.v) e = random_polynomial(rng, 3, 3, 2, 3);
    BilinearForm blocks = d_oneform_blocks(B, w);
    VecField X = random_field(B, rng), Y = random_field(B, rng);
    Expr direct = d_oneform(B, w, X, Y);
    Expr contracted = bform_apply(blocks, X, Y);
    for (const auto& p : box_points(B.chart, 40, 83)) {
        CHECK(std::abs(direct.eval(p) - contracted.eval(p)) < 1e-11);
    }
}

TEST_CASE("d-tensor property: evaluation equals evaluation on projections") {
    Bundle B = flat_bundle();
    SplitMix64 rng(89);
    BilinearForm T = BilinearForm::zero(B.chart);
    for (auto& row : T.hh)
        for (auto& e : row) e = random_polynomial(rng, 3, 3, 2, 2);
    for (auto& row : T.vv)
        for (auto& e : row) e = random_polynomial(rng, 3, 3, 2, 2);
    for (auto& row : T.hv)
        for (auto& e : row) e = random_polynomial(rng, 3, 3, 2, 2);
    VecField X = random_field(B, rng), Y = random_field(B, rng);
    Expr full = bform_apply(T, X, Y);
    Expr split = bform_apply(T, h_proj(X), h_proj(Y)) + bform_apply(T, h_proj(X), v_proj(Y)) +
                 bform_apply(T, v_proj(X), h_proj(Y)) + bform_apply(T, v_proj(X), v_proj(Y));
    for (const auto& p : box_points(B.chart, 30, 97)) {
        CHECK(std::abs(full.eval(p) - split.eval(p)) < 1e-12);
    }
}

TEST_CASE("second exterior derivative of a 1-form vanishes through d_twoform") {
    Bundle B = flat_bundle();
    SplitMix64 rng(101);
    for (auto& row : B.nc.N)
        for (auto& e : row) e = random_polynomial(rng, 3, 3, 2, 2);
    OneForm w = OneForm::zero(B.chart);
    for (auto& e : w.h) e = random_polynomial(rng, 3, 3, 2, 3);
    for (auto& e : w.v) e = random_polynomial(rng, 3, 3, 2, 3);
    BilinearForm dw = d_oneform_blocks(B, w);
    SplitMix64 rng2(103);
    VecField X = random_field(B, rng2), Y = random_field(B, rng2), Z = random_field(B, rng2);
    Expr ddw = d_twoform(B, dw, X, Y, Z);
    for (const auto& p : box_points(B.chart, 30, 107)) CHECK(std::abs(ddw.eval(p)) < 1e-9);
}

TEST_CASE("d_twoform of constants on a flat chart vanishes and is antisymmetric") {
    Bundle B = flat_bundle();
    BilinearForm T = BilinearForm::zero(B.chart);
    SplitMix64 rng(109);
    for (auto& row : T.hh)
        for (auto& e : row) e = Expr::constant(rng.uniform(-1, 1));
    for (auto& row : T.vv)
        for (auto& e : row) e = Expr::constant(rng.uniform(-1, 1));
    VecField X = frame_delta(B, 0), Y = frame_delta(B, 1), Z = frame_partial(B, 2);
    CHECK(d_twoform(B, T, X, Y, Z).is_zero());

    // antisymmetry under the first two slots for a random 2-form
    BilinearForm A = BilinearForm::zero(B.chart);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            Expr e = random_polynomial(rng, 3, 3, 2, 2);
            A.hh[std::size_t(i)][std::size_t(j)] = e;
            A.hh[std::size_t(j)][std::size_t(i)] = -e;
            Expr f = random_polynomial(rng, 3, 3, 2, 2);
            A.vv[std::size_t(i)][std::size_t(j)] = f;
            A.vv[std::size_t(j)][std::size_t(i)] = -f;
        }
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) {
            Expr e = random_polynomial(rng, 3, 3, 2, 2);
            A.hv[std::size_t(i)][std::size_t(a)] = e;
            A.vh[std::size_t(a)][std::size_t(i)] = -e;
        }
    VecField U = random_field(B, rng), V = random_field(B, rng), W = random_field(B, rng);
    Expr swap = d_twoform(B, A, U, V, W) + d_twoform(B, A, V, U, W);
    for (const auto& p : box_points(B.chart, 20, 113)) CHECK(std::abs(swap.eval(p)) < 1e-10);
}

TEST_CASE("interior product") {
    Bundle B = flat_bundle();
    SplitMix64 rng(127);
    BilinearForm T = BilinearForm::zero(B.chart);
    for (auto& row : T.hh)
        for (auto& e : row) e = random_polynomial(rng, 3, 3, 2, 2);
    for (auto& row : T.vv)
        for (auto& e : row) e = random_polynomial(rng, 3, 3, 2, 2);
    VecField xi = random_field(B, rng), X = random_field(B, rng);
    OneForm ix = interior_product(B, xi, T);
    Expr direct = bform_apply(T, xi, X);
    Expr contracted = form_apply(ix, X);
    for (const auto& p : box_points(B.chart, 30, 131)) {
        CHECK(std::abs(direct.eval(p) - contracted.eval(p)) < 1e-11);
    }

    // antisymmetric T contracted twice with the same field vanishes
    BilinearForm A = BilinearForm::zero(B.chart);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            Expr e = random_polynomial(rng, 3, 3, 2, 2);
            A.hh[std::size_t(i)][std::size_t(j)] = e;
            A.hh[std::size_t(j)][std::size_t(i)] = -e;
        }
    OneForm ia = interior_product(B, xi, A);
    Expr self = form_apply(ia, xi);
    for (const auto& p : box_points(B.chart, 20, 137)) CHECK(std::abs(self.eval(p)) < 1e-11);
}
