#pragma once

// Distinguished tensor fields: one-forms, the block pseudo-metric, bilinear
// form fields, exterior derivatives, and interior products.
//
// The exterior derivative carries no 1/2 factor:
//   dw(X, Y)    = X(w(Y)) - Y(w(X)) - w([X, Y])
//   dB(X, Y, Z) = X B(Y,Z) - Y B(X,Z) + Z B(X,Y)
//                 - B([X,Y], Z) + B([X,Z], Y) - B([Y,Z], X)
// which is the convention the structure identities below force.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bundle.hpp"
#include "linalg.hpp"

namespace pacfin {

// w = h[i] dx^i + v[a] delta y^a.
struct OneForm {
    std::vector<Expr> h, v;

    static OneForm zero(const Chart& c) {
        return {std::vector<Expr>(std::size_t(c.n()), Expr::constant(0.0)),
                std::vector<Expr>(std::size_t(c.m()), Expr::constant(0.0))};
    }
};

inline Expr form_apply(const OneForm& w, const VecField& X) {
    Expr r = Expr::constant(0.0);
    for (std::size_t i = 0; i < w.h.size(); ++i) r = r + w.h[i] * X.h[i];
    for (std::size_t a = 0; a < w.v.size(); ++a) r = r + w.v[a] * X.v[a];
    return r;
}

// G = g_ij dx^i (x) dx^j + h_ab delta y^a (x) delta y^b.
struct Metric {
    ExprMat g, h;
};

inline Expr metric_h_part(const Metric& G, const VecField& X, const VecField& Y) {
    Expr r = Expr::constant(0.0);
    for (std::size_t i = 0; i < G.g.size(); ++i)
        for (std::size_t j = 0; j < G.g.size(); ++j) r = r + G.g[i][j] * X.h[i] * Y.h[j];
    return r;
}

inline Expr metric_v_part(const Metric& G, const VecField& X, const VecField& Y) {
    Expr r = Expr::constant(0.0);
    for (std::size_t a = 0; a < G.h.size(); ++a)
        for (std::size_t b = 0; b < G.h.size(); ++b) r = r + G.h[a][b] * X.v[a] * Y.v[b];
    return r;
}

inline Expr metric_apply(const Metric& G, const VecField& X, const VecField& Y) {
    return metric_h_part(G, X, Y) + metric_v_part(G, X, Y);
}

// Bilinear form field with all four adapted blocks.
struct BilinearForm {
    ExprMat hh, hv, vh, vv;

    static BilinearForm zero(const Chart& c) {
        return {expr_zeros(c.n(), c.n()), expr_zeros(c.n(), c.m()),
                expr_zeros(c.m(), c.n()), expr_zeros(c.m(), c.m())};
    }
};

inline Expr bform_apply(const BilinearForm& B, const VecField& X, const VecField& Y) {
    Expr r = Expr::constant(0.0);
    for (std::size_t i = 0; i < B.hh.size(); ++i)
        for (std::size_t j = 0; j < B.hh[i].size(); ++j) r = r + B.hh[i][j] * X.h[i] * Y.h[j];
    for (std::size_t i = 0; i < B.hv.size(); ++i)
        for (std::size_t a = 0; a < B.hv[i].size(); ++a) r = r + B.hv[i][a] * X.h[i] * Y.v[a];
    for (std::size_t a = 0; a < B.vh.size(); ++a)
        for (std::size_t j = 0; j < B.vh[a].size(); ++j) r = r + B.vh[a][j] * X.v[a] * Y.h[j];
    for (std::size_t a = 0; a < B.vv.size(); ++a)
        for (std::size_t b = 0; b < B.vv[a].size(); ++b) r = r + B.vv[a][b] * X.v[a] * Y.v[b];
    return r;
}

inline BilinearForm metric_as_bform(const Bundle& B, const Metric& G) {
    BilinearForm r = BilinearForm::zero(B.chart);
    r.hh = G.g;
    r.vv = G.h;
    return r;
}

inline Expr d_oneform(const Bundle& B, const OneForm& w, const VecField& X, const VecField& Y) {
    return field_apply(B, X, form_apply(w, Y)) - field_apply(B, Y, form_apply(w, X)) -
           form_apply(w, bracket(B, X, Y));
}

// Components of dw in the adapted frame; dw is tensorial, so contracting
// these blocks reproduces d_oneform on arbitrary fields.
inline BilinearForm d_oneform_blocks(const Bundle& B, const OneForm& w) {
    const int n = B.chart.n(), m = B.chart.m();
    BilinearForm r = BilinearForm::zero(B.chart);
    std::vector<VecField> deltas, partials;
    for (int i = 0; i < n; ++i) deltas.push_back(frame_delta(B, i));
    for (int a = 0; a < m; ++a) partials.push_back(frame_partial(B, a));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r.hh[std::size_t(i)][std::size_t(j)] =
                d_oneform(B, w, deltas[std::size_t(i)], deltas[std::size_t(j)]);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            r.hv[std::size_t(i)][std::size_t(a)] =
                d_oneform(B, w, deltas[std::size_t(i)], partials[std::size_t(a)]);
            r.vh[std::size_t(a)][std::size_t(i)] =
                d_oneform(B, w, partials[std::size_t(a)], deltas[std::size_t(i)]);
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            r.vv[std::size_t(a)][std::size_t(b)] =
                d_oneform(B, w, partials[std::size_t(a)], partials[std::size_t(b)]);
    return r;
}

inline Expr d_twoform(const Bundle& B, const BilinearForm& F, const VecField& X,
                      const VecField& Y, const VecField& Z) {
    return field_apply(B, X, bform_apply(F, Y, Z)) - field_apply(B, Y, bform_apply(F, X, Z)) +
           field_apply(B, Z, bform_apply(F, X, Y)) - bform_apply(F, bracket(B, X, Y), Z) +
           bform_apply(F, bracket(B, X, Z), Y) - bform_apply(F, bracket(B, Y, Z), X);
}

// (i_xi F)(X) = F(xi, X), returned through its frame components.
inline OneForm interior_product(const Bundle& B, const VecField& xi, const BilinearForm& F) {
    OneForm r = OneForm::zero(B.chart);
    for (int i = 0; i < B.chart.n(); ++i)
        r.h[std::size_t(i)] = bform_apply(F, xi, frame_delta(B, i));
    for (int a = 0; a < B.chart.m(); ++a)
        r.v[std::size_t(a)] = bform_apply(F, xi, frame_partial(B, a));
    return r;
}

struct SingularMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline MatD eval_mat(const ExprMat& m, const Point& p) {
    Evaluator ev(p);
    MatD r(int(m.size()), m.empty() ? 0 : int(m[0].size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) r(int(i), int(j)) = ev(m[i][j]);
    return r;
}

// Numeric block inverses at a point; the independent route used to check the
// symbolic inverses below.
inline std::pair<MatD, MatD> inverse_blocks_at(const Metric& G, const Point& p) {
    MatD g = eval_mat(G.g, p), h = eval_mat(G.h, p);
    if (std::abs(det(g)) <= 1e-10) throw SingularMetricError("horizontal metric block is singular");
    if (std::abs(det(h)) <= 1e-10) throw SingularMetricError("vertical metric block is singular");
    auto gi = try_invert(g), hi = try_invert(h);
    if (!gi || !hi) throw SingularMetricError("metric block inversion failed");
    return {*gi, *hi};
}

// Symbolic determinant by cofactor expansion. Fine at desk scale; the
// metric blocks here are 3x3 or 5x5.
inline Expr symbolic_det(const ExprMat& m) {
    const std::size_t n = m.size();
    if (n == 0) return Expr::constant(1.0);
    if (n == 1) return m[0][0];
    Expr d = Expr::constant(0.0);
    for (std::size_t j = 0; j < n; ++j) {
        ExprMat minor;
        minor.reserve(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Expr> row;
            row.reserve(n - 1);
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        Expr term = m[0][j] * symbolic_det(minor);
        d = (j % 2 == 0) ? d + term : d - term;
    }
    return d;
}

// Adjugate-over-determinant inverse. Keeping the inverse symbolic keeps the
// connection coefficients closed under differentiation, which the curvature
// and local-symmetry checks need to third order.
inline ExprMat symbolic_inverse(const ExprMat& m) {
    const std::size_t n = m.size();
    ExprMat inv = expr_zeros(int(n), int(n));
    Expr d = symbolic_det(m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ExprMat minor;
            minor.reserve(n - 1);
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<Expr> row;
                row.reserve(n - 1);
                for (std::size_t c = 0; c < n; ++c)
                    if (c != i) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            Expr cof = symbolic_det(minor);
            if ((i + j) % 2 == 1) cof = -cof;
            inv[i][j] = cof / d;
        }
    return inv;
}

}  // namespace pacfin
