#pragma once

// The bundle context: nonlinear connection, adapted frame, projectors, and
// Lie brackets of vector fields given by adapted-frame components.
//
// Brackets are computed in the natural frame, where the coordinate formula
// is exact, and converted back. Adapted components (X^i, Xbar^a) relate to
// natural ones by Xnat^i = X^i, Xnat^a = Xbar^a - X^i N_i^a.

#include <stdexcept>
#include <string>
#include <vector>

#include "chart.hpp"
#include "expr.hpp"

namespace pacfin {

using ExprMat = std::vector<std::vector<Expr>>;

inline ExprMat expr_zeros(int rows, int cols) {
    return ExprMat(std::size_t(rows), std::vector<Expr>(std::size_t(cols), Expr::constant(0.0)));
}

struct NonlinearConnection {
    ExprMat N;  // n x m, N[i][a] = N_i^a(x, y)

    static NonlinearConnection zero(const Chart& c) { return {expr_zeros(c.n(), c.m())}; }
};

struct Bundle {
    Chart chart;
    NonlinearConnection nc;

    static Bundle flat(const Chart& c) { return {c, NonlinearConnection::zero(c)}; }
};

// Distinguished vector field in adapted components:
// X = h[i] * delta/delta x^i + v[a] * d/dy^a.
struct VecField {
    std::vector<Expr> h, v;

    static VecField zero(const Chart& c) {
        return {std::vector<Expr>(std::size_t(c.n()), Expr::constant(0.0)),
                std::vector<Expr>(std::size_t(c.m()), Expr::constant(0.0))};
    }
};

inline VecField operator+(const VecField& a, const VecField& b) {
    VecField r = a;
    for (std::size_t i = 0; i < r.h.size(); ++i) r.h[i] = r.h[i] + b.h[i];
    for (std::size_t a_ = 0; a_ < r.v.size(); ++a_) r.v[a_] = r.v[a_] + b.v[a_];
    return r;
}

inline VecField operator-(const VecField& a, const VecField& b) {
    VecField r = a;
    for (std::size_t i = 0; i < r.h.size(); ++i) r.h[i] = r.h[i] - b.h[i];
    for (std::size_t a_ = 0; a_ < r.v.size(); ++a_) r.v[a_] = r.v[a_] - b.v[a_];
    return r;
}

inline VecField operator*(const Expr& f, const VecField& a) {
    VecField r = a;
    for (auto& e : r.h) e = f * e;
    for (auto& e : r.v) e = f * e;
    return r;
}

inline VecField operator-(const VecField& a) { return Expr::constant(-1.0) * a; }

inline Expr partial_x(const Expr& f, int i) { return f.diff({VarKind::Base, i}); }
inline Expr partial_y(const Expr& f, int a) { return f.diff({VarKind::Fibre, a}); }

// delta/delta x^i f = df/dx^i - N_i^a df/dy^a.
inline Expr delta_derivative(const Expr& f, int i, const Bundle& B) {
    const int n = B.chart.n(), m = B.chart.m();
    if (i < 0 || i >= n) throw std::out_of_range("delta_derivative: horizontal index out of range");
    Expr r = partial_x(f, i);
    for (int a = 0; a < m; ++a) r = r - B.nc.N[std::size_t(i)][std::size_t(a)] * partial_y(f, a);
    return r;
}

// Action of a vector field on a scalar, X(f), in adapted components.
inline Expr field_apply(const Bundle& B, const VecField& X, const Expr& f) {
    Expr r = Expr::constant(0.0);
    for (int i = 0; i < B.chart.n(); ++i)
        r = r + X.h[std::size_t(i)] * delta_derivative(f, i, B);
    for (int a = 0; a < B.chart.m(); ++a)
        r = r + X.v[std::size_t(a)] * partial_y(f, a);
    return r;
}

inline VecField h_proj(const VecField& X) {
    VecField r = X;
    for (auto& e : r.v) e = Expr::constant(0.0);
    return r;
}

inline VecField v_proj(const VecField& X) {
    VecField r = X;
    for (auto& e : r.h) e = Expr::constant(0.0);
    return r;
}

inline VecField frame_delta(const Bundle& B, int i) {
    VecField f = VecField::zero(B.chart);
    f.h.at(std::size_t(i)) = Expr::constant(1.0);
    return f;
}

inline VecField frame_partial(const Bundle& B, int a) {
    VecField f = VecField::zero(B.chart);
    f.v.at(std::size_t(a)) = Expr::constant(1.0);
    return f;
}

inline VecField bracket(const Bundle& B, const VecField& X, const VecField& Y) {
    const int n = B.chart.n(), m = B.chart.m();

    auto natural = [&](const VecField& Z) {
        std::pair<std::vector<Expr>, std::vector<Expr>> nat{Z.h, {}};
        nat.second.reserve(std::size_t(m));
        for (int a = 0; a < m; ++a) {
            Expr s = Z.v[std::size_t(a)];
            for (int i = 0; i < n; ++i)
                s = s - Z.h[std::size_t(i)] * B.nc.N[std::size_t(i)][std::size_t(a)];
            nat.second.push_back(s);
        }
        return nat;
    };

    auto [xa, xb] = natural(X);
    auto [ya, yb] = natural(Y);

    auto act = [&](const std::vector<Expr>& zx, const std::vector<Expr>& zy, const Expr& f) {
        Expr r = Expr::constant(0.0);
        for (int i = 0; i < n; ++i) r = r + zx[std::size_t(i)] * partial_x(f, i);
        for (int a = 0; a < m; ++a) r = r + zy[std::size_t(a)] * partial_y(f, a);
        return r;
    };

    std::vector<Expr> zx(static_cast<std::size_t>(n));
    std::vector<Expr> zy(static_cast<std::size_t>(m));
    for (int k = 0; k < n; ++k)
        zx[std::size_t(k)] = act(xa, xb, ya[std::size_t(k)]) - act(ya, yb, xa[std::size_t(k)]);
    for (int c = 0; c < m; ++c)
        zy[std::size_t(c)] = act(xa, xb, yb[std::size_t(c)]) - act(ya, yb, xb[std::size_t(c)]);

    // back to adapted components
    VecField r;
    r.h = zx;
    r.v.resize(std::size_t(m));
    for (int a = 0; a < m; ++a) {
        Expr s = zy[std::size_t(a)];
        for (int i = 0; i < n; ++i)
            s = s + B.nc.N[std::size_t(i)][std::size_t(a)] * zx[std::size_t(i)];
        r.v[std::size_t(a)] = s;
    }
    return r;
}

inline std::vector<double> eval_field(const VecField& X, const Point& p) {
    Evaluator ev(p);
    std::vector<double> out;
    out.reserve(X.h.size() + X.v.size());
    for (const auto& e : X.h) out.push_back(ev(e));
    for (const auto& e : X.v) out.push_back(ev(e));
    return out;
}

}  // namespace pacfin
