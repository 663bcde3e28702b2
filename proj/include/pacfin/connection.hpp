#pragma once

// The canonical symmetric metrical d-connection and its checks.
//
// The (h,h) and (v,v) blocks come from the Koszul identities of the metric
// blocks in the adapted frame; since [delta_i, delta_j] is purely vertical
// and G is block diagonal, the bracket terms drop out of the frame Koszul
// formula and the coefficients take Christoffel form with delta-derivatives:
//
//   F_ij^k    = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)        (d = delta)
//   Cbar_ab^c = 1/2 h^cd (d_a h_bd + d_b h_ad - d_d h_ab)        (d = d/dy)
//
// The mixed blocks follow the canonical metrical completion:
//
//   Fbar_ib^c = dN_i^c/dy^b + 1/2 h^cd (delta_i h_bd
//               - h_ed dN_i^e/dy^b - h_be dN_i^e/dy^d)
//   C_aj^k    = 1/2 g^kl dg_jl/dy^a
//
// which makes D fully metrical with vanishing (h)h- and (v)v-torsion.

#include <string>
#include <vector>

#include "structure.hpp"

namespace pacfin {

struct FinslerConnection {
    // F[i][j][k], Fbar[i][b][c], C[a][j][k], Cbar[a][b][c]
    std::vector<ExprMat> F, Fbar, C, Cbar;
};

inline FinslerConnection canonical_connection(const Bundle& B, const Metric& G) {
    const int n = B.chart.n(), m = B.chart.m();
    ExprMat ginv = symbolic_inverse(G.g);
    ExprMat hinv = symbolic_inverse(G.h);
    const Expr half = Expr::constant(0.5);

    FinslerConnection D;
    D.F.assign(std::size_t(n), expr_zeros(n, n));
    D.Fbar.assign(std::size_t(n), expr_zeros(m, m));
    D.C.assign(std::size_t(m), expr_zeros(n, n));
    D.Cbar.assign(std::size_t(m), expr_zeros(m, m));

    // Pre-compute first derivatives of the metric blocks.
    std::vector<ExprMat> dg(std::size_t(n), expr_zeros(n, n));   // delta_i g_jl
    std::vector<ExprMat> dyg(std::size_t(m), expr_zeros(n, n));  // d g_jl / dy^a
    std::vector<ExprMat> dh(std::size_t(n), expr_zeros(m, m));   // delta_i h_bd
    std::vector<ExprMat> dyh(std::size_t(m), expr_zeros(m, m));  // d h_bd / dy^a
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                dg[std::size_t(i)][std::size_t(j)][std::size_t(l)] =
                    delta_derivative(G.g[std::size_t(j)][std::size_t(l)], i, B);
    for (int a = 0; a < m; ++a)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                dyg[std::size_t(a)][std::size_t(j)][std::size_t(l)] =
                    partial_y(G.g[std::size_t(j)][std::size_t(l)], a);
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < m; ++b)
            for (int d = 0; d < m; ++d)
                dh[std::size_t(i)][std::size_t(b)][std::size_t(d)] =
                    delta_derivative(G.h[std::size_t(b)][std::size_t(d)], i, B);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int d = 0; d < m; ++d)
                dyh[std::size_t(a)][std::size_t(b)][std::size_t(d)] =
                    partial_y(G.h[std::size_t(b)][std::size_t(d)], a);

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Expr s = Expr::constant(0.0);
                for (int l = 0; l < n; ++l)
                    s = s + ginv[std::size_t(k)][std::size_t(l)] *
                            (dg[std::size_t(i)][std::size_t(j)][std::size_t(l)] +
                             dg[std::size_t(j)][std::size_t(i)][std::size_t(l)] -
                             dg[std::size_t(l)][std::size_t(i)][std::size_t(j)]);
                D.F[std::size_t(i)][std::size_t(j)][std::size_t(k)] = half * s;
            }

    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                Expr s = Expr::constant(0.0);
                for (int d = 0; d < m; ++d)
                    s = s + hinv[std::size_t(c)][std::size_t(d)] *
                            (dyh[std::size_t(a)][std::size_t(b)][std::size_t(d)] +
                             dyh[std::size_t(b)][std::size_t(a)][std::size_t(d)] -
                             dyh[std::size_t(d)][std::size_t(a)][std::size_t(b)]);
                D.Cbar[std::size_t(a)][std::size_t(b)][std::size_t(c)] = half * s;
            }

    for (int a = 0; a < m; ++a)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Expr s = Expr::constant(0.0);
                for (int l = 0; l < n; ++l)
                    s = s + ginv[std::size_t(k)][std::size_t(l)] *
                            dyg[std::size_t(a)][std::size_t(j)][std::size_t(l)];
                D.C[std::size_t(a)][std::size_t(j)][std::size_t(k)] = half * s;
            }

    // dN[i][e][b] = d N_i^e / dy^b
    std::vector<ExprMat> dN(std::size_t(n), expr_zeros(m, m));
    for (int i = 0; i < n; ++i)
        for (int e = 0; e < m; ++e)
            for (int b = 0; b < m; ++b)
                dN[std::size_t(i)][std::size_t(e)][std::size_t(b)] =
                    partial_y(B.nc.N[std::size_t(i)][std::size_t(e)], b);

    for (int i = 0; i < n; ++i)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                Expr s = Expr::constant(0.0);
                for (int d = 0; d < m; ++d) {
                    Expr inner = dh[std::size_t(i)][std::size_t(b)][std::size_t(d)];
                    for (int e = 0; e < m; ++e)
                        inner = inner -
                                G.h[std::size_t(e)][std::size_t(d)] *
                                    dN[std::size_t(i)][std::size_t(e)][std::size_t(b)] -
                                G.h[std::size_t(b)][std::size_t(e)] *
                                    dN[std::size_t(i)][std::size_t(e)][std::size_t(d)];
                    s = s + hinv[std::size_t(c)][std::size_t(d)] * inner;
                }
                D.Fbar[std::size_t(i)][std::size_t(b)][std::size_t(c)] =
                    dN[std::size_t(i)][std::size_t(c)][std::size_t(b)] + half * s;
            }

    return D;
}

// Covariant derivative in adapted components. The h-part of the output
// depends only on Y's h-part and dually (the connection preserves the
// splitting).
inline VecField cov_deriv(const Bundle& B, const FinslerConnection& D, const VecField& X,
                          const VecField& Y) {
    const int n = B.chart.n(), m = B.chart.m();
    VecField r = VecField::zero(B.chart);
    for (int k = 0; k < n; ++k) {
        Expr s = field_apply(B, X, Y.h[std::size_t(k)]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                s = s + X.h[std::size_t(i)] * Y.h[std::size_t(j)] *
                        D.F[std::size_t(i)][std::size_t(j)][std::size_t(k)];
        for (int a = 0; a < m; ++a)
            for (int j = 0; j < n; ++j)
                s = s + X.v[std::size_t(a)] * Y.h[std::size_t(j)] *
                        D.C[std::size_t(a)][std::size_t(j)][std::size_t(k)];
        r.h[std::size_t(k)] = s;
    }
    for (int c = 0; c < m; ++c) {
        Expr s = field_apply(B, X, Y.v[std::size_t(c)]);
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < m; ++b)
                s = s + X.h[std::size_t(i)] * Y.v[std::size_t(b)] *
                        D.Fbar[std::size_t(i)][std::size_t(b)][std::size_t(c)];
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                s = s + X.v[std::size_t(a)] * Y.v[std::size_t(b)] *
                        D.Cbar[std::size_t(a)][std::size_t(b)][std::size_t(c)];
        r.v[std::size_t(c)] = s;
    }
    return r;
}

// (D_X phi)(Y) = D_X (phi Y) - phi (D_X Y).
inline VecField cov_deriv_phi(const PacStructure& S, const FinslerConnection& D, const VecField& X,
                              const VecField& Y) {
    return cov_deriv(S.bundle, D, X, phi_apply(S, Y)) -
           phi_apply(S, cov_deriv(S.bundle, D, X, Y));
}

// The five torsion blocks of a d-connection.
struct TorsionBlocks {
    VecField hh_h;  // T^H(X^H, Y^H)
    VecField hh_v;  // T^V(X^H, Y^H) = -[X^H, Y^H]^V
    VecField hv_h;  // T^H(X^H, Y^V)
    VecField hv_v;  // T^V(X^H, Y^V)
    VecField vv_v;  // T^V(X^V, Y^V)
};

inline TorsionBlocks torsion_blocks(const Bundle& B, const FinslerConnection& D, const VecField& X,
                                    const VecField& Y) {
    VecField Xh = h_proj(X), Xv = v_proj(X), Yh = h_proj(Y), Yv = v_proj(Y);
    TorsionBlocks T{VecField::zero(B.chart), VecField::zero(B.chart), VecField::zero(B.chart),
                    VecField::zero(B.chart), VecField::zero(B.chart)};
    T.hh_h = h_proj(cov_deriv(B, D, Xh, Yh) - cov_deriv(B, D, Yh, Xh) - bracket(B, Xh, Yh));
    T.hh_v = -v_proj(bracket(B, Xh, Yh));
    T.hv_h = -h_proj(cov_deriv(B, D, Yv, Xh)) - h_proj(bracket(B, Xh, Yv));
    T.hv_v = v_proj(cov_deriv(B, D, Xh, Yv)) - v_proj(bracket(B, Xh, Yv));
    T.vv_v = v_proj(cov_deriv(B, D, Xv, Yv) - cov_deriv(B, D, Yv, Xv) - bracket(B, Xv, Yv));
    return T;
}

// Metricity over all direction/argument/block combinations:
// X(G^B(Y,Z)) - G^B(D_X Y, Z) - G^B(Y, D_X Z) for X, Y, Z of either type
// and both metric blocks.
inline CheckReport connection_metricity(const Bundle& B, const FinslerConnection& D,
                                        const Metric& G, const std::vector<Point>& pts,
                                        const std::vector<TestField>& fields) {
    CheckReport rep{"connection_metricity", {}};
    auto proj = [&](const VecField& X, int type) { return type == 0 ? h_proj(X) : v_proj(X); };
    const char* tname[2] = {"h", "v"};
    for (int xd = 0; xd < 2; ++xd)
        for (int yd = 0; yd < 2; ++yd)
            for (int zd = 0; zd < 2; ++zd)
                for (int blk = 0; blk < 2; ++blk) {
                    std::string cname = std::string("D") + tname[xd] + "_G" +
                                        (blk == 0 ? "h" : "v") + "(" + tname[yd] + "," +
                                        tname[zd] + ")";
                    auto& cl = rep.clause(cname);
                    for (std::size_t f = 0; f + 2 < fields.size(); f += 3) {
                        VecField X = proj(fields[f].X, xd);
                        VecField Y = proj(fields[f + 1].X, yd);
                        VecField Z = proj(fields[f + 2].X, zd);
                        auto gpart = [&](const VecField& U, const VecField& V) {
                            return blk == 0 ? metric_h_part(G, U, V) : metric_v_part(G, U, V);
                        };
                        Expr r = field_apply(B, X, gpart(Y, Z)) - gpart(cov_deriv(B, D, X, Y), Z) -
                                 gpart(Y, cov_deriv(B, D, X, Z));
                        absorb_scalar(cl, r, pts,
                                      "X=" + fields[f].name + ", Y=" + fields[f + 1].name +
                                          ", Z=" + fields[f + 2].name);
                    }
                }
    return rep;
}

inline CheckReport connection_torsion(const Bundle& B, const FinslerConnection& D,
                                      const std::vector<Point>& pts,
                                      const std::vector<TestField>& fields) {
    CheckReport rep{"connection_torsion", {}};
    auto& hh = rep.clause("hh_torsion");
    auto& vv = rep.clause("vv_torsion");
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t j = i + 1; j < fields.size(); ++j) {
            TorsionBlocks T = torsion_blocks(B, D, fields[i].X, fields[j].X);
            std::string pair = "X=" + fields[i].name + ", Y=" + fields[j].name;
            absorb_field(hh, T.hh_h, pts, pair);
            absorb_field(vv, T.vv_v, pts, pair);
        }
    return rep;
}

// The six-term Koszul identity, every term evaluated independently of the
// connection assembly.
inline CheckReport connection_koszul(const Bundle& B, const FinslerConnection& D, const Metric& G,
                                     const std::vector<Point>& pts,
                                     const std::vector<TestField>& fields) {
    CheckReport rep{"connection_koszul", {}};
    auto six_terms = [&](const VecField& X, const VecField& Y, const VecField& Z) {
        return field_apply(B, X, metric_apply(G, Y, Z)) +
               field_apply(B, Y, metric_apply(G, X, Z)) -
               field_apply(B, Z, metric_apply(G, X, Y)) +
               metric_apply(G, bracket(B, X, Y), Z) - metric_apply(G, bracket(B, X, Z), Y) -
               metric_apply(G, bracket(B, Y, Z), X);
    };
    auto& kh = rep.clause("horizontal");
    auto& kv = rep.clause("vertical");
    for (std::size_t f = 0; f + 2 < fields.size(); f += 2) {
        VecField Xh = h_proj(fields[f].X), Yh = h_proj(fields[f + 1].X), Zh = h_proj(fields[f + 2].X);
        Expr lhs_h = Expr::constant(2.0) * metric_apply(G, cov_deriv(B, D, Xh, Yh), Zh);
        absorb_scalar(kh, lhs_h - six_terms(Xh, Yh, Zh), pts,
                      "X=" + fields[f].name + ", Y=" + fields[f + 1].name + ", Z=" + fields[f + 2].name);
        VecField Xv = v_proj(fields[f].X), Yv = v_proj(fields[f + 1].X), Zv = v_proj(fields[f + 2].X);
        Expr lhs_v = Expr::constant(2.0) * metric_apply(G, cov_deriv(B, D, Xv, Yv), Zv);
        absorb_scalar(kv, lhs_v - six_terms(Xv, Yv, Zv), pts,
                      "X=" + fields[f].name + ", Y=" + fields[f + 1].name + ", Z=" + fields[f + 2].name);
    }
    return rep;
}

// Characterization of K-paracontact through the connection:
//   (i)  D_{X^H} xi^H = -1/2 phi X^H      (iii) D_{X^V} xi^V = -1/2 phi X^V
//   (ii) G^H([xi^H, X^V]^H, Y^H) = 0      (iv)  G^V([xi^V, X^H]^V, Y^V) = 0
// All four hold iff both Reeb fields are Killing.
inline CheckReport reeb_derivative_characterization(const PacStructure& S,
                                                    const FinslerConnection& D,
                                                    const std::vector<Point>& pts,
                                                    const std::vector<TestField>& fields) {
    CheckReport rep{"reeb_covariant_derivative", {}};
    const Bundle& B = S.bundle;
    VecField xiH = xi_h_part(S), xiV = xi_v_part(S);
    const Expr half = Expr::constant(0.5);
    auto& c1 = rep.clause("horizontal_reeb_derivative");
    auto& c2 = rep.clause("mixed_bracket_h");
    auto& c3 = rep.clause("vertical_reeb_derivative");
    auto& c4 = rep.clause("mixed_bracket_v");
    for (const auto& f : fields) {
        VecField Xh = h_proj(f.X), Xv = v_proj(f.X);
        absorb_field(c1, cov_deriv(B, D, Xh, xiH) + half * phi_apply(S, Xh), pts, "X=" + f.name);
        absorb_field(c3, cov_deriv(B, D, Xv, xiV) + half * phi_apply(S, Xv), pts, "X=" + f.name);
        for (const auto& g : fields) {
            Expr e2 = metric_h_part(S.metric, h_proj(bracket(B, xiH, Xv)), h_proj(g.X));
            absorb_scalar(c2, e2, pts, "X=" + f.name + ", Y=" + g.name);
            Expr e4 = metric_v_part(S.metric, v_proj(bracket(B, xiV, Xh)), v_proj(g.X));
            absorb_scalar(c4, e4, pts, "X=" + f.name + ", Y=" + g.name);
        }
    }
    return rep;
}

}  // namespace pacfin
