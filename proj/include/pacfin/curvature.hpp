#pragma once

// Curvature of the canonical connection: the six curvature blocks, flag and
// phi-flag curvatures, pseudo-orthonormal frames (hyperbolic Gram-Schmidt),
// the horizontal/vertical Ricci tensors (eps-weighted traces), and the
// residual checks for the curvature identities of K-paracontact and
// para-Sasakian structures.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "calculus.hpp"
#include "connection.hpp"

namespace pacfin {

struct FrameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegeneratePlaneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline VecField riemann(const Bundle& B, const FinslerConnection& D, const VecField& X,
                        const VecField& Y, const VecField& Z) {
    return cov_deriv(B, D, X, cov_deriv(B, D, Y, Z)) -
           cov_deriv(B, D, Y, cov_deriv(B, D, X, Z)) -
           cov_deriv(B, D, bracket(B, X, Y), Z);
}

inline VecField constant_field(const Bundle& B, const std::vector<double>& comps) {
    VecField f = VecField::zero(B.chart);
    const int n = B.chart.n(), m = B.chart.m();
    for (int i = 0; i < n; ++i) f.h[std::size_t(i)] = Expr::constant(comps[std::size_t(i)]);
    for (int a = 0; a < m; ++a) f.v[std::size_t(a)] = Expr::constant(comps[std::size_t(n + a)]);
    return f;
}

// Caches R(e_a, e_b) e_c and (D_{e_w} R)(e_a, e_b) e_c on the adapted frame.
// Curvature is tensorial in all slots, so constant-coefficient combinations
// contract against these cached fields exactly.
class CurvatureCache {
public:
    CurvatureCache(const Bundle& B, const FinslerConnection& D) : B_(&B), D_(&D) {
        for (int i = 0; i < B.chart.n(); ++i) frames_.push_back(frame_delta(B, i));
        for (int a = 0; a < B.chart.m(); ++a) frames_.push_back(frame_partial(B, a));
    }

    const Bundle& bundle() const { return *B_; }
    const FinslerConnection& connection() const { return *D_; }
    int dim() const { return int(frames_.size()); }
    const VecField& frame(int alpha) const { return frames_[std::size_t(alpha)]; }

    const VecField& riemann_frame(int alpha, int beta, int gamma) {
        int key = pack(alpha, beta, gamma, 0);
        if (auto it = r_.find(key); it != r_.end()) return it->second;
        VecField val = VecField::zero(B_->chart);
        if (alpha != beta) {
            if (alpha < beta) {
                val = riemann(*B_, *D_, frames_[std::size_t(alpha)], frames_[std::size_t(beta)],
                              frames_[std::size_t(gamma)]);
            } else {
                val = -riemann_frame(beta, alpha, gamma);
            }
        }
        return r_.emplace(key, std::move(val)).first->second;
    }

    // Coefficient of e_gamma in D_{e_w} e_alpha.
    Expr conn_coef(int w, int alpha, int gamma) const {
        const int n = B_->chart.n();
        const bool wh = w < n, ah = alpha < n, gh = gamma < n;
        if (ah != gh) return Expr::constant(0.0);
        if (wh && ah) return D_->F[std::size_t(w)][std::size_t(alpha)][std::size_t(gamma)];
        if (wh && !ah) return D_->Fbar[std::size_t(w)][std::size_t(alpha - n)][std::size_t(gamma - n)];
        if (!wh && ah) return D_->C[std::size_t(w - n)][std::size_t(alpha)][std::size_t(gamma)];
        return D_->Cbar[std::size_t(w - n)][std::size_t(alpha - n)][std::size_t(gamma - n)];
    }

    // (D_{e_w} R)(e_a, e_b) e_c.
    const VecField& covariant_riemann(int w, int alpha, int beta, int gamma) {
        int key = pack(alpha, beta, gamma, w + 1);
        if (auto it = dr_.find(key); it != dr_.end()) return it->second;
        VecField val = cov_deriv(*B_, *D_, frames_[std::size_t(w)], riemann_frame(alpha, beta, gamma));
        for (int g = 0; g < dim(); ++g) {
            Expr ca = conn_coef(w, alpha, g);
            if (!ca.is_zero()) val = val - ca * riemann_frame(g, beta, gamma);
            Expr cb = conn_coef(w, beta, g);
            if (!cb.is_zero()) val = val - cb * riemann_frame(alpha, g, gamma);
            Expr cc = conn_coef(w, gamma, g);
            if (!cc.is_zero()) val = val - cc * riemann_frame(alpha, beta, g);
        }
        return dr_.emplace(key, std::move(val)).first->second;
    }

private:
    int pack(int a, int b, int c, int w) const {
        int d = dim();
        return ((w * d + a) * d + b) * d + c;
    }

    const Bundle* B_;
    const FinslerConnection* D_;
    std::vector<VecField> frames_;
    std::map<int, VecField> r_, dr_;
};

// Numeric curvature data at one point: the metric blocks and the pure
// horizontal / pure vertical curvature tensors.
struct CurvatureAtPoint {
    MatD g, h;
    int n = 0, m = 0;
    std::vector<double> Rh;  // ((i*n+j)*n+k)*n+l, component l of R(e_i,e_j)e_k
    std::vector<double> Rv;

    double rh(int i, int j, int k, int l) const {
        return Rh[std::size_t(((i * n + j) * n + k) * n + l)];
    }
    double rv(int a, int b, int c, int d) const {
        return Rv[std::size_t(((a * m + b) * m + c) * m + d)];
    }
};

inline CurvatureAtPoint curvature_at_point(CurvatureCache& cache, const Metric& G, const Point& p) {
    const int n = cache.bundle().chart.n(), m = cache.bundle().chart.m();
    CurvatureAtPoint out;
    out.n = n;
    out.m = m;
    out.g = eval_mat(G.g, p);
    out.h = eval_mat(G.h, p);
    out.Rh.assign(std::size_t(n) * n * n * n, 0.0);
    out.Rv.assign(std::size_t(m) * m * m * m, 0.0);
    Evaluator ev(p);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const VecField& f = cache.riemann_frame(i, j, k);
                for (int l = 0; l < n; ++l) {
                    double v = ev(f.h[std::size_t(l)]);
                    out.Rh[std::size_t(((i * n + j) * n + k) * n + l)] = v;
                    out.Rh[std::size_t(((j * n + i) * n + k) * n + l)] = -v;
                }
            }
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                const VecField& f = cache.riemann_frame(n + a, n + b, n + c);
                for (int d = 0; d < m; ++d) {
                    double v = ev(f.v[std::size_t(d)]);
                    out.Rv[std::size_t(((a * m + b) * m + c) * m + d)] = v;
                    out.Rv[std::size_t(((b * m + a) * m + c) * m + d)] = -v;
                }
            }
    return out;
}

namespace blockops {

inline double inner(const MatD& g, const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) s += g(i, j) * u[std::size_t(i)] * v[std::size_t(j)];
    return s;
}

// R(X, Y)Z contracted inside one block.
inline std::vector<double> curv(const std::vector<double>& R, int d, const std::vector<double>& X,
                                const std::vector<double>& Y, const std::vector<double>& Z) {
    std::vector<double> out(std::size_t(d), 0.0);
    for (int i = 0; i < d; ++i) {
        double xi = X[std::size_t(i)];
        if (xi == 0.0) continue;
        for (int j = 0; j < d; ++j) {
            double yj = Y[std::size_t(j)];
            if (yj == 0.0) continue;
            for (int k = 0; k < d; ++k) {
                double zk = Z[std::size_t(k)];
                if (zk == 0.0) continue;
                double f = xi * yj * zk;
                const std::size_t base = std::size_t(((i * d + j) * d + k) * d);
                for (int l = 0; l < d; ++l) out[std::size_t(l)] += f * R[base + std::size_t(l)];
            }
        }
    }
    return out;
}

}  // namespace blockops

// Flag curvature of span{X, Y} inside one block:
// K = g(R(X,Y)Y, X) / (g(X,X) g(Y,Y) - g(X,Y)^2).
inline double flag_curvature_block(const MatD& g, const std::vector<double>& R, int d,
                                   const std::vector<double>& X, const std::vector<double>& Y) {
    double gxx = blockops::inner(g, X, X);
    double gyy = blockops::inner(g, Y, Y);
    double gxy = blockops::inner(g, X, Y);
    double denom = gxx * gyy - gxy * gxy;
    if (std::abs(denom) <= 1e-10) throw DegeneratePlaneError("flag curvature plane is degenerate");
    auto rxyy = blockops::curv(R, d, X, Y, Y);
    return blockops::inner(g, rxyy, X) / denom;
}

// Ordered pseudo-orthonormal frame of one distribution at a point: the Reeb
// member first normalized to g(xi, xi) = 1, then hyperbolic Gram-Schmidt over
// the coordinate candidates, pivoting on the largest remaining |g(v, v)|.
struct PseudoFrame {
    std::vector<std::vector<double>> E;
    std::vector<double> signs;  // +1 or -1 per member of E
    std::vector<double> xi;
};

inline PseudoFrame pseudo_orthonormal_frame(const MatD& g, const std::vector<double>& xi,
                                            SplitMix64* shuffle = nullptr) {
    const int d = g.rows;
    double q = blockops::inner(g, xi, xi);
    if (std::abs(q - 1.0) > 1e-6)
        throw FrameError("reeb member is not unit: g(xi,xi) = " + std::to_string(q));

    PseudoFrame fr;
    fr.xi = xi;
    std::vector<std::vector<double>> candidates;
    for (int i = 0; i < d; ++i) {
        std::vector<double> e(std::size_t(d), 0.0);
        e[std::size_t(i)] = 1.0;
        candidates.push_back(std::move(e));
    }
    if (shuffle) {
        for (int i = d - 1; i > 0; --i) {
            int j = shuffle->below(i + 1);
            std::swap(candidates[std::size_t(i)], candidates[std::size_t(j)]);
        }
    }

    std::vector<std::vector<double>> chosen{xi};
    std::vector<double> chosen_q{1.0};
    while (int(fr.E.size()) < d - 1) {
        int best = -1;
        double best_norm = 0.0;
        std::vector<double> best_vec;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            std::vector<double> v = candidates[c];
            for (std::size_t k = 0; k < chosen.size(); ++k) {
                double proj = blockops::inner(g, v, chosen[k]) / chosen_q[k];
                for (int i = 0; i < d; ++i) v[std::size_t(i)] -= proj * chosen[k][std::size_t(i)];
            }
            double nv = std::abs(blockops::inner(g, v, v));
            if (nv > best_norm) {
                best_norm = nv;
                best = int(c);
                best_vec = std::move(v);
            }
        }
        if (best < 0 || best_norm < 1e-10)
            throw FrameError("degenerate pivot in pseudo-orthonormal frame");
        double qv = blockops::inner(g, best_vec, best_vec);
        double scale = 1.0 / std::sqrt(std::abs(qv));
        for (auto& x : best_vec) x *= scale;
        double sign = qv > 0 ? 1.0 : -1.0;
        fr.E.push_back(best_vec);
        fr.signs.push_back(sign);
        chosen.push_back(best_vec);
        chosen_q.push_back(sign);
        candidates.erase(candidates.begin() + best);
    }
    return fr;
}

// eps-weighted Ricci trace over a pseudo frame:
// S(X, Y) = sum_i eps_i g(R(E_i, X)Y, E_i) + g(R(xi, X)Y, xi).
inline double ricci_block(const MatD& g, const std::vector<double>& R, int d,
                          const PseudoFrame& fr, const std::vector<double>& X,
                          const std::vector<double>& Y) {
    double s = 0.0;
    for (std::size_t i = 0; i < fr.E.size(); ++i) {
        auto r = blockops::curv(R, d, fr.E[i], X, Y);
        s += fr.signs[i] * blockops::inner(g, r, fr.E[i]);
    }
    auto r = blockops::curv(R, d, fr.xi, X, Y);
    s += blockops::inner(g, r, fr.xi);
    return s;
}

// Flag curvature of the vertical phi-section span{X^V, phi X^V} at p.
// X must be unit and orthogonal to xi^V; phi X^V is then non-null for a
// compatible metric, and the plane's Gram determinant is -1.
inline double vertical_phi_flag(const PacStructure& S, CurvatureCache& cache,
                                const std::vector<double>& Xv, const Point& p) {
    const int m = S.bundle.chart.m();
    CurvatureAtPoint cp = curvature_at_point(cache, S.metric, p);
    Evaluator ev(p);
    std::vector<double> xiv(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) xiv[std::size_t(a)] = ev(S.xi.v[std::size_t(a)]);
    if (std::abs(blockops::inner(cp.h, Xv, Xv) - 1.0) > 1e-6)
        throw DegeneratePlaneError("phi-section vector is not unit");
    if (std::abs(blockops::inner(cp.h, Xv, xiv)) > 1e-6)
        throw DegeneratePlaneError("phi-section vector is not orthogonal to the Reeb member");
    std::vector<double> phiX = matvec(eval_mat(S.phi_v, p), Xv);
    return flag_curvature_block(cp.h, cp.Rv, m, Xv, phiX);
}

// Pointwise Ricci values over freshly built pseudo-orthonormal frames.
inline double ricci_h(const PacStructure& S, CurvatureCache& cache, const std::vector<double>& X,
                      const std::vector<double>& Y, const Point& p) {
    const int n = S.bundle.chart.n();
    CurvatureAtPoint cp = curvature_at_point(cache, S.metric, p);
    Evaluator ev(p);
    std::vector<double> xih(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xih[std::size_t(i)] = ev(S.xi.h[std::size_t(i)]);
    PseudoFrame fr = pseudo_orthonormal_frame(cp.g, xih);
    return ricci_block(cp.g, cp.Rh, n, fr, X, Y);
}

inline double ricci_v(const PacStructure& S, CurvatureCache& cache, const std::vector<double>& X,
                      const std::vector<double>& Y, const Point& p) {
    const int m = S.bundle.chart.m();
    CurvatureAtPoint cp = curvature_at_point(cache, S.metric, p);
    Evaluator ev(p);
    std::vector<double> xiv(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) xiv[std::size_t(a)] = ev(S.xi.v[std::size_t(a)]);
    PseudoFrame fr = pseudo_orthonormal_frame(cp.h, xiv);
    return ricci_block(cp.h, cp.Rv, m, fr, X, Y);
}

// Max-abs of (D_W R)(X, Y)Z over frame quadruples at p. vertical_only
// restricts every slot to the vertical distribution (the gate used by the
// phi-flag check).
inline double local_symmetry_residual(CurvatureCache& cache, const Point& p,
                                      bool vertical_only = false) {
    const int n = cache.bundle().chart.n(), d = cache.dim();
    int lo = vertical_only ? n : 0;
    Evaluator ev(p);
    double worst = 0.0;
    for (int w = lo; w < d; ++w)
        for (int a = lo; a < d; ++a)
            for (int b = a + 1; b < d; ++b)
                for (int c = lo; c < d; ++c) {
                    const VecField& f = cache.covariant_riemann(w, a, b, c);
                    for (const auto& e : f.h) worst = std::max(worst, std::abs(ev(e)));
                    for (const auto& e : f.v) worst = std::max(worst, std::abs(ev(e)));
                }
    return worst;
}

// ---------------------------------------------------------------------------
// Curvature identity checks. Hypothesis gating is the caller's business;
// these compute residuals only.

// R(X^V, xi^V) xi^V = -1/4 (X^V - eta_v(X^V) xi^V) and the horizontal version
// with the D^V_{[X^H, xi^H]} xi^H correction term.
inline CheckReport reeb_curvature_identities(const PacStructure& S, const FinslerConnection& D,
                                             const std::vector<Point>& pts,
                                             const std::vector<TestField>& fields) {
    CheckReport rep{"curvature_reeb_reeb", {}};
    const Bundle& B = S.bundle;
    VecField xiH = xi_h_part(S), xiV = xi_v_part(S);
    OneForm etaH = eta_h_part(S), etaV = eta_v_part(S);
    const Expr quarter = Expr::constant(0.25);
    auto& cv = rep.clause("vertical");
    auto& ch = rep.clause("horizontal");
    for (const auto& f : fields) {
        VecField Xv = v_proj(f.X);
        VecField rv = riemann(B, D, Xv, xiV, xiV) +
                      quarter * (Xv - form_apply(etaV, Xv) * xiV);
        absorb_field(cv, rv, pts, "X=" + f.name);
        VecField Xh = h_proj(f.X);
        VecField corr = cov_deriv(B, D, v_proj(bracket(B, Xh, xiH)), xiH);
        VecField rh = riemann(B, D, Xh, xiH, xiH) +
                      quarter * (Xh - form_apply(etaH, Xh) * xiH) + corr;
        absorb_field(ch, rh, pts, "X=" + f.name);
    }
    return rep;
}

// R(X, Y) xi identities for para-Sasakian structures.
inline CheckReport pair_reeb_curvature(const PacStructure& S, const FinslerConnection& D,
                                       const std::vector<Point>& pts,
                                       const std::vector<TestField>& fields) {
    CheckReport rep{"curvature_pair_reeb", {}};
    const Bundle& B = S.bundle;
    VecField xiH = xi_h_part(S), xiV = xi_v_part(S);
    OneForm etaH = eta_h_part(S), etaV = eta_v_part(S);
    const Expr quarter = Expr::constant(0.25);
    auto& cv = rep.clause("vertical");
    auto& ch = rep.clause("horizontal");
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t j = i + 1; j < fields.size(); ++j) {
            std::string pair = "X=" + fields[i].name + ", Y=" + fields[j].name;
            VecField Xv = v_proj(fields[i].X), Yv = v_proj(fields[j].X);
            VecField rv = riemann(B, D, Xv, Yv, xiV) -
                          quarter * (form_apply(etaV, Xv) * Yv - form_apply(etaV, Yv) * Xv);
            absorb_field(cv, rv, pts, pair);
            VecField Xh = h_proj(fields[i].X), Yh = h_proj(fields[j].X);
            VecField corr = cov_deriv(B, D, v_proj(bracket(B, Xh, Yh)), xiH);
            VecField rh = riemann(B, D, Xh, Yh, xiH) -
                          quarter * (form_apply(etaH, Xh) * Yh - form_apply(etaH, Yh) * Xh) + corr;
            absorb_field(ch, rh, pts, pair);
        }
    return rep;
}

// (D_{X^H} phi) Y^H = 1/2 { eta_h(Y) X^H - G^H(X, Y) xi^H } and the vertical
// mirror, for para-Sasakian structures.
inline CheckReport phi_covariant_identity(const PacStructure& S, const FinslerConnection& D,
                                          const std::vector<Point>& pts,
                                          const std::vector<TestField>& fields) {
    CheckReport rep{"phi_covariant_identity", {}};
    VecField xiH = xi_h_part(S), xiV = xi_v_part(S);
    OneForm etaH = eta_h_part(S), etaV = eta_v_part(S);
    const Expr half = Expr::constant(0.5);
    auto& ch = rep.clause("horizontal");
    auto& cv = rep.clause("vertical");
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (i == j) continue;
            std::string pair = "X=" + fields[i].name + ", Y=" + fields[j].name;
            VecField Xh = h_proj(fields[i].X), Yh = h_proj(fields[j].X);
            VecField rh = cov_deriv_phi(S, D, Xh, Yh) -
                          half * (form_apply(etaH, Yh) * Xh -
                                  metric_h_part(S.metric, Xh, Yh) * xiH);
            absorb_field(ch, rh, pts, pair);
            VecField Xv = v_proj(fields[i].X), Yv = v_proj(fields[j].X);
            VecField rv = cov_deriv_phi(S, D, Xv, Yv) -
                          half * (form_apply(etaV, Yv) * Xv -
                                  metric_v_part(S.metric, Xv, Yv) * xiV);
            absorb_field(cv, rv, pts, pair);
        }
    return rep;
}

// D_xi phi = 0 for paracontact metric structures.
inline CheckReport phi_covariant_reeb(const PacStructure& S, const FinslerConnection& D,
                                      const std::vector<Point>& pts,
                                      const std::vector<TestField>& fields) {
    CheckReport rep{"phi_covariant_reeb", {}};
    VecField xiH = xi_h_part(S), xiV = xi_v_part(S);
    auto& ch = rep.clause("along_xi_h");
    auto& cv = rep.clause("along_xi_v");
    for (const auto& f : fields) {
        absorb_field(ch, cov_deriv_phi(S, D, xiH, f.X), pts, "Y=" + f.name);
        absorb_field(cv, cov_deriv_phi(S, D, xiV, f.X), pts, "Y=" + f.name);
    }
    return rep;
}

// The six-term expansion of 2G((D_X phi)Y, Z) on an almost paracontact metric
// structure, every right-hand term evaluated independently.
inline CheckReport covariant_phi_expansion(const PacStructure& S, const FinslerConnection& D,
                                           const std::vector<Point>& pts,
                                           const std::vector<TestField>& fields,
                                           std::size_t max_random_triples = 4) {
    CheckReport rep{"covariant_phi_expansion", {}};
    const Bundle& B = S.bundle;
    OneForm etaH = eta_h_part(S), etaV = eta_v_part(S);
    BilinearForm Phi = fundamental_form(S);
    const Expr two = Expr::constant(2.0);

    auto n2_pair = [&](const VecField& Y, const VecField& Z, const OneForm& eta_blk) {
        return form_apply(lie_oneform(B, phi_apply(S, Y), eta_blk), Z) -
               form_apply(lie_oneform(B, phi_apply(S, Z), eta_blk), Y);
    };

    auto horizontal_residual = [&](const VecField& X0, const VecField& Y0, const VecField& Z0) {
        VecField X = h_proj(X0), Y = h_proj(Y0), Z = h_proj(Z0);
        VecField phiX = phi_apply(S, X), phiY = phi_apply(S, Y), phiZ = phi_apply(S, Z);
        Expr lhs = two * metric_apply(S.metric, cov_deriv_phi(S, D, X, Y), Z);
        Expr rhs = -d_twoform(B, Phi, X, phiY, phiZ) - d_twoform(B, Phi, X, Y, Z) -
                   metric_apply(S.metric, normality_n1(S, Y, Z), phiX) +
                   n2_pair(Y, Z, etaH) * form_apply(S.eta, X) +
                   d_oneform(B, etaH, phiY, X) * form_apply(S.eta, Z) -
                   d_oneform(B, etaH, phiZ, X) * form_apply(S.eta, Y);
        return lhs - rhs;
    };
    auto vertical_residual = [&](const VecField& X0, const VecField& Y0, const VecField& Z0) {
        VecField X = v_proj(X0), Y = v_proj(Y0), Z = v_proj(Z0);
        VecField phiX = phi_apply(S, X), phiY = phi_apply(S, Y), phiZ = phi_apply(S, Z);
        Expr lhs = two * metric_apply(S.metric, cov_deriv_phi(S, D, X, Y), Z);
        Expr rhs = -d_twoform(B, Phi, X, phiY, phiZ) - d_twoform(B, Phi, X, Y, Z) -
                   metric_apply(S.metric, normality_n1(S, Y, Z), phiX) +
                   n2_pair(Y, Z, etaV) * form_apply(S.eta, X) +
                   d_oneform(B, etaV, phiY, X) * form_apply(S.eta, Z) -
                   d_oneform(B, etaV, phiZ, X) * form_apply(S.eta, Y);
        return lhs - rhs;
    };

    auto& ch = rep.clause("horizontal");
    auto& cv = rep.clause("vertical");
    const int n = B.chart.n(), m = B.chart.m();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                std::string trip = "X=delta_" + std::to_string(i + 1) + ", Y=delta_" +
                                   std::to_string(j + 1) + ", Z=delta_" + std::to_string(k + 1);
                absorb_scalar(ch,
                              horizontal_residual(frame_delta(B, i), frame_delta(B, j),
                                                  frame_delta(B, k)),
                              pts, trip);
            }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                std::string trip = "X=dy_" + std::to_string(a + 1) + ", Y=dy_" +
                                   std::to_string(b + 1) + ", Z=dy_" + std::to_string(c + 1);
                absorb_scalar(cv,
                              vertical_residual(frame_partial(B, a), frame_partial(B, b),
                                                frame_partial(B, c)),
                              pts, trip);
            }
    // a few random triples to exercise the derivative-of-component terms
    std::vector<const TestField*> rnd;
    for (const auto& f : fields)
        if (f.name.rfind("rand", 0) == 0) rnd.push_back(&f);
    for (std::size_t t = 0; t + 2 < rnd.size() && t < max_random_triples; ++t) {
        std::string trip = "X=" + rnd[t]->name + ", Y=" + rnd[t + 1]->name + ", Z=" + rnd[t + 2]->name;
        absorb_scalar(ch, horizontal_residual(rnd[t]->X, rnd[t + 1]->X, rnd[t + 2]->X), pts, trip);
        absorb_scalar(cv, vertical_residual(rnd[t]->X, rnd[t + 1]->X, rnd[t + 2]->X), pts, trip);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Numeric flag-curvature and Ricci machinery. Pre-assembles the bracket /
// covariant-derivative fields that the correction scalars contract against,
// so per-point work is pure numeric tensor contraction.

class ReebCorrections {
public:
    ReebCorrections(const PacStructure& S, const FinslerConnection& D) : S_(&S) {
        const Bundle& B = S.bundle;
        const int n = B.chart.n();
        VecField xiH = xi_h_part(S);
        // U_i = D_{[e_i, xi^H]^V} xi^H, and U_{ij} = D_{[e_i, e_j]^V} xi^H
        for (int i = 0; i < n; ++i)
            u_xi_.push_back(cov_deriv(B, D, v_proj(bracket(B, frame_delta(B, i), xiH)), xiH));
        u_pair_.assign(std::size_t(n), std::vector<VecField>(std::size_t(n), VecField::zero(B.chart)));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                VecField u = cov_deriv(B, D, v_proj(bracket(B, frame_delta(B, i), frame_delta(B, j))), xiH);
                u_pair_[std::size_t(i)][std::size_t(j)] = u;
                u_pair_[std::size_t(j)][std::size_t(i)] = -u;
            }
    }

    struct AtPoint {
        std::vector<std::vector<double>> u_xi;                 // n vectors (h components)
        std::vector<std::vector<std::vector<double>>> u_pair;  // n x n vectors
        MatD g;
        std::vector<double> xi_h;
        std::vector<double> eta_h;
    };

    AtPoint at(const Point& p) const {
        const Bundle& B = S_->bundle;
        const int n = B.chart.n();
        Evaluator ev(p);
        AtPoint out;
        out.g = eval_mat(S_->metric.g, p);
        for (int i = 0; i < n; ++i) {
            std::vector<double> u(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) u[std::size_t(k)] = ev(u_xi_[std::size_t(i)].h[std::size_t(k)]);
            out.u_xi.push_back(std::move(u));
        }
        out.u_pair.assign(std::size_t(n), std::vector<std::vector<double>>(std::size_t(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::vector<double> u(static_cast<std::size_t>(n));
                for (int k = 0; k < n; ++k)
                    u[std::size_t(k)] = ev(u_pair_[std::size_t(i)][std::size_t(j)].h[std::size_t(k)]);
                out.u_pair[std::size_t(i)][std::size_t(j)] = std::move(u);
            }
        for (int i = 0; i < n; ++i) {
            out.xi_h.push_back(ev(S_->xi.h[std::size_t(i)]));
            out.eta_h.push_back(ev(S_->eta.h[std::size_t(i)]));
        }
        return out;
    }

    // G(D^V_{[X, xi^H]} xi^H, W) for constant horizontal X, W at the point.
    static double scalar_x_xi(const AtPoint& d, const std::vector<double>& X,
                              const std::vector<double>& W) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.u_xi.size(); ++i)
            s += X[i] * blockops::inner(d.g, d.u_xi[i], W);
        return s;
    }
    // G(D^V_{[E, X]} xi^H, W) for constant horizontal E, X, W.
    static double scalar_pair(const AtPoint& d, const std::vector<double>& E,
                              const std::vector<double>& X, const std::vector<double>& W) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.u_pair.size(); ++i)
            for (std::size_t j = 0; j < d.u_pair.size(); ++j)
                s += E[i] * X[j] * blockops::inner(d.g, d.u_pair[i][j], W);
        return s;
    }

private:
    const PacStructure* S_;
    std::vector<VecField> u_xi_;
    std::vector<std::vector<VecField>> u_pair_;
};

// Random unit combination of the non-Reeb frame members; sign is the causal
// type g(X, X) = +-1.
inline std::vector<double> random_unit_in_frame(const PseudoFrame& fr, SplitMix64& rng,
                                                int want_sign = 0) {
    const std::size_t d = fr.xi.size();
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<double> X(d, 0.0);
        double q = 0.0;
        std::vector<double> c(fr.E.size());
        for (std::size_t i = 0; i < fr.E.size(); ++i) {
            c[i] = rng.uniform(-1.0, 1.0);
            q += fr.signs[i] * c[i] * c[i];
        }
        if (std::abs(q) < 0.05) continue;
        if (want_sign != 0 && q * want_sign <= 0) continue;
        double scale = 1.0 / std::sqrt(std::abs(q));
        for (std::size_t i = 0; i < fr.E.size(); ++i)
            for (std::size_t k = 0; k < d; ++k) X[k] += scale * c[i] * fr.E[i][k];
        return X;
    }
    throw FrameError("could not draw a unit vector of the requested causal type");
}

// Flag curvature of planes containing the Reeb fields. The vertical values
// must equal -1/4 on a K-paracontact structure; the horizontal value differs
// from -1/4 exactly by the correction scalar G(D^V_{[X,xi]}xi, X) / g(X,X).
struct ReebFlagReport {
    CheckReport rep{"flag_curvature_reeb", {}};
    std::vector<double> vertical_values, horizontal_values, corrections;
};

inline ReebFlagReport reeb_flag_curvatures(const PacStructure& S, const FinslerConnection& D,
                                           CurvatureCache& cache, const std::vector<Point>& pts,
                                           std::uint64_t seed, int samples_per_point = 2) {
    ReebFlagReport out;
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    ReebCorrections corr(S, D);
    SplitMix64 rng(seed ^ 0x5eedf1a6ULL);
    auto& vval = out.rep.clause("vertical_value");
    auto& hidn = out.rep.clause("horizontal_identity");
    auto& hval = out.rep.clause("horizontal_value_when_correction_vanishes");
    for (const auto& p : pts) {
        CurvatureAtPoint cp = curvature_at_point(cache, S.metric, p);
        Evaluator ev(p);
        std::vector<double> xiv(static_cast<std::size_t>(m));
        std::vector<double> xih(static_cast<std::size_t>(n));
        for (int a = 0; a < m; ++a) xiv[std::size_t(a)] = ev(S.xi.v[std::size_t(a)]);
        for (int i = 0; i < n; ++i) xih[std::size_t(i)] = ev(S.xi.h[std::size_t(i)]);
        PseudoFrame fv = pseudo_orthonormal_frame(cp.h, xiv);
        PseudoFrame fh = pseudo_orthonormal_frame(cp.g, xih);
        ReebCorrections::AtPoint cd = corr.at(p);
        for (int s = 0; s < samples_per_point; ++s) {
            std::vector<double> Xv = random_unit_in_frame(fv, rng);
            double kv = flag_curvature_block(cp.h, cp.Rv, m, Xv, xiv);
            out.vertical_values.push_back(kv);
            vval.absorb(kv + 0.25, p, "vertical flag");
            std::vector<double> Xh = random_unit_in_frame(fh, rng);
            double kh = flag_curvature_block(cp.g, cp.Rh, n, Xh, xih);
            double gxx = blockops::inner(cp.g, Xh, Xh);
            double c = ReebCorrections::scalar_x_xi(cd, Xh, Xh);
            out.horizontal_values.push_back(kh);
            out.corrections.push_back(c);
            hidn.absorb(kh + 0.25 + c / gxx, p, "horizontal flag identity");
            if (std::abs(c) < 1e-8) hval.absorb(kh + 0.25, p, "horizontal flag");
        }
    }
    return out;
}

// Ricci identities. The para-Sasakian clauses need the pair-Reeb curvature
// identity; the Reeb-Reeb clauses already hold for K-paracontact structures.
inline CheckReport ricci_identities(const PacStructure& S, const FinslerConnection& D,
                                    CurvatureCache& cache, const std::vector<Point>& pts,
                                    std::uint64_t seed, bool para_sasakian_level) {
    CheckReport rep{"ricci_reeb", {}};
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    const int k1 = S.bundle.chart.k1, k2 = S.bundle.chart.k2;
    ReebCorrections corr(S, D);
    SplitMix64 rng(seed ^ 0x71cc1ULL);
    auto& vrr = rep.clause("vertical_reeb_reeb");
    auto& hrr = rep.clause("horizontal_reeb_reeb");
    auto& find = rep.clause("frame_independence");
    Residual* vxr = nullptr;
    Residual* hxr = nullptr;
    if (para_sasakian_level) {
        vxr = &rep.clause("vertical_x_reeb");
        hxr = &rep.clause("horizontal_x_reeb_with_correction");
    }
    for (const auto& p : pts) {
        CurvatureAtPoint cp = curvature_at_point(cache, S.metric, p);
        Evaluator ev(p);
        std::vector<double> xiv(static_cast<std::size_t>(m));
        std::vector<double> xih(static_cast<std::size_t>(n));
        std::vector<double> etav(static_cast<std::size_t>(m));
        for (int a = 0; a < m; ++a) {
            xiv[std::size_t(a)] = ev(S.xi.v[std::size_t(a)]);
            etav[std::size_t(a)] = ev(S.eta.v[std::size_t(a)]);
        }
        for (int i = 0; i < n; ++i) xih[std::size_t(i)] = ev(S.xi.h[std::size_t(i)]);
        PseudoFrame fv = pseudo_orthonormal_frame(cp.h, xiv);
        PseudoFrame fh = pseudo_orthonormal_frame(cp.g, xih);
        ReebCorrections::AtPoint cd = corr.at(p);

        double svxx = ricci_block(cp.h, cp.Rv, m, fv, xiv, xiv);
        vrr.absorb(svxx + 0.5 * k2, p, "S_v(xi, xi)");

        // eps-weighted correction sum_i eps_i G(D^V_{[E_i, xi]} xi, E_i)
        double corr_xi = 0.0;
        for (std::size_t i = 0; i < fh.E.size(); ++i)
            corr_xi += fh.signs[i] * ReebCorrections::scalar_x_xi(cd, fh.E[i], fh.E[i]);
        double shxx = ricci_block(cp.g, cp.Rh, n, fh, xih, xih);
        hrr.absorb(shxx + 0.5 * k1 + corr_xi, p, "S_h(xi, xi)");

        // frame independence: shuffled pivot order
        SplitMix64 shuffle(seed ^ 0xabcdULL);
        PseudoFrame fv2 = pseudo_orthonormal_frame(cp.h, xiv, &shuffle);
        PseudoFrame fh2 = pseudo_orthonormal_frame(cp.g, xih, &shuffle);
        find.absorb(ricci_block(cp.h, cp.Rv, m, fv2, xiv, xiv) - svxx, p, "S_v(xi, xi)");
        find.absorb(ricci_block(cp.g, cp.Rh, n, fh2, xih, xih) - shxx, p, "S_h(xi, xi)");

        if (para_sasakian_level) {
            std::vector<double> Xv = random_unit_in_frame(fv, rng);
            double sv = ricci_block(cp.h, cp.Rv, m, fv, Xv, xiv);
            double etaX = 0.0;
            for (int a = 0; a < m; ++a) etaX += etav[std::size_t(a)] * Xv[std::size_t(a)];
            vxr->absorb(sv + 0.5 * k2 * etaX, p, "S_v(X, xi)");

            std::vector<double> Xh = random_unit_in_frame(fh, rng);
            double sh = ricci_block(cp.g, cp.Rh, n, fh, Xh, xih);
            double etaXh = 0.0;
            for (int i = 0; i < n; ++i) etaXh += cd.eta_h[std::size_t(i)] * Xh[std::size_t(i)];
            double c = 0.0;
            for (std::size_t i = 0; i < fh.E.size(); ++i)
                c += fh.signs[i] * ReebCorrections::scalar_pair(cd, fh.E[i], Xh, fh.E[i]);
            double xiterm = ReebCorrections::scalar_x_xi(cd, Xh, xih);
            hxr->absorb(sh + 0.5 * k1 * etaXh + c - xiterm, p, "S_h(X, xi)");
        }
    }
    return rep;
}

// Vertical phi-flag curvature, hypothesis-gated on local symmetry of the
// vertical block at each sample point. Reports how many points passed the
// gate; with none, the caller marks the check hypothesis-not-met.
struct PhiFlagReport {
    CheckReport rep{"phi_flag_curvature", {}};
    int gated_points = 0;
    int total_points = 0;
    std::vector<double> values;
};

inline PhiFlagReport phi_flag_symmetric(const PacStructure& S, CurvatureCache& cache,
                                        const std::vector<Point>& pts, std::uint64_t seed,
                                        double gate_tol) {
    PhiFlagReport out;
    const int m = S.bundle.chart.m();
    SplitMix64 rng(seed ^ 0x9f1a6ULL);
    auto& val = out.rep.clause("gated_value");
    auto& orth = out.rep.clause("phi_section_orthogonality");
    for (const auto& p : pts) {
        out.total_points++;
        if (local_symmetry_residual(cache, p, /*vertical_only=*/true) >= gate_tol) continue;
        out.gated_points++;
        CurvatureAtPoint cp = curvature_at_point(cache, S.metric, p);
        Evaluator ev(p);
        std::vector<double> xiv(static_cast<std::size_t>(m));
        for (int a = 0; a < m; ++a) xiv[std::size_t(a)] = ev(S.xi.v[std::size_t(a)]);
        PseudoFrame fv = pseudo_orthonormal_frame(cp.h, xiv);
        MatD phiv = eval_mat(S.phi_v, p);
        std::vector<double> Xv = random_unit_in_frame(fv, rng, /*want_sign=*/+1);
        std::vector<double> phiX = matvec(phiv, Xv);
        orth.absorb(blockops::inner(cp.h, Xv, phiX), p, "G(X, phi X)");
        double k = flag_curvature_block(cp.h, cp.Rv, m, Xv, phiX);
        out.values.push_back(k);
        val.absorb(k + 0.25, p, "phi-flag value");
    }
    return out;
}

}  // namespace pacfin
