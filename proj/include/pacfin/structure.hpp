#pragma once

// The quadruple (phi, eta, xi, G): structure axioms, derived identities,
// rank of phi, metric compatibility, the fundamental 2-form, and the
// paracontact-metric predicate.
//
// phi is block diagonal in the adapted frame by construction. Every check
// returns residuals with a witness point and witness field description;
// thresholds are applied by the caller. All residual norms are max-abs over
// components, never metric norms (the compatible metric is indefinite).

#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "dtensor.hpp"

namespace pacfin {

struct PacStructure {
    Bundle bundle;
    ExprMat phi_h;  // n x n
    ExprMat phi_v;  // m x m
    OneForm eta;
    VecField xi;
    Metric metric;
};

inline OneForm eta_h_part(const PacStructure& S) {
    OneForm r = OneForm::zero(S.bundle.chart);
    r.h = S.eta.h;
    return r;
}

inline OneForm eta_v_part(const PacStructure& S) {
    OneForm r = OneForm::zero(S.bundle.chart);
    r.v = S.eta.v;
    return r;
}

inline VecField xi_h_part(const PacStructure& S) { return h_proj(S.xi); }
inline VecField xi_v_part(const PacStructure& S) { return v_proj(S.xi); }

inline VecField phi_apply(const PacStructure& S, const VecField& X) {
    VecField r = VecField::zero(S.bundle.chart);
    for (std::size_t i = 0; i < S.phi_h.size(); ++i)
        for (std::size_t j = 0; j < S.phi_h[i].size(); ++j)
            r.h[i] = r.h[i] + S.phi_h[i][j] * X.h[j];
    for (std::size_t a = 0; a < S.phi_v.size(); ++a)
        for (std::size_t b = 0; b < S.phi_v[a].size(); ++b)
            r.v[a] = r.v[a] + S.phi_v[a][b] * X.v[b];
    return r;
}

// ---------------------------------------------------------------------------
// Residual plumbing shared by every check in the library.

struct Witness {
    Point point;
    std::string detail;
};

struct Residual {
    double value = 0.0;
    Witness witness;

    void absorb(double v, const Point& p, const std::string& detail) {
        double a = std::abs(v);
        if (a > value) {
            value = a;
            witness = {p, detail};
        }
    }
    void absorb(const Residual& other) {
        if (other.value > value) {
            value = other.value;
            witness = other.witness;
        }
    }
};

struct Clause {
    std::string name;
    Residual residual;
};

struct CheckReport {
    std::string name;
    std::deque<Clause> clauses;  // deque: clause references stay valid as checks add clauses

    Residual& clause(const std::string& cname) {
        for (auto& c : clauses)
            if (c.name == cname) return c.residual;
        clauses.push_back({cname, {}});
        return clauses.back().residual;
    }
    double max_residual() const {
        double m = 0.0;
        for (const auto& c : clauses) m = std::max(m, c.residual.value);
        return m;
    }
    const Clause* worst() const {
        const Clause* w = nullptr;
        for (const auto& c : clauses)
            if (!w || c.residual.value > w->residual.value) w = &c;
        return w;
    }
};

struct TestField {
    std::string name;
    VecField X;
};

// Spanning test-field set: the adapted frame fields plus seeded random
// polynomial fields of degree <= 2. Frame fields alone miss the
// derivative-of-component terms in Lie derivatives.
inline std::vector<TestField> spanning_fields(const Bundle& B, std::uint64_t seed,
                                              int random_count = 8, int degree = 2) {
    std::vector<TestField> out;
    const int n = B.chart.n(), m = B.chart.m();
    for (int i = 0; i < n; ++i) out.push_back({"delta_" + std::to_string(i + 1), frame_delta(B, i)});
    for (int a = 0; a < m; ++a) out.push_back({"dy_" + std::to_string(a + 1), frame_partial(B, a)});
    SplitMix64 rng(seed ^ 0xf1e1d5ULL);
    for (int r = 0; r < random_count; ++r) {
        VecField X = VecField::zero(B.chart);
        for (auto& e : X.h) e = random_polynomial(rng, n, m, degree, 3);
        for (auto& e : X.v) e = random_polynomial(rng, n, m, degree, 3);
        out.push_back({"rand_" + std::to_string(r + 1), X});
    }
    return out;
}

// Evaluates every component of a field expression at every sample point and
// folds the max-abs into `res`.
inline void absorb_field(Residual& res, const VecField& F, const std::vector<Point>& pts,
                         const std::string& detail) {
    for (const auto& p : pts) {
        Evaluator ev(p);
        for (const auto& e : F.h) res.absorb(ev(e), p, detail);
        for (const auto& e : F.v) res.absorb(ev(e), p, detail);
    }
}

inline void absorb_scalar(Residual& res, const Expr& e, const std::vector<Point>& pts,
                          const std::string& detail) {
    for (const auto& p : pts) {
        Evaluator ev(p);
        res.absorb(ev(e), p, detail);
    }
}

// ---------------------------------------------------------------------------
// Structure checks.

// phi^2 X = X - eta_h(X) xi_h - eta_v(X) xi_v and eta_h(xi_h) = eta_v(xi_v) = 1.
inline CheckReport check_axioms(const PacStructure& S, const std::vector<Point>& pts,
                                const std::vector<TestField>& fields) {
    CheckReport rep{"axioms", {}};
    OneForm etaH = eta_h_part(S), etaV = eta_v_part(S);
    VecField xiH = xi_h_part(S), xiV = xi_v_part(S);
    auto& sq = rep.clause("phi_square");
    for (const auto& f : fields) {
        VecField r = phi_apply(S, phi_apply(S, f.X)) - f.X +
                     form_apply(etaH, f.X) * xiH + form_apply(etaV, f.X) * xiV;
        absorb_field(sq, r, pts, "X=" + f.name);
    }
    absorb_scalar(rep.clause("eta_h_xi_h"), form_apply(etaH, xiH) - Expr::constant(1.0), pts,
                  "eta_h(xi_h)-1");
    absorb_scalar(rep.clause("eta_v_xi_v"), form_apply(etaV, xiV) - Expr::constant(1.0), pts,
                  "eta_v(xi_v)-1");
    return rep;
}

// Consequences of the axioms: phi(xi) = 0 and eta o phi = 0 on both blocks.
inline CheckReport derived_identities(const PacStructure& S, const std::vector<Point>& pts) {
    CheckReport rep{"derived_identities", {}};
    absorb_field(rep.clause("phi_xi_h"), phi_apply(S, xi_h_part(S)), pts, "phi(xi_h)");
    absorb_field(rep.clause("phi_xi_v"), phi_apply(S, xi_v_part(S)), pts, "phi(xi_v)");
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    auto& eh = rep.clause("eta_h_phi");
    for (int j = 0; j < n; ++j) {
        Expr s = Expr::constant(0.0);
        for (int i = 0; i < n; ++i) s = s + S.eta.h[std::size_t(i)] * S.phi_h[std::size_t(i)][std::size_t(j)];
        absorb_scalar(eh, s, pts, "(eta_h o phi)_" + std::to_string(j + 1));
    }
    auto& ev = rep.clause("eta_v_phi");
    for (int b = 0; b < m; ++b) {
        Expr s = Expr::constant(0.0);
        for (int a = 0; a < m; ++a) s = s + S.eta.v[std::size_t(a)] * S.phi_v[std::size_t(a)][std::size_t(b)];
        absorb_scalar(ev, s, pts, "(eta_v o phi)_" + std::to_string(b + 1));
    }
    return rep;
}

// Numeric rank of the full (n+m) x (n+m) block matrix of phi at p.
inline int rank_phi(const PacStructure& S, const Point& p, double sv_tol = 1e-8) {
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    MatD full(n + m, n + m);
    MatD ph = eval_mat(S.phi_h, p), pv = eval_mat(S.phi_v, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) full(i, j) = ph(i, j);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) full(n + a, n + b) = pv(a, b);
    return numeric_rank(full, sv_tol);
}

// G(phi X, phi Y) = -G(X, Y) + eta(X) eta(Y) blockwise, plus the consequences
// G(X, xi) = eta(X) and skew-adjointness of phi.
inline CheckReport check_compatibility(const PacStructure& S, const std::vector<Point>& pts,
                                       const std::vector<TestField>& fields) {
    CheckReport rep{"compatibility", {}};
    OneForm etaH = eta_h_part(S), etaV = eta_v_part(S);
    auto& ch = rep.clause("horizontal");
    auto& cv = rep.clause("vertical");
    auto& mx = rep.clause("metric_xi");
    auto& sk = rep.clause("phi_skew_adjoint");
    for (const auto& fx : fields) {
        VecField phiX = phi_apply(S, fx.X);
        absorb_scalar(mx, metric_apply(S.metric, fx.X, S.xi) - form_apply(S.eta, fx.X), pts,
                      "X=" + fx.name);
        for (const auto& fy : fields) {
            VecField phiY = phi_apply(S, fy.X);
            std::string pair = "X=" + fx.name + ", Y=" + fy.name;
            Expr rh = metric_h_part(S.metric, phiX, phiY) + metric_h_part(S.metric, fx.X, fy.X) -
                      form_apply(etaH, fx.X) * form_apply(etaH, fy.X);
            absorb_scalar(ch, rh, pts, pair);
            Expr rv = metric_v_part(S.metric, phiX, phiY) + metric_v_part(S.metric, fx.X, fy.X) -
                      form_apply(etaV, fx.X) * form_apply(etaV, fy.X);
            absorb_scalar(cv, rv, pts, pair);
            Expr sh = metric_h_part(S.metric, h_proj(fx.X), phi_apply(S, h_proj(fy.X))) +
                      metric_h_part(S.metric, phi_apply(S, h_proj(fx.X)), h_proj(fy.X));
            Expr sv = metric_v_part(S.metric, v_proj(fx.X), phi_apply(S, v_proj(fy.X))) +
                      metric_v_part(S.metric, phi_apply(S, v_proj(fx.X)), v_proj(fy.X));
            absorb_scalar(sk, sh + sv, pts, pair);
        }
    }
    return rep;
}

// Phi(X, Y) = G(X, phi Y); mixed blocks vanish identically.
inline BilinearForm fundamental_form(const PacStructure& S) {
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    BilinearForm F = BilinearForm::zero(S.bundle.chart);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expr s = Expr::constant(0.0);
            for (int k = 0; k < n; ++k)
                s = s + S.metric.g[std::size_t(i)][std::size_t(k)] * S.phi_h[std::size_t(k)][std::size_t(j)];
            F.hh[std::size_t(i)][std::size_t(j)] = s;
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            Expr s = Expr::constant(0.0);
            for (int c = 0; c < m; ++c)
                s = s + S.metric.h[std::size_t(a)][std::size_t(c)] * S.phi_v[std::size_t(c)][std::size_t(b)];
            F.vv[std::size_t(a)][std::size_t(b)] = s;
        }
    return F;
}

inline CheckReport fundamental_form_identities(const PacStructure& S,
                                               const std::vector<Point>& pts) {
    CheckReport rep{"fundamental_form", {}};
    BilinearForm F = fundamental_form(S);
    auto& anti = rep.clause("antisymmetry");
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            absorb_scalar(anti, F.hh[std::size_t(i)][std::size_t(j)] + F.hh[std::size_t(j)][std::size_t(i)],
                          pts, "hh[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            absorb_scalar(anti, F.vv[std::size_t(a)][std::size_t(b)] + F.vv[std::size_t(b)][std::size_t(a)],
                          pts, "vv[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) + "]");
    auto& ker = rep.clause("xi_degenerate");
    for (int i = 0; i < n; ++i)
        absorb_scalar(ker, bform_apply(F, S.xi, frame_delta(S.bundle, i)), pts,
                      "Phi(xi, delta_" + std::to_string(i + 1) + ")");
    for (int a = 0; a < m; ++a)
        absorb_scalar(ker, bform_apply(F, S.xi, frame_partial(S.bundle, a)), pts,
                      "Phi(xi, dy_" + std::to_string(a + 1) + ")");
    return rep;
}

// d eta_h = Phi on horizontal pairs, d eta_v = Phi on vertical pairs, and all
// remaining blocks of both exterior derivatives vanish.
inline CheckReport check_paracontact_metric(const PacStructure& S, const std::vector<Point>& pts) {
    CheckReport rep{"paracontact_metric", {}};
    const Bundle& B = S.bundle;
    BilinearForm F = fundamental_form(S);
    BilinearForm dH = d_oneform_blocks(B, eta_h_part(S));
    BilinearForm dV = d_oneform_blocks(B, eta_v_part(S));
    const int n = B.chart.n(), m = B.chart.m();
    auto label = [](const char* tag, int r, int c) {
        return std::string(tag) + "[" + std::to_string(r + 1) + "][" + std::to_string(c + 1) + "]";
    };
    auto& hh = rep.clause("d_eta_h_matches_phi");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            absorb_scalar(hh, dH.hh[std::size_t(i)][std::size_t(j)] - F.hh[std::size_t(i)][std::size_t(j)],
                          pts, label("dEtaH-Phi", i, j));
    auto& vv = rep.clause("d_eta_v_matches_phi");
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            absorb_scalar(vv, dV.vv[std::size_t(a)][std::size_t(b)] - F.vv[std::size_t(a)][std::size_t(b)],
                          pts, label("dEtaV-Phi", a, b));
    auto& mixed = rep.clause("mixed_blocks_vanish");
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            absorb_scalar(mixed, dH.hv[std::size_t(i)][std::size_t(a)], pts, label("dEtaH.hv", i, a));
            absorb_scalar(mixed, dH.vh[std::size_t(a)][std::size_t(i)], pts, label("dEtaH.vh", a, i));
            absorb_scalar(mixed, dV.hv[std::size_t(i)][std::size_t(a)], pts, label("dEtaV.hv", i, a));
            absorb_scalar(mixed, dV.vh[std::size_t(a)][std::size_t(i)], pts, label("dEtaV.vh", a, i));
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            absorb_scalar(mixed, dH.vv[std::size_t(a)][std::size_t(b)], pts, label("dEtaH.vv", a, b));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            absorb_scalar(mixed, dV.hh[std::size_t(i)][std::size_t(j)], pts, label("dEtaV.hh", i, j));
    return rep;
}

// Metric block invariants: symmetry and non-degeneracy at the sample points.
inline CheckReport check_metric_blocks(const PacStructure& S, const std::vector<Point>& pts) {
    CheckReport rep{"metric_blocks", {}};
    auto& sym = rep.clause("symmetry");
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            absorb_scalar(sym, S.metric.g[std::size_t(i)][std::size_t(j)] - S.metric.g[std::size_t(j)][std::size_t(i)],
                          pts, "g[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            absorb_scalar(sym, S.metric.h[std::size_t(a)][std::size_t(b)] - S.metric.h[std::size_t(b)][std::size_t(a)],
                          pts, "h[" + std::to_string(a + 1) + "][" + std::to_string(b + 1) + "]");
    auto& nd = rep.clause("nondegenerate");
    for (const auto& p : pts) {
        double dg = std::abs(det(eval_mat(S.metric.g, p)));
        double dh = std::abs(det(eval_mat(S.metric.h, p)));
        // Residual convention: positive means violation.
        nd.absorb(dg <= 1e-10 ? 1.0 : 0.0, p, "det g = " + std::to_string(dg));
        nd.absorb(dh <= 1e-10 ? 1.0 : 0.0, p, "det h = " + std::to_string(dh));
    }
    return rep;
}

// Compatibility forces signature (k1+1, k1) on g and (k2+1, k2) on h.
inline CheckReport check_signature(const PacStructure& S, const std::vector<Point>& pts) {
    CheckReport rep{"signature", {}};
    auto& rs = rep.clause("eigenvalue_signs");
    const int k1 = S.bundle.chart.k1, k2 = S.bundle.chart.k2;
    for (const auto& p : pts) {
        auto count = [](const std::vector<double>& eig) {
            int pos = 0, neg = 0;
            for (double e : eig) (e > 0 ? pos : neg)++;
            return std::pair{pos, neg};
        };
        auto [gp, gn] = count(sym_eigen(eval_mat(S.metric.g, p)));
        auto [hp, hn] = count(sym_eigen(eval_mat(S.metric.h, p)));
        bool ok = gp == k1 + 1 && gn == k1 && hp == k2 + 1 && hn == k2;
        rs.absorb(ok ? 0.0 : 1.0, p,
                  "g: (" + std::to_string(gp) + "," + std::to_string(gn) + "), h: (" +
                      std::to_string(hp) + "," + std::to_string(hn) + ")");
    }
    return rep;
}

// Conjugation by constant invertible blocks (Ah, Av): phi -> A phi A^-1,
// eta -> eta o A^-1, xi -> A xi, G -> G(A^-1 ., A^-1 .). Used by the
// property tests; preserves all structure predicates.
inline PacStructure conjugate(const PacStructure& S, const MatD& Ah, const MatD& Av) {
    auto inv_or_throw = [](const MatD& A) {
        auto inv = try_invert(A);
        if (!inv) throw std::invalid_argument("conjugate: block is singular");
        return *inv;
    };
    MatD AhI = inv_or_throw(Ah), AvI = inv_or_throw(Av);
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();

    auto conj = [](const ExprMat& M, const MatD& A, const MatD& AI) {
        const int d = int(M.size());
        ExprMat r = expr_zeros(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Expr s = Expr::constant(0.0);
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l)
                        s = s + Expr::constant(A(i, k)) * M[std::size_t(k)][std::size_t(l)] *
                                Expr::constant(AI(l, j));
                r[std::size_t(i)][std::size_t(j)] = s;
            }
        return r;
    };
    auto pull_metric = [](const ExprMat& M, const MatD& AI) {
        const int d = int(M.size());
        ExprMat r = expr_zeros(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Expr s = Expr::constant(0.0);
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l)
                        s = s + Expr::constant(AI(k, i)) * M[std::size_t(k)][std::size_t(l)] *
                                Expr::constant(AI(l, j));
                r[std::size_t(i)][std::size_t(j)] = s;
            }
        return r;
    };

    PacStructure R = S;
    R.phi_h = conj(S.phi_h, Ah, AhI);
    R.phi_v = conj(S.phi_v, Av, AvI);
    for (int j = 0; j < n; ++j) {
        Expr s = Expr::constant(0.0);
        for (int i = 0; i < n; ++i) s = s + S.eta.h[std::size_t(i)] * Expr::constant(AhI(i, j));
        R.eta.h[std::size_t(j)] = s;
    }
    for (int b = 0; b < m; ++b) {
        Expr s = Expr::constant(0.0);
        for (int a = 0; a < m; ++a) s = s + S.eta.v[std::size_t(a)] * Expr::constant(AvI(a, b));
        R.eta.v[std::size_t(b)] = s;
    }
    for (int i = 0; i < n; ++i) {
        Expr s = Expr::constant(0.0);
        for (int j = 0; j < n; ++j) s = s + Expr::constant(Ah(i, j)) * S.xi.h[std::size_t(j)];
        R.xi.h[std::size_t(i)] = s;
    }
    for (int a = 0; a < m; ++a) {
        Expr s = Expr::constant(0.0);
        for (int b = 0; b < m; ++b) s = s + Expr::constant(Av(a, b)) * S.xi.v[std::size_t(b)];
        R.xi.v[std::size_t(a)] = s;
    }
    R.metric.g = pull_metric(S.metric.g, AhI);
    R.metric.h = pull_metric(S.metric.h, AvI);
    return R;
}

}  // namespace pacfin
