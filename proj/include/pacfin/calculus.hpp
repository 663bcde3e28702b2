#pragma once

// Lie derivatives, the Nijenhuis tensor of phi, the four normality tensors,
// Killing residuals for the Reeb fields, and the classification ladder
// (almost paracontact -> almost paracontact metric -> paracontact metric ->
// K-paracontact -> normal -> para-Sasakian).

#include <string>
#include <vector>

#include "structure.hpp"

namespace pacfin {

inline VecField lie_vec(const Bundle& B, const VecField& X, const VecField& Y) {
    return bracket(B, X, Y);
}

// (L_X w)(Y) = X(w(Y)) - w([X, Y]), materialized on the adapted frame.
inline OneForm lie_oneform(const Bundle& B, const VecField& X, const OneForm& w) {
    OneForm r = OneForm::zero(B.chart);
    for (int i = 0; i < B.chart.n(); ++i) {
        VecField d = frame_delta(B, i);
        r.h[std::size_t(i)] = field_apply(B, X, form_apply(w, d)) - form_apply(w, bracket(B, X, d));
    }
    for (int a = 0; a < B.chart.m(); ++a) {
        VecField d = frame_partial(B, a);
        r.v[std::size_t(a)] = field_apply(B, X, form_apply(w, d)) - form_apply(w, bracket(B, X, d));
    }
    return r;
}

// (L_X T)(Y, Z) = X(T(Y,Z)) - T([X,Y], Z) - T(Y, [X,Z]) for a bilinear form.
inline BilinearForm lie_bilinear(const Bundle& B, const VecField& X, const BilinearForm& T) {
    const int n = B.chart.n(), m = B.chart.m();
    std::vector<VecField> frame;
    for (int i = 0; i < n; ++i) frame.push_back(frame_delta(B, i));
    for (int a = 0; a < m; ++a) frame.push_back(frame_partial(B, a));
    auto entry = [&](const VecField& Y, const VecField& Z) {
        return field_apply(B, X, bform_apply(T, Y, Z)) - bform_apply(T, bracket(B, X, Y), Z) -
               bform_apply(T, Y, bracket(B, X, Z));
    };
    BilinearForm r = BilinearForm::zero(B.chart);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.hh[std::size_t(i)][std::size_t(j)] = entry(frame[std::size_t(i)], frame[std::size_t(j)]);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            r.hv[std::size_t(i)][std::size_t(a)] = entry(frame[std::size_t(i)], frame[std::size_t(n + a)]);
            r.vh[std::size_t(a)][std::size_t(i)] = entry(frame[std::size_t(n + a)], frame[std::size_t(i)]);
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            r.vv[std::size_t(a)][std::size_t(b)] = entry(frame[std::size_t(n + a)], frame[std::size_t(n + b)]);
    return r;
}

inline BilinearForm lie_metric(const Bundle& B, const VecField& X, const Metric& G) {
    return lie_bilinear(B, X, metric_as_bform(B, G));
}

// (L_X phi)(Y) = [X, phi Y] - phi [X, Y].
inline VecField lie_phi(const PacStructure& S, const VecField& X, const VecField& Y) {
    return bracket(S.bundle, X, phi_apply(S, Y)) - phi_apply(S, bracket(S.bundle, X, Y));
}

// N_phi(X, Y) = phi^2 [X,Y] + [phi X, phi Y] - phi [phi X, Y] - phi [X, phi Y].
inline VecField nijenhuis(const PacStructure& S, const VecField& X, const VecField& Y) {
    const Bundle& B = S.bundle;
    return phi_apply(S, phi_apply(S, bracket(B, X, Y))) +
           bracket(B, phi_apply(S, X), phi_apply(S, Y)) -
           phi_apply(S, bracket(B, phi_apply(S, X), Y)) -
           phi_apply(S, bracket(B, X, phi_apply(S, Y)));
}

inline VecField normality_n1(const PacStructure& S, const VecField& X, const VecField& Y) {
    const Bundle& B = S.bundle;
    return nijenhuis(S, X, Y) - d_oneform(B, eta_h_part(S), X, Y) * xi_h_part(S) -
           d_oneform(B, eta_v_part(S), X, Y) * xi_v_part(S);
}

struct NormalityReport {
    CheckReport n1, n2, n3, n4;
    double max1() const { return n1.max_residual(); }
    double max2() const { return n2.max_residual(); }
    double max3() const { return n3.max_residual(); }
    double max4() const { return n4.max_residual(); }
};

inline NormalityReport normality_tensors(const PacStructure& S, const std::vector<Point>& pts,
                                         const std::vector<TestField>& fields) {
    const Bundle& B = S.bundle;
    NormalityReport rep;
    rep.n1.name = "normality_n1";
    rep.n2.name = "normality_n2";
    rep.n3.name = "normality_n3";
    rep.n4.name = "normality_n4";

    OneForm etaH = eta_h_part(S), etaV = eta_v_part(S);
    VecField xiH = xi_h_part(S), xiV = xi_v_part(S);

    auto& c1 = rep.n1.clause("all_pairs");
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t j = i + 1; j < fields.size(); ++j)
            absorb_field(c1, normality_n1(S, fields[i].X, fields[j].X), pts,
                         "X=" + fields[i].name + ", Y=" + fields[j].name);

    // N2 on (X^H, Y^H): (L_{phi X} eta_h)(Y) - (L_{phi Y} eta_h)(X); the
    // vertical case is the analogue; the mixed case keeps all four Lie terms.
    std::vector<OneForm> lie_h_etaH, lie_h_etaV, lie_v_etaH, lie_v_etaV;
    for (const auto& f : fields) {
        VecField phiXh = phi_apply(S, h_proj(f.X));
        VecField phiXv = phi_apply(S, v_proj(f.X));
        lie_h_etaH.push_back(lie_oneform(B, phiXh, etaH));
        lie_h_etaV.push_back(lie_oneform(B, phiXh, etaV));
        lie_v_etaH.push_back(lie_oneform(B, phiXv, etaH));
        lie_v_etaV.push_back(lie_oneform(B, phiXv, etaV));
    }
    auto& hh = rep.n2.clause("horizontal");
    auto& vv = rep.n2.clause("vertical");
    auto& mixed = rep.n2.clause("mixed");
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (i == j) continue;
            VecField Xh = h_proj(fields[i].X), Yh = h_proj(fields[j].X);
            VecField Xv = v_proj(fields[i].X), Yv = v_proj(fields[j].X);
            std::string pair = "X=" + fields[i].name + ", Y=" + fields[j].name;
            if (j > i) {
                absorb_scalar(hh, form_apply(lie_h_etaH[i], Yh) - form_apply(lie_h_etaH[j], Xh),
                              pts, pair);
                absorb_scalar(vv, form_apply(lie_v_etaV[i], Yv) - form_apply(lie_v_etaV[j], Xv),
                              pts, pair);
            }
            // mixed case with X vertical, Y horizontal
            Expr e = form_apply(lie_v_etaH[i], Yh) + form_apply(lie_v_etaV[i], Yh) -
                     form_apply(lie_h_etaH[j], Xv) - form_apply(lie_h_etaV[j], Xv);
            absorb_scalar(mixed, e, pts, pair);
        }

    // N3 / N4, the four cases: Reeb part vs argument part.
    OneForm lieXiH_etaH = lie_oneform(B, xiH, etaH);
    OneForm lieXiH_etaV = lie_oneform(B, xiH, etaV);
    OneForm lieXiV_etaH = lie_oneform(B, xiV, etaH);
    OneForm lieXiV_etaV = lie_oneform(B, xiV, etaV);
    auto& n3c1 = rep.n3.clause("xi_h_on_horizontal");
    auto& n3c2 = rep.n3.clause("xi_v_on_vertical");
    auto& n3c3 = rep.n3.clause("xi_v_on_horizontal");
    auto& n3c4 = rep.n3.clause("xi_h_on_vertical");
    auto& n4c1 = rep.n4.clause("xi_h_on_horizontal");
    auto& n4c2 = rep.n4.clause("xi_v_on_vertical");
    auto& n4c3 = rep.n4.clause("xi_v_on_horizontal");
    auto& n4c4 = rep.n4.clause("xi_h_on_vertical");
    for (const auto& f : fields) {
        VecField Xh = h_proj(f.X), Xv = v_proj(f.X);
        absorb_field(n3c1, lie_phi(S, xiH, Xh), pts, "X=" + f.name);
        absorb_field(n3c2, lie_phi(S, xiV, Xv), pts, "X=" + f.name);
        absorb_field(n3c3, lie_phi(S, xiV, Xh), pts, "X=" + f.name);
        absorb_field(n3c4, lie_phi(S, xiH, Xv), pts, "X=" + f.name);
        absorb_scalar(n4c1, form_apply(lieXiH_etaH, Xh), pts, "X=" + f.name);
        absorb_scalar(n4c2, form_apply(lieXiV_etaV, Xv), pts, "X=" + f.name);
        absorb_scalar(n4c3, form_apply(lieXiV_etaH, Xh), pts, "X=" + f.name);
        absorb_scalar(n4c4, form_apply(lieXiH_etaV, Xv), pts, "X=" + f.name);
    }
    return rep;
}

// Killing residual of the horizontal Reeb field for the horizontal metric.
inline Residual killing_h(const PacStructure& S, const std::vector<Point>& pts) {
    BilinearForm gH = BilinearForm::zero(S.bundle.chart);
    gH.hh = S.metric.g;
    BilinearForm L = lie_bilinear(S.bundle, xi_h_part(S), gH);
    Residual r;
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    auto tag = [](const char* blk, int i, int j) {
        return std::string("(L_xiH gH).") + blk + "[" + std::to_string(i + 1) + "][" +
               std::to_string(j + 1) + "]";
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) absorb_scalar(r, L.hh[std::size_t(i)][std::size_t(j)], pts, tag("hh", i, j));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            absorb_scalar(r, L.hv[std::size_t(i)][std::size_t(a)], pts, tag("hv", i, a));
            absorb_scalar(r, L.vh[std::size_t(a)][std::size_t(i)], pts, tag("vh", a, i));
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) absorb_scalar(r, L.vv[std::size_t(a)][std::size_t(b)], pts, tag("vv", a, b));
    return r;
}

inline Residual killing_v(const PacStructure& S, const std::vector<Point>& pts) {
    BilinearForm gV = BilinearForm::zero(S.bundle.chart);
    gV.vv = S.metric.h;
    BilinearForm L = lie_bilinear(S.bundle, xi_v_part(S), gV);
    Residual r;
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    auto tag = [](const char* blk, int i, int j) {
        return std::string("(L_xiV gV).") + blk + "[" + std::to_string(i + 1) + "][" +
               std::to_string(j + 1) + "]";
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) absorb_scalar(r, L.hh[std::size_t(i)][std::size_t(j)], pts, tag("hh", i, j));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) {
            absorb_scalar(r, L.hv[std::size_t(i)][std::size_t(a)], pts, tag("hv", i, a));
            absorb_scalar(r, L.vh[std::size_t(a)][std::size_t(i)], pts, tag("vh", a, i));
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) absorb_scalar(r, L.vv[std::size_t(a)][std::size_t(b)], pts, tag("vv", a, b));
    return r;
}

struct LadderRung {
    std::string name;
    bool evaluated = false;  // false when a prerequisite rung already failed
    bool holds = false;
    double residual = 0.0;
    Witness witness;
};

struct Classification {
    std::vector<LadderRung> rungs;
    NormalityReport normality;
    double killing_h_residual = 0.0, killing_v_residual = 0.0;

    const LadderRung* rung(const std::string& name) const {
        for (const auto& r : rungs)
            if (r.name == name) return &r;
        return nullptr;
    }
    bool holds(const std::string& name) const {
        const LadderRung* r = rung(name);
        return r && r->evaluated && r->holds;
    }
};

// Runs the full ladder. Rungs report residuals, never bare booleans, and a
// rung that cannot be evaluated (prerequisite failed) is marked as such.
inline Classification classify(const PacStructure& S, const std::vector<Point>& pts,
                               const std::vector<TestField>& fields, double tol) {
    Classification out;
    auto push = [&](const std::string& name, bool evaluated, double residual, Witness w) {
        out.rungs.push_back({name, evaluated, evaluated && residual < tol, residual, std::move(w)});
    };

    CheckReport ax = check_axioms(S, pts, fields);
    const Clause* w = ax.worst();
    push("almost_paracontact", true, ax.max_residual(), w ? w->residual.witness : Witness{});
    bool apc = out.rungs.back().holds;

    if (apc) {
        CheckReport comp = check_compatibility(S, pts, fields);
        w = comp.worst();
        push("almost_paracontact_metric", true, comp.max_residual(), w ? w->residual.witness : Witness{});
    } else {
        push("almost_paracontact_metric", false, 0.0, {});
    }
    bool apm = out.rungs.back().holds;

    if (apm) {
        CheckReport pm = check_paracontact_metric(S, pts);
        w = pm.worst();
        push("paracontact_metric", true, pm.max_residual(), w ? w->residual.witness : Witness{});
    } else {
        push("paracontact_metric", false, 0.0, {});
    }
    bool pcm = out.rungs.back().holds;

    if (pcm) {
        Residual kh = killing_h(S, pts), kv = killing_v(S, pts);
        out.killing_h_residual = kh.value;
        out.killing_v_residual = kv.value;
        Residual worst = kh.value >= kv.value ? kh : kv;
        push("k_paracontact", true, worst.value, worst.witness);
    } else {
        push("k_paracontact", false, 0.0, {});
    }

    if (apc) {
        out.normality = normality_tensors(S, pts, fields);
        w = out.normality.n1.worst();
        push("normal", true, out.normality.max1(), w ? w->residual.witness : Witness{});
    } else {
        push("normal", false, 0.0, {});
    }
    bool normal = out.rungs.back().holds;

    // para-Sasakian = paracontact metric and normal
    if (pcm && out.rung("normal")->evaluated) {
        double res = std::max(out.rung("paracontact_metric")->residual, out.rung("normal")->residual);
        push("para_sasakian", true, res,
             normal ? out.rung("paracontact_metric")->witness : out.rung("normal")->witness);
    } else {
        push("para_sasakian", false, 0.0, {});
    }
    return out;
}

}  // namespace pacfin
