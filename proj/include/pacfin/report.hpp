#pragma once

// The check registry and report model. Runs every structure, connection,
// and curvature check in dependency order, gating each on its hypotheses;
// a check whose hypotheses fail reports hypothesis-not-met, never pass or
// fail. Reports are deterministic for a fixed (instance, seed): fixed
// registry order, fixed clause order, single-threaded evaluation.

#include <string>
#include <vector>

#include <json.hpp>

#include "curvature.hpp"
#include "instance.hpp"

namespace pacfin {

enum class CheckStatus { Pass, Fail, HypothesisNotMet };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        default: return "hypothesis-not-met";
    }
}

struct ReportClause {
    std::string name;
    double residual = 0.0;
    double threshold = 0.0;
    Witness witness;
};

struct ReportCheck {
    std::string name;
    CheckStatus status = CheckStatus::HypothesisNotMet;
    double residual = 0.0;
    std::string note;
    std::vector<ReportClause> clauses;
};

struct ReportRung {
    std::string name;
    bool evaluated = false;
    bool holds = false;
    double residual = 0.0;
    Witness witness;
};

struct CurvatureTableRow {
    Point point;
    std::vector<double> vertical_flag, horizontal_flag;
    double ricci_v_reeb = 0.0, ricci_h_reeb = 0.0;
    double local_symmetry_vertical = 0.0;
    std::vector<double> phi_flag;  // empty when the local-symmetry gate is closed
};

struct Report {
    std::string generator = "splitmix64";
    std::uint64_t seed = 0;
    int samples = 0;
    double tolerance = 0.0;
    int k1 = 0, k2 = 0;
    std::vector<ReportRung> rungs;
    double n1 = 0, n2 = 0, n3 = 0, n4 = 0;
    double killing_h_res = 0, killing_v_res = 0;
    std::vector<ReportCheck> checks;
    std::vector<CurvatureTableRow> tables;

    bool any_fail() const {
        for (const auto& c : checks)
            if (c.status == CheckStatus::Fail) return true;
        return false;
    }
    const ReportCheck* check(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

inline ReportCheck from_report(const CheckReport& rep, double default_tol,
                               const std::vector<std::pair<std::string, double>>& overrides = {}) {
    ReportCheck out;
    out.name = rep.name;
    out.status = CheckStatus::Pass;
    for (const auto& cl : rep.clauses) {
        double tol = default_tol;
        for (const auto& [n, t] : overrides)
            if (n == cl.name) tol = t;
        out.clauses.push_back({cl.name, cl.residual.value, tol, cl.residual.witness});
        out.residual = std::max(out.residual, cl.residual.value);
        if (cl.residual.value >= tol) out.status = CheckStatus::Fail;
    }
    return out;
}

inline ReportCheck gated_out(const std::string& name, const std::string& why) {
    ReportCheck out;
    out.name = name;
    out.status = CheckStatus::HypothesisNotMet;
    out.note = why;
    return out;
}

}  // namespace detail

struct RunOverrides {
    double tolerance = 0.0;   // 0 = use the instance value
    std::uint64_t seed = 0;   // 0 = use the instance value
    int samples = 0;          // 0 = use the instance value
};

inline Report run_instance(const InstanceSpec& spec, const RunOverrides& ov = {}) {
    PacStructure S = build_structure(spec);
    const double tol = ov.tolerance > 0 ? ov.tolerance : spec.tolerance;
    const std::uint64_t seed = ov.seed != 0 ? ov.seed : spec.seed;
    const int count = ov.samples > 0 ? ov.samples : spec.sample_count;
    const double cascade_tol = 1e-7;  // derived-tensor cascade tolerance
    const double value_tol = 1e-6;    // closed-form curvature constants

    Report rep;
    rep.seed = seed;
    rep.samples = count;
    rep.tolerance = tol;
    rep.k1 = spec.k1;
    rep.k2 = spec.k2;

    std::vector<Point> pts = sample_points(spec.box, count, seed);
    std::vector<TestField> fields = spanning_fields(S.bundle, seed);

    // Metric block invariants come first; the connection checks hang off them.
    CheckReport metric_rep = check_metric_blocks(S, pts);
    rep.checks.push_back(detail::from_report(metric_rep, tol));
    const bool metric_ok = rep.checks.back().status == CheckStatus::Pass;

    Classification cls = classify(S, pts, fields, tol);
    for (const auto& r : cls.rungs) rep.rungs.push_back({r.name, r.evaluated, r.holds, r.residual, r.witness});
    rep.n1 = cls.normality.max1();
    rep.n2 = cls.normality.max2();
    rep.n3 = cls.normality.max3();
    rep.n4 = cls.normality.max4();
    rep.killing_h_res = cls.killing_h_residual;
    rep.killing_v_res = cls.killing_v_residual;

    const bool apc = cls.holds("almost_paracontact");
    const bool apm = cls.holds("almost_paracontact_metric");
    const bool pcm = cls.holds("paracontact_metric");
    const bool kpc = cls.holds("k_paracontact");
    const bool normal = cls.holds("normal");
    const bool sasakian = cls.holds("para_sasakian");

    // -- structure-level consequences ------------------------------------
    if (apc) {
        rep.checks.push_back(detail::from_report(derived_identities(S, pts), tol));
        ReportCheck rank_check;
        rank_check.name = "phi_rank";
        rank_check.status = CheckStatus::Pass;
        const int expect = 2 * (spec.k1 + spec.k2);
        ReportClause cl{"rank_equals_2k", 0.0, 0.5, {}};
        for (const auto& p : pts) {
            int r = rank_phi(S, p);
            if (r != expect) {
                cl.residual = std::abs(double(r - expect));
                cl.witness = {p, "rank = " + std::to_string(r)};
                rank_check.status = CheckStatus::Fail;
            }
        }
        rank_check.clauses.push_back(cl);
        rank_check.residual = cl.residual;
        rank_check.note = "expected rank " + std::to_string(expect);
        rep.checks.push_back(rank_check);
    } else {
        rep.checks.push_back(detail::gated_out("derived_identities", "requires the structure axioms"));
        rep.checks.push_back(detail::gated_out("phi_rank", "requires the structure axioms"));
    }

    if (apm) {
        rep.checks.push_back(detail::from_report(check_signature(S, pts), 0.5));
        rep.checks.push_back(detail::from_report(fundamental_form_identities(S, pts), tol));
    } else {
        rep.checks.push_back(detail::gated_out("signature", "requires a compatible metric"));
        rep.checks.push_back(detail::gated_out("fundamental_form", "requires a compatible metric"));
    }

    // -- normality cascade and paracontact-metric consequences -----------
    if (apc && normal) {
        ReportCheck c;
        c.name = "normality_cascade";
        c.clauses.push_back({"n2", rep.n2, cascade_tol, cls.normality.n2.worst() ? cls.normality.n2.worst()->residual.witness : Witness{}});
        c.clauses.push_back({"n3", rep.n3, cascade_tol, cls.normality.n3.worst() ? cls.normality.n3.worst()->residual.witness : Witness{}});
        c.clauses.push_back({"n4", rep.n4, cascade_tol, cls.normality.n4.worst() ? cls.normality.n4.worst()->residual.witness : Witness{}});
        c.status = CheckStatus::Pass;
        for (const auto& cl : c.clauses) {
            c.residual = std::max(c.residual, cl.residual);
            if (cl.residual >= cl.threshold) c.status = CheckStatus::Fail;
        }
        rep.checks.push_back(c);
    } else {
        rep.checks.push_back(detail::gated_out("normality_cascade", "structure is not normal"));
    }

    if (pcm) {
        ReportCheck c;
        c.name = "paracontact_consequences";
        c.clauses.push_back({"n2", rep.n2, cascade_tol, {}});
        c.clauses.push_back({"n4", rep.n4, cascade_tol, {}});
        c.status = (rep.n2 < cascade_tol && rep.n4 < cascade_tol) ? CheckStatus::Pass : CheckStatus::Fail;
        c.residual = std::max(rep.n2, rep.n4);
        rep.checks.push_back(c);

        ReportCheck eq;
        eq.name = "killing_normality_equivalence";
        double kill = std::max(rep.killing_h_res, rep.killing_v_res);
        bool agree = (rep.n3 < cascade_tol) == (kill < cascade_tol);
        eq.status = agree ? CheckStatus::Pass : CheckStatus::Fail;
        eq.residual = agree ? 0.0 : std::abs(rep.n3 - kill);
        eq.note = "n3 = " + std::to_string(rep.n3) + ", killing = " + std::to_string(kill);
        rep.checks.push_back(eq);
    } else {
        rep.checks.push_back(detail::gated_out("paracontact_consequences", "requires a paracontact metric structure"));
        rep.checks.push_back(detail::gated_out("killing_normality_equivalence", "requires a paracontact metric structure"));
    }

    // interior contraction of d eta_h with the horizontal Reeb field
    if (apc && rep.n4 < cascade_tol) {
        CheckReport ic{"interior_reeb_contraction", {}};
        OneForm if_ = interior_product(S.bundle, xi_h_part(S), d_oneform_blocks(S.bundle, eta_h_part(S)));
        auto& cl = ic.clause("i_xi_d_eta_h");
        for (std::size_t i = 0; i < if_.h.size(); ++i)
            absorb_scalar(cl, if_.h[i], pts, "dx component " + std::to_string(i + 1));
        for (std::size_t a = 0; a < if_.v.size(); ++a)
            absorb_scalar(cl, if_.v[a], pts, "dy component " + std::to_string(a + 1));
        rep.checks.push_back(detail::from_report(ic, tol));
    } else {
        rep.checks.push_back(detail::gated_out("interior_reeb_contraction", "requires vanishing n4"));
    }

    // -- connection ------------------------------------------------------
    if (!metric_ok) {
        for (const char* nm : {"connection_metricity", "connection_torsion", "connection_koszul",
                               "reeb_covariant_derivative", "phi_covariant_reeb",
                               "covariant_phi_expansion", "curvature_reeb_reeb",
                               "flag_curvature_reeb", "phi_covariant_identity",
                               "curvature_pair_reeb", "ricci_reeb", "phi_flag_curvature"})
            rep.checks.push_back(detail::gated_out(nm, "metric blocks failed validation"));
        return rep;
    }

    FinslerConnection D = canonical_connection(S.bundle, S.metric);
    rep.checks.push_back(detail::from_report(connection_metricity(S.bundle, D, S.metric, pts, fields), tol));
    rep.checks.push_back(detail::from_report(connection_torsion(S.bundle, D, pts, fields), tol));
    rep.checks.push_back(detail::from_report(connection_koszul(S.bundle, D, S.metric, pts, fields), tol));

    if (pcm) {
        CheckReport rc = reeb_derivative_characterization(S, D, pts, fields);
        ReportCheck c = detail::from_report(rc, tol);
        bool all_small = true;
        for (const auto& cl : c.clauses) all_small = all_small && cl.residual < tol;
        bool agree = all_small == kpc;
        c.status = agree ? CheckStatus::Pass : CheckStatus::Fail;
        c.note = kpc ? "K-paracontact: all four covariant clauses must vanish"
                     : "not K-paracontact: equivalence verified (some clause is nonzero)";
        rep.checks.push_back(c);
        rep.checks.push_back(detail::from_report(phi_covariant_reeb(S, D, pts, fields), tol));
    } else {
        rep.checks.push_back(detail::gated_out("reeb_covariant_derivative", "requires a paracontact metric structure"));
        rep.checks.push_back(detail::gated_out("phi_covariant_reeb", "requires a paracontact metric structure"));
    }

    if (apm) {
        rep.checks.push_back(detail::from_report(
            covariant_phi_expansion(S, D, pts, fields), cascade_tol));
    } else {
        rep.checks.push_back(detail::gated_out("covariant_phi_expansion", "requires a compatible metric"));
    }

    // -- curvature ---------------------------------------------------------
    CurvatureCache cache(S.bundle, D);

    if (kpc) {
        rep.checks.push_back(detail::from_report(reeb_curvature_identities(S, D, pts, fields), tol));
        ReebFlagReport fr = reeb_flag_curvatures(S, D, cache, pts, seed);
        rep.checks.push_back(detail::from_report(
            fr.rep, tol,
            {{"vertical_value", value_tol}, {"horizontal_value_when_correction_vanishes", value_tol}}));
    } else {
        rep.checks.push_back(detail::gated_out("curvature_reeb_reeb", "requires a K-paracontact structure"));
        rep.checks.push_back(detail::gated_out("flag_curvature_reeb", "requires a K-paracontact structure"));
    }

    if (sasakian) {
        rep.checks.push_back(detail::from_report(phi_covariant_identity(S, D, pts, fields), tol));
        rep.checks.push_back(detail::from_report(pair_reeb_curvature(S, D, pts, fields), tol));
    } else {
        rep.checks.push_back(detail::gated_out("phi_covariant_identity", "requires a para-Sasakian structure"));
        rep.checks.push_back(detail::gated_out("curvature_pair_reeb", "requires a para-Sasakian structure"));
    }

    if (kpc) {
        CheckReport rc = ricci_identities(S, D, cache, pts, seed, sasakian);
        rep.checks.push_back(detail::from_report(rc, tol,
                                                 {{"vertical_reeb_reeb", value_tol},
                                                  {"horizontal_reeb_reeb", value_tol},
                                                  {"vertical_x_reeb", value_tol},
                                                  {"horizontal_x_reeb_with_correction", value_tol}}));
    } else {
        rep.checks.push_back(detail::gated_out("ricci_reeb", "requires a K-paracontact structure"));
    }

    if (sasakian) {
        PhiFlagReport pf = phi_flag_symmetric(S, cache, pts, seed, tol);
        if (pf.gated_points == 0) {
            ReportCheck c = detail::gated_out(
                "phi_flag_curvature",
                "local symmetry hypothesis not met at any of the " +
                    std::to_string(pf.total_points) + " sample points");
            rep.checks.push_back(c);
        } else {
            ReportCheck c = detail::from_report(pf.rep, tol, {{"gated_value", value_tol}});
            c.note = std::to_string(pf.gated_points) + " of " + std::to_string(pf.total_points) +
                     " sample points pass the local-symmetry gate";
            rep.checks.push_back(c);
        }
    } else {
        rep.checks.push_back(detail::gated_out("phi_flag_curvature", "requires a para-Sasakian structure"));
    }

    // -- curvature value tables, one row per sample point -------------------
    if (apm) {
        const int rows = int(pts.size());
        const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
        for (int r = 0; r < rows; ++r) {
            const Point& p = pts[std::size_t(r)];
            CurvatureTableRow row;
            row.point = p;
            CurvatureAtPoint cp = curvature_at_point(cache, S.metric, p);
            Evaluator ev(p);
            std::vector<double> xiv(static_cast<std::size_t>(m));
            std::vector<double> xih(static_cast<std::size_t>(n));
            for (int a = 0; a < m; ++a) xiv[std::size_t(a)] = ev(S.xi.v[std::size_t(a)]);
            for (int i = 0; i < n; ++i) xih[std::size_t(i)] = ev(S.xi.h[std::size_t(i)]);
            PseudoFrame fv = pseudo_orthonormal_frame(cp.h, xiv);
            PseudoFrame fh = pseudo_orthonormal_frame(cp.g, xih);
            for (const auto& E : fh.E)
                row.horizontal_flag.push_back(flag_curvature_block(cp.g, cp.Rh, n, E, xih));
            for (const auto& E : fv.E)
                row.vertical_flag.push_back(flag_curvature_block(cp.h, cp.Rv, m, E, xiv));
            row.ricci_v_reeb = ricci_block(cp.h, cp.Rv, m, fv, xiv, xiv);
            row.ricci_h_reeb = ricci_block(cp.g, cp.Rh, n, fh, xih, xih);
            row.local_symmetry_vertical = local_symmetry_residual(cache, p, true);
            if (row.local_symmetry_vertical < tol) {
                MatD phiv = eval_mat(S.phi_v, p);
                for (std::size_t i = 0; i < fv.E.size(); ++i) {
                    if (fv.signs[i] < 0) continue;  // phi-sections start from spacelike members
                    std::vector<double> phiX = matvec(phiv, fv.E[i]);
                    double q = blockops::inner(cp.h, phiX, phiX);
                    if (std::abs(q) < 1e-10) continue;
                    row.phi_flag.push_back(flag_curvature_block(cp.h, cp.Rv, m, fv.E[i], phiX));
                }
            }
            rep.tables.push_back(std::move(row));
        }
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Rendering. The JSON object model is the contract; the text table is
// best-effort human output.

inline nlohmann::ordered_json witness_json(const Witness& w) {
    nlohmann::ordered_json j;
    j["point"] = {{"x", w.point.x}, {"y", w.point.y}};
    j["detail"] = w.detail;
    return j;
}

inline std::string render_json(const Report& r) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["generator"] = r.generator;
    j["seed"] = r.seed;
    j["samples"] = r.samples;
    j["tolerance"] = r.tolerance;
    j["chart"] = {{"k1", r.k1}, {"k2", r.k2}};

    nlohmann::ordered_json rungs = nlohmann::ordered_json::array();
    for (const auto& rg : r.rungs) {
        nlohmann::ordered_json o;
        o["name"] = rg.name;
        o["evaluated"] = rg.evaluated;
        o["holds"] = rg.holds;
        o["residual"] = rg.residual;
        if (rg.evaluated && !rg.holds) o["witness"] = witness_json(rg.witness);
        rungs.push_back(o);
    }
    j["classification"]["rungs"] = rungs;
    j["classification"]["normality"] = {{"n1", r.n1}, {"n2", r.n2}, {"n3", r.n3}, {"n4", r.n4}};
    j["classification"]["killing"] = {{"horizontal", r.killing_h_res}, {"vertical", r.killing_v_res}};

    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
        nlohmann::ordered_json o;
        o["name"] = c.name;
        o["status"] = to_string(c.status);
        o["residual"] = c.residual;
        if (!c.note.empty()) o["note"] = c.note;
        nlohmann::ordered_json cls = nlohmann::ordered_json::array();
        for (const auto& cl : c.clauses) {
            nlohmann::ordered_json co;
            co["name"] = cl.name;
            co["residual"] = cl.residual;
            co["threshold"] = cl.threshold;
            if (cl.residual >= cl.threshold) co["witness"] = witness_json(cl.witness);
            cls.push_back(co);
        }
        if (!cls.empty()) o["clauses"] = cls;
        checks.push_back(o);
    }
    j["checks"] = checks;

    nlohmann::ordered_json tables = nlohmann::ordered_json::array();
    for (const auto& row : r.tables) {
        nlohmann::ordered_json o;
        o["point"] = {{"x", row.point.x}, {"y", row.point.y}};
        o["vertical_flag"] = row.vertical_flag;
        o["horizontal_flag"] = row.horizontal_flag;
        o["ricci_vertical_reeb"] = row.ricci_v_reeb;
        o["ricci_horizontal_reeb"] = row.ricci_h_reeb;
        o["local_symmetry_vertical"] = row.local_symmetry_vertical;
        o["phi_flag"] = row.phi_flag;
        tables.push_back(o);
    }
    j["curvature_tables"] = tables;
    return j.dump(2) + "\n";
}

inline std::string render_text(const Report& r) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "chart k1=%d k2=%d  samples=%d  seed=%llu  tolerance=%g  rng=%s\n",
                  r.k1, r.k2, r.samples, static_cast<unsigned long long>(r.seed), r.tolerance,
                  r.generator.c_str());
    out += buf;
    out += "\nclassification\n";
    for (const auto& rg : r.rungs) {
        std::snprintf(buf, sizeof buf, "  %-28s %-14s residual=%.3e\n", rg.name.c_str(),
                      !rg.evaluated ? "not-evaluated" : (rg.holds ? "holds" : "does-not-hold"),
                      rg.residual);
        out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "  normality n1=%.3e n2=%.3e n3=%.3e n4=%.3e  killing h=%.3e v=%.3e\n", r.n1,
                  r.n2, r.n3, r.n4, r.killing_h_res, r.killing_v_res);
    out += buf;
    out += "\nchecks\n";
    for (const auto& c : r.checks) {
        std::snprintf(buf, sizeof buf, "  %-34s %-20s residual=%.3e", c.name.c_str(),
                      to_string(c.status), c.residual);
        out += buf;
        if (!c.note.empty()) out += "  (" + c.note + ")";
        out += "\n";
    }
    if (!r.tables.empty()) {
        out += "\ncurvature tables (per sample point)\n";
        for (const auto& row : r.tables) {
            out += "  point:";
            for (double v : row.point.x) {
                std::snprintf(buf, sizeof buf, " %.4f", v);
                out += buf;
            }
            out += " |";
            for (double v : row.point.y) {
                std::snprintf(buf, sizeof buf, " %.4f", v);
                out += buf;
            }
            out += "\n    flags v:";
            for (double v : row.vertical_flag) {
                std::snprintf(buf, sizeof buf, " %.6f", v);
                out += buf;
            }
            out += "  h:";
            for (double v : row.horizontal_flag) {
                std::snprintf(buf, sizeof buf, " %.6f", v);
                out += buf;
            }
            std::snprintf(buf, sizeof buf, "\n    ricci_reeb v=%.6f h=%.6f  dR_vertical=%.3e",
                          row.ricci_v_reeb, row.ricci_h_reeb, row.local_symmetry_vertical);
            out += buf;
            if (!row.phi_flag.empty()) {
                out += "  phi_flag:";
                for (double v : row.phi_flag) {
                    std::snprintf(buf, sizeof buf, " %.6f", v);
                    out += buf;
                }
            }
            out += "\n";
        }
    }
    return out;
}

}  // namespace pacfin
