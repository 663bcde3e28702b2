// pacfin: load an almost paracontact Finsler instance, run the verification
// suite over sampled chart points, and emit deterministic reports.
//
//   pacfin check <spec> [--report out.json] [--tolerance t] [--seed s] [--samples k]
//   pacfin classify <spec> [--tolerance t] [--seed s] [--samples k]
//   pacfin curvature <spec> --point "x=...,y=..."
//
// Exit codes: 0 when no check fails (hypothesis-not-met is not a failure),
// 1 when any check fails, 2 on document or domain errors.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pacfin/report.hpp"

namespace {

pacfin::Point parse_point(const std::string& text, int n, int m) {
    auto grab = [&](const std::string& key) {
        std::size_t at = text.find(key);
        if (at == std::string::npos)
            throw pacfin::InstanceError("--point must contain '" + key + "'");
        std::size_t end = text.find_first_of("xy", at + 2);
        std::string chunk = text.substr(at + 2, end == std::string::npos ? std::string::npos
                                                                         : end - at - 2);
        std::vector<double> vals;
        std::string tok;
        std::istringstream ss(chunk);
        while (std::getline(ss, tok, ',')) {
            // trim whitespace and stray separators
            std::size_t b = tok.find_first_not_of(" \t;");
            std::size_t e = tok.find_last_not_of(" \t;");
            if (b == std::string::npos) continue;
            vals.push_back(std::stod(tok.substr(b, e - b + 1)));
        }
        return vals;
    };
    pacfin::Point p;
    p.x = grab("x=");
    p.y = grab("y=");
    if (int(p.x.size()) != n || int(p.y.size()) != m)
        throw pacfin::InstanceError("--point needs " + std::to_string(n) + " x values and " +
                                    std::to_string(m) + " y values");
    return p;
}

int run_check(const std::string& spec_path, const std::string& report_path,
              const pacfin::RunOverrides& ov) {
    pacfin::InstanceSpec spec = pacfin::load_instance_spec(spec_path);
    pacfin::Report rep = pacfin::run_instance(spec, ov);
    std::string json = pacfin::render_json(rep);
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) throw pacfin::InstanceError("cannot write report file: " + report_path);
        out << json;
    } else {
        std::cout << json;
    }
    std::cerr << pacfin::render_text(rep);
    return rep.any_fail() ? 1 : 0;
}

int run_classify(const std::string& spec_path, const pacfin::RunOverrides& ov) {
    using namespace pacfin;
    InstanceSpec spec = load_instance_spec(spec_path);
    PacStructure S = build_structure(spec);
    double tol = ov.tolerance > 0 ? ov.tolerance : spec.tolerance;
    std::uint64_t seed = ov.seed != 0 ? ov.seed : spec.seed;
    int count = ov.samples > 0 ? ov.samples : spec.sample_count;
    auto pts = sample_points(spec.box, count, seed);
    auto fields = spanning_fields(S.bundle, seed);
    Classification cls = classify(S, pts, fields, tol);
    for (const auto& r : cls.rungs) {
        std::printf("%-28s %-14s residual=%.3e\n", r.name.c_str(),
                    !r.evaluated ? "not-evaluated" : (r.holds ? "holds" : "does-not-hold"),
                    r.residual);
    }
    std::printf("normality n1=%.3e n2=%.3e n3=%.3e n4=%.3e\n", cls.normality.max1(),
                cls.normality.max2(), cls.normality.max3(), cls.normality.max4());
    std::printf("killing   horizontal=%.3e vertical=%.3e\n", cls.killing_h_residual,
                cls.killing_v_residual);
    return 0;
}

int run_curvature(const std::string& spec_path, const std::string& point_text) {
    using namespace pacfin;
    InstanceSpec spec = load_instance_spec(spec_path);
    PacStructure S = build_structure(spec);
    const int n = S.bundle.chart.n(), m = S.bundle.chart.m();
    Point p = parse_point(point_text, n, m);

    FinslerConnection D = canonical_connection(S.bundle, S.metric);
    CurvatureCache cache(S.bundle, D);
    CurvatureAtPoint cp = curvature_at_point(cache, S.metric, p);
    Evaluator ev(p);
    std::vector<double> xih(static_cast<std::size_t>(n));
    std::vector<double> xiv(static_cast<std::size_t>(m));
    for (int i = 0; i < n; ++i) xih[std::size_t(i)] = ev(S.xi.h[std::size_t(i)]);
    for (int a = 0; a < m; ++a) xiv[std::size_t(a)] = ev(S.xi.v[std::size_t(a)]);
    PseudoFrame fh = pseudo_orthonormal_frame(cp.g, xih);
    PseudoFrame fv = pseudo_orthonormal_frame(cp.h, xiv);

    nlohmann::ordered_json out;
    out["point"] = {{"x", p.x}, {"y", p.y}};
    nlohmann::ordered_json hflag = nlohmann::ordered_json::array();
    for (const auto& E : fh.E) hflag.push_back(flag_curvature_block(cp.g, cp.Rh, n, E, xih));
    nlohmann::ordered_json vflag = nlohmann::ordered_json::array();
    for (const auto& E : fv.E) vflag.push_back(flag_curvature_block(cp.h, cp.Rv, m, E, xiv));
    out["flag_reeb"] = {{"horizontal", hflag}, {"vertical", vflag}};

    MatD phiv = eval_mat(S.phi_v, p);
    nlohmann::ordered_json phiflag = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < fv.E.size(); ++i) {
        if (fv.signs[i] < 0) continue;
        std::vector<double> phiX = matvec(phiv, fv.E[i]);
        if (std::abs(blockops::inner(cp.h, phiX, phiX)) < 1e-10) continue;
        phiflag.push_back(flag_curvature_block(cp.h, cp.Rv, m, fv.E[i], phiX));
    }
    out["phi_flag_vertical"] = phiflag;

    auto ricci_matrix = [&](const MatD& g, const std::vector<double>& R, int d,
                            const PseudoFrame& fr) {
        nlohmann::ordered_json mat = nlohmann::ordered_json::array();
        std::vector<std::vector<double>> basis = fr.E;
        basis.push_back(fr.xi);
        for (const auto& X : basis) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (const auto& Y : basis) row.push_back(ricci_block(g, R, d, fr, X, Y));
            mat.push_back(row);
        }
        return mat;
    };
    out["ricci_horizontal_frame"] = ricci_matrix(cp.g, cp.Rh, n, fh);
    out["ricci_vertical_frame"] = ricci_matrix(cp.h, cp.Rv, m, fv);
    out["local_symmetry_vertical"] = local_symmetry_residual(cache, p, true);
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"almost paracontact Finsler structure verifier"};
    app.require_subcommand(1);

    std::string spec_path, report_path, point_text;
    pacfin::RunOverrides ov;

    CLI::App* check = app.add_subcommand("check", "run the full verification suite");
    check->add_option("spec", spec_path, "instance document")->required();
    check->add_option("--report", report_path, "write the structured report here");
    check->add_option("--tolerance", ov.tolerance, "override the instance tolerance");
    check->add_option("--seed", ov.seed, "override the sampling seed");
    check->add_option("--samples", ov.samples, "override the sample count");

    CLI::App* classify = app.add_subcommand("classify", "classification ladder only");
    classify->add_option("spec", spec_path, "instance document")->required();
    classify->add_option("--tolerance", ov.tolerance, "override the instance tolerance");
    classify->add_option("--seed", ov.seed, "override the sampling seed");
    classify->add_option("--samples", ov.samples, "override the sample count");

    CLI::App* curvature = app.add_subcommand("curvature", "curvature tables at one point");
    curvature->add_option("spec", spec_path, "instance document")->required();
    curvature->add_option("--point", point_text, "chart point, e.g. \"x=0.1,0.2,0.3,y=0,0,0\"")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(spec_path, report_path, ov);
        if (classify->parsed()) return run_classify(spec_path, ov);
        if (curvature->parsed()) return run_curvature(spec_path, point_text);
    } catch (const pacfin::InstanceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
