#include <doctest.h>

#include <fstream>
#include <sstream>

#include "pacfin/report.hpp"
#include "test_support.hpp"

using namespace pacfin;
using testsupport::load_spec;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const ReportCheck& find_check(const Report& r, const std::string& name) {
    const ReportCheck* c = r.check(name);
    REQUIRE(c != nullptr);
    return *c;
}

bool rung_holds(const Report& r, const std::string& name) {
    for (const auto& rg : r.rungs)
        if (rg.name == name) return rg.evaluated && rg.holds;
    return false;
}

}  // namespace

TEST_CASE("reference run: every gated check passes, ladder fully true") {
    Report r = run_instance(load_spec("reference.json"), {0.0, 0, 24});
    CHECK_FALSE(r.any_fail());
    CHECK(rung_holds(r, "para_sasakian"));
    CHECK(rung_holds(r, "k_paracontact"));
    for (const char* name :
         {"metric_blocks", "derived_identities", "phi_rank", "signature", "fundamental_form",
          "normality_cascade", "paracontact_consequences", "killing_normality_equivalence",
          "interior_reeb_contraction", "connection_metricity", "connection_torsion",
          "connection_koszul", "reeb_covariant_derivative", "phi_covariant_reeb",
          "covariant_phi_expansion", "curvature_reeb_reeb", "flag_curvature_reeb",
          "phi_covariant_identity", "curvature_pair_reeb", "ricci_reeb"})
        CHECK(find_check(r, name).status == CheckStatus::Pass);
    // the reference factor is not locally symmetric: the gate must close
    CHECK(find_check(r, "phi_flag_curvature").status == CheckStatus::HypothesisNotMet);
    CHECK_FALSE(r.tables.empty());
}

TEST_CASE("flat run: ladder stops at paracontact metric, downstream checks gate out") {
    Report r = run_instance(load_spec("flat.json"), {0.0, 0, 16});
    CHECK_FALSE(r.any_fail());
    CHECK(rung_holds(r, "almost_paracontact_metric"));
    CHECK_FALSE(rung_holds(r, "paracontact_metric"));
    CHECK(rung_holds(r, "normal"));
    for (const char* name : {"paracontact_consequences", "killing_normality_equivalence",
                             "reeb_covariant_derivative", "curvature_reeb_reeb",
                             "flag_curvature_reeb", "phi_covariant_identity", "ricci_reeb",
                             "phi_flag_curvature"})
        CHECK(find_check(r, name).status == CheckStatus::HypothesisNotMet);
    for (const char* name : {"metric_blocks", "derived_identities", "phi_rank",
                             "connection_metricity", "connection_torsion", "connection_koszul",
                             "normality_cascade", "covariant_phi_expansion"})
        CHECK(find_check(r, name).status == CheckStatus::Pass);
}

TEST_CASE("locally symmetric run: the phi-flag gate opens and passes") {
    Report r = run_instance(load_spec("locally_symmetric.json"), {0.0, 0, 16});
    CHECK_FALSE(r.any_fail());
    CHECK(rung_holds(r, "para_sasakian"));
    const ReportCheck& pf = find_check(r, "phi_flag_curvature");
    CHECK(pf.status == CheckStatus::Pass);
    CHECK(pf.residual < 1e-6);
}

TEST_CASE("killing-broken run: equivalences verified, no check fails") {
    Report r = run_instance(load_spec("killing_broken.json"), {0.0, 0, 16});
    CHECK_FALSE(r.any_fail());
    CHECK(rung_holds(r, "paracontact_metric"));
    CHECK_FALSE(rung_holds(r, "k_paracontact"));
    CHECK_FALSE(rung_holds(r, "normal"));
    CHECK(r.n3 > 1e-3);
    CHECK(std::max(r.killing_h_res, r.killing_v_res) > 1e-3);
    CHECK(find_check(r, "killing_normality_equivalence").status == CheckStatus::Pass);
    CHECK(find_check(r, "reeb_covariant_derivative").status == CheckStatus::Pass);
    CHECK(find_check(r, "paracontact_consequences").status == CheckStatus::Pass);
    // K-paracontact-gated curvature checks must not run
    CHECK(find_check(r, "curvature_reeb_reeb").status == CheckStatus::HypothesisNotMet);
}

TEST_CASE("non-normal run: K-paracontact without normality") {
    Report r = run_instance(load_spec("nonnormal.json"), {0.0, 0, 16});
    CHECK_FALSE(r.any_fail());
    CHECK(rung_holds(r, "k_paracontact"));
    CHECK_FALSE(rung_holds(r, "normal"));
    CHECK(r.n1 > 1e-3);
    CHECK(find_check(r, "normality_cascade").status == CheckStatus::HypothesisNotMet);
    CHECK(find_check(r, "curvature_reeb_reeb").status == CheckStatus::Pass);
    CHECK(find_check(r, "flag_curvature_reeb").status == CheckStatus::Pass);
    // para-Sasakian-gated identities must not run
    CHECK(find_check(r, "phi_covariant_identity").status == CheckStatus::HypothesisNotMet);
}

TEST_CASE("reports are byte-identical for identical instance and seed") {
    InstanceSpec spec = load_spec("flat.json");
    RunOverrides ov{0.0, 0, 16};
    std::string a = render_json(run_instance(spec, ov));
    std::string b = render_json(run_instance(spec, ov));
    CHECK(a == b);
    CHECK(a.find("\"generator\": \"splitmix64\"") != std::string::npos);
}

TEST_CASE("golden structured reports for the reference and flat instances") {
    for (const char* name : {"reference", "flat"}) {
        InstanceSpec spec = load_spec(std::string(name) + ".json");
        Report r = run_instance(spec);
        std::string got = render_json(r);
        std::string want = slurp(std::string(PACFIN_SOURCE_DIR) + "/tests/golden/" + name +
                                 "_report.json");
        CHECK(got == want);
    }
}

TEST_CASE("text rendering mentions every check") {
    Report r = run_instance(load_spec("flat.json"), {0.0, 0, 8});
    std::string text = render_text(r);
    for (const auto& c : r.checks) CHECK(text.find(c.name) != std::string::npos);
    for (const auto& rg : r.rungs) CHECK(text.find(rg.name) != std::string::npos);
}
