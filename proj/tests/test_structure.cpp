#include <doctest.h>

#include <cmath>

#include "pacfin/structure.hpp"
#include "test_support.hpp"

using namespace pacfin;
using testsupport::load_spec;
using testsupport::load_structure;
using testsupport::spec_points;

namespace {

std::vector<TestField> fields_for(const PacStructure& S, std::uint64_t seed = 404) {
    return spanning_fields(S.bundle, seed);
}

}  // namespace

TEST_CASE("axioms hold exactly on the canonical flat structure (eigenform)") {
    PacStructure S = testsupport::flat_eigenform();
    auto pts = sample_points(SampleBox::cube(S.bundle.chart, -0.8, 0.8), 16, 5);
    CheckReport rep = check_axioms(S, pts, fields_for(S));
    CHECK(rep.max_residual() == 0.0);
}

TEST_CASE("axiom report flags a misnormalized eta(xi)") {
    PacStructure S = testsupport::flat_eigenform();
    S.eta.h[2] = Expr::constant(2.0);  // eta_h(xi_h) = 2
    auto pts = sample_points(SampleBox::cube(S.bundle.chart, -0.8, 0.8), 8, 5);
    CheckReport rep = check_axioms(S, pts, fields_for(S));
    double worst = 0.0;
    for (const auto& c : rep.clauses)
        if (c.name == "eta_h_xi_h") worst = c.residual.value;
    CHECK(worst == doctest::Approx(1.0));
}

TEST_CASE("axioms are invariant under constant conjugation") {
    PacStructure S = load_structure("reference.json");
    SplitMix64 rng(71);
    MatD Ah = testsupport::random_invertible(rng, 3);
    MatD Av = testsupport::random_invertible(rng, 3);
    PacStructure C = conjugate(S, Ah, Av);
    auto pts = spec_points(load_spec("reference.json"), 24);
    CHECK(check_axioms(C, pts, fields_for(C)).max_residual() < 1e-10);
}

TEST_CASE("derived identities follow from the axioms") {
    auto pts16 = sample_points(SampleBox::cube(Chart{1, 1}, -0.8, 0.8), 16, 5);
    PacStructure flat = testsupport::flat_eigenform();
    CHECK(derived_identities(flat, pts16).max_residual() == 0.0);

    PacStructure S = load_structure("reference.json");
    SplitMix64 rng(73);
    for (int trial = 0; trial < 3; ++trial) {
        PacStructure C = conjugate(S, testsupport::random_invertible(rng, 3),
                                   testsupport::random_invertible(rng, 3));
        CheckReport ax = check_axioms(C, pts16, fields_for(C));
        REQUIRE(ax.max_residual() < 1e-10);
        CHECK(derived_identities(C, pts16).max_residual() < 1e-8);
    }
}

TEST_CASE("phi has rank 2(k1+k2)") {
    PacStructure S = load_structure("reference.json");
    auto pts = spec_points(load_spec("reference.json"), 12);
    for (const auto& p : pts) CHECK(rank_phi(S, p) == 4);

    // k1 = 2, k2 = 1: canonical eigenform in dimension 5 + 3
    PacStructure big;
    big.bundle = Bundle::flat(Chart{2, 1});
    big.phi_h = expr_zeros(5, 5);
    big.phi_v = expr_zeros(3, 3);
    for (int pair = 0; pair < 2; ++pair) {
        big.phi_h[std::size_t(2 * pair)][std::size_t(2 * pair + 1)] = Expr::constant(1.0);
        big.phi_h[std::size_t(2 * pair + 1)][std::size_t(2 * pair)] = Expr::constant(1.0);
    }
    big.phi_v[0][1] = Expr::constant(1.0);
    big.phi_v[1][0] = Expr::constant(1.0);
    big.eta = OneForm::zero(big.bundle.chart);
    big.eta.h[4] = Expr::constant(1.0);
    big.eta.v[2] = Expr::constant(1.0);
    big.xi = VecField::zero(big.bundle.chart);
    big.xi.h[4] = Expr::constant(1.0);
    big.xi.v[2] = Expr::constant(1.0);
    auto pts5 = sample_points(SampleBox::cube(big.bundle.chart, -0.5, 0.5), 6, 7);
    CheckReport ax = check_axioms(big, pts5, fields_for(big));
    REQUIRE(ax.max_residual() < 1e-12);
    for (const auto& p : pts5) CHECK(rank_phi(big, p) == 6);

    // phi = 0 is inconsistent with the axioms and has rank 0
    PacStructure zero = testsupport::flat_eigenform();
    zero.phi_h = expr_zeros(3, 3);
    zero.phi_v = expr_zeros(3, 3);
    Point origin{{0, 0, 0}, {0, 0, 0}};
    CHECK(rank_phi(zero, origin) == 0);
    CHECK(check_axioms(zero, {origin}, fields_for(zero)).max_residual() > 0.5);
}

TEST_CASE("kernel of phi is spanned by the Reeb parts") {
    PacStructure S = load_structure("reference.json");
    auto pts = spec_points(load_spec("reference.json"), 8);
    SplitMix64 rng(79);
    for (const auto& p : pts) {
        MatD ph = eval_mat(S.phi_h, p), pv = eval_mat(S.phi_v, p);
        const int n = 3, m = 3;
        MatD full(n + m, n + m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) full(i, j) = ph(i, j);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) full(n + a, n + b) = pv(a, b);
        MatD ata(n + m, n + m);
        for (int i = 0; i < n + m; ++i)
            for (int j = 0; j < n + m; ++j) {
                double s = 0;
                for (int k = 0; k < n + m; ++k) s += full(k, i) * full(k, j);
                ata(i, j) = s;
            }
        MatD vects;
        auto eig = sym_eigen(ata, &vects);
        std::vector<std::vector<double>> kernel;
        for (int c = 0; c < n + m; ++c)
            if (std::abs(eig[std::size_t(c)]) < 1e-16) {
                std::vector<double> v(std::size_t(n + m));
                for (int r = 0; r < n + m; ++r) v[std::size_t(r)] = vects(r, c);
                kernel.push_back(std::move(v));
            }
        REQUIRE(kernel.size() == 2);
        // random kernel combinations decompose along xi_h, xi_v
        Evaluator ev(p);
        std::vector<double> xih(3), xiv(3), etah(3), etav(3);
        for (int i = 0; i < 3; ++i) {
            xih[std::size_t(i)] = ev(S.xi.h[std::size_t(i)]);
            etah[std::size_t(i)] = ev(S.eta.h[std::size_t(i)]);
            xiv[std::size_t(i)] = ev(S.xi.v[std::size_t(i)]);
            etav[std::size_t(i)] = ev(S.eta.v[std::size_t(i)]);
        }
        for (int trial = 0; trial < 4; ++trial) {
            double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
            std::vector<double> z(6);
            for (int r = 0; r < 6; ++r)
                z[std::size_t(r)] = a * kernel[0][std::size_t(r)] + b * kernel[1][std::size_t(r)];
            double eh = 0, evv = 0;
            for (int i = 0; i < 3; ++i) eh += etah[std::size_t(i)] * z[std::size_t(i)];
            for (int i = 0; i < 3; ++i) evv += etav[std::size_t(i)] * z[std::size_t(3 + i)];
            for (int r = 0; r < 6; ++r) {
                double expect = r < 3 ? eh * xih[std::size_t(r)] : evv * xiv[std::size_t(r - 3)];
                CHECK(std::abs(z[std::size_t(r)] - expect) < 1e-8);
            }
        }
    }
}

TEST_CASE("compatibility: flat structure with the swap-form metric") {
    PacStructure S = load_structure("flat.json");
    auto pts = spec_points(load_spec("flat.json"), 16);
    CHECK(check_compatibility(S, pts, fields_for(S)).max_residual() < 1e-14);
}

TEST_CASE("compatibility fails for the Euclidean metric on the swap form") {
    PacStructure S = load_structure("flat.json");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            S.metric.g[std::size_t(i)][std::size_t(j)] = Expr::constant(i == j ? 1.0 : 0.0);
            S.metric.h[std::size_t(i)][std::size_t(j)] = Expr::constant(i == j ? 1.0 : 0.0);
        }
    auto pts = spec_points(load_spec("flat.json"), 8);
    // over frame pairs the worst clause is G(phi e2, phi e2) + G(e2, e2) = 2
    auto frame_only = spanning_fields(S.bundle, 1, /*random_count=*/0);
    CheckReport rep = check_compatibility(S, pts, frame_only);
    double horiz = 0.0;
    for (const auto& c : rep.clauses)
        if (c.name == "horizontal") horiz = c.residual.value;
    CHECK(horiz == doctest::Approx(2.0));
}

TEST_CASE("compatibility survives conjugation") {
    PacStructure S = load_structure("reference.json");
    SplitMix64 rng(83);
    PacStructure C = conjugate(S, testsupport::random_invertible(rng, 3),
                               testsupport::random_invertible(rng, 3));
    auto pts = spec_points(load_spec("reference.json"), 16);
    CHECK(check_compatibility(C, pts, fields_for(C)).max_residual() < 1e-10);
}

TEST_CASE("fundamental form: degenerate along xi, antisymmetric, zero mixed blocks") {
    PacStructure S = load_structure("reference.json");
    auto pts = spec_points(load_spec("reference.json"), 16);
    CHECK(fundamental_form_identities(S, pts).max_residual() < 1e-12);
    BilinearForm F = fundamental_form(S);
    for (const auto& row : F.hv)
        for (const auto& e : row) CHECK(e.is_zero());
    for (const auto& row : F.vh)
        for (const auto& e : row) CHECK(e.is_zero());
}

TEST_CASE("paracontact metric: flat structure fails with residual max|Phi|") {
    PacStructure S = load_structure("flat.json");
    auto pts = spec_points(load_spec("flat.json"), 8);
    CheckReport rep = check_paracontact_metric(S, pts);
    CHECK(rep.max_residual() == doctest::Approx(1.0));
}

TEST_CASE("paracontact metric holds on the reference instance") {
    PacStructure S = load_structure("reference.json");
    auto pts = spec_points(load_spec("reference.json"), 32);
    CheckReport rep = check_paracontact_metric(S, pts);
    CHECK(rep.max_residual() < 1e-8);
    for (const auto& c : rep.clauses)
        if (c.name == "mixed_blocks_vanish") CHECK(c.residual.value < 1e-10);
}

TEST_CASE("paracontact metric check against a finite-difference hand contraction") {
    // Independent oracle: d eta components via central differences of eta,
    // compared with the fundamental form at five fixed points.
    PacStructure S = load_structure("reference.json");
    BilinearForm Phi = fundamental_form(S);
    std::vector<Point> five = {
        {{0.1, 0.2, -0.3}, {0.0, 0.5, 0.1}},  {{-0.4, 0.1, 0.2}, {0.3, -0.2, 0.0}},
        {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}},   {{0.5, -0.5, 0.25}, {-0.25, 0.5, -0.5}},
        {{0.2, 0.6, -0.6}, {0.6, -0.6, 0.2}},
    };
    const double h = 1e-6;
    for (const auto& p : five) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                // d eta_h(delta_i, delta_j) = d_i eta_j - d_j eta_i with N = 0
                auto diff = [&](int wrt, int comp) {
                    Point hiP = p, loP = p;
                    hiP.x[std::size_t(wrt)] += h;
                    loP.x[std::size_t(wrt)] -= h;
                    return (S.eta.h[std::size_t(comp)].eval(hiP) -
                            S.eta.h[std::size_t(comp)].eval(loP)) /
                           (2 * h);
                };
                double deta = diff(i, j) - diff(j, i);
                double phi_ij = Phi.hh[std::size_t(i)][std::size_t(j)].eval(p);
                CHECK(std::abs(deta - phi_ij) < 1e-8);
            }
    }
}

TEST_CASE("metric blocks: symmetry, non-degeneracy, forced signature") {
    auto spec = load_spec("reference.json");
    PacStructure S = build_structure(spec);
    auto pts = spec_points(spec, 32);
    CHECK(check_metric_blocks(S, pts).max_residual() == 0.0);
    CHECK(check_signature(S, pts).max_residual() == 0.0);

    PacStructure flat = load_structure("flat.json");
    CHECK(check_signature(flat, pts).max_residual() == 0.0);
}

TEST_CASE("reference scale factors solve the paracontact-metric constraint") {
    // The reference family: eta = c1 (dx3 - x1 dx2), xi = (1/c1) d3,
    // phi the frame swap, g = c2 (theta1^2 - theta2^2) + eta (x) eta.
    // With c2 = 1 fixed, the horizontal paracontact-metric equation pins c1;
    // solve for it numerically and check the shipped instance uses it.
    auto build_factor = [](double c1, double c2) {
        PacStructure S;
        S.bundle = Bundle::flat(Chart{1, 1});
        Expr C1 = Expr::constant(c1), C2 = Expr::constant(c2);
        Expr x1 = Expr::x(0);
        S.eta = OneForm::zero(S.bundle.chart);
        S.eta.h[1] = -C1 * x1;
        S.eta.h[2] = C1;
        S.eta.v[2] = Expr::constant(1.0);  // vertical factor irrelevant here
        S.xi = VecField::zero(S.bundle.chart);
        S.xi.h[2] = Expr::constant(1.0) / C1;
        S.xi.v[2] = Expr::constant(1.0);
        // phi: swap of e1 = d1 and e2 = d2 + x1 d3
        S.phi_h = expr_zeros(3, 3);
        S.phi_h[0][1] = Expr::constant(1.0);
        S.phi_h[1][0] = Expr::constant(1.0);
        S.phi_h[2][0] = x1;
        S.phi_v = expr_zeros(3, 3);
        S.metric.g = expr_zeros(3, 3);
        S.metric.g[0][0] = C2;
        S.metric.g[1][1] = -C2 + S.eta.h[1] * S.eta.h[1];
        S.metric.g[1][2] = S.eta.h[1] * S.eta.h[2];
        S.metric.g[2][1] = S.metric.g[1][2];
        S.metric.g[2][2] = S.eta.h[2] * S.eta.h[2];
        S.metric.h = expr_zeros(3, 3);
        for (int i = 0; i < 3; ++i) S.metric.h[std::size_t(i)][std::size_t(i)] = Expr::constant(1.0);
        return S;
    };
    Point p{{0.3, -0.2, 0.1}, {0, 0, 0}};
    auto horizontal_residual = [&](double c1) {
        PacStructure S = build_factor(c1, 1.0);
        VecField e1 = frame_delta(S.bundle, 0);
        VecField e2 = frame_delta(S.bundle, 1) + Expr::x(0) * frame_delta(S.bundle, 2);
        Expr resid = d_oneform(S.bundle, eta_h_part(S), e1, e2) -
                     metric_h_part(S.metric, e1, phi_apply(S, e2));
        return resid.eval(p);
    };
    double lo = -4.0, hi = -0.25;
    REQUIRE(horizontal_residual(lo) * horizontal_residual(hi) < 0);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (horizontal_residual(lo) * horizontal_residual(mid) <= 0) hi = mid;
        else lo = mid;
    }
    double c1 = 0.5 * (lo + hi);
    CHECK(c1 == doctest::Approx(-1.0).epsilon(1e-10));

    // the shipped reference instance equals the solved family on the
    // horizontal block
    PacStructure S = build_factor(c1, 1.0);
    PacStructure ref = load_structure("reference.json");
    auto pts = sample_points(SampleBox::cube(S.bundle.chart, -0.7, 0.7), 16, 9);
    for (const auto& q : pts) {
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(S.eta.h[std::size_t(i)].eval(q) - ref.eta.h[std::size_t(i)].eval(q)) < 1e-12);
            CHECK(std::abs(S.xi.h[std::size_t(i)].eval(q) - ref.xi.h[std::size_t(i)].eval(q)) < 1e-12);
            for (int j = 0; j < 3; ++j) {
                CHECK(std::abs(S.metric.g[std::size_t(i)][std::size_t(j)].eval(q) -
                               ref.metric.g[std::size_t(i)][std::size_t(j)].eval(q)) < 1e-12);
                CHECK(std::abs(S.phi_h[std::size_t(i)][std::size_t(j)].eval(q) -
                               ref.phi_h[std::size_t(i)][std::size_t(j)].eval(q)) < 1e-12);
            }
        }
    }
}
