#include <doctest.h>

#include "wgstab/carleman.hpp"
#include "wgstab/norms.hpp"

#include <cmath>

using namespace wgstab;

namespace {

CrossSection unit_section(int n = 64) { return CrossSection(0.0, 1.0, n); }

GridPtr small_grid(int n_cross, int n_axial, int n_time = 16) {
    CylinderGrid::Spec spec;
    spec.n_cross = n_cross;
    spec.n_axial = n_axial;
    spec.n_time = n_time;
    spec.half_length = 6.0;
    return CylinderGrid::create(spec);
}

// Smooth analytic test function supported in |t| < 0.9: wall-vanishing in x',
// Gaussian in the axial variable.
SpaceTimeField analytic_field(const GridPtr& g) {
    return [g](double t) {
        const double u = t / 0.9;
        if (std::abs(u) >= 1.0) return GridFunction(g);
        const double tau = std::pow(1.0 - u * u, 3);
        return GridFunction::sample(g, [tau](double xp, double xn) {
            const double bump = std::sin(M_PI * xp);
            return cplx(tau * bump * std::exp(-xn * xn),
                        0.4 * tau * xp * (1.0 - xp) * std::exp(-0.5 * xn * xn));
        });
    };
}

}  // namespace

TEST_CASE("quadratic candidate selects the far wall") {
    const CrossSection cs = unit_section();

    const BetaCandidate left_vertex = quadratic_candidate(-1.0, cs);
    CHECK(left_vertex.value(0.0) == 1.0);
    CHECK(left_vertex.value(1.0) == 4.0);
    CHECK(left_vertex.grad(0.5) == doctest::Approx(3.0));
    CHECK(left_vertex.hess(0.3) == 2.0);
    CHECK(left_vertex.observed == std::set<Side>{Side::right});

    const BetaCandidate right_vertex = quadratic_candidate(2.0, cs);
    CHECK(right_vertex.observed == std::set<Side>{Side::left});
    CHECK(right_vertex.value(0.0) == 4.0);

    CHECK_THROWS_AS(quadratic_candidate(0.5, cs), std::invalid_argument);
    CHECK_THROWS_AS(quadratic_candidate(0.0, cs), std::invalid_argument);
    CHECK_THROWS_AS(quadratic_candidate(1.0, cs), std::invalid_argument);
}

TEST_CASE("structural conditions on the quadratic candidate") {
    const CrossSection cs = unit_section();
    const BetaCandidate beta = quadratic_candidate(-1.0, cs);
    const AssumptionReport rep = check_assumption(beta, cs);

    CHECK(rep.pass());
    CHECK(rep.c0 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.gradient.witness == 0.0);
    CHECK(rep.eps == 2.0);
    CHECK(rep.lambda1 == 0.0);
    CHECK(rep.outflow.pass);
    CHECK(rep.convexity.pass);
}

TEST_CASE("degenerate and misdirected candidates are rejected") {
    const CrossSection cs = unit_section();

    SUBCASE("constant profile has no usable gradient") {
        BetaCandidate flat;
        flat.value = [](double) { return 1.0; };
        flat.grad = [](double) { return 0.0; };
        flat.hess = [](double) { return 0.0; };
        flat.observed = {Side::right};
        const AssumptionReport rep = check_assumption(flat, cs);
        CHECK_FALSE(rep.gradient.pass);
        CHECK_FALSE(rep.convexity.pass);
        CHECK_FALSE(rep.pass());
        CHECK(rep.c0 == 0.0);
    }

    SUBCASE("observing the wrong wall leaks flux through the other one") {
        BetaCandidate beta = quadratic_candidate(-1.0, cs);
        beta.observed = {Side::left};  // the profile flows out on the right
        const AssumptionReport rep = check_assumption(beta, cs);
        CHECK(rep.gradient.pass);
        CHECK_FALSE(rep.outflow.pass);
        CHECK(rep.outflow.witness == 1.0);
        CHECK(rep.outflow.value == doctest::Approx(4.0));
        CHECK_FALSE(rep.pass());
    }

    SUBCASE("non-convex profile certifies a lambda threshold") {
        BetaCandidate wavy;
        wavy.value = [](double x) { return x + 0.1 * std::cos(5.0 * x); };
        wavy.grad = [](double x) { return 1.0 - 0.5 * std::sin(5.0 * x); };
        wavy.hess = [](double x) { return -2.5 * std::cos(5.0 * x); };
        wavy.observed = {Side::left, Side::right};
        const AssumptionReport rep = check_assumption(wavy, cs);
        CHECK(rep.gradient.pass);
        CHECK(rep.convexity.pass);
        CHECK(rep.eps == 1.0);
        CHECK(rep.lambda1 > 0.0);
        // the threshold must actually deliver the margin at every node
        for (int i = 0; i < cs.n_nodes(); ++i) {
            const double x = cs.node(i);
            const double margin = rep.lambda1 * wavy.grad(x) * wavy.grad(x) + wavy.hess(x);
            CHECK(margin >= rep.eps - 1e-12);
        }
    }

    SUBCASE("missing evaluators are reported") {
        BetaCandidate empty;
        CHECK_THROWS_AS(check_assumption(empty, cs), std::invalid_argument);
    }
}

TEST_CASE("weight pair matches the hand-computed example") {
    // Linear profile on (0, 1) with r = 2 gives K = 2; lambda = ln(2)/2 makes
    // exp(2 lambda K) = 4 and exp(lambda (0 + K)) = 2, so at x' = 0, t = 0,
    // T = 1 both weights equal 2.
    const CrossSection cs = unit_section();
    BetaCandidate linear;
    linear.value = [](double x) { return x; };
    linear.grad = [](double) { return 1.0; };
    linear.hess = [](double) { return 0.0; };
    linear.observed = {Side::right};

    const double lambda = 0.5 * std::log(2.0);
    const WeightSpec ws = make_weight_spec(linear, cs, 2.0, lambda, 1.0, 2.0);
    CHECK(ws.K == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(weight_phi(ws, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(weight_eta(ws, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-13));

    const WeightSlice sl = weight_slice(ws, cs, 0.0);
    CHECK(sl.phi.front() == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(sl.eta.front() == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(sl.eta_t.front() == 0.0);  // even in t, flat at the center
    CHECK(sl.eta_x.front() == doctest::Approx(-std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("weight invariants on the default quadratic spec") {
    const CrossSection cs = unit_section();
    const BetaCandidate beta = quadratic_candidate(-1.0, cs);
    const WeightSpec ws = make_weight_spec(beta, cs);
    CHECK(ws.K == doctest::Approx(8.0).epsilon(1e-14));

    double sup_beta = 0.0;
    for (int i = 0; i < cs.n_nodes(); ++i)
        sup_beta = std::max(sup_beta, std::abs(beta.value(cs.node(i))));
    CHECK(ws.K > sup_beta);

    const double cap = std::exp(2.0 * ws.lambda * ws.K);
    for (double t : {0.0, 0.4, -0.73, 0.9}) {
        const WeightSlice sl = weight_slice(ws, cs, t);
        for (int i = 0; i < cs.n_nodes(); ++i) {
            CHECK(sl.phi[i] > 0.0);
            CHECK(sl.eta[i] > 0.0);
            if (t == 0.0) CHECK(sl.eta[i] <= cap / (ws.T * ws.T));
        }
    }

    // blow-up approaching the time endpoints
    const double e1 = weight_eta(ws, 0.9, 0.5);
    const double e2 = weight_eta(ws, 0.99, 0.5);
    const double e3 = weight_eta(ws, 0.999, 0.5);
    CHECK(e1 < e2);
    CHECK(e2 < e3);
    CHECK(weight_phi(ws, 0.999, 0.5) > weight_phi(ws, 0.9, 0.5));

    CHECK_THROWS_AS(weight_eta(ws, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(weight_phi(ws, -1.5, 0.5), std::domain_error);

    CHECK_THROWS_AS(make_weight_spec(beta, cs, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_weight_spec(beta, cs, 2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_weight_spec(beta, cs, 2.0, 0.1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_weight_spec(beta, cs, 2.0, 0.1, 1.0, 0.0), std::invalid_argument);
    // lambda = 40 puts 2 * lambda * K = 640 in the exponent
    CHECK_THROWS_AS(make_weight_spec(beta, cs, 2.0, 40.0), std::invalid_argument);
}

TEST_CASE("study samples are deterministic and respect the time support") {
    const GridPtr g = small_grid(16, 48);
    const StudySample a(7, 3, 1.0);
    const StudySample b(7, 3, 1.0);
    const StudySample c(7, 4, 1.0);

    const GridFunction fa = a.slice(g, 0.31);
    const GridFunction fb = b.slice(g, 0.31);
    const GridFunction fc = c.slice(g, 0.31);
    REQUIRE(fa.size() == fb.size());
    bool identical = true, distinct = false;
    for (std::size_t k = 0; k < fa.size(); ++k) {
        identical = identical && fa.values()[k] == fb.values()[k];
        distinct = distinct || fa.values()[k] != fc.values()[k];
    }
    CHECK(identical);
    CHECK(distinct);
    CHECK(fa.max_abs() > 0.0);

    // walls and the outside of the time support are exactly zero
    for (int m = 0; m < g->n_axial(); ++m) {
        CHECK(fa.at(0, m) == 0.0);
        CHECK(fa.at(g->n_cross() - 1, m) == 0.0);
    }
    CHECK(a.slice(g, 0.95).max_abs() == 0.0);
    CHECK(a.time_factor(-0.91) == 0.0);
    CHECK(a.time_factor(0.0) == 1.0);

    CHECK_THROWS_AS(StudySample(1, 0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(StudySample(1, 0, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("conjugation identity holds exactly for trivial configurations") {
    const GridPtr g = small_grid(16, 48);
    const CrossSection& cs = g->cross_section();
    const BetaCandidate beta = quadratic_candidate(-1.0, cs);

    SUBCASE("zero field") {
        const WeightSpec ws = make_weight_spec(beta, cs);
        const auto zero = [g](double) { return GridFunction(g); };
        const ConjugationReport rep = conjugation_residual(zero, ws, g, 16);
        CHECK(rep.residual == 0.0);
        CHECK(rep.reference == 0.0);
        CHECK(rep.time_slices == 14);
    }

    SUBCASE("s = 0 removes the weights and the stencils cancel bitwise") {
        WeightSpec ws = make_weight_spec(beta, cs);
        ws.s = 0.0;
        const ConjugationReport rep = conjugation_residual(analytic_field(g), ws, g, 16);
        CHECK(rep.residual == 0.0);
        CHECK(rep.reference > 0.0);
    }
}

TEST_CASE("conjugation residual vanishes under joint refinement") {
    for (double s : {1.0, 5.0}) {
        double previous = 0.0;
        for (int level = 0; level < 3; ++level) {
            const GridPtr g = small_grid(24 << level, 64 << level);
            const BetaCandidate beta = quadratic_candidate(-1.0, g->cross_section());
            const WeightSpec ws =
                make_weight_spec(beta, g->cross_section(), 2.0, 0.1, 1.0, s);
            const ConjugationReport rep =
                conjugation_residual(analytic_field(g), ws, g, 24 << level);
            REQUIRE(rep.reference > 0.0);
            const double relative = rep.residual / rep.reference;
            CHECK(std::isfinite(relative));
            if (level > 0) CHECK(previous / relative >= 3.5);
            previous = relative;
        }
    }
}

TEST_CASE("conjugation residual rejects unusable inputs") {
    const GridPtr g = small_grid(16, 48);
    const CrossSection& cs = g->cross_section();
    const WeightSpec ws = make_weight_spec(quadratic_candidate(-1.0, cs), cs);

    SUBCASE("field touching the time endpoints") {
        const auto wide = [g](double) {
            return GridFunction::sample_real(
                g, [](double xp, double xn) { return xp * std::exp(-xn * xn); });
        };
        CHECK_THROWS_AS(conjugation_residual(wide, ws, g, 16), std::invalid_argument);
    }

    SUBCASE("slices on a foreign grid") {
        const GridPtr other = small_grid(16, 32);
        const auto foreign = [other](double) { return GridFunction(other); };
        CHECK_THROWS_AS(conjugation_residual(foreign, ws, g, 16), std::invalid_argument);
    }

    SUBCASE("too few slices") {
        const auto zero = [g](double) { return GridFunction(g); };
        CHECK_THROWS_AS(conjugation_residual(zero, ws, g, 8), std::invalid_argument);
    }
}

TEST_CASE("ratio study is finite, flat-or-decreasing, deterministic") {
    const GridPtr g = small_grid(24, 64, 16);
    const CrossSection& cs = g->cross_section();
    const WeightSpec ws = make_weight_spec(quadratic_candidate(-1.0, cs), cs);
    const std::vector<double> s_values{2.0, 4.0, 8.0, 12.0, 16.0, 20.0};

    const RatioStudy study = carleman_ratio_study(ws, g, 32, 6, s_values, 11);
    REQUIRE(study.rows.size() == s_values.size());
    CHECK(study.finite);
    CHECK(study.samples == 6);
    for (const RatioRow& row : study.rows) {
        CHECK(std::isfinite(row.max_ratio));
        CHECK(row.max_ratio > 0.0);
        CHECK(row.mean_ratio <= row.max_ratio * (1.0 + 1e-12));
    }
    // the maximized ratio must not grow with s on the upper half of the sweep
    for (std::size_t k = s_values.size() / 2; k + 1 < s_values.size(); ++k)
        CHECK(study.rows[k + 1].max_ratio <= study.rows[k].max_ratio * 1.05);

    const RatioStudy again = carleman_ratio_study(ws, g, 32, 6, s_values, 11);
    for (std::size_t k = 0; k < study.rows.size(); ++k) {
        CHECK(again.rows[k].max_ratio == study.rows[k].max_ratio);
        CHECK(again.rows[k].mean_ratio == study.rows[k].mean_ratio);
    }
    const RatioStudy other = carleman_ratio_study(ws, g, 32, 6, s_values, 12);
    bool moved = false;
    for (std::size_t k = 0; k < study.rows.size(); ++k)
        moved = moved || other.rows[k].max_ratio != study.rows[k].max_ratio;
    CHECK(moved);
}

TEST_CASE("ratio study rejects unusable inputs") {
    const GridPtr g = small_grid(16, 48);
    const CrossSection& cs = g->cross_section();
    const WeightSpec ws = make_weight_spec(quadratic_candidate(-1.0, cs), cs);

    CHECK_THROWS_AS(carleman_ratio_study(ws, g, 8, 4, {2.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(carleman_ratio_study(ws, g, 32, 0, {2.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(carleman_ratio_study(ws, g, 32, 4, {}, 1), std::invalid_argument);
    CHECK_THROWS_AS(carleman_ratio_study(ws, g, 32, 4, {2.0, -1.0}, 1),
                    std::invalid_argument);

    WeightSpec unobserved = ws;
    unobserved.beta.observed.clear();
    CHECK_THROWS_AS(carleman_ratio_study(unobserved, g, 32, 4, {2.0}, 1),
                    std::invalid_argument);

    WeightSpec flipped = ws;
    flipped.beta.observed = {Side::left};  // dn beta < 0 there
    CHECK_THROWS_AS(carleman_ratio_study(flipped, g, 32, 4, {2.0}, 1),
                    std::invalid_argument);
}
