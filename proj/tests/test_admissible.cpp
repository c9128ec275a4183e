#include <doctest.h>

#include "wgstab/admissible.hpp"
#include "wgstab/norms.hpp"
#include "wgstab/operators.hpp"

#include <cmath>

using namespace wgstab;

namespace {

GridPtr make_grid(int n_cross = 48, int n_axial = 128, double L = 8.0) {
    CylinderGrid::Spec spec;
    spec.n_cross = n_cross;
    spec.n_axial = n_axial;
    spec.half_length = L;
    spec.n_time = 16;
    return CylinderGrid::create(spec);
}

// Richardson-extrapolated central second derivative, independent of the
// closed forms under test.
double numeric_dd(const std::function<double(double)>& f, double y) {
    auto central = [&](double h) {
        return (f(y + h) - 2.0 * f(y) + f(y - h)) / (h * h);
    };
    const double d1 = central(1e-2), d2 = central(5e-3);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

TEST_CASE("background profile solves its own stationary identity") {
    for (double eps : {1.0, 0.37, 2.5}) {
        AxialBackground bg = background_profile(eps, 1.3);
        for (int j = 0; j <= 100; ++j) {
            const double y = -5.0 + 0.1 * j;
            // closed-form second derivative against the potential
            CHECK(std::abs(-bg.amplitude_dd(y) + bg.potential(y) * bg.amplitude(y)) <=
                  1e-12 * std::max(1.0, std::abs(bg.amplitude_dd(y))));
            // independent numerical oracle
            CHECK(bg.amplitude_dd(y) ==
                  doctest::Approx(numeric_dd([&](double t) { return bg.amplitude(t); }, y))
                      .epsilon(1e-7));
        }
    }

    AxialBackground unit = background_profile(1.0, 1.0);
    CHECK(unit.potential(0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(unit.potential(1.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(unit.amplitude(0.0) == 1.0);
    // decay exponent: u_b <y>^{(1+eps)/2} is constant
    for (double y : {0.5, 2.0, 7.0})
        CHECK(unit.amplitude(y) * std::pow(std::sqrt(1.0 + y * y), 1.0) ==
              doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(background_profile(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(background_profile(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("x'-independent factory pair") {
    auto grid = make_grid();
    FactoryParams fp;
    AdmissiblePair pair = build_pair(fp, grid);

    CHECK(pair.x_independent);
    CHECK(pair.stationary_residual.max_abs() == 0.0);
    CHECK(pair.upsilon0 == fp.c);
    CHECK(pair.q0.max_imag_abs() == 0.0);

    // every row equals the axial background
    for (int i = 0; i < grid->n_cross(); ++i)
        for (int m = 0; m < grid->n_axial(); m += 7) {
            const double y = grid->axial_node(m);
            CHECK(pair.u0.at(i, m).real() == pair.background.amplitude(y));
            CHECK(pair.q0.at(i, m).real() == pair.background.potential(y));
        }
}

TEST_CASE("blended factory pair keeps the certificates") {
    auto grid = make_grid();
    FactoryParams fp;
    fp.interior = InteriorKind::bump;
    fp.bump_height = 0.8;
    fp.bump_potential = 0.6;
    AdmissiblePair pair = build_pair(fp, grid);

    CHECK_FALSE(pair.x_independent);

    // collar rows equal the background bitwise, floor certificate nodewise
    int n_collar = 0;
    for (int i = 0; i < grid->n_cross(); ++i) {
        if (pair.on_collar(i)) {
            ++n_collar;
            for (int m = 0; m < grid->n_axial(); m += 5)
                CHECK(pair.u0.at(i, m).real() ==
                      pair.background.amplitude(grid->axial_node(m)));
        }
        for (int m = 0; m < grid->n_axial(); ++m) {
            const double y = grid->axial_node(m);
            const double floor =
                pair.upsilon0 * std::pow(std::sqrt(1.0 + y * y), -pair.background.alpha());
            CHECK(pair.u0.at(i, m).real() >= floor);
        }
    }
    CHECK(n_collar >= 8);  // both walls covered beyond the stencil span

    // residual vanishes on the collar, is honest off it
    bool off_collar_nonzero = false;
    for (int i = 0; i < grid->n_cross(); ++i)
        for (int m = 0; m < grid->n_axial(); ++m) {
            if (pair.on_collar(i))
                CHECK(pair.stationary_residual.at(i, m) == cplx(0.0, 0.0));
            else if (std::abs(pair.stationary_residual.at(i, m)) > 1e-3)
                off_collar_nonzero = true;
        }
    CHECK(off_collar_nonzero);

    // nested operator trace on the wall
    GridFunction nested = schrodinger_apply(pair.stationary_residual, pair.q0);
    for (Side s : {Side::left, Side::right})
        for (const cplx& v : nested.boundary_row(s)) CHECK(std::abs(v) <= 1e-8);
}

TEST_CASE("raw stencil residual on the collar scales at second order") {
    FactoryParams fp;
    double sup_coarse = 0.0, sup_fine = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        auto grid = pass == 0 ? make_grid(48, 128) : make_grid(48, 256);
        AdmissiblePair pair = build_pair(fp, grid);
        GridFunction raw = schrodinger_apply(pair.u0, pair.q0);
        double sup = 0.0;
        // interior axial range: skip the one-sided axial end stencils
        for (int i = 0; i < grid->n_cross(); ++i)
            if (pair.on_collar(i))
                for (int m = 1; m < grid->n_axial() - 1; ++m)
                    sup = std::max(sup, std::abs(raw.at(i, m)));
        (pass == 0 ? sup_coarse : sup_fine) = sup;
    }
    CHECK(sup_coarse / sup_fine > 2.5);
    CHECK(sup_coarse / sup_fine < 6.0);
}

TEST_CASE("factory rejects inadmissible requests") {
    auto grid = make_grid();
    FactoryParams fp;
    fp.collar_width = 1e-4;  // thinner than the stencil span
    CHECK_THROWS_AS(build_pair(fp, grid), std::invalid_argument);

    fp = FactoryParams{};
    fp.collar_width = 0.3;
    fp.transition_width = 0.3;  // no room left in the half section
    CHECK_THROWS_AS(build_pair(fp, grid), std::invalid_argument);

    fp = FactoryParams{};
    fp.interior = InteriorKind::bump;
    fp.bump_height = -0.5;  // u_i dips below u_b: floor violated nodewise
    CHECK_THROWS_WITH_AS(build_pair(fp, grid), doctest::Contains("floor violated"),
                         std::invalid_argument);
}

TEST_CASE("perturbation envelope and decay class") {
    auto grid = make_grid();
    PerturbationParams pp;

    CHECK_THROWS_AS(validate(PerturbationParams{1.0, 1.0, 1.2, 1.0}),
                    std::invalid_argument);  // d_eps below 2(1+eps)/3
    CHECK_THROWS_AS(validate(PerturbationParams{-1.0, 1.0, 2.0, 1.0}),
                    std::invalid_argument);

    GridFunction zero = make_perturbation(pp, grid, 0.0);
    CHECK(zero.max_abs() == 0.0);

    GridFunction rho = make_perturbation(pp, grid, 0.5);
    CHECK(rho.max_imag_abs() == 0.0);
    // vanishes on the wall, positive inside, envelope certificate nodewise
    for (int m = 0; m < grid->n_axial(); m += 11) {
        CHECK(std::abs(rho.at(0, m)) == 0.0);
        CHECK(std::abs(rho.at(grid->n_cross() - 1, m)) == 0.0);
    }
    for (int i = 0; i < grid->n_cross(); ++i)
        for (int m = 0; m < grid->n_axial(); ++m) {
            const double y = grid->axial_node(m);
            const double env = std::exp(-pp.b * std::pow(std::sqrt(1.0 + y * y), pp.d_eps));
            CHECK(std::abs(rho.at(i, m)) <= 0.5 * env);
        }

    CHECK_THROWS_AS(make_perturbation(pp, grid, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_perturbation(pp, grid, -0.1), std::invalid_argument);

    // domain too short for the envelope
    auto short_grid = make_grid(48, 64, 2.0);
    CHECK_THROWS_AS(make_perturbation(pp, short_grid, 0.5), std::invalid_argument);

    FactoryParams fp;
    AdmissiblePair pair = build_pair(fp, grid);

    DecayReport same = check_decay_class(pair.q0, pair.q0, pp);
    CHECK(same.pass);
    CHECK(same.slack == doctest::Approx(pp.a));

    GridFunction q1 = pair.q0;
    q1 += rho;
    DecayReport perturbed = check_decay_class(q1, pair.q0, pp);
    CHECK(perturbed.pass);
    // the cross grid straddles the profile midpoint, so the realized peak
    // is max_i sin^2(pi x_i), not exactly 1
    double peak = 0.0;
    for (int i = 0; i < grid->n_cross(); ++i) {
        const double sn = std::sin(M_PI * static_cast<double>(i) / (grid->n_cross() - 1));
        peak = std::max(peak, sn * sn);
    }
    CHECK(perturbed.slack == doctest::Approx(pp.a - 0.5 * peak).epsilon(1e-6));

    // polynomial tail leaves the class; the located node sits far out
    GridFunction bad = pair.q0;
    for (int i = 0; i < grid->n_cross(); ++i)
        for (int m = 0; m < grid->n_axial(); ++m) {
            const double y = grid->axial_node(m);
            bad.at(i, m) += 0.01 / (1.0 + y * y);
        }
    DecayReport tail = check_decay_class(bad, pair.q0, pp);
    CHECK_FALSE(tail.pass);
    CHECK(tail.worst_cross >= 0);
    CHECK(std::abs(grid->axial_node(tail.worst_axial)) > 2.0);
}
