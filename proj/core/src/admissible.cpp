#include "wgstab/admissible.hpp"

#include "wgstab/operators.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wgstab {

namespace {

double bracket(double y) { return std::sqrt(1.0 + y * y); }

// Quintic smoothstep, two continuous derivatives at both ends.
double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace

double AxialBackground::amplitude(double y) const {
    return c * std::pow(bracket(y), -alpha());
}

double AxialBackground::amplitude_dd(double y) const {
    const double al = alpha();
    const double b2 = 1.0 + y * y;
    return c * al * ((al + 1.0) * y * y - 1.0) * std::pow(b2, -0.5 * al - 2.0);
}

double AxialBackground::potential(double y) const {
    const double al = alpha();
    const double b2 = 1.0 + y * y;
    return al * ((al + 1.0) * y * y - 1.0) / (b2 * b2);
}

AxialBackground background_profile(double epsilon, double c) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("background_profile: epsilon must be positive");
    if (!(c > 0.0))
        throw std::invalid_argument("background_profile: c must be positive");
    return AxialBackground{epsilon, c};
}

AdmissiblePair build_pair(const FactoryParams& params, GridPtr grid) {
    const auto& cs = grid->cross_section();
    const AxialBackground bg = background_profile(params.epsilon, params.c);
    if (!(params.collar_width >= 4.0 * cs.spacing()))
        throw std::invalid_argument(
            "build_pair: collar_width must cover the boundary stencil span (4 cells)");
    if (!(params.transition_width > 0.0))
        throw std::invalid_argument("build_pair: transition_width must be positive");
    const double half = 0.5 * (cs.b() - cs.a());
    if (!(params.collar_width + params.transition_width <= half))
        throw std::invalid_argument(
            "build_pair: collar and transition must fit inside the half cross-section");
    if (params.interior == InteriorKind::bump && !(params.bump_width > 0.0))
        throw std::invalid_argument("build_pair: bump_width must be positive");

    AdmissiblePair pair;
    pair.background = bg;
    pair.collar_width = params.collar_width;
    pair.transition_width = params.transition_width;
    pair.upsilon0 = params.c;
    pair.x_independent = params.interior == InteriorKind::background;

    const int n = cs.n_nodes();
    const int nx = grid->n_axial();
    pair.chi.resize(n);
    for (int i = 0; i < n; ++i) {
        const double dist = std::min(cs.node(i) - cs.a(), cs.b() - cs.node(i));
        pair.chi[i] =
            1.0 - smoothstep((dist - params.collar_width) / params.transition_width);
    }

    pair.q0 = GridFunction(grid);
    pair.u0 = GridFunction(grid);
    const double width = cs.b() - cs.a();
    for (int i = 0; i < n; ++i) {
        const double s = (cs.node(i) - cs.a()) / width;
        const double interior_shape = 16.0 * s * s * (1.0 - s) * (1.0 - s);
        const double blend = 1.0 - pair.chi[i];
        for (int m = 0; m < nx; ++m) {
            const double y = grid->axial_node(m);
            const double ub = bg.amplitude(y);
            const double qb = bg.potential(y);
            if (params.interior == InteriorKind::background) {
                pair.u0.at(i, m) = ub;
                pair.q0.at(i, m) = qb;
            } else {
                const double g = interior_shape *
                                 std::exp(-(y / params.bump_width) * (y / params.bump_width));
                pair.u0.at(i, m) = ub * (1.0 + blend * params.bump_height * g);
                pair.q0.at(i, m) = qb + blend * params.bump_potential * g;
            }
        }
    }

    // nodewise floor certificate
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < nx; ++m) {
            const double floor = pair.upsilon0 *
                                 std::pow(bracket(grid->axial_node(m)), -bg.alpha());
            if (!(pair.u0.at(i, m).real() >= floor))
                throw std::invalid_argument(
                    "build_pair: amplitude floor violated at node (" +
                    std::to_string(i) + "," + std::to_string(m) + ")");
        }

    // residual of the stationary identity, analytic zero on the collar
    if (pair.x_independent) {
        pair.stationary_residual = GridFunction(grid);
    } else {
        pair.stationary_residual = schrodinger_apply(pair.u0, pair.q0);
        for (int i = 0; i < n; ++i)
            if (pair.on_collar(i))
                for (int m = 0; m < nx; ++m)
                    pair.stationary_residual.at(i, m) = cplx(0.0, 0.0);
    }

    // boundary traces of the nested operator must vanish
    GridFunction nested = schrodinger_apply(pair.stationary_residual, pair.q0);
    for (Side side : {Side::left, Side::right}) {
        for (const cplx& v : nested.boundary_row(side))
            if (std::abs(v) > 1e-8)
                throw std::invalid_argument(
                    "build_pair: nested operator trace exceeds tolerance on the wall");
    }
    return pair;
}

void validate(const PerturbationParams& pp) {
    if (!(pp.a > 0.0))
        throw std::invalid_argument("perturbation: envelope amplitude a must be positive");
    if (!(pp.b > 0.0))
        throw std::invalid_argument("perturbation: envelope rate b must be positive");
    if (!(pp.epsilon > 0.0))
        throw std::invalid_argument("perturbation: epsilon must be positive");
    if (!(pp.d_eps > 2.0 * (1.0 + pp.epsilon) / 3.0))
        throw std::invalid_argument(
            "perturbation: envelope power d_eps must exceed 2(1+epsilon)/3");
}

void require_truncation_admissible(const PerturbationParams& pp,
                                   const CylinderGrid& grid) {
    validate(pp);
    const double cap = pp.a *
        std::exp(-pp.b * std::pow(bracket(grid.half_length()), pp.d_eps));
    if (!(cap < grid.truncation_tol()))
        throw std::invalid_argument(
            "perturbation: decay envelope not below truncation_tol at the axial caps; "
            "increase half_length");
}

GridFunction make_perturbation(const PerturbationParams& pp, GridPtr grid,
                               double amplitude) {
    require_truncation_admissible(pp, *grid);
    if (!(amplitude >= 0.0) || !(amplitude <= pp.a))
        throw std::invalid_argument(
            "make_perturbation: amplitude must lie within [0, a]");
    const auto& cs = grid->cross_section();
    const double width = cs.b() - cs.a();
    GridFunction rho(grid);
    // wall rows stay exactly zero; sin(pi) alone leaves a ~1e-16 residue
    for (int i = 1; i + 1 < cs.n_nodes(); ++i) {
        const double sn = std::sin(M_PI * (cs.node(i) - cs.a()) / width);
        const double shape = sn * sn;
        for (int m = 0; m < grid->n_axial(); ++m) {
            const double env =
                std::exp(-pp.b * std::pow(bracket(grid->axial_node(m)), pp.d_eps));
            rho.at(i, m) = amplitude * shape * env;
        }
    }
    return rho;
}

DecayReport check_decay_class(const GridFunction& q, const GridFunction& q0,
                              const PerturbationParams& pp) {
    require_compatible(q, q0);
    validate(pp);
    const auto& grid = *q.grid();
    DecayReport rep;
    rep.pass = true;
    rep.worst_excess = -std::numeric_limits<double>::infinity();
    double worst_ratio = 0.0;
    for (int i = 0; i < grid.n_cross(); ++i)
        for (int m = 0; m < grid.n_axial(); ++m) {
            const double diff = std::abs(q.at(i, m) - q0.at(i, m));
            const double floor = 16.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(q.at(i, m)) + std::abs(q0.at(i, m)) + 1.0);
            rep.roundoff_floor = std::max(rep.roundoff_floor, floor);
            const double env =
                std::exp(-pp.b * std::pow(bracket(grid.axial_node(m)), pp.d_eps));
            const double excess = diff - (pp.a * env + floor);
            if (excess > rep.worst_excess) {
                rep.worst_excess = excess;
                rep.worst_cross = i;
                rep.worst_axial = m;
            }
            if (diff > floor) worst_ratio = std::max(worst_ratio, (diff - floor) / env);
            if (excess > 0.0) rep.pass = false;
        }
    rep.slack = pp.a - worst_ratio;
    return rep;
}

}  // namespace wgstab
