#include "wgstab/schrodinger.hpp"

#include "wgstab/norms.hpp"
#include "wgstab/operators.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>
#include <string>

namespace wgstab {

namespace {

void require_real_potential(const GridFunction& q, const char* who) {
    if (q.max_imag_abs() != 0.0)
        throw std::invalid_argument(std::string(who) + ": potential must be real");
}

bool cross_independent(const GridFunction& q) {
    const auto& g = *q.grid();
    for (int i = 1; i < g.n_cross(); ++i)
        for (int m = 0; m < g.n_axial(); ++m)
            if (q.at(i, m) != q.at(0, m)) return false;
    return true;
}

using RowMajorField =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

GridFunction TimeAffine::at(double t) const {
    GridFunction out = slope;
    out *= t;
    out += constant;
    return out;
}

TimeAffine boundary_extension(const AdmissiblePair& pair) {
    TimeAffine g;
    g.constant = pair.u0;
    g.slope = pair.stationary_residual;
    g.slope *= cplx(0.0, -1.0);
    return g;
}

TimeAffine build_source(const AdmissiblePair& pair, const GridFunction& q) {
    require_compatible(q, pair.q0);
    require_real_potential(q, "build_source");
    GridFunction rho = q;
    rho -= pair.q0;

    TimeAffine f;
    f.constant = rho;
    f.constant.multiply_pointwise(pair.u0);
    f.constant *= -1.0;

    // i [ (-Delta + q0) S + rho S ]; the nested application keeps the exact
    // zero of stationary pairs and a clean wall trace of factory pairs
    GridFunction rs = rho;
    rs.multiply_pointwise(pair.stationary_residual);
    f.slope = schrodinger_apply(pair.stationary_residual, pair.q0);
    f.slope += rs;
    f.slope *= cplx(0.0, 1.0);
    return f;
}

struct CrankNicolsonStepper::Impl {
    GridPtr grid;
    GridFunction q;
    double dt = 0.0;
    bool fibered = false;
    int nc = 0, ni = 0, na = 0;
    double ih2c = 0.0, ih2a = 0.0;
    cplx ic;  // i dt / 2

    // wall-sine path
    Eigen::MatrixXcd dst;
    std::vector<double> lambda;
    std::vector<cplx> axial_base;  // 1 + ic (2/hx^2 + q_m)
    Eigen::MatrixXcd modes;
    std::vector<cplx> fiber, pivot;

    // sparse path
    Eigen::SparseMatrix<cplx> mat;
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    Eigen::VectorXcd vec;

    GridFunction rhs;

    void assemble_rhs(const GridFunction& v, const GridFunction* f_mid);
    void solve_fibered(GridFunction& v);
    void solve_sparse(GridFunction& v);
};

CrankNicolsonStepper::CrankNicolsonStepper(GridPtr grid, const GridFunction& q,
                                           double dt, StepperPath path)
    : impl_(std::make_unique<Impl>()) {
    if (!grid) throw std::invalid_argument("stepper: null grid");
    if (!(dt > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
    if (q.grid().get() != grid.get())
        throw std::invalid_argument("stepper: potential lives on another grid");
    require_real_potential(q, "stepper");

    Impl& s = *impl_;
    s.grid = grid;
    s.q = q;
    s.dt = dt;
    s.nc = grid->n_cross();
    s.ni = s.nc - 2;
    s.na = grid->n_axial();
    const double hc = grid->cross_section().spacing();
    s.ih2c = 1.0 / (hc * hc);
    s.ih2a = 1.0 / (grid->axial_spacing() * grid->axial_spacing());
    s.ic = cplx(0.0, 0.5 * dt);
    s.rhs = GridFunction(grid);

    const bool independent = cross_independent(q);
    if (path == StepperPath::fibered && !independent)
        throw std::invalid_argument(
            "stepper: fibered path needs a cross-independent potential");
    s.fibered = path == StepperPath::sparse ? false : independent;

    if (s.fibered) {
        s.dst.resize(s.ni, s.ni);
        for (int a = 0; a < s.ni; ++a)
            for (int b = 0; b < s.ni; ++b)
                s.dst(a, b) =
                    std::sin((a + 1.0) * (b + 1.0) * M_PI / (s.nc - 1.0));
        s.lambda.resize(s.ni);
        for (int j = 0; j < s.ni; ++j) {
            const double sn = std::sin((j + 1.0) * M_PI / (2.0 * (s.nc - 1.0)));
            s.lambda[j] = 4.0 * s.ih2c * sn * sn;
        }
        s.axial_base.resize(s.na);
        for (int m = 0; m < s.na; ++m)
            s.axial_base[m] =
                1.0 + s.ic * (2.0 * s.ih2a + s.q.at(0, m).real());
        s.modes.resize(s.ni, s.na);
        s.fiber.resize(s.na);
        s.pivot.resize(s.na);
    } else {
        const int n = s.ni * s.na;
        std::vector<Eigen::Triplet<cplx>> trip;
        trip.reserve(std::size_t(n) * 5);
        for (int i = 0; i < s.ni; ++i)
            for (int m = 0; m < s.na; ++m) {
                const int row = i * s.na + m;
                trip.emplace_back(row, row,
                                  1.0 + s.ic * (2.0 * s.ih2c + 2.0 * s.ih2a +
                                                s.q.at(i + 1, m).real()));
                if (i > 0) trip.emplace_back(row, row - s.na, -s.ic * s.ih2c);
                if (i + 1 < s.ni) trip.emplace_back(row, row + s.na, -s.ic * s.ih2c);
                if (m > 0) trip.emplace_back(row, row - 1, -s.ic * s.ih2a);
                if (m + 1 < s.na) trip.emplace_back(row, row + 1, -s.ic * s.ih2a);
            }
        s.mat.resize(n, n);
        s.mat.setFromTriplets(trip.begin(), trip.end());
        s.mat.makeCompressed();
        s.lu.compute(s.mat);
        if (s.lu.info() != Eigen::Success)
            throw std::runtime_error(
                "stepper: sparse factorization failed (" +
                std::to_string(n) + " unknowns): " + s.lu.lastErrorMessage());
        s.vec.resize(n);
    }
}

CrankNicolsonStepper::~CrankNicolsonStepper() = default;

bool CrankNicolsonStepper::fibered() const { return impl_->fibered; }
double CrankNicolsonStepper::dt() const { return impl_->dt; }

void CrankNicolsonStepper::Impl::assemble_rhs(const GridFunction& v,
                                              const GridFunction* f_mid) {
    const cplx idt(0.0, dt);
    for (int i = 1; i <= ni; ++i)
        for (int m = 0; m < na; ++m) {
            const cplx c = v.at(i, m);
            cplx bv = ih2c * (v.at(i - 1, m) - 2.0 * c + v.at(i + 1, m)) -
                      q.at(i, m).real() * c;
            bv += ih2a * ((m > 0 ? v.at(i, m - 1) : 0.0) - 2.0 * c +
                          (m + 1 < na ? v.at(i, m + 1) : 0.0));
            cplx r = c + ic * bv;
            if (f_mid) r += idt * f_mid->at(i, m);
            rhs.at(i, m) = r;
        }
}

void CrankNicolsonStepper::Impl::solve_fibered(GridFunction& v) {
    Eigen::Map<const RowMajorField> r(rhs.values().data() + na, ni, na);
    modes.noalias() = dst * r;
    const cplx off = -ic * ih2a;
    for (int j = 0; j < ni; ++j) {
        const cplx shift = ic * lambda[j];
        for (int m = 0; m < na; ++m) fiber[m] = modes(j, m);
        // Thomas sweep; diagonal real parts are exactly one, so pivots stay
        // away from zero without pivoting
        pivot[0] = axial_base[0] + shift;
        for (int m = 1; m < na; ++m) {
            const cplx w = off / pivot[m - 1];
            pivot[m] = axial_base[m] + shift - w * off;
            fiber[m] -= w * fiber[m - 1];
        }
        fiber[na - 1] /= pivot[na - 1];
        for (int m = na - 2; m >= 0; --m)
            fiber[m] = (fiber[m] - off * fiber[m + 1]) / pivot[m];
        for (int m = 0; m < na; ++m) modes(j, m) = fiber[m];
    }
    Eigen::Map<RowMajorField> out(v.values().data() + na, ni, na);
    out.noalias() = (2.0 / (nc - 1.0)) * (dst * modes);
}

void CrankNicolsonStepper::Impl::solve_sparse(GridFunction& v) {
    for (int i = 0; i < ni; ++i)
        for (int m = 0; m < na; ++m) vec[i * na + m] = rhs.at(i + 1, m);
    Eigen::VectorXcd x = lu.solve(vec);
    // one refinement pass keeps the long-run norm drift near round-off
    Eigen::VectorXcd res = vec - mat * x;
    x += lu.solve(res);
    for (int i = 0; i < ni; ++i)
        for (int m = 0; m < na; ++m) v.at(i + 1, m) = x[i * na + m];
}

void CrankNicolsonStepper::step(GridFunction& v, const GridFunction& f_mid) {
    Impl& s = *impl_;
    if (v.grid().get() != s.grid.get() || f_mid.grid().get() != s.grid.get())
        throw std::invalid_argument("stepper: field lives on another grid");
    s.assemble_rhs(v, &f_mid);
    s.fibered ? s.solve_fibered(v) : s.solve_sparse(v);
    for (int m = 0; m < s.na; ++m)
        v.at(0, m) = v.at(s.nc - 1, m) = 0.0;
}

void CrankNicolsonStepper::step_free(GridFunction& v) {
    Impl& s = *impl_;
    if (v.grid().get() != s.grid.get())
        throw std::invalid_argument("stepper: field lives on another grid");
    s.assemble_rhs(v, nullptr);
    s.fibered ? s.solve_fibered(v) : s.solve_sparse(v);
    for (int m = 0; m < s.na; ++m)
        v.at(0, m) = v.at(s.nc - 1, m) = 0.0;
}

double trace_series_norm(const TraceSeries& s, double dt, double hx) {
    if (s.size() < 2) throw std::invalid_argument("trace norm: series too short");
    if (!(dt > 0.0) || !(hx > 0.0))
        throw std::invalid_argument("trace norm: nonpositive step");
    double acc = 0.0;
    for (std::size_t m = 0; m < s.size(); ++m) {
        double row = 0.0;
        for (const cplx& z : s[m]) row += std::norm(z);
        const double wt = (m == 0 || m + 1 == s.size()) ? 0.5 : 1.0;
        acc += wt * row;
    }
    return std::sqrt(acc * dt * hx);
}

DirectSolution solve_direct(const AdmissiblePair& pair, const GridFunction& q,
                            const DirectOptions& opts) {
    require_compatible(q, pair.q0);
    require_real_potential(q, "solve_direct");
    const GridPtr grid = q.grid();
    const int nt = grid->n_time();
    if (nt < 16) throw std::invalid_argument("solve_direct: fewer than 16 time steps");
    if (opts.keep_every < 0 || opts.diagnostics_every < 0)
        throw std::invalid_argument("solve_direct: negative cadence");
    const double dt = grid->time_step();

    const GridFunction& S = pair.stationary_residual;
    const TimeAffine g0 = boundary_extension(pair);
    const TimeAffine f = build_source(pair, q);
    CrankNicolsonStepper stepper(grid, q, dt, opts.path);

    DirectSolution sol;
    sol.grid = grid;
    sol.times.resize(nt + 1);
    for (const Side side : grid->cross_section().gamma_star())
        sol.neumann_uprime[side] = {};

    double max_h2_u = 0.0, max_l2_up = 0.0;
    GridFunction v(grid);
    for (int m = 0; m <= nt; ++m) {
        const double t = m * dt;
        if (m > 0) stepper.step(v, f.at(t - 0.5 * dt));
        sol.times[m] = t;

        GridFunction u = g0.at(t);
        u += v;
        // u' through the equation: i [ (Delta - q) v + f(t) - S ]
        GridFunction up = f.at(t);
        up -= schrodinger_apply(v, q);
        up -= S;
        up *= cplx(0.0, 1.0);

        for (auto& [side, series] : sol.neumann_uprime)
            series.push_back(boundary_normal_derivative(up, side));
        sol.sup_u = std::max(sol.sup_u, u.max_abs());
        sol.sup_uprime = std::max(sol.sup_uprime, up.max_abs());
        if (opts.keep_every > 0 && m % opts.keep_every == 0) {
            sol.kept_steps.push_back(m);
            sol.kept_u.push_back(u);
            sol.kept_uprime.push_back(up);
        }
        if (opts.diagnostics_every > 0 &&
            (m % opts.diagnostics_every == 0 || m == nt)) {
            max_h2_u = std::max(max_h2_u, sobolev_norm(u, 2));
            max_l2_up = std::max(max_l2_up, l2_norm(up));
        }
        if (m == nt) {
            sol.final_u = std::move(u);
            sol.final_uprime = std::move(up);
        }
    }
    if (opts.diagnostics_every > 0)
        sol.regularity_ratio = (max_h2_u + max_l2_up) / sobolev_norm(pair.u0, 3);
    return sol;
}

std::vector<cplx> neumann_trace(const GridFunction& w, Side side) {
    const auto& gs = w.grid()->cross_section().gamma_star();
    if (gs.find(side) == gs.end())
        throw std::invalid_argument("neumann_trace: side is not observed");
    return boundary_normal_derivative(w, side);
}

}  // namespace wgstab
