#include "wgstab/elliptic.hpp"

#include "wgstab/fourier.hpp"
#include "wgstab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wgstab {

namespace {

// Trapezoid-weighted L2 norm of one frequency column (fixed k, all cross
// rows).  The axial cell weight is a common factor of every fiber and
// cancels in the resolvent ratios, so it is left out.
double column_norm(const GridFunction& w, int k) {
    const int nc = w.grid()->n_cross();
    double s = 0.0;
    for (int i = 0; i < nc; ++i) {
        const double a = std::abs(w.at(i, k));
        s += (i == 0 || i == nc - 1 ? 0.5 : 1.0) * a * a;
    }
    return std::sqrt(s);
}

struct FiberedSolution {
    GridFunction v;
    ResolventReport report;
};

FiberedSolution solve_fibered(const GridFunction& phi) {
    if (phi.space() != AxialSpace::physical)
        throw std::invalid_argument("solve_dirichlet: physical-space field expected");
    const GridPtr grid = phi.grid();
    const auto& cs = grid->cross_section();
    const int nc = cs.n_nodes();
    const int ni = nc - 2;
    const int na = grid->n_axial();
    const double h2 = cs.spacing() * cs.spacing();
    const double c0 = cs.poincare_constant();

    GridFunction phat = axial_fourier(phi);
    GridFunction vhat(grid, AxialSpace::frequency);

    FiberedSolution out{GridFunction(), ResolventReport{c0, {}}};
    std::vector<double> diag(ni), work(ni);
    std::vector<cplx> rhs(ni);
    for (int k = 0; k < na; ++k) {
        const double p = grid->frequency(k);
        const double src_norm = column_norm(phat, k);
        for (int j = 0; j < ni; ++j) {
            diag[j] = 2.0 / h2 + p * p;
            rhs[j] = phat.at(j + 1, k);
        }
        // Thomas sweep for the symmetric tridiagonal (-1, d, -1)/h^2 system;
        // positive definiteness keeps every pivot strictly positive.
        const double off = -1.0 / h2;
        work[0] = diag[0];
        for (int j = 1; j < ni; ++j) {
            if (!(work[j - 1] > 0.0))
                throw std::logic_error("solve_dirichlet: singular fiber");
            const double m = off / work[j - 1];
            work[j] = diag[j] - m * off;
            rhs[j] -= m * rhs[j - 1];
        }
        if (!(work[ni - 1] > 0.0))
            throw std::logic_error("solve_dirichlet: singular fiber");
        rhs[ni - 1] /= work[ni - 1];
        for (int j = ni - 2; j >= 0; --j)
            rhs[j] = (rhs[j] - off * rhs[j + 1]) / work[j];

        for (int j = 0; j < ni; ++j) vhat.at(j + 1, k) = rhs[j];

        if (src_norm > 0.0) {
            FiberRow row;
            row.frequency = p;
            row.ratio = column_norm(vhat, k) / src_norm;
            row.bound = 1.0 / (c0 + p * p);
            row.pass = row.ratio <= row.bound * (1.0 + 1e-6);
            if (!row.pass)
                throw std::logic_error("solve_dirichlet: fiber resolvent bound violated");
            out.report.rows.push_back(row);
        }
    }
    out.v = axial_fourier_inverse(vhat);
    // The inverse transform mixes round-off into the wall rows; pin them.
    for (int m = 0; m < na; ++m) {
        out.v.at(0, m) = 0.0;
        out.v.at(nc - 1, m) = 0.0;
    }
    return out;
}

}  // namespace

bool ResolventReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const FiberRow& r) { return r.pass; });
}

GridFunction solve_dirichlet(const GridFunction& phi) {
    return solve_fibered(phi).v;
}

ResolventReport resolvent_bound_report(const GridFunction& phi) {
    ResolventReport rep = solve_fibered(phi).report;
    if (rep.rows.empty())
        throw std::invalid_argument(
            "resolvent_bound_report: field carries no nonzero fiber");
    return rep;
}

TraceReport domain_trace_check(const GridFunction& w, const GridFunction& q,
                               int k, double tolerance) {
    if (k != 1 && k != 2)
        throw std::invalid_argument("domain_trace_check: k must be 1 or 2");
    if (!(tolerance > 0.0))
        throw std::invalid_argument("domain_trace_check: tolerance must be positive");
    require_compatible(w, q);

    TraceReport rep;
    rep.tolerance = tolerance;
    rep.member = true;
    GridFunction layer = w;
    for (int j = 0; j < k; ++j) {
        double trace = 0.0;
        for (Side s : {Side::left, Side::right})
            for (const cplx& z : layer.boundary_row(s))
                trace = std::max(trace, std::abs(z));
        rep.layer_trace.push_back(trace);
        if (trace >= tolerance) rep.member = false;
        if (j + 1 < k) layer = schrodinger_apply(layer, q);
    }
    return rep;
}

}  // namespace wgstab
