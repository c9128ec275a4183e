#include "wgstab/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "wgstab/norms.hpp"
#include "wgstab/operators.hpp"

namespace wgstab {

namespace {

constexpr cplx kI{0.0, 1.0};

double sq(double x) { return x * x; }

double l2_sq(const GridFunction& w) { return sq(l2_norm(w)); }

GridFunction scaled_rows(const GridFunction& w, const std::vector<double>& fac) {
    GridFunction out = w;
    const int nc = w.grid()->n_cross();
    const int na = w.grid()->n_axial();
    for (int i = 0; i < nc; ++i) {
        const double f = fac[i];
        for (int m = 0; m < na; ++m) {
            cplx& v = out.at(i, m);
            if (v != 0.0) v *= f;
        }
    }
    return out;
}

GridFunction minus_conj(const GridFunction& w) {
    GridFunction out = w;
    for (cplx& v : out.values()) v = cplx(-v.real(), v.imag());
    return out;
}

std::vector<cplx> minus_conj(const std::vector<cplx>& row) {
    std::vector<cplx> out(row.size());
    for (std::size_t k = 0; k < row.size(); ++k)
        out[k] = cplx(-row[k].real(), row[k].imag());
    return out;
}

int snapshot_cadence(const DirectSolution& sol) {
    const auto& steps = sol.kept_steps;
    if (steps.size() < 2 || steps.front() != 0)
        throw std::invalid_argument("linearize: solutions must keep snapshots from step 0");
    const int cadence = steps[1] - steps[0];
    for (std::size_t j = 1; j < steps.size(); ++j)
        if (steps[j] - steps[j - 1] != cadence)
            throw std::invalid_argument("linearize: snapshot cadence is not uniform");
    return cadence;
}

// -Delta + q in the stepper's flavour: centred stencils on the interior rows,
// zero phantom values beyond the truncation caps, wall rows left at zero.
GridFunction scheme_apply(const GridFunction& w, const GridFunction& q) {
    const GridPtr g = w.grid();
    const int nc = g->n_cross();
    const int na = g->n_axial();
    const double ih2c = 1.0 / sq(g->cross_section().spacing());
    const double ih2a = 1.0 / sq(g->axial_spacing());
    GridFunction out(g);
    for (int i = 1; i + 1 < nc; ++i)
        for (int m = 0; m < na; ++m) {
            const cplx c = w.at(i, m);
            cplx lap = ih2c * (w.at(i - 1, m) - 2.0 * c + w.at(i + 1, m));
            lap += ih2a * ((m > 0 ? w.at(i, m - 1) : cplx{}) - 2.0 * c +
                           (m + 1 < na ? w.at(i, m + 1) : cplx{}));
            out.at(i, m) = q.at(i, m).real() * c - lap;
        }
    return out;
}

GridFunction midpoint_average(const std::vector<GridFunction>& series, std::size_t j) {
    GridFunction out = series[j];
    out *= 2.0;
    out += series[j - 1];
    out += series[j + 1];
    out *= 0.25;
    return out;
}

}  // namespace

LinearizedSystem linearize(const DirectSolution& s1, const DirectSolution& s2,
                           const GridFunction& q1, const GridFunction& q2,
                           const AdmissiblePair& pair) {
    if (s1.grid != s2.grid)
        throw std::invalid_argument("linearize: solutions live on different grids");
    if (q1.grid() != s1.grid || q2.grid() != s1.grid || pair.u0.grid() != s1.grid)
        throw std::invalid_argument("linearize: potentials and pair must share the grid");
    if (s1.kept_steps != s2.kept_steps)
        throw std::invalid_argument("linearize: snapshot schedules differ");
    if (s1.times.size() < 2)
        throw std::invalid_argument("linearize: solution carries no time series");

    LinearizedSystem lin;
    lin.grid = s1.grid;
    lin.dt = s1.times[1] - s1.times[0];
    lin.keep_every = snapshot_cadence(s1);
    lin.kept_steps = s1.kept_steps;

    lin.rho = q1;
    lin.rho -= q2;
    lin.u0 = pair.u0;

    lin.u.reserve(s1.kept_u.size());
    for (std::size_t j = 0; j < s1.kept_u.size(); ++j) {
        GridFunction d = s1.kept_u[j];
        d -= s2.kept_u[j];
        lin.u.push_back(std::move(d));
    }
    lin.v.reserve(s1.kept_uprime.size());
    for (std::size_t j = 0; j < s1.kept_uprime.size(); ++j) {
        GridFunction d = s1.kept_uprime[j];
        d -= s2.kept_uprime[j];
        lin.v.push_back(std::move(d));
    }
    lin.u2 = s2.kept_u;
    lin.u2_prime = s2.kept_uprime;

    for (const auto& [side, series] : s1.neumann_uprime) {
        const auto it = s2.neumann_uprime.find(side);
        if (it == s2.neumann_uprime.end() || it->second.size() != series.size())
            throw std::invalid_argument("linearize: observation records differ");
        TraceSeries diff(series.size());
        for (std::size_t m = 0; m < series.size(); ++m) {
            diff[m].resize(series[m].size());
            for (std::size_t k = 0; k < series[m].size(); ++k)
                diff[m][k] = series[m][k] - it->second[m][k];
        }
        lin.trace_v.emplace(side, std::move(diff));
    }

    lin.v0 = lin.v.front();
    GridFunction ru = lin.rho;
    ru.multiply_pointwise(lin.u0);
    const double scale = l2_norm(ru);
    GridFunction defect = ru;
    defect *= kI;
    defect += lin.v0;
    const double num = l2_norm(defect);
    lin.v0_defect = scale > 0.0 ? num / scale : num;
    return lin;
}

double difference_residual(const LinearizedSystem& lin, const GridFunction& q1) {
    if (lin.u.size() < 3)
        throw std::invalid_argument("difference_residual: need at least three snapshots");
    if (q1.grid() != lin.grid)
        throw std::invalid_argument("difference_residual: potential on a foreign grid");
    if (lin.keep_every != 1)
        throw std::invalid_argument(
            "difference_residual: snapshots must sit at every solver step");
    for (const cplx& z : q1.values())
        if (z.imag() != 0.0)
            throw std::invalid_argument("difference_residual: potential must be real");

    const double inv2dt = 1.0 / (2.0 * lin.dt);
    const int nc = lin.grid->n_cross();
    const int na = lin.grid->n_axial();

    double acc = 0.0;
    for (std::size_t j = 1; j + 1 < lin.u.size(); ++j) {
        GridFunction r = scheme_apply(midpoint_average(lin.u, j), q1);
        GridFunction forcing = midpoint_average(lin.u2, j);
        forcing.multiply_pointwise(lin.rho);
        r += forcing;
        // wall rows of the kept difference are exact zeros, so restricting
        // the time term to the interior rows drops nothing
        for (int i = 1; i + 1 < nc; ++i)
            for (int m = 0; m < na; ++m)
                r.at(i, m) -= kI * (lin.u[j + 1].at(i, m) - lin.u[j - 1].at(i, m)) * inv2dt;
        acc += lin.dt * l2_sq(r);
    }
    return std::sqrt(acc);
}

SymmetrizedSystem symmetrize(const LinearizedSystem& lin) {
    if (lin.v.empty() || lin.u2_prime.size() != lin.v.size())
        throw std::invalid_argument("symmetrize: incomplete snapshot series");

    const int n_half = int(lin.v.size()) - 1;
    SymmetrizedSystem sym;
    sym.grid = lin.grid;
    sym.field_dt = lin.keep_every * lin.dt;
    sym.trace_dt = lin.dt;

    sym.v.resize(2 * n_half + 1, GridFunction(lin.grid));
    sym.u2_prime.resize(2 * n_half + 1, GridFunction(lin.grid));
    sym.times.resize(2 * n_half + 1);
    for (int j = 0; j <= n_half; ++j) {
        sym.times[n_half + j] = j * sym.field_dt;
        sym.times[n_half - j] = -j * sym.field_dt;
        sym.v[n_half + j] = lin.v[j];
        sym.v[n_half - j] = minus_conj(lin.v[j]);
        sym.u2_prime[n_half + j] = lin.u2_prime[j];
        sym.u2_prime[n_half - j] = minus_conj(lin.u2_prime[j]);
    }

    for (const auto& [side, series] : lin.trace_v) {
        const int nt = int(series.size()) - 1;
        TraceSeries ext(2 * nt + 1);
        for (int m = 0; m <= nt; ++m) {
            ext[nt + m] = series[m];
            ext[nt - m] = minus_conj(series[m]);
        }
        sym.trace_v.emplace(side, std::move(ext));
    }
    return sym;
}

LemmaReport lemma_inv_check(const LinearizedSystem& lin, const WeightSpec& ws,
                            const std::vector<double>& s_values) {
    if (s_values.empty())
        throw std::invalid_argument("lemma_inv_check: need at least one value of s");
    for (double s : s_values)
        if (s <= 0.0) throw std::invalid_argument("lemma_inv_check: s must be positive");
    if (ws.beta.observed.empty())
        throw std::invalid_argument("lemma_inv_check: weight observes no wall");
    if (std::abs(ws.T - lin.grid->time_horizon()) > 1e-12 * ws.T)
        throw std::invalid_argument(
            "lemma_inv_check: weight half-width must match the run horizon");
    for (Side side : ws.beta.observed)
        if (!lin.trace_v.count(side))
            throw std::invalid_argument("lemma_inv_check: no trace on an observed wall");

    const CrossSection& cs = lin.grid->cross_section();
    const std::vector<double> eta0 = weight_slice(ws, cs, 0.0).eta;
    const double hx = lin.grid->axial_spacing();

    const SymmetrizedSystem sym = symmetrize(lin);
    std::vector<GridFunction> interior;  // rho u2' on the extended slices
    interior.reserve(sym.u2_prime.size());
    for (const GridFunction& up : sym.u2_prime) {
        GridFunction f = up;
        f.multiply_pointwise(lin.rho);
        interior.push_back(std::move(f));
    }
    GridFunction ru = lin.rho;
    ru.multiply_pointwise(lin.u0);

    LemmaReport rep;
    for (double s : s_values) {
        std::vector<double> damp(eta0.size());
        for (std::size_t i = 0; i < eta0.size(); ++i) damp[i] = std::exp(-s * eta0[i]);

        LemmaRow row;
        row.s = s;
        row.lhs = l2_sq(scaled_rows(ru, damp));

        double q_norm = 0.0;
        for (std::size_t j = 0; j < interior.size(); ++j) {
            const double wt = (j == 0 || j + 1 == interior.size()) ? 0.5 : 1.0;
            q_norm += wt * sym.field_dt * l2_sq(scaled_rows(interior[j], damp));
        }
        row.rhs_interior = std::pow(s, -1.5) * q_norm;

        double b_norm = 0.0;
        for (Side side : ws.beta.observed) {
            const int wall = cs.boundary_index(side);
            const double fac = sq(damp[wall]);
            const double nrm = trace_series_norm(sym.trace_v.at(side), sym.trace_dt, hx);
            b_norm += fac * sq(nrm);
        }
        row.rhs_boundary = std::pow(s, -0.5) * b_norm;

        row.ratio = row.lhs == 0.0 ? 0.0 : row.lhs / (row.rhs_interior + row.rhs_boundary);
        if (!std::isfinite(row.ratio)) rep.finite = false;
        rep.rows.push_back(row);
    }
    return rep;
}

double StabilityParams::mu_delta() const { return std::exp(-(2.0 * b - delta)); }

StabilityParams make_stability_params(const PerturbationParams& pp, double upsilon0,
                                      double delta) {
    validate(pp);
    if (upsilon0 <= 0.0)
        throw std::invalid_argument("stability params: the profile floor must be positive");
    if (delta <= 0.0 || delta >= pp.b)
        throw std::invalid_argument("stability params: delta must lie in (0, b)");
    StabilityParams sp;
    sp.a = pp.a;
    sp.b = pp.b;
    sp.d_eps = pp.d_eps;
    sp.eps = pp.epsilon;
    sp.floor = upsilon0;
    sp.delta = delta;
    return sp;
}

Recipe parameter_recipe(double mu, const StabilityParams& sp, double c_fit) {
    if (mu <= 0.0) throw std::invalid_argument("parameter recipe: mu must be positive");
    if (c_fit <= 0.0)
        throw std::invalid_argument("parameter recipe: the constant must be positive");
    if (sp.delta <= 0.0 || sp.delta >= sp.b || sp.floor <= 0.0 || sp.d_eps <= 0.0)
        throw std::invalid_argument("parameter recipe: invalid stability params");

    Recipe r;
    const double mu_delta = sp.mu_delta();
    if (mu > mu_delta) {
        r.large_data = true;
        return r;
    }
    if (mu == mu_delta) {
        r.y = 0.0;  // -ln mu / (2b - delta) == 1 analytically; keep it exact
    } else {
        const double inner = std::pow(-std::log(mu) / (2.0 * sp.b - sp.delta), 2.0 / sp.d_eps);
        r.y = std::sqrt(std::max(0.0, inner - 1.0));
    }
    r.s = std::pow(sq(sp.floor) / (2.0 * c_fit), -2.0 / 3.0) *
          std::pow(1.0 + sq(r.y), (1.0 + sp.eps) / 3.0);
    return r;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

StabilityReport stability_sweep(const AdmissiblePair& pair, const PerturbationParams& pp,
                                const StabilityParams& sp, const SweepOptions& opts) {
    std::vector<double> amps;
    for (double a : opts.amplitudes) {
        if (a < 0.0)
            throw std::invalid_argument("stability sweep: negative amplitude");
        if (a > 0.0) amps.push_back(a);  // zero rows are trivially excluded
    }
    if (amps.empty())
        throw std::invalid_argument("stability sweep: no usable amplitudes");
    std::sort(amps.begin(), amps.end());
    if (amps.back() / amps.front() < 999.0)
        throw std::invalid_argument("stability sweep: amplitudes must span three decades");

    const GridPtr grid = pair.q0.grid();
    if (grid->cross_section().gamma_star().empty())
        throw std::invalid_argument("stability sweep: the grid observes no wall");
    const double dt = grid->time_horizon() / grid->n_time();
    const double hx = grid->axial_spacing();

    DirectOptions dopts;
    dopts.path = opts.path;

    // One reference solve shared by every row unless both sides move.
    std::shared_ptr<const DirectSolution> reference;
    if (!opts.two_sided) {
        reference = std::make_shared<DirectSolution>(solve_direct(pair, pair.q0, dopts));
    }

    std::vector<StabilityRow> rows(amps.size());
    const auto run_row = [&](std::size_t idx) {
        const double amp = amps[idx];
        const GridFunction bump = make_perturbation(pp, grid, amp);
        GridFunction q1 = pair.q0;
        q1 += bump;
        if (!check_decay_class(q1, pair.q0, pp).pass)
            throw std::invalid_argument("stability sweep: amplitude leaves the decay class");

        const DirectSolution s1 = solve_direct(pair, q1, dopts);
        std::shared_ptr<const DirectSolution> s2 = reference;
        GridFunction q2 = pair.q0;
        if (opts.two_sided) {
            q2 -= bump;
            if (!check_decay_class(q2, pair.q0, pp).pass)
                throw std::invalid_argument("stability sweep: amplitude leaves the decay class");
            s2 = std::make_shared<DirectSolution>(solve_direct(pair, q2, dopts));
        }

        GridFunction rho = q1;
        rho -= q2;

        StabilityRow row;
        row.amplitude = amp;
        row.rho_norm = l2_norm(rho);
        double mu = 0.0;
        for (const auto& [side, series] : s1.neumann_uprime) {
            const TraceSeries& other = s2->neumann_uprime.at(side);
            TraceSeries diff(series.size());
            for (std::size_t m = 0; m < series.size(); ++m) {
                diff[m].resize(series[m].size());
                for (std::size_t k = 0; k < series[m].size(); ++k)
                    diff[m][k] = series[m][k] - other[m][k];
            }
            mu += sq(trace_series_norm(diff, dt, hx));
        }
        row.mu = mu;
        row.data_norm = std::sqrt(mu);
        if (mu > 0.0) {
            const Recipe rec = parameter_recipe(mu, sp, opts.recipe_constant);
            row.large_data = rec.large_data;
            row.y = rec.y;
            row.s = rec.s;
        }
        rows[idx] = std::move(row);
    };

    const int workers = std::max(1, std::min<int>(opts.threads, int(rows.size())));
    if (workers == 1) {
        for (std::size_t idx = 0; idx < rows.size(); ++idx) run_row(idx);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t idx = w; idx < rows.size(); idx += workers)
                        run_row(idx);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
    }

    StabilityReport report;
    report.rows = std::move(rows);
    report.theta = sp.theta();
    report.mu_delta = sp.mu_delta();

    double c_fit = 0.0;
    bool c_ok = true;
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
        const StabilityRow& row = report.rows[k];
        if (row.data_norm > 0.0) {
            c_fit = std::max(c_fit, row.rho_norm / std::pow(row.data_norm, report.theta));
        } else if (row.rho_norm > 0.0) {
            c_ok = false;  // nonzero difference invisible in the data
        }
        if (k > 0 && row.mu <= report.rows[k - 1].mu) report.mu_monotone = false;
    }
    report.c_fit = c_fit;

    const double lo = std::log10(report.rows.front().amplitude);
    const double hi = std::log10(report.rows.back().amplitude);
    const double mid = 0.5 * (lo + hi);
    std::vector<double> lx, ly;
    for (const StabilityRow& row : report.rows) {
        if (row.mu >= report.mu_delta) continue;  // large-data branch
        if (std::abs(std::log10(row.amplitude) - mid) > 0.5 + 1e-12) continue;
        if (row.data_norm <= 0.0 || row.rho_norm <= 0.0) continue;
        lx.push_back(std::log(row.data_norm));
        ly.push_back(std::log(row.rho_norm));
    }
    report.fit_rows = int(lx.size());
    report.slope = report.fit_rows >= 2 ? fit_slope(lx, ly) : 0.0;
    report.pass = c_ok && std::isfinite(report.c_fit) && report.c_fit > 0.0 &&
                  report.fit_rows >= 2 && report.slope >= report.theta;
    return report;
}

}  // namespace wgstab
