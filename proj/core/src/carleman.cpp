#include "wgstab/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wgstab/norms.hpp"
#include "wgstab/operators.hpp"
#include "wgstab/rng.hpp"

namespace wgstab {

namespace {

constexpr cplx kI{0.0, 1.0};

// exp argument past which the weight pair leaves the double range.
constexpr double kExpRange = 600.0;

void require_candidate(const BetaCandidate& beta) {
    if (!beta.value || !beta.grad || !beta.hess)
        throw std::invalid_argument("candidate profile is missing an evaluator");
}

// Row scaling w(i, .) *= fac[i]; zero values stay exactly zero so that an
// infinite factor outside the support cannot create NaNs.
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

double sq(double x) { return x * x; }

double l2_sq(const GridFunction& w) { return sq(l2_norm(w)); }

}  // namespace

BetaCandidate quadratic_candidate(double x0, const CrossSection& omega) {
    if (x0 >= omega.a() && x0 <= omega.b())
        throw std::invalid_argument("profile vertex must lie outside the closed cross-section");
    BetaCandidate beta;
    beta.value = [x0](double x) { return sq(x - x0); };
    beta.grad = [x0](double x) { return 2.0 * (x - x0); };
    beta.hess = [](double) { return 2.0; };
    for (Side side : {Side::left, Side::right}) {
        if ((omega.boundary_point(side) - x0) * omega.normal(side) >= 0.0)
            beta.observed.insert(side);
    }
    return beta;
}

AssumptionReport check_assumption(const BetaCandidate& beta, const CrossSection& omega) {
    require_candidate(beta);
    AssumptionReport rep;

    // (i) gradient bounded away from zero, node-wise.
    double c0 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < omega.n_nodes(); ++i) {
        const double g = std::abs(beta.grad(omega.node(i)));
        if (g < c0) {
            c0 = g;
            rep.gradient.witness = omega.node(i);
        }
    }
    rep.c0 = c0;
    rep.gradient.value = c0;
    rep.gradient.pass = c0 > 0.0;

    // (ii) strictly incoming through every wall that is not observed.
    rep.outflow.pass = true;
    for (Side side : {Side::left, Side::right}) {
        if (beta.observed.count(side)) continue;
        const double xw = omega.boundary_point(side);
        const double dn = omega.normal(side) * beta.grad(xw);
        if (dn >= 0.0) {
            rep.outflow.pass = false;
            rep.outflow.value = dn;
            rep.outflow.witness = xw;
        }
    }

    // (iii) lambda * grad^2 + hess >= eps.  A convex profile certifies its own
    // margin for every lambda >= 0; otherwise aim for eps = 1 and report the
    // lambda threshold that the gradient bound buys.
    double min_hess = std::numeric_limits<double>::infinity();
    for (int i = 0; i < omega.n_nodes(); ++i) {
        const double h = beta.hess(omega.node(i));
        if (h < min_hess) {
            min_hess = h;
            rep.convexity.witness = omega.node(i);
        }
    }
    if (min_hess > 0.0) {
        rep.eps = min_hess;
        rep.lambda1 = 0.0;
        rep.convexity.pass = true;
    } else if (rep.gradient.pass) {
        rep.eps = 1.0;
        double lambda1 = 0.0;
        for (int i = 0; i < omega.n_nodes(); ++i) {
            const double x = omega.node(i);
            const double need = (rep.eps - beta.hess(x)) / sq(beta.grad(x));
            lambda1 = std::max(lambda1, need);
        }
        rep.lambda1 = lambda1;
        rep.convexity.pass = true;
    } else {
        rep.eps = 0.0;
        rep.convexity.pass = false;
    }
    rep.convexity.value = rep.eps;
    return rep;
}

WeightSpec make_weight_spec(const BetaCandidate& beta, const CrossSection& omega,
                            double r, double lambda, double T, double s) {
    require_candidate(beta);
    if (r <= 1.0) throw std::invalid_argument("shift ratio r must exceed 1");
    if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
    if (T <= 0.0) throw std::invalid_argument("time half-width must be positive");
    if (s <= 0.0) throw std::invalid_argument("parameter s must be positive");

    double sup = 0.0;
    for (int i = 0; i < omega.n_nodes(); ++i)
        sup = std::max(sup, std::abs(beta.value(omega.node(i))));

    WeightSpec ws;
    ws.beta = beta;
    ws.r = r;
    ws.K = r * sup;
    ws.lambda = lambda;
    ws.T = T;
    ws.s = s;
    if (2.0 * lambda * ws.K > kExpRange)
        throw std::invalid_argument("lambda * K too large: exp(2 lambda K) = " +
                                    std::to_string(2.0 * lambda * ws.K) +
                                    " in the exponent leaves the double range");
    return ws;
}

namespace {

double time_denominator(const WeightSpec& ws, double t) {
    if (std::abs(t) >= ws.T)
        throw std::domain_error("weights are defined for |t| < T only");
    return (ws.T + t) * (ws.T - t);
}

}  // namespace

double weight_phi(const WeightSpec& ws, double t, double xp) {
    const double den = time_denominator(ws, t);
    return std::exp(ws.lambda * (ws.beta.value(xp) + ws.K)) / den;
}

double weight_eta(const WeightSpec& ws, double t, double xp) {
    const double den = time_denominator(ws, t);
    const double top = std::exp(2.0 * ws.lambda * ws.K) -
                       std::exp(ws.lambda * (ws.beta.value(xp) + ws.K));
    return top / den;
}

WeightSlice weight_slice(const WeightSpec& ws, const CrossSection& omega, double t) {
    const double den = time_denominator(ws, t);
    const double cap = std::exp(2.0 * ws.lambda * ws.K);
    const int n = omega.n_nodes();

    WeightSlice sl;
    sl.t = t;
    sl.phi.resize(n);
    sl.eta.resize(n);
    sl.eta_t.resize(n);
    sl.eta_x.resize(n);
    sl.eta_xx.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = omega.node(i);
        const double gp = ws.beta.grad(x);
        const double exped = std::exp(ws.lambda * (ws.beta.value(x) + ws.K));
        sl.phi[i] = exped / den;
        sl.eta[i] = (cap - exped) / den;
        sl.eta_t[i] = (cap - exped) * 2.0 * t / sq(den);
        sl.eta_x[i] = -ws.lambda * gp * exped / den;
        sl.eta_xx[i] = -ws.lambda * (ws.lambda * sq(gp) + ws.beta.hess(x)) * exped / den;
        if (!(sl.eta[i] > 0.0))
            throw std::logic_error("weight eta lost positivity; K does not dominate beta");
    }
    return sl;
}

StudySample::StudySample(std::uint64_t seed, std::uint64_t index, double T, double margin)
    : T_(T), margin_(margin) {
    if (T <= 0.0) throw std::invalid_argument("time half-width must be positive");
    if (margin <= 0.0 || margin >= 1.0)
        throw std::invalid_argument("time support margin must lie in (0, 1)");
    SplitMix rng = substream(seed, index);
    for (auto& c : poly_)
        c = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    center_ = rng.uniform(-2.0, 2.0);
    width_ = rng.uniform(0.5, 2.0);
}

double StudySample::time_factor(double t) const {
    const double u = t / (margin_ * T_);
    if (std::abs(u) >= 1.0) return 0.0;
    const double p = 1.0 - u * u;
    return p * p * p;
}

GridFunction StudySample::slice(const GridPtr& grid, double t) const {
    GridFunction out(grid);
    const double tau = time_factor(t);
    if (tau == 0.0) return out;

    const CrossSection& cs = grid->cross_section();
    const int nc = cs.n_nodes();
    const int na = grid->n_axial();
    const double width = cs.b() - cs.a();

    std::vector<cplx> prof(nc);
    for (int i = 0; i < nc; ++i) {
        const double u = (cs.node(i) - cs.a()) / width;
        prof[i] = tau * u * (1.0 - u) * (poly_[0] + poly_[1] * u + poly_[2] * u * u);
    }
    std::vector<double> axial(na);
    for (int m = 0; m < na; ++m)
        axial[m] = std::exp(-sq((grid->axial_node(m) - center_) / width_));

    for (int i = 0; i < nc; ++i)
        for (int m = 0; m < na; ++m) out.at(i, m) = prof[i] * axial[m];
    return out;
}

namespace {

// Rolling access to three consecutive time slices and their derived fields.
struct SliceWindow {
    std::vector<GridFunction> w;  // slices m-1, m, m+1

    void push(GridFunction next) {
        if (w.size() == 3) w.erase(w.begin());
        w.push_back(std::move(next));
    }
};

std::vector<double> exp_rows(const WeightSlice& sl, double s, double sign) {
    std::vector<double> fac(sl.eta.size());
    for (std::size_t i = 0; i < fac.size(); ++i) fac[i] = std::exp(sign * s * sl.eta[i]);
    return fac;
}

// i * (w_next - w_prev) / (2 dt) + laplacian w + s^2 eta_x^2 w, evaluated on
// the middle slice of the window.
GridFunction apply_m1(const SliceWindow& win, const WeightSlice& sl, double s, double dt) {
    GridFunction out = laplacian_fd(win.w[1]);
    const int nc = out.grid()->n_cross();
    const int na = out.grid()->n_axial();
    const double inv2dt = 1.0 / (2.0 * dt);
    for (int i = 0; i < nc; ++i) {
        const double fac = sq(s * sl.eta_x[i]);
        for (int m = 0; m < na; ++m) {
            out.at(i, m) += kI * (win.w[2].at(i, m) - win.w[0].at(i, m)) * inv2dt +
                            fac * win.w[1].at(i, m);
        }
    }
    return out;
}

// i s eta_t w + 2 s eta_x d_x' w + s eta_xx w on the middle slice.
GridFunction apply_m2(const SliceWindow& win, const WeightSlice& sl, double s) {
    GridFunction out = d_cross(win.w[1], 1);
    const int nc = out.grid()->n_cross();
    const int na = out.grid()->n_axial();
    for (int i = 0; i < nc; ++i) {
        const double two_sx = 2.0 * s * sl.eta_x[i];
        const cplx st = kI * s * sl.eta_t[i] + s * sl.eta_xx[i];
        for (int m = 0; m < na; ++m) {
            out.at(i, m) *= two_sx;
            out.at(i, m) += st * win.w[1].at(i, m);
        }
    }
    return out;
}

GridFunction free_operator(const SliceWindow& win, double dt) {
    GridFunction out = laplacian_fd(win.w[1]);
    out *= -1.0;
    const int nc = out.grid()->n_cross();
    const int na = out.grid()->n_axial();
    const double inv2dt = 1.0 / (2.0 * dt);
    for (int i = 0; i < nc; ++i)
        for (int m = 0; m < na; ++m)
            out.at(i, m) -= kI * (win.w[2].at(i, m) - win.w[0].at(i, m)) * inv2dt;
    return out;
}

}  // namespace

ConjugationReport conjugation_residual(const SpaceTimeField& w, const WeightSpec& ws,
                                       const GridPtr& grid, int n_time) {
    if (!w) throw std::invalid_argument("space-time field is empty");
    if (!grid) throw std::invalid_argument("grid is null");
    if (n_time < 16) throw std::invalid_argument("need at least 16 time slices");

    const CrossSection& cs = grid->cross_section();
    const double dt = 2.0 * ws.T / n_time;
    const auto slice_time = [&](int m) { return -ws.T + (m + 0.5) * dt; };

    const auto load = [&](int m) {
        GridFunction f = w(slice_time(m));
        if (f.grid() != grid)
            throw std::invalid_argument("field slice lives on a different grid");
        return f;
    };
    {
        // The conjugated field exp(s eta) w blows up at |t| -> T; the check is
        // meaningful only when the field has already vanished there.
        if (load(0).max_abs() != 0.0 || load(n_time - 1).max_abs() != 0.0)
            throw std::invalid_argument(
                "field must vanish on the extreme time slices; shrink its time support");
    }

    SliceWindow win;       // raw field
    SliceWindow conj_win;  // exp(s eta) w, zeros preserved outside the support
    std::vector<WeightSlice> weights(n_time);

    const auto admit = [&](int m) {
        weights[m] = weight_slice(ws, cs, slice_time(m));
        GridFunction f = load(m);
        GridFunction scaled = scaled_rows(f, exp_rows(weights[m], ws.s, +1.0));
        for (const cplx& v : scaled.values()) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::domain_error(
                    "exp(s eta) overflows inside the field support; reduce s or the support");
        }
        win.push(std::move(f));
        conj_win.push(std::move(scaled));
    };

    admit(0);
    admit(1);
    admit(2);

    double res_sq = 0.0;
    double ref_sq = 0.0;
    for (int m = 1; m + 1 < n_time; ++m) {
        const WeightSlice& sl = weights[m];
        // exp(-s eta) L (exp(s eta) w) should equal -(M1 + M2) w.
        GridFunction defect =
            scaled_rows(free_operator(conj_win, dt), exp_rows(sl, ws.s, -1.0));
        GridFunction mw = apply_m1(win, sl, ws.s, dt);
        mw += apply_m2(win, sl, ws.s);
        ref_sq += dt * l2_sq(mw);
        defect += mw;
        res_sq += dt * l2_sq(defect);
        if (m + 2 < n_time) admit(m + 2);
    }

    ConjugationReport rep;
    rep.residual = std::sqrt(res_sq);
    rep.reference = std::sqrt(ref_sq);
    rep.time_slices = n_time - 2;
    return rep;
}

RatioStudy carleman_ratio_study(const WeightSpec& ws, const GridPtr& grid, int n_time,
                                int samples, const std::vector<double>& s_values,
                                std::uint64_t seed) {
    if (!grid) throw std::invalid_argument("grid is null");
    if (n_time < 16) throw std::invalid_argument("need at least 16 time slices");
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    if (s_values.empty()) throw std::invalid_argument("need at least one value of s");
    for (double s : s_values)
        if (s <= 0.0) throw std::invalid_argument("parameter s must be positive");
    if (ws.beta.observed.empty())
        throw std::invalid_argument("candidate observes no wall; the data term is empty");

    const CrossSection& cs = grid->cross_section();
    struct Wall {
        Side side;
        int row;
        double dn_beta;  // dn beta on the observed wall, certified nonnegative
    };
    std::vector<Wall> walls;
    for (Side side : ws.beta.observed) {
        const double dn = cs.normal(side) * ws.beta.grad(cs.boundary_point(side));
        if (dn < 0.0)
            throw std::invalid_argument("observed wall carries dn beta < 0; wrong side");
        walls.push_back({side, cs.boundary_index(side), dn});
    }

    const double dt = 2.0 * ws.T / n_time;
    const double hx = grid->axial_spacing();
    const int ns = int(s_values.size());

    std::vector<WeightSlice> weights(n_time);
    for (int m = 0; m < n_time; ++m)
        weights[m] = weight_slice(ws, cs, -ws.T + (m + 0.5) * dt);

    RatioStudy study;
    study.samples = samples;
    study.rows.resize(ns);
    for (int k = 0; k < ns; ++k) study.rows[k].s = s_values[k];
    std::vector<double> max_ratio(ns, 0.0), sum_ratio(ns, 0.0);

    for (int j = 0; j < samples; ++j) {
        const StudySample sample(seed, std::uint64_t(j), ws.T);
        const auto field = [&](int m) {
            return sample.slice(grid, -ws.T + (m + 0.5) * dt);
        };

        SliceWindow win;
        std::vector<SliceWindow> zwin(ns);  // per-s window of exp(-s eta) w
        const auto admit = [&](int m) {
            GridFunction f = field(m);
            for (int k = 0; k < ns; ++k)
                zwin[k].push(scaled_rows(f, exp_rows(weights[m], s_values[k], -1.0)));
            win.push(std::move(f));
        };
        admit(0);
        admit(1);
        admit(2);

        std::vector<double> lhs(ns, 0.0), rhs(ns, 0.0);
        for (int m = 1; m + 1 < n_time; ++m) {
            const WeightSlice& sl = weights[m];
            const GridFunction dxw = d_cross(win.w[1], 1);
            const GridFunction lw = free_operator(win, dt);
            std::vector<std::vector<cplx>> traces;
            for (const Wall& wall : walls)
                traces.push_back(boundary_normal_derivative(win.w[1], wall.side));

            for (int k = 0; k < ns; ++k) {
                const double s = s_values[k];
                const std::vector<double> damp = exp_rows(sl, s, -1.0);
                lhs[k] += dt * (s * l2_sq(scaled_rows(dxw, damp)) +
                                s * s * s * l2_sq(scaled_rows(win.w[1], damp)) +
                                l2_sq(apply_m1(zwin[k], sl, s, dt)) +
                                l2_sq(apply_m2(zwin[k], sl, s)));

                double boundary = 0.0;
                for (std::size_t widx = 0; widx < walls.size(); ++widx) {
                    const Wall& wall = walls[widx];
                    const double fac =
                        wall.dn_beta * sl.phi[wall.row] * sq(damp[wall.row]);
                    double sum = 0.0;
                    for (const cplx& v : traces[widx]) sum += std::norm(v);
                    boundary += fac * sum * hx;
                }
                rhs[k] += dt * (s * boundary + l2_sq(scaled_rows(lw, damp)));
            }
            if (m + 2 < n_time) admit(m + 2);
        }

        for (int k = 0; k < ns; ++k) {
            const double ratio = lhs[k] / rhs[k];
            if (!std::isfinite(ratio)) study.finite = false;
            max_ratio[k] = std::max(max_ratio[k], ratio);
            sum_ratio[k] += ratio;
        }
    }

    for (int k = 0; k < ns; ++k) {
        study.rows[k].max_ratio = max_ratio[k];
        study.rows[k].mean_ratio = sum_ratio[k] / samples;
    }
    return study;
}

}  // namespace wgstab
