#include "wgstab/harness.hpp"

#include "wgstab/admissible.hpp"
#include "wgstab/carleman.hpp"
#include "wgstab/elliptic.hpp"
#include "wgstab/inverse.hpp"
#include "wgstab/norms.hpp"
#include "wgstab/rng.hpp"
#include "wgstab/schrodinger.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wgstab {

namespace {

namespace fs = std::filesystem;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Bookkeeping shared by every subcommand: the output directory, the manifest
/// rows accumulated so far, the files produced, and a stage label.  A throw
/// during "configuration" is a rejected config (status 2); anything later is
/// a numeric failure (status 3).
struct RunContext {
    const RunConfig& cfg;
    fs::path dir;
    std::string stage = "configuration";
    std::vector<std::pair<std::string, std::string>> notes;
    std::vector<std::string> artifacts;

    void note(const std::string& key, const std::string& value) {
        notes.emplace_back(key, value);
    }
    void note(const std::string& key, const char* value) {
        note(key, std::string(value));
    }
    void note(const std::string& key, double value) { note(key, g17(value)); }
    void note(const std::string& key, int value) { note(key, std::to_string(value)); }
    void note(const std::string& key, bool value) {
        note(key, value ? std::string("yes") : std::string("no"));
    }

    std::ofstream csv(const std::string& name, const std::string& header) {
        std::ofstream out(dir / name);
        if (!out) throw std::runtime_error("cannot open " + name + " for writing");
        out << header << "\n";
        artifacts.push_back(name);
        return out;
    }
};

// Smooth space-time probe for the conjugation study: wall-vanishing in x',
// Gaussian along the axis, compactly supported in |t| < 0.9.
SpaceTimeField probe_field(const GridPtr& g) {
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

double front_amplitude(const RunConfig& cfg) {
    if (cfg.amplitudes.empty())
        throw std::invalid_argument("perturbation.amplitudes must not be empty");
    return cfg.amplitudes.front();
}

void run_factory(RunContext& ctx) {
    const GridPtr grid = CylinderGrid::create(ctx.cfg.grid);
    const AdmissiblePair pair = build_pair(ctx.cfg.factory, grid);

    ctx.stage = "report";
    const int mid = grid->n_cross() / 2;
    const double power = 0.5 * (1.0 + pair.epsilon());
    auto out = ctx.csv("factory_profile.csv", "axial,u0,q0,floor_envelope");
    for (int m = 0; m < grid->n_axial(); ++m) {
        const double y = grid->axial_node(m);
        const double env = pair.upsilon0 * std::pow(1.0 + y * y, -0.5 * power);
        out << g17(y) << "," << g17(pair.u0.at(mid, m).real()) << ","
            << g17(pair.q0.at(mid, m).real()) << "," << g17(env) << "\n";
    }

    ctx.note("epsilon", pair.epsilon());
    ctx.note("upsilon0", pair.upsilon0);
    ctx.note("collar_width", pair.collar_width);
    ctx.note("transition_width", pair.transition_width);
    ctx.note("x_independent", pair.x_independent);
    ctx.note("sup_stationary_residual", sup_norm(pair.stationary_residual));
}

void run_direct(RunContext& ctx) {
    const GridPtr grid = CylinderGrid::create(ctx.cfg.grid);
    const AdmissiblePair pair = build_pair(ctx.cfg.factory, grid);
    GridFunction q = pair.q0;
    double amplitude = 0.0;
    if (!ctx.cfg.amplitudes.empty()) {
        amplitude = ctx.cfg.amplitudes.front();
        q += make_perturbation(ctx.cfg.perturbation, grid, amplitude);
    }

    ctx.stage = "solve";
    DirectOptions opts;
    opts.keep_every = ctx.cfg.keep_every;
    opts.diagnostics_every = std::max(1, grid->n_time() / 8);
    const DirectSolution sol = solve_direct(pair, q, opts);

    ctx.stage = "report";
    const double ref = l2_norm(pair.u0);
    const double dt = grid->time_step();
    double max_deviation = 0.0;
    auto out = ctx.csv("direct_diagnostics.csv", "step,time,deviation,uprime_l2");
    auto emit = [&](int step, const GridFunction& u, const GridFunction& up) {
        const double dev = l2_norm(u - pair.u0) / ref;
        max_deviation = std::max(max_deviation, dev);
        out << step << "," << g17(step * dt) << "," << g17(dev) << ","
            << g17(l2_norm(up)) << "\n";
    };
    if (sol.kept_steps.empty()) {
        emit(grid->n_time(), sol.final_u, sol.final_uprime);
    } else {
        for (std::size_t k = 0; k < sol.kept_steps.size(); ++k)
            emit(sol.kept_steps[k], sol.kept_u[k], sol.kept_uprime[k]);
    }

    ctx.note("amplitude", amplitude);
    ctx.note("max_deviation", max_deviation);
    ctx.note("sup_u", sol.sup_u);
    ctx.note("sup_uprime", sol.sup_uprime);
    ctx.note("regularity_ratio", sol.regularity_ratio);
    ctx.note("kept_snapshots", int(sol.kept_steps.size()));
}

void run_elliptic(RunContext& ctx) {
    const CylinderGrid::Spec base = ctx.cfg.grid;
    constexpr int kLevels = 3;

    ctx.stage = "solve";
    double error[kLevels] = {};
    int ncs[kLevels] = {}, nas[kLevels] = {};
    GridPtr full;
    for (int l = 0; l < kLevels; ++l) {
        // the ladder ascends from the configured size, so no level collapses
        // onto its neighbour on deliberately small configurations
        CylinderGrid::Spec spec = base;
        spec.n_cross = base.n_cross << l;
        spec.n_axial = base.n_axial << l;
        const GridPtr g = CylinderGrid::create(spec);
        const double a = g->cross_section().a();
        const double width = g->cross_section().b() - a;
        const double kx = M_PI / width;
        auto exact = GridFunction::sample(g, [&](double xp, double xn) {
            return cplx(std::sin(kx * (xp - a)) * std::exp(-xn * xn), 0.0);
        });
        auto source = GridFunction::sample(g, [&](double xp, double xn) {
            const double v = std::sin(kx * (xp - a)) * std::exp(-xn * xn);
            return cplx((kx * kx + 2.0 - 4.0 * xn * xn) * v, 0.0);
        });
        error[l] = l2_norm(solve_dirichlet(source) - exact);
        ncs[l] = spec.n_cross;
        nas[l] = spec.n_axial;
        if (l == 0) full = g;
    }

    constexpr int kSamples = 20;
    double c0 = 0.0;
    bool all_pass = true;
    double margin[kSamples] = {};
    int fibers[kSamples] = {};
    for (int k = 0; k < kSamples; ++k) {
        SplitMix mix = substream(ctx.cfg.seed, std::uint64_t(k));
        GridFunction phi(full);
        for (cplx& z : phi.values())
            z = cplx(mix.uniform(-1.0, 1.0), mix.uniform(-1.0, 1.0));
        const ResolventReport rep = resolvent_bound_report(phi);
        c0 = rep.c0;
        all_pass = all_pass && rep.all_pass();
        for (const FiberRow& row : rep.rows)
            margin[k] = std::max(margin[k], row.ratio / row.bound);
        fibers[k] = int(rep.rows.size());
    }

    ctx.stage = "report";
    auto conv = ctx.csv("elliptic_convergence.csv", "level,n_cross,n_axial,error,order");
    for (int l = 0; l < kLevels; ++l) {
        const double order = l ? std::log2(error[l - 1] / error[l]) : 0.0;
        conv << l << "," << ncs[l] << "," << nas[l] << "," << g17(error[l]) << ","
             << g17(order) << "\n";
        if (l) ctx.note("order_" + std::to_string(l), order);
    }
    auto res = ctx.csv("elliptic_resolvent.csv", "sample,c0,worst_ratio_over_bound,fibers");
    for (int k = 0; k < kSamples; ++k)
        res << k << "," << g17(c0) << "," << g17(margin[k]) << "," << fibers[k] << "\n";

    ctx.note("c0", c0);
    ctx.note("resolvent_samples", kSamples);
    ctx.note("resolvent_pass", all_pass);
    if (!all_pass) {
        ctx.stage = "resolvent bound";
        throw std::runtime_error("a fiber exceeded its spectral bound");
    }
}

void run_carleman(RunContext& ctx) {
    const GridPtr grid = CylinderGrid::create(ctx.cfg.grid);
    const CrossSection& cs = grid->cross_section();
    BetaCandidate beta = quadratic_candidate(ctx.cfg.carleman_x0, cs);
    // the candidate names its natural outflow wall; the configuration names
    // the instrumented ones, and those are what the sign rule must certify
    beta.observed = cs.gamma_star();

    ctx.stage = "assumption check";
    const AssumptionReport rep = check_assumption(beta, cs);
    {
        auto out = ctx.csv("carleman_assumptions.csv", "condition,value,witness,pass");
        auto row = [&](const char* name, const ConditionCheck& c) {
            out << name << "," << g17(c.value) << "," << g17(c.witness) << ","
                << (c.pass ? "yes" : "no") << "\n";
        };
        row("gradient", rep.gradient);
        row("outflow", rep.outflow);
        row("convexity", rep.convexity);
    }
    ctx.note("c0", rep.c0);
    ctx.note("eps", rep.eps);
    ctx.note("lambda1", rep.lambda1);
    if (!rep.pass())
        throw std::runtime_error("candidate violates an observability assumption");

    ctx.stage = "solve";
    const double s_front = ctx.cfg.s_values.empty() ? 2.0 : ctx.cfg.s_values.front();
    constexpr int kLevels = 3;
    double relative[kLevels] = {};
    int ncs[kLevels] = {}, nas[kLevels] = {}, nts[kLevels] = {};
    for (int l = 0; l < kLevels; ++l) {
        CylinderGrid::Spec spec = ctx.cfg.grid;
        spec.n_cross = std::max(12, ctx.cfg.grid.n_cross >> 2) << l;
        spec.n_axial = std::max(32, ctx.cfg.grid.n_axial >> 3) << l;
        spec.n_time = std::max(16, ctx.cfg.grid.n_time >> 3) << l;
        const GridPtr g = CylinderGrid::create(spec);
        const WeightSpec ws = make_weight_spec(beta, g->cross_section(), ctx.cfg.carleman_r,
                                               ctx.cfg.carleman_lambda, 1.0, s_front);
        const ConjugationReport cr =
            conjugation_residual(probe_field(g), ws, g, spec.n_time);
        relative[l] = cr.residual / cr.reference;
        ncs[l] = spec.n_cross;
        nas[l] = spec.n_axial;
        nts[l] = spec.n_time;
    }

    const WeightSpec ws = make_weight_spec(beta, cs, ctx.cfg.carleman_r,
                                           ctx.cfg.carleman_lambda,
                                           grid->time_horizon(), s_front);
    const RatioStudy study =
        carleman_ratio_study(ws, grid, ctx.cfg.study_slices, ctx.cfg.ratio_samples,
                             ctx.cfg.s_values, ctx.cfg.seed);

    ctx.stage = "report";
    auto conj = ctx.csv("carleman_conjugation.csv",
                        "level,n_cross,n_axial,n_time,relative_residual,factor");
    for (int l = 0; l < kLevels; ++l) {
        const double factor = l ? relative[l - 1] / relative[l] : 0.0;
        conj << l << "," << ncs[l] << "," << nas[l] << "," << nts[l] << ","
             << g17(relative[l]) << "," << g17(factor) << "\n";
    }
    auto ratio = ctx.csv("carleman_ratio.csv", "s,max_ratio,mean_ratio");
    for (const RatioRow& row : study.rows)
        ratio << g17(row.s) << "," << g17(row.max_ratio) << "," << g17(row.mean_ratio)
              << "\n";
    ctx.note("ratio_samples", study.samples);
    ctx.note("ratio_finite", study.finite);
    if (!study.rows.empty()) {
        ctx.note("max_ratio_first", study.rows.front().max_ratio);
        ctx.note("max_ratio_last", study.rows.back().max_ratio);
    }
    if (!study.finite) {
        ctx.stage = "ratio study";
        throw std::runtime_error("weighted ratios are not finite");
    }
}

void run_lemma_inv(RunContext& ctx) {
    const GridPtr grid = CylinderGrid::create(ctx.cfg.grid);
    const AdmissiblePair pair = build_pair(ctx.cfg.factory, grid);
    const double amplitude = front_amplitude(ctx.cfg);
    const GridFunction rho = make_perturbation(ctx.cfg.perturbation, grid, amplitude);
    const GridFunction q1 = pair.q0 + rho;
    BetaCandidate beta =
        quadratic_candidate(ctx.cfg.carleman_x0, grid->cross_section());
    beta.observed = grid->cross_section().gamma_star();
    const double s_front = ctx.cfg.s_values.empty() ? 2.0 : ctx.cfg.s_values.front();
    const WeightSpec ws = make_weight_spec(beta, grid->cross_section(), ctx.cfg.carleman_r,
                                           ctx.cfg.carleman_lambda,
                                           grid->time_horizon(), s_front);

    ctx.stage = "solve";
    DirectOptions opts;
    opts.keep_every = std::max(1, ctx.cfg.keep_every);
    const DirectSolution s1 = solve_direct(pair, q1, opts);
    const DirectSolution s2 = solve_direct(pair, pair.q0, opts);
    const LinearizedSystem lin = linearize(s1, s2, q1, pair.q0, pair);
    const LemmaReport report = lemma_inv_check(lin, ws, ctx.cfg.s_values);

    ctx.stage = "report";
    auto out = ctx.csv("lemma_table.csv", "s,lhs,rhs_interior,rhs_boundary,ratio");
    for (const LemmaRow& row : report.rows)
        out << g17(row.s) << "," << g17(row.lhs) << "," << g17(row.rhs_interior) << ","
            << g17(row.rhs_boundary) << "," << g17(row.ratio) << "\n";
    ctx.note("amplitude", amplitude);
    ctx.note("v0_defect", lin.v0_defect);
    ctx.note("finite", report.finite);
    if (!report.rows.empty()) {
        ctx.note("ratio_first", report.rows.front().ratio);
        ctx.note("ratio_last", report.rows.back().ratio);
    }
    if (!report.finite) {
        ctx.stage = "lemma check";
        throw std::runtime_error("weighted lemma ratios are not finite");
    }
}

void run_stability(RunContext& ctx) {
    const GridPtr grid = CylinderGrid::create(ctx.cfg.grid);
    const AdmissiblePair pair = build_pair(ctx.cfg.factory, grid);
    if (ctx.cfg.amplitudes.empty())
        throw std::invalid_argument("perturbation.amplitudes must not be empty");
    // mirror the sweep's span precondition here, where a violation still
    // counts as a rejected configuration rather than a numeric failure
    const auto [lo, hi] =
        std::minmax_element(ctx.cfg.amplitudes.begin(), ctx.cfg.amplitudes.end());
    if (*lo <= 0.0 || *hi / *lo < 999.0)
        throw std::invalid_argument(
            "perturbation.amplitudes must be positive and span three decades");
    const StabilityParams sp =
        make_stability_params(ctx.cfg.perturbation, pair.upsilon0, ctx.cfg.delta);
    SweepOptions opts;
    opts.amplitudes = ctx.cfg.amplitudes;
    opts.two_sided = ctx.cfg.two_sided;
    opts.recipe_constant = ctx.cfg.recipe_constant;
    opts.threads = ctx.cfg.threads;

    ctx.stage = "solve";
    const StabilityReport rep = stability_sweep(pair, ctx.cfg.perturbation, sp, opts);

    ctx.stage = "report";
    auto out = ctx.csv("stability_rows.csv",
                       "amplitude,rho_norm,data_norm,mu,y,s,large_data,"
                       "log10_data,log10_rho");
    for (const StabilityRow& row : rep.rows)
        out << g17(row.amplitude) << "," << g17(row.rho_norm) << ","
            << g17(row.data_norm) << "," << g17(row.mu) << "," << g17(row.y) << ","
            << g17(row.s) << "," << (row.large_data ? "yes" : "no") << ","
            << g17(std::log10(row.data_norm)) << "," << g17(std::log10(row.rho_norm))
            << "\n";
    ctx.note("a", sp.a);
    ctx.note("b", sp.b);
    ctx.note("d_eps", sp.d_eps);
    ctx.note("eps", sp.eps);
    ctx.note("delta", sp.delta);
    ctx.note("theta", rep.theta);
    ctx.note("mu_delta", rep.mu_delta);
    ctx.note("c_fit", rep.c_fit);
    ctx.note("slope", rep.slope);
    ctx.note("fit_rows", rep.fit_rows);
    ctx.note("mu_monotone", rep.mu_monotone);
    ctx.note("pass", rep.pass);
    if (!rep.pass) {
        ctx.stage = "stability check";
        throw std::runtime_error("one-constant Hoelder bound failed on the sweep");
    }
}

using CommandFn = void (*)(RunContext&);

CommandFn lookup(const std::string& name) {
    if (name == "factory") return run_factory;
    if (name == "direct") return run_direct;
    if (name == "elliptic") return run_elliptic;
    if (name == "carleman") return run_carleman;
    if (name == "lemma-inv") return run_lemma_inv;
    if (name == "stability") return run_stability;
    return nullptr;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {
        "direct", "elliptic", "carleman", "lemma-inv", "stability", "factory",
    };
    return names;
}

RunResult run_subcommand(const std::string& name, const RunConfig& cfg) {
    RunResult result;
    const CommandFn fn = lookup(name);
    if (!fn) {
        result.status = 2;
        result.failure = "unknown subcommand '" + name + "'";
        return result;
    }

    RunContext ctx{cfg};
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) {
        result.status = 2;
        result.failure = "cannot create output directory " + cfg.out_dir;
        return result;
    }
    ctx.dir = cfg.out_dir;

    const auto t0 = std::chrono::steady_clock::now();
    try {
        fn(ctx);
        result.status = 0;
    } catch (const std::exception& e) {
        result.status = ctx.stage == "configuration" ? 2 : 3;
        result.failure = ctx.stage + ": " + e.what();
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream mf(ctx.dir / "run_manifest.txt");
    if (mf) {
        mf << "tool = wgstab " << kVersion << "\n";
        mf << "subcommand = " << name << "\n";
        mf << "config_hash = " << hex64(config_hash(cfg)) << "\n";
        mf << "seed = " << cfg.seed << "\n";
        mf << "threads = " << cfg.threads << "\n";
        for (const auto& [key, value] : ctx.notes) mf << key << " = " << value << "\n";
        mf << "status = " << (result.status == 0 ? "ok" : "failed") << "\n";
        if (!result.failure.empty()) mf << "failure = " << result.failure << "\n";
        char wbuf[32];
        std::snprintf(wbuf, sizeof wbuf, "%.3f", wall);
        mf << "wall_seconds = " << wbuf << "\n";
        result.artifacts.push_back("run_manifest.txt");
    }
    for (const std::string& a : ctx.artifacts) result.artifacts.push_back(a);
    return result;
}

}  // namespace wgstab
