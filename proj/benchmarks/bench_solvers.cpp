#include <benchmark/benchmark.h>

#include "wgstab/admissible.hpp"
#include "wgstab/carleman.hpp"
#include "wgstab/elliptic.hpp"
#include "wgstab/fourier.hpp"
#include "wgstab/grid.hpp"
#include "wgstab/schrodinger.hpp"

#include <cmath>

using namespace wgstab;

namespace {

GridPtr bench_grid(int n_cross, int n_axial) {
    CylinderGrid::Spec spec;
    spec.n_cross = n_cross;
    spec.n_axial = n_axial;
    spec.n_time = 16;
    spec.gamma_star = {Side::right};
    return CylinderGrid::create(spec);
}

GridFunction smooth_state(const GridPtr& g) {
    return GridFunction::sample(g, [](double x, double y) {
        return cplx(std::sin(M_PI * x) * std::exp(-y * y),
                    0.2 * std::sin(2.0 * M_PI * x) * std::exp(-0.5 * y * y));
    });
}

}  // namespace

static void BM_AxialFft(benchmark::State& state) {
    const GridPtr g = bench_grid(64, int(state.range(0)));
    GridFunction w = smooth_state(g);
    for (auto _ : state) {
        GridFunction what = axial_fourier(w);
        benchmark::DoNotOptimize(what.values().data());
    }
    state.SetItemsProcessed(state.iterations() * g->n_nodes());
}
BENCHMARK(BM_AxialFft)->Arg(256)->Arg(512)->Arg(1024);

static void BM_CrankNicolsonStepFibered(benchmark::State& state) {
    const GridPtr g = bench_grid(int(state.range(0)), 512);
    const AdmissiblePair pair = build_pair({}, g);
    CrankNicolsonStepper stepper(g, pair.q0, g->time_step(), StepperPath::fibered);
    GridFunction v = smooth_state(g);
    for (auto _ : state) {
        stepper.step_free(v);
        benchmark::DoNotOptimize(v.values().data());
    }
    state.SetItemsProcessed(state.iterations() * g->n_nodes());
}
BENCHMARK(BM_CrankNicolsonStepFibered)->Arg(32)->Arg(64)->Arg(128);

static void BM_CrankNicolsonStepSparse(benchmark::State& state) {
    const GridPtr g = bench_grid(int(state.range(0)), 512);
    GridFunction q = GridFunction::sample_real(g, [](double x, double y) {
        return -1.0 / (1.0 + y * y) + 0.3 * std::sin(M_PI * x) * std::exp(-y * y);
    });
    CrankNicolsonStepper stepper(g, q, g->time_step(), StepperPath::sparse);
    GridFunction v = smooth_state(g);
    for (auto _ : state) {
        stepper.step_free(v);
        benchmark::DoNotOptimize(v.values().data());
    }
    state.SetItemsProcessed(state.iterations() * g->n_nodes());
}
BENCHMARK(BM_CrankNicolsonStepSparse)->Arg(32)->Arg(64);

static void BM_DirichletFiberSolve(benchmark::State& state) {
    const GridPtr g = bench_grid(int(state.range(0)), 512);
    const double a = g->cross_section().a();
    const double kx = M_PI / (g->cross_section().b() - a);
    GridFunction phi = GridFunction::sample(g, [&](double xp, double xn) {
        const double v = std::sin(kx * (xp - a)) * std::exp(-xn * xn);
        return cplx((kx * kx + 2.0 - 4.0 * xn * xn) * v, 0.0);
    });
    for (auto _ : state) {
        GridFunction v = solve_dirichlet(phi);
        benchmark::DoNotOptimize(v.values().data());
    }
    state.SetItemsProcessed(state.iterations() * g->n_nodes());
}
BENCHMARK(BM_DirichletFiberSolve)->Arg(64)->Arg(128);

static void BM_CarlemanWeights(benchmark::State& state) {
    const CrossSection cs(0.0, 1.0, 64, {Side::right});
    const BetaCandidate beta = quadratic_candidate(-1.0, cs);
    const WeightSpec ws = make_weight_spec(beta, cs, 2.0, 0.1, 1.0, 5.0);
    for (auto _ : state) {
        double acc = 0.0;
        for (int j = 1; j < 64; ++j) {
            const double t = -1.0 + 2.0 * j / 64.0;
            for (int i = 0; i < cs.n_nodes(); ++i)
                acc += weight_eta(ws, t, cs.node(i)) + weight_phi(ws, t, cs.node(i));
        }
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_CarlemanWeights);

BENCHMARK_MAIN();
