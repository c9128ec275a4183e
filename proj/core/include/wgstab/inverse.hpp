#pragma once

#include <map>
#include <vector>

#include "wgstab/carleman.hpp"
#include "wgstab/schrodinger.hpp"

namespace wgstab {

/// Difference system of two direct solves sharing one admissible pair:
/// rho = q1 - q2, u = u1 - u2, v = u1' - u2', with the snapshots and
/// observation traces needed by the weighted-inequality check.  The defining
/// property v(0) = -i rho u0 is evaluated on the stored step-0 snapshots and
/// its relative defect recorded (round-off for exact solver output).
struct LinearizedSystem {
    GridPtr grid;
    double dt = 0.0;      // solver step
    int keep_every = 0;   // snapshot cadence in steps

    GridFunction rho;
    GridFunction u0;

    GridFunction v0;
    double v0_defect = 0.0;

    std::vector<int> kept_steps;
    std::vector<GridFunction> u;          // kept u1 - u2
    std::vector<GridFunction> v;          // kept u1' - u2'
    std::vector<GridFunction> u2;         // kept u2
    std::vector<GridFunction> u2_prime;   // kept u2'
    std::map<Side, TraceSeries> trace_v;  // per observation side, every step
};

/// Forms the difference system.  Both solutions must live on one grid, carry
/// snapshots at the same cadence starting at step 0, and q1 - q2 must be the
/// difference actually solved for.
LinearizedSystem linearize(const DirectSolution& s1, const DirectSolution& s2,
                           const GridFunction& q1, const GridFunction& q2,
                           const AdmissiblePair& pair);

/// Space-time L2 residual of the difference system
///   -i u' - Delta u + q1 u + rho u2 = 0,   u = u1 - u2,
/// measured the way the stepper discretizes it: centred time differences
/// against midpoint-averaged spatial terms, wall rows pinned, zero phantom
/// values past the truncation caps.  On healthy runs this collapses to
/// round-off, so it is a bookkeeping check rather than a convergence study;
/// a broken sign, stencil flavour, or coupling term surfaces at O(1).
/// Needs snapshots at every solver step.
double difference_residual(const LinearizedSystem& lin, const GridFunction& q1);

/// Difference fields extended to (-T, T) by the odd-conjugate rule
/// v(-t) = -conj(v(t)) and its consequence u2'(-t) = -conj(u2'(t)).
/// Slice j of the field series sits at time (j - n_half) * keep_every * dt.
struct SymmetrizedSystem {
    GridPtr grid;
    double field_dt = 0.0;
    double trace_dt = 0.0;
    std::vector<double> times;  // field slice times, -T .. T
    std::vector<GridFunction> v;
    std::vector<GridFunction> u2_prime;
    std::map<Side, TraceSeries> trace_v;
};

SymmetrizedSystem symmetrize(const LinearizedSystem& lin);

/// One parameter s of the weighted inequality: the time-frozen weight
/// exp(-s eta(0, x')) applied to the initial datum against the interior and
/// boundary data terms,
///   lhs            = |e^{-s eta0} rho u0|^2 over the cylinder,
///   rhs_interior   = s^{-3/2} |e^{-s eta0} rho u2'|^2 over time x cylinder,
///   rhs_boundary   = s^{-1/2} |e^{-s eta0} dn v|^2 over time x observed wall.
/// ratio = lhs / (rhs_interior + rhs_boundary), with the convention 0 for a
/// vanishing lhs (the trivial difference system).
struct LemmaRow {
    double s = 0.0;
    double lhs = 0.0;
    double rhs_interior = 0.0;
    double rhs_boundary = 0.0;
    double ratio = 0.0;
};

struct LemmaReport {
    std::vector<LemmaRow> rows;
    bool finite = true;
};

LemmaReport lemma_inv_check(const LinearizedSystem& lin, const WeightSpec& ws,
                            const std::vector<double>& s_values);

/// Constants of the stability estimate: the decay-class envelope (a, b, d_eps,
/// eps), the initial-profile floor, and the data-size split delta in (0, b).
/// theta = (b - delta) / (2b - delta) is the Hoelder exponent; data with
/// mu >= mu_delta = exp(-(2b - delta)) fall into the large-data branch.
struct StabilityParams {
    double a = 1.0;
    double b = 1.0;
    double d_eps = 2.0;
    double eps = 1.0;
    double floor = 1.0;
    double delta = 0.5;

    double theta() const { return (b - delta) / (2.0 * b - delta); }
    double mu_delta() const;
};

StabilityParams make_stability_params(const PerturbationParams& pp, double upsilon0,
                                      double delta);

/// Free parameters chosen for one datum mu = (observation norm)^2:
///   y(mu) = ((-ln mu / (2b - delta))^(2 / d_eps) - 1)^(1/2),
///   s     = (floor^2 / (2 C))^(-2/3) (1 + y^2)^((1 + eps) / 3),
/// on the small-data branch mu < mu_delta; y(mu_delta) = 0 exactly.
struct Recipe {
    bool large_data = false;
    double y = 0.0;
    double s = 0.0;
};

Recipe parameter_recipe(double mu, const StabilityParams& sp, double c_fit);

struct StabilityRow {
    double amplitude = 0.0;
    double rho_norm = 0.0;   // |q1 - q2| over the cylinder
    double data_norm = 0.0;  // |dn u1' - dn u2'| over time x observed wall
    double mu = 0.0;         // data_norm^2
    double y = 0.0;
    double s = 0.0;
    bool large_data = false;
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    double theta = 0.0;
    double mu_delta = 0.0;
    double c_fit = 0.0;  // max rho_norm / data_norm^theta across rows
    double slope = 0.0;  // log-log slope fitted on the middle decade
    int fit_rows = 0;
    bool mu_monotone = true;
    bool pass = false;
};

struct SweepOptions {
    std::vector<double> amplitudes;  // must span at least three decades
    bool two_sided = false;          // perturb both potentials symmetrically
    double recipe_constant = 1.0;    // C handed to the parameter recipe
    StepperPath path = StepperPath::automatic;
    int threads = 1;
};

/// Runs the direct problem for q0 + amp * rho0 against the reference
/// potential for every amplitude, collects per-row observation norms, fits
/// the log-log slope on the middle decade, and checks the Hoelder bound
/// rho_norm <= c_fit * data_norm^theta with one constant across the sweep.
/// Amplitude rows are independent solves and run on `threads` workers.
StabilityReport stability_sweep(const AdmissiblePair& pair, const PerturbationParams& pp,
                                const StabilityParams& sp, const SweepOptions& opts);

}  // namespace wgstab
