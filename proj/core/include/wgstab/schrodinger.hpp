#pragma once

#include "wgstab/admissible.hpp"
#include "wgstab/grid.hpp"

#include <map>
#include <memory>
#include <vector>

namespace wgstab {

/// Field affine in time, a(x) + t b(x).  Boundary data and interior sources
/// of the homogenized evolution problem are exactly of this form, so storing
/// the two parts avoids any time interpolation.
struct TimeAffine {
    GridFunction constant;
    GridFunction slope;
    GridFunction at(double t) const;
};

/// Lateral boundary extension G0(t) = u0 - i t S built from the pair's
/// stationary residual S = (-Delta + q0) u0.  Its slope vanishes identically
/// when the pair is stationary.
TimeAffine boundary_extension(const AdmissiblePair& pair);

/// Source of the homogenized problem for the potential q,
///   f(t) = -(q - q0) u0 + i t [ (-Delta + q0) S + (q - q0) S ],
/// assembled from the pair's stationary residual so that the stationary
/// configuration yields f identically zero.
TimeAffine build_source(const AdmissiblePair& pair, const GridFunction& q);

enum class StepperPath { automatic, fibered, sparse };

/// One implicit midpoint step of v' = i (Delta - q) v + i f with homogeneous
/// Dirichlet walls and phantom-zero axial caps.  The evolution matrix uses
/// centered differences throughout, so the free propagator is an exact
/// Cayley transform of a symmetric operator and conserves the discrete norm.
///
/// When q carries no cross variation the solve diagonalizes in the wall-sine
/// basis and reduces to one axial tridiagonal system per mode; otherwise a
/// sparse factorization over the interior unknowns is prepared once and
/// reused every step.  A stepper instance belongs to one run at a time.
class CrankNicolsonStepper {
public:
    CrankNicolsonStepper(GridPtr grid, const GridFunction& q, double dt,
                         StepperPath path = StepperPath::automatic);
    ~CrankNicolsonStepper();
    CrankNicolsonStepper(const CrankNicolsonStepper&) = delete;
    CrankNicolsonStepper& operator=(const CrankNicolsonStepper&) = delete;

    bool fibered() const;
    double dt() const;

    /// Advances v by one step; f_mid is the source at the interval midpoint.
    void step(GridFunction& v, const GridFunction& f_mid);
    void step_free(GridFunction& v);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Neumann trace time series on one observation side: entry [m] holds the
/// outward normal derivative at every axial node at time step m.
using TraceSeries = std::vector<std::vector<cplx>>;

/// Space-time L2 norm of a trace series: trapezoid in time, uniform cell
/// weights along the axis.
double trace_series_norm(const TraceSeries& s, double dt, double hx);

struct DirectSolution {
    GridPtr grid;
    std::vector<double> times;
    std::map<Side, TraceSeries> neumann_uprime;

    GridFunction final_u;
    GridFunction final_uprime;
    std::vector<int> kept_steps;
    std::vector<GridFunction> kept_u;
    std::vector<GridFunction> kept_uprime;

    double sup_u = 0.0;        ///< max over steps of the solution sup norm
    double sup_uprime = 0.0;
    double regularity_ratio = 0.0;  ///< 0 unless diagnostics were requested
};

struct DirectOptions {
    int keep_every = 0;        ///< 0: keep only the final snapshot
    int diagnostics_every = 0; ///< 0: skip Sobolev diagnostics
    StepperPath path = StepperPath::automatic;
};

/// Solves the full initial-boundary value problem for the potential q with
/// the pair's boundary data: homogenized unknown v stepped from v(0) = 0,
/// solution u = v + G0(t), time derivative recovered through the equation as
/// u' = i [ (Delta - q) v + f(t) - S ], and Neumann traces of u' recorded on
/// every observation side.  Refuses fewer than 16 time steps.
DirectSolution solve_direct(const AdmissiblePair& pair, const GridFunction& q,
                            const DirectOptions& opts = {});

/// Outward normal derivative of w on an observation side, one value per
/// axial node; the side must belong to the grid's observation boundary.
std::vector<cplx> neumann_trace(const GridFunction& w, Side side);

}  // namespace wgstab
