#pragma once

#include "wgstab/grid.hpp"

#include <vector>

namespace wgstab {

/// One row of a per-frequency resolvent table: for the fiber operator
/// -d^2/dx'^2 + p^2 with Dirichlet walls, the realized gain ratio
/// ||vhat(p)|| / ||phihat(p)|| against the spectral bound 1/(c0 + p^2).
struct FiberRow {
    double frequency = 0.0;
    double ratio = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct ResolventReport {
    double c0 = 0.0;  ///< discrete Dirichlet ground energy of the cross-section
    std::vector<FiberRow> rows;  ///< fibers carrying nonzero data only
    bool all_pass() const;
};

/// Per-layer boundary traces of (-Delta + q)^j w, j = 0..k-1, and the
/// membership verdict "all layers below tolerance".
struct TraceReport {
    std::vector<double> layer_trace;
    double tolerance = 0.0;
    bool member = false;
};

/// Solves -Delta v = phi with homogeneous Dirichlet conditions on the lateral
/// walls by diagonalizing the axial direction: one symmetric positive definite
/// tridiagonal solve per dual frequency.  Every carrying fiber is checked
/// against the resolvent bound on the way out.
GridFunction solve_dirichlet(const GridFunction& phi);

/// The fiber table behind solve_dirichlet, for reporting.
ResolventReport resolvent_bound_report(const GridFunction& phi);

/// Applies the difference operator -Delta + q to w up to k-1 times
/// (k in {1, 2}) and records the largest lateral boundary magnitude of each
/// layer.  The default tolerance suits fields that are flat in x' near the
/// walls, where the one-sided stencils are exact; fields with genuine cross
/// variation at the walls carry the stencil truncation error and need a
/// resolution-aware tolerance instead.
TraceReport domain_trace_check(const GridFunction& w, const GridFunction& q,
                               int k, double tolerance = 1e-8);

}  // namespace wgstab
