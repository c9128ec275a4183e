#pragma once

#include "wgstab/grid.hpp"

namespace wgstab {

/// Cross-section derivative of order 1..3, second-order stencils, one-sided
/// at the two boundary rows.
GridFunction d_cross(const GridFunction& w, int order);

/// Spectral axial derivative of arbitrary order (multiplication by (i p)^k
/// on the dual grid).
GridFunction d_axial_spectral(const GridFunction& w, int order);

/// Second-order finite-difference axial second derivative, one-sided at the
/// first and last axial nodes.
GridFunction d2_axial_fd(const GridFunction& w);

/// Evaluation-flavor difference Laplacian: centered 3-point second
/// derivatives in both directions at interior nodes, one-sided stencils on
/// the boundary rows and end axial cells.  Used for source assembly and
/// diagnostics, not for the implicit evolution matrix.
GridFunction laplacian_fd(const GridFunction& w);

/// -Delta w + q w with the evaluation-flavor Laplacian; q must be real-valued
/// on the same grid.
GridFunction schrodinger_apply(const GridFunction& w, const GridFunction& q);

/// Second-order one-sided normal derivative of w at the given cross-section
/// boundary, one value per axial node.  Unlike neumann_trace() this performs
/// no observation-boundary membership check.
std::vector<cplx> boundary_normal_derivative(const GridFunction& w, Side side);

}  // namespace wgstab
