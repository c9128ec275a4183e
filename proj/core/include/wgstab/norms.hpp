#pragma once

#include "wgstab/grid.hpp"

namespace wgstab {

/// Discrete L^2(Omega) inner product and norm; trapezoid weights across the
/// cross-section (half weight on the two boundary rows), uniform cell
/// weights along the axis, exact against the axial Parseval identity.
double l2_norm(const GridFunction& w);
cplx l2_inner(const GridFunction& a, const GridFunction& b);

/// Discrete Sobolev norm of order k <= 3: square root of the sum of the
/// squared L^2 norms of all mixed derivatives d^i_{x'} d^j_{x_n} w with
/// i + j <= k.  Axial derivatives are spectral, cross derivatives use
/// second-order stencils (one-sided at the boundary).  k > 3 throws.
double sobolev_norm(const GridFunction& w, int k);

double sup_norm(const GridFunction& w);

struct EmbeddingRow {
    int level = 0;
    int n_cross = 0;
    int n_axial = 0;
    double max_ratio = 0.0;  // max over corpus of sup / H^k
};

/// Ratio sup|h| / ||h||_k over a fixed corpus of smooth decaying fields at
/// successive dyadic refinements of the base grid.  Requires k > n/2 = 1,
/// i.e. k >= 2; smaller k throws (the sup bound has no discrete counterpart
/// below the embedding line).
std::vector<EmbeddingRow> sup_embedding_study(const CylinderGrid::Spec& base,
                                              int k, int levels);

}  // namespace wgstab
