#include "wgstab/norms.hpp"

#include "wgstab/operators.hpp"

#include <cmath>

namespace wgstab {

namespace {

double axial_weight(const GridFunction& w) {
    return w.space() == AxialSpace::physical ? w.grid()->axial_spacing()
                                             : w.grid()->frequency_spacing();
}

}  // namespace

double l2_norm(const GridFunction& w) {
    if (w.empty()) throw std::invalid_argument("l2_norm: empty field");
    const auto& grid = *w.grid();
    const int n = grid.n_cross();
    const int nx = grid.n_axial();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double rs = 0.0;
        for (int m = 0; m < nx; ++m) rs += std::norm(w.at(i, m));
        s += (i == 0 || i == n - 1) ? 0.5 * rs : rs;
    }
    return std::sqrt(grid.cross_section().spacing() * axial_weight(w) * s);
}

cplx l2_inner(const GridFunction& a, const GridFunction& b) {
    require_compatible(a, b);
    const auto& grid = *a.grid();
    const int n = grid.n_cross();
    const int nx = grid.n_axial();
    cplx s(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        cplx rs(0.0, 0.0);
        for (int m = 0; m < nx; ++m) rs += std::conj(a.at(i, m)) * b.at(i, m);
        s += (i == 0 || i == n - 1) ? 0.5 * rs : rs;
    }
    return grid.cross_section().spacing() * axial_weight(a) * s;
}

double sobolev_norm(const GridFunction& w, int k) {
    if (k < 0 || k > 3)
        throw std::invalid_argument("sobolev_norm: order must be within 0..3");
    if (w.space() != AxialSpace::physical)
        throw std::invalid_argument("sobolev_norm: needs a physical-space field");
    double sq = 0.0;
    for (int j = 0; j <= k; ++j) {
        GridFunction wj = j == 0 ? w : d_axial_spectral(w, j);
        for (int i = 0; i + j <= k; ++i) {
            const GridFunction& term = i == 0 ? wj : d_cross(wj, i);
            double nrm = l2_norm(i == 0 ? wj : term);
            sq += nrm * nrm;
        }
    }
    return std::sqrt(sq);
}

double sup_norm(const GridFunction& w) {
    if (w.space() != AxialSpace::physical)
        throw std::invalid_argument("sup_norm: needs a physical-space field");
    return w.max_abs();
}

std::vector<EmbeddingRow> sup_embedding_study(const CylinderGrid::Spec& base,
                                              int k, int levels) {
    if (k <= 1)
        throw std::invalid_argument(
            "sup_embedding_study: k must exceed n/2 = 1 for the sup bound");
    if (k > 3) throw std::invalid_argument("sup_embedding_study: k must be within 2..3");
    if (levels < 1) throw std::invalid_argument("sup_embedding_study: need levels >= 1");

    using Fn = std::function<double(double, double)>;
    const double a = base.omega_min, b = base.omega_max;
    auto rel = [a, b](double xp) { return (xp - a) / (b - a); };
    std::vector<Fn> corpus = {
        [&](double xp, double xn) { return std::sin(M_PI * rel(xp)) * std::exp(-xn * xn); },
        [&](double xp, double xn) {
            return std::cos(M_PI * rel(xp)) * std::exp(-0.5 * (xn - 1.0) * (xn - 1.0));
        },
        [&](double xp, double xn) {
            double s = rel(xp);
            return (0.5 + s * (1.0 - s)) * std::exp(-0.25 * xn * xn);
        },
        [&](double xp, double xn) {
            return std::sin(2.0 * M_PI * rel(xp)) * xn * std::exp(-0.5 * xn * xn);
        },
        [&](double xp, double xn) {
            double s = rel(xp) - 0.5;
            return std::exp(-4.0 * s * s) * std::exp(-(xn + 2.0) * (xn + 2.0) / 3.0);
        },
        [&](double xp, double xn) {
            return (1.0 - 0.3 * rel(xp)) * std::exp(-0.3 * xn * xn);
        },
    };

    std::vector<EmbeddingRow> rows;
    for (int l = 0; l < levels; ++l) {
        CylinderGrid::Spec spec = base;
        spec.n_cross = base.n_cross << l;
        spec.n_axial = base.n_axial << l;
        auto grid = CylinderGrid::create(spec);
        EmbeddingRow row;
        row.level = l;
        row.n_cross = spec.n_cross;
        row.n_axial = spec.n_axial;
        for (const auto& f : corpus) {
            GridFunction h = GridFunction::sample_real(grid, f);
            double ratio = sup_norm(h) / sobolev_norm(h, k);
            row.max_ratio = std::max(row.max_ratio, ratio);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace wgstab
