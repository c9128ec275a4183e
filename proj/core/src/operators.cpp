#include "wgstab/operators.hpp"

#include "wgstab/fourier.hpp"

#include <cmath>

namespace wgstab {

namespace {

void require_physical(const GridFunction& w, const char* who) {
    if (w.empty() || w.space() != AxialSpace::physical)
        throw std::invalid_argument(std::string(who) + ": needs a physical-space field");
}

// One pass of a 1-D derivative along the cross direction.  Stencils are
// second order throughout, one-sided on the two boundary rows.
void cross_derivative_rows(const GridFunction& w, GridFunction& out, int order) {
    const auto& grid = *w.grid();
    const int n = grid.n_cross();
    const int nx = grid.n_axial();
    const double h = grid.cross_section().spacing();

    auto row = [&](int i, int m) -> const cplx& { return w.at(i, m); };

    switch (order) {
    case 1: {
        const double c = 1.0 / (2.0 * h);
        for (int m = 0; m < nx; ++m) {
            out.at(0, m) = c * (-3.0 * row(0, m) + 4.0 * row(1, m) - row(2, m));
            out.at(n - 1, m) =
                c * (3.0 * row(n - 1, m) - 4.0 * row(n - 2, m) + row(n - 3, m));
        }
        for (int i = 1; i < n - 1; ++i)
            for (int m = 0; m < nx; ++m)
                out.at(i, m) = c * (row(i + 1, m) - row(i - 1, m));
        break;
    }
    case 2: {
        const double c = 1.0 / (h * h);
        for (int m = 0; m < nx; ++m) {
            out.at(0, m) = c * (2.0 * row(0, m) - 5.0 * row(1, m) +
                                4.0 * row(2, m) - row(3, m));
            out.at(n - 1, m) = c * (2.0 * row(n - 1, m) - 5.0 * row(n - 2, m) +
                                    4.0 * row(n - 3, m) - row(n - 4, m));
        }
        for (int i = 1; i < n - 1; ++i)
            for (int m = 0; m < nx; ++m)
                out.at(i, m) = c * (row(i + 1, m) - 2.0 * row(i, m) + row(i - 1, m));
        break;
    }
    case 3: {
        const double c = 1.0 / (2.0 * h * h * h);
        // One-sided five-point weights at the first two and last two rows.
        const double w0[5] = {-5.0, 18.0, -24.0, 14.0, -3.0};   // /(2h^3)
        const double w1[5] = {-3.0, 10.0, -12.0, 6.0, -1.0};    // /(2h^3)
        for (int m = 0; m < nx; ++m) {
            cplx s0(0.0), s1(0.0), sn(0.0), sn1(0.0);
            for (int j = 0; j < 5; ++j) {
                s0 += w0[j] * row(j, m);
                s1 += w1[j] * row(j, m);
                sn += -w0[j] * row(n - 1 - j, m);
                sn1 += -w1[j] * row(n - 1 - j, m);
            }
            out.at(0, m) = c * s0;
            out.at(1, m) = c * s1;
            out.at(n - 1, m) = c * sn;
            out.at(n - 2, m) = c * sn1;
        }
        for (int i = 2; i < n - 2; ++i)
            for (int m = 0; m < nx; ++m)
                out.at(i, m) = c * (-row(i - 2, m) + 2.0 * row(i - 1, m) -
                                    2.0 * row(i + 1, m) + row(i + 2, m));
        break;
    }
    default:
        throw std::invalid_argument("d_cross: order must be 1, 2 or 3");
    }
}

}  // namespace

GridFunction d_cross(const GridFunction& w, int order) {
    require_physical(w, "d_cross");
    GridFunction out(w.grid());
    cross_derivative_rows(w, out, order);
    return out;
}

GridFunction d_axial_spectral(const GridFunction& w, int order) {
    require_physical(w, "d_axial_spectral");
    if (order < 0)
        throw std::invalid_argument("d_axial_spectral: negative order");
    if (order == 0) return w;
    const auto& grid = *w.grid();
    GridFunction what = axial_fourier(w);
    for (int k = 0; k < grid.n_axial(); ++k) {
        cplx mult = std::pow(cplx(0.0, grid.frequency(k)), order);
        for (int i = 0; i < grid.n_cross(); ++i) what.at(i, k) *= mult;
    }
    return axial_fourier_inverse(what);
}

GridFunction d2_axial_fd(const GridFunction& w) {
    require_physical(w, "d2_axial_fd");
    const auto& grid = *w.grid();
    const int n = grid.n_cross();
    const int nx = grid.n_axial();
    const double c = 1.0 / (grid.axial_spacing() * grid.axial_spacing());
    GridFunction out(w.grid());
    for (int i = 0; i < n; ++i) {
        out.at(i, 0) = c * (2.0 * w.at(i, 0) - 5.0 * w.at(i, 1) +
                            4.0 * w.at(i, 2) - w.at(i, 3));
        out.at(i, nx - 1) = c * (2.0 * w.at(i, nx - 1) - 5.0 * w.at(i, nx - 2) +
                                 4.0 * w.at(i, nx - 3) - w.at(i, nx - 4));
        for (int m = 1; m < nx - 1; ++m)
            out.at(i, m) = c * (w.at(i, m + 1) - 2.0 * w.at(i, m) + w.at(i, m - 1));
    }
    return out;
}

GridFunction laplacian_fd(const GridFunction& w) {
    GridFunction out = d_cross(w, 2);
    out += d2_axial_fd(w);
    return out;
}

GridFunction schrodinger_apply(const GridFunction& w, const GridFunction& q) {
    require_compatible(w, q);
    if (q.max_imag_abs() != 0.0)
        throw std::invalid_argument("schrodinger_apply: potential must be real-valued");
    GridFunction out = laplacian_fd(w);
    out *= -1.0;
    GridFunction qw = q;
    qw.multiply_pointwise(w);
    out += qw;
    return out;
}

std::vector<cplx> boundary_normal_derivative(const GridFunction& w, Side side) {
    require_physical(w, "boundary_normal_derivative");
    const auto& grid = *w.grid();
    const int n = grid.n_cross();
    const int nx = grid.n_axial();
    const double c = 1.0 / (2.0 * grid.cross_section().spacing());
    std::vector<cplx> out(nx);
    if (side == Side::right) {
        for (int m = 0; m < nx; ++m)
            out[m] = c * (3.0 * w.at(n - 1, m) - 4.0 * w.at(n - 2, m) + w.at(n - 3, m));
    } else {
        for (int m = 0; m < nx; ++m)
            out[m] = c * (3.0 * w.at(0, m) - 4.0 * w.at(1, m) + w.at(2, m));
    }
    return out;
}

}  // namespace wgstab
