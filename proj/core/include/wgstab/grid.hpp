#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <vector>

namespace wgstab {

using cplx = std::complex<double>;

/// Boundary side of the one-dimensional cross-section.
enum class Side { left, right };

/// Uniformly discretized cross-section interval (a, b), nodes including both
/// endpoints.  Carries the smallest Dirichlet eigenvalue of the second-order
/// difference Laplacian on the interior nodes (the discrete Poincare
/// constant) and an optional observation subboundary.
class CrossSection {
public:
    /// Throws std::invalid_argument for b <= a or fewer than 8 nodes.
    CrossSection(double a, double b, int n_nodes, std::set<Side> gamma_star = {});

    double a() const { return a_; }
    double b() const { return b_; }
    int n_nodes() const { return n_; }
    double spacing() const { return h_; }
    double node(int i) const { return a_ + h_ * i; }
    int boundary_index(Side s) const { return s == Side::left ? 0 : n_ - 1; }
    double boundary_point(Side s) const { return s == Side::left ? a_ : b_; }

    /// Outward unit normal, -1 at a and +1 at b.
    double normal(Side s) const { return s == Side::left ? -1.0 : 1.0; }

    /// Smallest eigenvalue of the interior Dirichlet difference Laplacian.
    double poincare_constant() const { return c0_; }

    const std::set<Side>& gamma_star() const { return gamma_star_; }
    CrossSection with_gamma_star(std::set<Side> gs) const;

private:
    double a_;
    double b_;
    int n_;
    double h_;
    double c0_;
    std::set<Side> gamma_star_;
};

class AxialTransform;

/// Truncated waveguide grid: cross-section nodes times cell-centered axial
/// nodes on (-L, L), plus the time horizon of the evolution problems posed on
/// it.  Axial spacing is uniform so the discrete axial Fourier transform has
/// an exact dual frequency grid.
class CylinderGrid {
public:
    struct Spec {
        double omega_min = 0.0;
        double omega_max = 1.0;
        int n_cross = 64;
        double half_length = 8.0;
        int n_axial = 512;
        double time_horizon = 1.0;
        int n_time = 256;
        double truncation_tol = 1e-12;
        std::set<Side> gamma_star = {};
    };

    static std::shared_ptr<const CylinderGrid> create(const Spec& spec);
    static std::shared_ptr<const CylinderGrid> create(const CrossSection& cs,
                                                      double half_length,
                                                      int n_axial,
                                                      double time_horizon,
                                                      int n_time,
                                                      double truncation_tol = 1e-12);
    ~CylinderGrid();

    const CrossSection& cross_section() const { return cs_; }
    double half_length() const { return L_; }
    int n_axial() const { return n_axial_; }
    double axial_spacing() const { return hx_; }
    /// Cell-centered axial node, strictly inside (-L, L).
    double axial_node(int m) const { return -L_ + (m + 0.5) * hx_; }

    /// Dual frequency in ascending order, p_k = pi (k - n/2) / L.
    double frequency(int k) const;
    double frequency_spacing() const { return dp_; }

    double time_horizon() const { return T_; }
    int n_time() const { return n_time_; }
    double time_step() const { return T_ / n_time_; }

    double truncation_tol() const { return trunc_tol_; }

    int n_cross() const { return cs_.n_nodes(); }
    std::size_t n_nodes() const { return std::size_t(cs_.n_nodes()) * n_axial_; }

    const AxialTransform& axial_transform() const { return *fft_; }

private:
    CylinderGrid(const CrossSection& cs, double L, int n_axial, double T,
                 int n_time, double trunc_tol);

    CrossSection cs_;
    double L_;
    int n_axial_;
    double hx_;
    double dp_;
    double T_;
    int n_time_;
    double trunc_tol_;
    std::unique_ptr<AxialTransform> fft_;
};

using GridPtr = std::shared_ptr<const CylinderGrid>;

/// Whether the axial index of a field enumerates physical nodes or dual
/// frequencies.
enum class AxialSpace { physical, frequency };

/// Complex nodal field over a CylinderGrid, stored row-major with the
/// cross-section index slowest.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(GridPtr grid, AxialSpace space = AxialSpace::physical);

    /// Sample a function of (x', x_n) at the physical nodes.
    static GridFunction sample(GridPtr grid,
                               const std::function<cplx(double, double)>& f);
    static GridFunction sample_real(GridPtr grid,
                                    const std::function<double(double, double)>& f);

    const GridPtr& grid() const { return grid_; }
    AxialSpace space() const { return space_; }
    bool empty() const { return values_.empty(); }

    cplx& at(int i, int m) { return values_[std::size_t(i) * nx_ + m]; }
    const cplx& at(int i, int m) const { return values_[std::size_t(i) * nx_ + m]; }

    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(cplx z);
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(cplx z, GridFunction a) { return a *= z; }

    /// Pointwise product, used for potential terms.
    GridFunction& multiply_pointwise(const GridFunction& o);

    double max_abs() const;
    double max_imag_abs() const;

    /// Copy of one cross-section boundary row (all axial nodes).
    std::vector<cplx> boundary_row(Side s) const;

    void require_same_grid(const GridFunction& o) const;

private:
    GridPtr grid_;
    AxialSpace space_ = AxialSpace::physical;
    int nx_ = 0;
    std::vector<cplx> values_;
};

/// Throws std::invalid_argument unless both fields live on the same grid and
/// axial space.
void require_compatible(const GridFunction& a, const GridFunction& b);

}  // namespace wgstab
