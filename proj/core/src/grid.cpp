#include "wgstab/grid.hpp"

#include "wgstab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wgstab {

namespace {

// Smallest eigenvalue of (1/h^2) tridiag(-1, 2, -1) on n_int nodes by
// inverse power iteration with a Thomas solve per sweep.
double smallest_dirichlet_eigenvalue(int n_int, double h) {
    const double diag = 2.0 / (h * h);
    const double off = -1.0 / (h * h);

    std::vector<double> x(n_int, 1.0), y(n_int), c(n_int);
    auto solve = [&](const std::vector<double>& rhs, std::vector<double>& out) {
        // Forward sweep
        double d = diag;
        c[0] = off / d;
        out[0] = rhs[0] / d;
        for (int i = 1; i < n_int; ++i) {
            d = diag - off * c[i - 1];
            c[i] = off / d;
            out[i] = (rhs[i] - off * out[i - 1]) / d;
        }
        // Back substitution
        for (int i = n_int - 2; i >= 0; --i)
            out[i] -= c[i] * out[i + 1];
    };

    double lambda = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
        solve(x, y);
        double nrm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
        for (double& v : y) v /= nrm;
        x.swap(y);
    }
    // Rayleigh quotient of the converged vector
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n_int; ++i) {
        double ax = diag * x[i] + (i > 0 ? off * x[i - 1] : 0.0) +
                    (i + 1 < n_int ? off * x[i + 1] : 0.0);
        num += x[i] * ax;
        den += x[i] * x[i];
    }
    lambda = num / den;
    return lambda;
}

}  // namespace

CrossSection::CrossSection(double a, double b, int n_nodes, std::set<Side> gamma_star)
    : a_(a), b_(b), n_(n_nodes), gamma_star_(std::move(gamma_star)) {
    if (!(b > a))
        throw std::invalid_argument("CrossSection: requires b > a");
    if (n_nodes < 8)
        throw std::invalid_argument("CrossSection: mesh too coarse, need at least 8 nodes");
    h_ = (b_ - a_) / (n_ - 1);
    c0_ = smallest_dirichlet_eigenvalue(n_ - 2, h_);
}

CrossSection CrossSection::with_gamma_star(std::set<Side> gs) const {
    CrossSection out(*this);
    out.gamma_star_ = std::move(gs);
    return out;
}

CylinderGrid::CylinderGrid(const CrossSection& cs, double L, int n_axial,
                           double T, int n_time, double trunc_tol)
    : cs_(cs), L_(L), n_axial_(n_axial), T_(T), n_time_(n_time),
      trunc_tol_(trunc_tol) {
    if (!(L > 0))
        throw std::invalid_argument("CylinderGrid: half_length must be positive");
    if (n_axial < 16 || n_axial % 2 != 0)
        throw std::invalid_argument("CylinderGrid: n_axial must be even and at least 16");
    if (!(T > 0))
        throw std::invalid_argument("CylinderGrid: time_horizon must be positive");
    if (n_time < 1)
        throw std::invalid_argument("CylinderGrid: n_time must be at least 1");
    if (!(trunc_tol > 0) || trunc_tol >= 1)
        throw std::invalid_argument("CylinderGrid: truncation_tol must be in (0,1)");
    hx_ = 2.0 * L_ / n_axial_;
    dp_ = M_PI / L_;
    fft_ = std::make_unique<AxialTransform>(n_axial_, L_);
}

CylinderGrid::~CylinderGrid() = default;

double CylinderGrid::frequency(int k) const {
    return dp_ * (k - n_axial_ / 2);
}

std::shared_ptr<const CylinderGrid> CylinderGrid::create(const Spec& s) {
    CrossSection cs(s.omega_min, s.omega_max, s.n_cross, s.gamma_star);
    return create(cs, s.half_length, s.n_axial, s.time_horizon, s.n_time,
                  s.truncation_tol);
}

std::shared_ptr<const CylinderGrid> CylinderGrid::create(
    const CrossSection& cs, double half_length, int n_axial,
    double time_horizon, int n_time, double truncation_tol) {
    return std::shared_ptr<const CylinderGrid>(new CylinderGrid(
        cs, half_length, n_axial, time_horizon, n_time, truncation_tol));
}

GridFunction::GridFunction(GridPtr grid, AxialSpace space)
    : grid_(std::move(grid)), space_(space) {
    if (!grid_)
        throw std::invalid_argument("GridFunction: null grid");
    nx_ = grid_->n_axial();
    values_.assign(grid_->n_nodes(), cplx(0.0, 0.0));
}

GridFunction GridFunction::sample(GridPtr grid,
                                  const std::function<cplx(double, double)>& f) {
    GridFunction out(grid);
    const auto& cs = grid->cross_section();
    for (int i = 0; i < cs.n_nodes(); ++i) {
        const double xp = cs.node(i);
        for (int m = 0; m < grid->n_axial(); ++m)
            out.at(i, m) = f(xp, grid->axial_node(m));
    }
    return out;
}

GridFunction GridFunction::sample_real(GridPtr grid,
                                       const std::function<double(double, double)>& f) {
    return sample(std::move(grid), [&f](double xp, double xn) {
        return cplx(f(xp, xn), 0.0);
    });
}

void GridFunction::require_same_grid(const GridFunction& o) const {
    if (grid_ != o.grid_ || space_ != o.space_)
        throw std::invalid_argument("GridFunction: incompatible grids or axial spaces");
}

void require_compatible(const GridFunction& a, const GridFunction& b) {
    a.require_same_grid(b);
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require_same_grid(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
    require_same_grid(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(cplx z) {
    for (auto& v : values_) v *= z;
    return *this;
}

GridFunction& GridFunction::multiply_pointwise(const GridFunction& o) {
    require_same_grid(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
    return *this;
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::max_imag_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
}

std::vector<cplx> GridFunction::boundary_row(Side s) const {
    const int i = grid_->cross_section().boundary_index(s);
    std::vector<cplx> row(nx_);
    for (int m = 0; m < nx_; ++m) row[m] = at(i, m);
    return row;
}

}  // namespace wgstab
