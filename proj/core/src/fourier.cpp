#include "wgstab/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace wgstab {

namespace {
// FFTW plan creation is not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

AxialTransform::AxialTransform(int n, double half_length) : n_(n) {
    const double h = 2.0 * half_length / n;
    const double dp = M_PI / half_length;
    scale_fwd_ = h / std::sqrt(2.0 * M_PI);
    scale_inv_ = dp / std::sqrt(2.0 * M_PI);
    phase_.resize(n);
    for (int k = 0; k < n; ++k) {
        const double kt = k - n / 2;  // signed frequency index
        const double arg = M_PI * kt * (1.0 - 1.0 / n);
        phase_[k] = cplx(std::cos(arg), std::sin(arg));
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    std::vector<cplx> a(n), b(n);
    plan_fwd_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()),
                                 FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_inv_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()),
                                 FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

AxialTransform::~AxialTransform() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void AxialTransform::forward(const cplx* in, cplx* out) const {
    std::vector<cplx> bins(n_);
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(bins.data()));
    for (int k = 0; k < n_; ++k) {
        const int bin = (k + n_ / 2) % n_;
        out[k] = scale_fwd_ * phase_[k] * bins[bin];
    }
}

void AxialTransform::inverse(const cplx* in, cplx* out) const {
    std::vector<cplx> bins(n_), phys(n_);
    for (int k = 0; k < n_; ++k) {
        const int bin = (k + n_ / 2) % n_;
        bins[bin] = in[k] * std::conj(phase_[k]);
    }
    fftw_execute_dft(static_cast<fftw_plan>(plan_inv_),
                     reinterpret_cast<fftw_complex*>(bins.data()),
                     reinterpret_cast<fftw_complex*>(phys.data()));
    for (int m = 0; m < n_; ++m) out[m] = scale_inv_ * phys[m];
}

GridFunction axial_fourier(const GridFunction& w) {
    if (w.space() != AxialSpace::physical)
        throw std::invalid_argument("axial_fourier: field already frequency-indexed");
    const auto& grid = *w.grid();
    GridFunction out(w.grid(), AxialSpace::frequency);
    const auto& fft = grid.axial_transform();
    for (int i = 0; i < grid.n_cross(); ++i)
        fft.forward(&w.at(i, 0), &out.at(i, 0));
    return out;
}

GridFunction axial_fourier_inverse(const GridFunction& what) {
    if (what.space() != AxialSpace::frequency)
        throw std::invalid_argument("axial_fourier_inverse: field not frequency-indexed");
    const auto& grid = *what.grid();
    GridFunction out(what.grid(), AxialSpace::physical);
    const auto& fft = grid.axial_transform();
    for (int i = 0; i < grid.n_cross(); ++i)
        fft.inverse(&what.at(i, 0), &out.at(i, 0));
    return out;
}

}  // namespace wgstab
