#pragma once

#include "wgstab/grid.hpp"

namespace wgstab {

/// Unitary (up to the documented normalization) discrete axial Fourier
/// transform along x_n, applied independently on every cross-section row.
///
/// Forward transform of a physical field w:
///   what(p_k) = h / sqrt(2 pi) * sum_m w(x_m) exp(-i p_k x_m)
/// with p_k = pi (k - n/2) / L ascending.  The inverse is the adjoint with
/// quadrature weight dp = pi / L, so inverse(forward(w)) == w and
///   dp * sum_k |what_k|^2 == h * sum_m |w_m|^2
/// hold to round-off.
GridFunction axial_fourier(const GridFunction& w);
GridFunction axial_fourier_inverse(const GridFunction& what);

/// Internal per-row FFT engine owned by CylinderGrid; plans are created once
/// at grid construction so transform application is reentrant.
class AxialTransform {
public:
    explicit AxialTransform(int n, double half_length);
    ~AxialTransform();
    AxialTransform(const AxialTransform&) = delete;
    AxialTransform& operator=(const AxialTransform&) = delete;

    int size() const { return n_; }

    /// in/out are rows of length n; may not alias.
    void forward(const cplx* in, cplx* out) const;
    void inverse(const cplx* in, cplx* out) const;

private:
    int n_;
    double scale_fwd_;
    double scale_inv_;
    std::vector<cplx> phase_;  // per ascending-frequency bin
    void* plan_fwd_ = nullptr;
    void* plan_inv_ = nullptr;
};

}  // namespace wgstab
