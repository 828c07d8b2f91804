#pragma once

#include <memory>

#include "torusns/spectral_field.hpp"

namespace torusns {

/// Per-worker pseudo-spectral workspace: FFT plans plus scratch grids.
///
/// A workspace is not thread-safe; give each worker its own.  All products are
/// evaluated on the zero-padded grid (grid_size >= 3*n_max), so the quadratic
/// terms read back on the retained band are dealiased exactly.
class FourierWorkspace {
  public:
    explicit FourierWorkspace(TruncationParams trunc);
    ~FourierWorkspace();

    FourierWorkspace(const FourierWorkspace&) = delete;
    FourierWorkspace& operator=(const FourierWorkspace&) = delete;

    const TruncationParams& truncation() const { return trunc_; }

    /// Samples the velocity field on the uniform grid.
    GridField to_grid(const SpectralField& u);

    /// Fourier analysis of a real grid field followed by the Leray projection
    /// onto span{e_k : |k|_inf <= n_max}.  Mean and gradient parts drop out.
    SpectralField to_spectral(const GridField& f);

    /// B(u) = P[(u.grad)u], evaluated in rotational form P[omega u^perp].
    SpectralField nonlinearity(const SpectralField& u);

    /// B(u,v) = P[(u.grad)v].
    SpectralField advection(const SpectralField& u, const SpectralField& v);

    /// Adjoint of the derivative of B at u: P[(grad u)^T h - (u.grad)h].
    SpectralField nonlinearity_jacobian_adjoint(const SpectralField& u, const SpectralField& h);

  private:
    struct Impl;
    TruncationParams trunc_;
    std::unique_ptr<Impl> impl_;
};

/// Leray projection of a grid field (convenience; creates a scratch workspace).
SpectralField leray_project(const GridField& f, TruncationParams trunc);

/// Trilinear form b(u,v,w) = integral (u.grad)v . w dx, dealiased pseudo-spectral route.
double b_form(const SpectralField& u, const SpectralField& v, const SpectralField& w,
              FourierWorkspace& ws);

/// Grid quadrature of the L^p norm of |u(x)| over the torus.
double grid_lp_norm(const GridField& f, double p);

}  // namespace torusns
