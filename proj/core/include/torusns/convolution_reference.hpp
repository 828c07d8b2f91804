#pragma once

#include "torusns/spectral_field.hpp"

namespace torusns {

/// Direct spectral-convolution evaluation of the Navier-Stokes nonlinearity,
/// O(M^2) over mode pairs with no transforms.  This is the slow reference
/// route that the pseudo-spectral path must reproduce.
SpectralField nonlinearity_direct(const SpectralField& u);

/// Direct evaluation of B(u,v) = P[(u.grad)v].
SpectralField advection_direct(const SpectralField& u, const SpectralField& v);

/// Direct evaluation of b(u,v,w) as a lattice sum over p + q + r = 0.
double b_form_direct(const SpectralField& u, const SpectralField& v, const SpectralField& w);

}  // namespace torusns
