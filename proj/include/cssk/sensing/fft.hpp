#pragma once

#include "cssk/core/types.hpp"

namespace cssk::sensing {

/// Unitary 2D DFT (1/sqrt(N) scaling in each direction), so Parseval holds
/// exactly and forward followed by inverse is the identity.
Spectrum fft2(const Image& img);

/// Unitary inverse 2D DFT of an arbitrary complex spectrum.
Spectrum ifft2_complex(const Spectrum& spec);

struct RealImage {
  Image image;
  double imag_residual = 0.0;  // max |imaginary part| discarded
};

/// Unitary inverse 2D DFT; returns the real part as an Image and reports the
/// largest discarded imaginary magnitude.
RealImage ifft2(const Spectrum& spec);

}  // namespace cssk::sensing
