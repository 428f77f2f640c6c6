#pragma once

#include "cssk/core/types.hpp"

namespace cssk::sim {

/// Isotropic Gaussian optical point spread function, pixel-integrated.
struct PsfModel {
  int kernel_radius = 2;
  double sigma = 0.7;

  void validate() const;
};

/// (2r+1)x(2r+1) kernel of a Gaussian centered at (r+dy, r+dx), integrated
/// over each pixel and normalized to sum 1. The sigma -> 0 limit degenerates
/// to a discrete delta at the center pixel.
Image render_psf(const PsfModel& psf, double dy = 0.0, double dx = 0.0);

}  // namespace cssk::sim
