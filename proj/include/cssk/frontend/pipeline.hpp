#pragma once

#include <utility>
#include <vector>

#include "cssk/core/types.hpp"
#include "cssk/sim/psf.hpp"

namespace cssk::frontend {

/// Knobs of the single-frame spatial detection front end. var_floor == 0
/// selects the automatic floor 1e-6 * (global variance of the filtered
/// frame), which keeps flat-sky regions from dividing by ~zero.
struct FrontendParams {
  int demean_len = 21;
  sim::PsfModel psf;
  int var_window = 11;
  int var_guard = 3;
  double var_floor = 0.0;
  double threshold = 4.0;

  void validate() const;
};

/// Zero-padded row-wise correlation with the zero-mean kernel
/// h[center] = 1 - 1/L, h[else] = -1/L: each pixel minus its local row mean.
Image demean(const Image& img, int demean_len);

/// Zero-padded 2D correlation with the rendered PSF kernel, same-size output.
Image matched_filter(const Image& img, const sim::PsfModel& psf);

/// Zero-padded correlation with an arbitrary odd-sized kernel.
Image correlate2d(const Image& img, const Image& kernel);

/// Exact transpose of correlate2d (correlation with the 180-degree rotated
/// kernel); needed by gradient computations.
Image correlate2d_adjoint(const Image& img, const Image& kernel);

/// Exact transpose of demean. The demean kernel is symmetric so this equals
/// demean, kept separate for clarity at gradient call sites.
Image demean_adjoint(const Image& img, int demean_len);

/// Per-pixel population variance over a var_window x var_window neighborhood
/// excluding the central var_guard x var_guard guard region, windows clipped
/// at the frame border, clamped below at var_floor.
Image local_variance(const Image& img, int var_window, int var_guard, double var_floor);

/// filtered / sqrt(variance): SNR-like z-scores.
Image background_normalize(const Image& filtered, const Image& variance);

/// All 8-neighborhood local maxima with score >= threshold, sorted by
/// (-score, row, col). A pixel is a local maximum when it is >= every
/// in-bounds neighbor and > at least one, so flat regions produce nothing.
/// Maxima closer than border_margin to the frame edge are suppressed.
std::vector<Exceedance> threshold_exceedances(const Image& norm_img, double threshold,
                                              int border_margin = 0);

struct FrontendResult {
  Image norm_img;
  std::vector<Exceedance> xcds;
};

/// demean -> matched_filter -> local_variance -> background_normalize ->
/// threshold_exceedances, with exceedances suppressed within
/// psf.kernel_radius of the border.
FrontendResult frontend_pipeline(const Image& img, const FrontendParams& params);

/// The effective variance floor used by the pipeline for a given filtered
/// frame (resolves the var_floor == 0 automatic setting).
double effective_var_floor(const FrontendParams& params, const Image& filtered);

}  // namespace cssk::frontend
