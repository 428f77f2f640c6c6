#pragma once

#include <limits>
#include <optional>
#include <span>
#include <utility>

#include "cssk/core/types.hpp"
#include "cssk/frontend/pipeline.hpp"

namespace cssk::maskselect {

/// Deterministic in seed. OnePerBlock opens exactly one position per
/// block_w x block_h tile; Bernoulli opens each position independently with
/// probability 1/(block_w*block_h), reopening one position if the draw left
/// the mask empty.
Mask generate_mask(int width, int height, int block_w, int block_h, MaskKind kind, uint64_t seed);

/// Sentinel fa_count when the calibration target never shows up in the
/// exceedance list.
inline constexpr long long kTargetNotDetected = std::numeric_limits<long long>::max();

struct MaskScore {
  uint64_t mask_seed = 0;
  std::optional<long long> fa_count;
  std::optional<double> recon_mse;
};

/// Measures the calibration frame through the mask, zero-fill reconstructs,
/// runs the detection front end, and counts exceedances scoring strictly
/// above the target's best match (Chebyshev radius 1).
MaskScore score_mask_fa(const Mask& mask, const Image& calib_frame, const SceneTruth& truth,
                        const frontend::FrontendParams& frontend_params);

/// Mean squared pixel error of the zero-fill reconstruction against the
/// calibration frame, with the reconstruction scaled by 1/open_fraction to
/// undo the subsampling amplitude loss.
MaskScore score_mask_mse(const Mask& mask, const Image& calib_frame);

enum class MaskMetric { FaCount, ReconMse };

struct MaskSelectConfig {
  int block_w = 2;
  int block_h = 2;
  MaskKind kind = MaskKind::OnePerBlock;
  MaskMetric metric = MaskMetric::FaCount;
  frontend::FrontendParams frontend;
  int max_threads = 0;
};

/// Scores one mask per candidate seed (in parallel) and returns the argmin
/// under the chosen metric, ties broken by lower seed. Frame dimensions come
/// from calib_frame; truth is only consulted for the FaCount metric.
std::pair<Mask, MaskScore> select_best_mask(std::span<const uint64_t> candidates,
                                            const Image& calib_frame, const SceneTruth& truth,
                                            const MaskSelectConfig& config);

}  // namespace cssk::maskselect
