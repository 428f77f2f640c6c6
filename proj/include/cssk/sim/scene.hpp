#pragma once

#include <utility>
#include <vector>

#include "cssk/core/types.hpp"
#include "cssk/sim/psf.hpp"

namespace cssk::sim {

/// Parameters of a synthetic maritime frame: vertical background ramp,
/// stationary sea-glint clutter near the horizon, one sub-pixel target, and
/// Gaussian read noise.
struct SceneParams {
  int width = 640;
  int height = 128;
  double background_level = 50.0;
  int horizon_row = 64;
  int glint_count = 50;
  double glint_amp_lo = 10.0;
  double glint_amp_hi = 40.0;
  double target_amp = 8.0;
  int target_row = 60;
  int target_col = 320;
  double target_dy = 0.0;
  double target_dx = 0.0;
  double read_noise_sigma = 0.5;
  PsfModel psf;
  uint64_t seed = 0;

  void validate() const;
};

struct Scene {
  Image image;
  SceneTruth truth;
};

/// Renders one frame. Glint layout (positions and amplitudes) is drawn from
/// the "scene.layout" stream of params.seed and read noise from the
/// "scene.noise" stream indexed by frame_index, so a sequence shares one
/// static clutter layout while each frame gets independent noise.
Scene generate_scene(const SceneParams& params, uint64_t frame_index = 0);

/// Frame sequence: static scene, per-frame target amplitude
/// target_amp * (1 + u) with u uniform in [-jitter, +jitter], independent
/// read noise per frame. frame f equals generate_scene(params with jittered
/// amplitude, frame_index = f).
std::vector<Scene> generate_sequence(const SceneParams& params, int frame_count,
                                     double target_amp_jitter);

}  // namespace cssk::sim
