#include "cssk/sim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cssk/core/rng.hpp"

namespace cssk::sim {

void SceneParams::validate() const {
  validate_frame_dims(width, height);
  psf.validate();
  if (horizon_row < 0 || horizon_row >= height) {
    raise(ErrorCode::ValidationError, "horizon_row outside frame");
  }
  if (glint_count < 0) raise(ErrorCode::ValidationError, "glint_count must be >= 0");
  if (!(glint_amp_lo > 0.0) || glint_amp_hi < glint_amp_lo) {
    raise(ErrorCode::ValidationError, "glint amplitude range must satisfy 0 < lo <= hi");
  }
  if (!(target_amp > 0.0) || !std::isfinite(target_amp)) {
    raise(ErrorCode::ValidationError, "target_amp must be > 0");
  }
  if (target_row < 0 || target_row >= height || target_col < 0 || target_col >= width) {
    raise(ErrorCode::ValidationError, "target outside frame");
  }
  if (target_dy < 0.0 || target_dy >= 1.0 || target_dx < 0.0 || target_dx >= 1.0) {
    raise(ErrorCode::ValidationError, "target sub-pixel offset outside [0,1)");
  }
  if (read_noise_sigma < 0.0 || !std::isfinite(read_noise_sigma)) {
    raise(ErrorCode::ValidationError, "read_noise_sigma must be finite and >= 0");
  }
  if (!(background_level >= 0.0) || !std::isfinite(background_level)) {
    raise(ErrorCode::ValidationError, "background_level must be finite and >= 0");
  }
}

namespace {

void stamp_source(Image& img, const PsfModel& psf, const PointSource& src) {
  const int r = psf.kernel_radius;
  if (src.row - r < 0 || src.row + r >= img.height || src.col - r < 0 ||
      src.col + r >= img.width) {
    raise(ErrorCode::SourceOutOfBounds,
          "source at (" + std::to_string(src.row) + "," + std::to_string(src.col) +
              ") with kernel radius " + std::to_string(r) + " exceeds frame");
  }
  Image kernel = render_psf(psf, src.dy, src.dx);
  for (int i = -r; i <= r; ++i) {
    for (int j = -r; j <= r; ++j) {
      img.at(src.row + i, src.col + j) += src.amplitude * kernel.at(i + r, j + r);
    }
  }
}

std::vector<PointSource> draw_glints(const SceneParams& p) {
  Rng rng(derive_seed(p.seed, "scene.layout"));
  const int r = p.psf.kernel_radius;
  const int band = std::max(1, p.height / 8);
  const int row_lo = std::clamp(p.horizon_row - band, r, p.height - 1 - r);
  const int row_hi = std::clamp(p.horizon_row + band, r, p.height - 1 - r);
  std::vector<PointSource> glints(p.glint_count);
  for (auto& g : glints) {
    g.row = row_lo + rng.uniform_int(row_hi - row_lo + 1);
    g.col = r + rng.uniform_int(p.width - 2 * r);
    g.amplitude = rng.uniform(p.glint_amp_lo, p.glint_amp_hi);
  }
  return glints;
}

}  // namespace

Scene generate_scene(const SceneParams& params, uint64_t frame_index) {
  params.validate();
  Scene scene;
  scene.image = Image(params.width, params.height);

  // Vertical ramp: dark sky at the top, brighter sea at the bottom.
  for (int r = 0; r < params.height; ++r) {
    const double bg = params.background_level * (0.5 + static_cast<double>(r) / (params.height - 1));
    for (int c = 0; c < params.width; ++c) scene.image.at(r, c) = bg;
  }

  scene.truth.target = {params.target_row, params.target_col, params.target_amp,
                        params.target_dy, params.target_dx};
  scene.truth.clutter = draw_glints(params);

  stamp_source(scene.image, params.psf, scene.truth.target);
  for (const auto& g : scene.truth.clutter) stamp_source(scene.image, params.psf, g);

  if (params.read_noise_sigma > 0.0) {
    Rng rng(derive_seed(params.seed, "scene.noise", frame_index));
    for (auto& v : scene.image.data) v += params.read_noise_sigma * rng.normal();
  }

  scene.truth.validate(params.width, params.height);
  return scene;
}

std::vector<Scene> generate_sequence(const SceneParams& params, int frame_count,
                                     double target_amp_jitter) {
  if (frame_count < 1) raise(ErrorCode::ValidationError, "frame_count must be >= 1");
  if (target_amp_jitter < 0.0 || target_amp_jitter >= 1.0) {
    raise(ErrorCode::ValidationError, "target_amp_jitter must be in [0,1)");
  }
  Rng amp_rng(derive_seed(params.seed, "scene.amp-jitter"));
  std::vector<Scene> frames;
  frames.reserve(frame_count);
  for (int f = 0; f < frame_count; ++f) {
    SceneParams pf = params;
    if (target_amp_jitter > 0.0) {
      const double u = amp_rng.uniform(-target_amp_jitter, target_amp_jitter);
      pf.target_amp = params.target_amp * (1.0 + u);
    }
    frames.push_back(generate_scene(pf, static_cast<uint64_t>(f)));
  }
  return frames;
}

}  // namespace cssk::sim
