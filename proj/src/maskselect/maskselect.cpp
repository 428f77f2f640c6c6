#include "cssk/maskselect/maskselect.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "cssk/core/parallel.hpp"
#include "cssk/core/rng.hpp"
#include "cssk/eval/roc.hpp"
#include "cssk/sensing/operator.hpp"

namespace cssk::maskselect {

Mask generate_mask(int width, int height, int block_w, int block_h, MaskKind kind,
                   uint64_t seed) {
  validate_frame_dims(width, height);
  if (block_w < 1 || block_h < 1) {
    raise(ErrorCode::ValidationError, "block dimensions must be >= 1");
  }
  if (kind == MaskKind::OnePerBlock && (width % block_w != 0 || height % block_h != 0)) {
    raise(ErrorCode::BlockNotDivisible,
          "blocks " + std::to_string(block_w) + "x" + std::to_string(block_h) +
              " do not tile a " + std::to_string(width) + "x" + std::to_string(height) +
              " frame");
  }

  Mask mask;
  mask.width = width;
  mask.height = height;
  mask.block_w = block_w;
  mask.block_h = block_h;
  mask.kind = kind;
  mask.seed = seed;
  mask.open.assign(static_cast<size_t>(width) * height, 0);

  Rng rng(derive_seed(seed, "mask"));
  if (kind == MaskKind::OnePerBlock) {
    for (int br = 0; br < height / block_h; ++br) {
      for (int bc = 0; bc < width / block_w; ++bc) {
        const int pick = rng.uniform_int(block_w * block_h);
        const int r = br * block_h + pick / block_w;
        const int c = bc * block_w + pick % block_w;
        mask.open[static_cast<size_t>(r) * width + c] = 1;
      }
    }
  } else {
    const double p = 1.0 / (static_cast<double>(block_w) * block_h);
    for (auto& bit : mask.open) bit = rng.uniform01() < p ? 1 : 0;
    if (mask.open_count() == 0) {
      // An all-closed mask measures nothing; open one deterministic position.
      const size_t pos = static_cast<size_t>(rng.uniform01() * mask.open.size());
      mask.open[std::min(pos, mask.open.size() - 1)] = 1;
    }
  }
  mask.validate();
  return mask;
}

MaskScore score_mask_fa(const Mask& mask, const Image& calib_frame, const SceneTruth& truth,
                        const frontend::FrontendParams& frontend_params) {
  sensing::MeasurementOperator op(mask);
  MeasurementSet y = op.forward(calib_frame);
  Image recon = op.zero_fill_reconstruct(y);

  frontend::FrontendParams capture_all = frontend_params;
  capture_all.threshold = std::numeric_limits<double>::lowest();
  frontend::FrontendResult fe = frontend_pipeline(recon, capture_all);

  MaskScore score;
  score.mask_seed = mask.seed;
  score.fa_count = eval::xcds_above_target(fe.xcds, truth, 1).value_or(kTargetNotDetected);
  return score;
}

MaskScore score_mask_mse(const Mask& mask, const Image& calib_frame) {
  sensing::MeasurementOperator op(mask);
  MeasurementSet y = op.forward(calib_frame);
  Image recon = op.zero_fill_reconstruct(y);

  const double gain = 1.0 / op.open_fraction();
  double sum = 0.0;
  for (size_t i = 0; i < recon.data.size(); ++i) {
    const double diff = recon.data[i] * gain - calib_frame.data[i];
    sum += diff * diff;
  }
  MaskScore score;
  score.mask_seed = mask.seed;
  score.recon_mse = recon.data.empty() ? 0.0 : sum / recon.data.size();
  return score;
}

std::pair<Mask, MaskScore> select_best_mask(std::span<const uint64_t> candidates,
                                            const Image& calib_frame, const SceneTruth& truth,
                                            const MaskSelectConfig& config) {
  if (candidates.empty()) raise(ErrorCode::EmptyCandidates, "no candidate mask seeds");
  calib_frame.validate();

  std::vector<MaskScore> scores(candidates.size());
  parallel_for(
      candidates.size(),
      [&](size_t i) {
        Mask mask = generate_mask(calib_frame.width, calib_frame.height, config.block_w,
                                  config.block_h, config.kind, candidates[i]);
        scores[i] = config.metric == MaskMetric::FaCount
                        ? score_mask_fa(mask, calib_frame, truth, config.frontend)
                        : score_mask_mse(mask, calib_frame);
      },
      config.max_threads < 0 ? 0u : static_cast<unsigned>(config.max_threads));

  size_t best = 0;
  auto better = [&](const MaskScore& a, const MaskScore& b) {
    if (config.metric == MaskMetric::FaCount) {
      if (*a.fa_count != *b.fa_count) return *a.fa_count < *b.fa_count;
    } else {
      if (*a.recon_mse != *b.recon_mse) return *a.recon_mse < *b.recon_mse;
    }
    return a.mask_seed < b.mask_seed;
  };
  for (size_t i = 1; i < scores.size(); ++i) {
    if (better(scores[i], scores[best])) best = i;
  }

  Mask mask = generate_mask(calib_frame.width, calib_frame.height, config.block_w,
                            config.block_h, config.kind, candidates[best]);
  return {std::move(mask), scores[best]};
}

}  // namespace cssk::maskselect
