#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cssk/core/types.hpp"
#include "cssk/frontend/pipeline.hpp"
#include "cssk/sim/scene.hpp"
#include "cssk/solvers/greedy.hpp"
#include "cssk/solvers/ist.hpp"
#include "cssk/solvers/ncg.hpp"

namespace cssk::eval {

struct RocPoint {
  double threshold = 0.0;
  int detections = 0;          // frames where the target was detected
  long long false_alarms = 0;  // summed over frames
};

struct EvalConfig {
  int match_radius = 1;            // Chebyshev, in pixels
  std::vector<double> thresholds;  // strictly descending; empty = automatic grid
  int threshold_count = 64;
  int max_threads = 0;

  void validate() const;
};

/// Count of exceedances scoring strictly above the best-scoring exceedance
/// within match_radius of the true target pixel; nullopt when no exceedance
/// matches. Expects the list sorted descending by score.
std::optional<long long> xcds_above_target(const std::vector<Exceedance>& xcds,
                                           const SceneTruth& truth, int match_radius);

/// Maps a frame to its candidate exceedance list (every local maximum, no
/// threshold applied); the frame index seeds per-frame measurement noise.
using FramePipeline = std::function<std::vector<Exceedance>(const Image& frame, int frame_index)>;

/// count thresholds spaced geometrically from the maximum score down to the
/// 50th percentile, strictly descending. Falls back to linear spacing when
/// the percentile range touches zero or below.
std::vector<double> auto_threshold_grid(std::vector<double> scores, int count);

/// Runs the pipeline once per frame (frames in parallel), then sweeps the
/// thresholds over the cached candidate lists: at threshold t a frame counts
/// as detected when some candidate within match_radius of its true target
/// scores >= t, and every candidate scoring >= t away from the target is a
/// false alarm (clutter detections count as false alarms).
std::vector<RocPoint> roc_curve(const std::vector<sim::Scene>& frames,
                                const FramePipeline& pipeline, const EvalConfig& config);

enum class Method { ConventionalFullRes, CsZerofill, CsGreedy, CsNcgTv, CsIst };

/// Throws UnknownMethod for anything outside {conventional-full-res,
/// cs-zerofill, cs-greedy, cs-ncg-tv, cs-ist}.
Method parse_method(const std::string& name);
std::string method_name(Method method);

struct CompareConfig {
  Mask mask;  // sampling pattern for the cs-* methods
  frontend::FrontendParams frontend;
  solvers::SolverParams solver;
  solvers::GreedyParams greedy;
  EvalConfig eval;
  double measure_noise_sigma = 0.0;
  uint64_t seed = 0;
};

/// The per-frame candidate pipeline of one method: the conventional method
/// runs the front end on the raw frame; cs methods measure the frame
/// through config.mask, reconstruct (zero-fill, greedy, ncg-tv or ist), and
/// run the same front end on the reconstruction. Greedy reports its own
/// detections directly.
FramePipeline make_pipeline(Method method, const CompareConfig& config);

struct MethodReport {
  std::string method;
  std::vector<RocPoint> roc;
  double wall_seconds = 0.0;
};

struct CompareReport {
  std::vector<MethodReport> methods;
  std::vector<double> thresholds;  // shared grid, strictly descending
  int frame_count = 0;
};

/// Evaluates every method on the same frames and a shared threshold grid
/// (config.eval.thresholds, or the automatic grid pooled over all methods'
/// scores). Wall-clock covers each method's per-frame candidate pass.
CompareReport compare_methods(const std::vector<sim::Scene>& frames,
                              const std::vector<std::string>& methods,
                              const CompareConfig& config);

}  // namespace cssk::eval
