#pragma once

#include <string>
#include <vector>

#include "cssk/core/types.hpp"
#include "cssk/eval/roc.hpp"
#include "cssk/frontend/pipeline.hpp"
#include "cssk/maskselect/maskselect.hpp"
#include "cssk/sim/scene.hpp"
#include "cssk/solvers/greedy.hpp"
#include "cssk/solvers/objective.hpp"

namespace cssk::io {

struct MaskParams {
  int block_w = 2;
  int block_h = 2;
  MaskKind kind = MaskKind::OnePerBlock;
  uint64_t seed = 1;
};

/// One run's worth of knobs. JSON keys mirror the field names; every key is
/// optional and falls back to the default. scene.seed and mask.seed default
/// to the global seed unless set explicitly, so one seed drives the whole
/// run.
struct RunConfig {
  uint64_t seed = 1;
  std::string out_dir = "out";
  int frames = 1;
  double target_jitter = 0.0;
  double measure_noise_sigma = 0.0;
  std::vector<std::string> methods = {"conventional-full-res", "cs-zerofill"};
  sim::SceneParams scene;
  MaskParams mask;
  frontend::FrontendParams frontend;
  solvers::SolverParams solver;
  solvers::GreedyParams greedy;
  eval::EvalConfig eval;

  void validate() const;
};

/// Parses JSON text; throws ConfigError on malformed JSON or bad values.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& config);
void save_run_config(const RunConfig& config, const std::string& path);

}  // namespace cssk::io
