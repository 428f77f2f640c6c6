#pragma once

#include <optional>

#include "cssk/core/types.hpp"
#include "cssk/frontend/pipeline.hpp"
#include "cssk/sensing/operator.hpp"

namespace cssk::solvers {

/// Controls for the CLEAN-style greedy detector. stop_threshold left unset
/// defaults to the frontend threshold.
struct GreedyParams {
  int group_size = 5;
  int max_rounds = 20;
  std::optional<double> stop_threshold;
  sim::PsfModel subtract_psf;

  void validate() const;
};

struct GreedyResult {
  std::vector<Exceedance> detections;  // sorted by (-score, row, col), unique pixels
  MeasurementSet residual;
  std::vector<double> residual_energy;  // ||residual||_2 after each round
  int rounds = 0;
};

/// Iterative brightest-point removal on the zero-fill reconstruction: each
/// round reconstructs the residual measurements, runs the detection front
/// end, keeps the top group_size not-yet-detected exceedances at or above the
/// stop threshold, and subtracts each one's estimated PSF response from the
/// measurements. The amplitude estimate is the matched-filter value divided
/// by (open fraction * kernel autocorrelation peak), clamped so the residual
/// energy never increases.
GreedyResult greedy_detect(const MeasurementSet& meas, const sensing::MeasurementOperator& op,
                           const frontend::FrontendParams& frontend_params,
                           const GreedyParams& greedy_params);

}  // namespace cssk::solvers
