#pragma once

#include <span>
#include <string>
#include <vector>

#include "cssk/core/types.hpp"
#include "cssk/eval/roc.hpp"
#include "cssk/maskselect/maskselect.hpp"
#include "cssk/solvers/objective.hpp"

namespace cssk::io {

/// Shortest decimal form that parses back to the same double; "nan"/"inf"
/// for non-finite values.
std::string format_double(double v);

/// Header: threshold,detections,frames,false_alarms,method. One row per
/// (method, threshold), methods in report order.
void write_roc_csv(const std::string& path, const eval::CompareReport& report);

/// Header: method,frames,total_seconds,per_frame_seconds.
void write_timing_csv(const std::string& path, const eval::CompareReport& report);

/// Header: iter,objective,gradient_norm.
void write_trace_csv(const std::string& path, const std::vector<solvers::SolveTracePoint>& trace);

/// Header: frame,rank,row,col,score. Rank is the position in the sorted
/// exceedance list, starting at 0.
void write_exceedances_csv(const std::string& path,
                           std::span<const std::vector<Exceedance>> per_frame);

/// Header: kind,row,col,amplitude,dy,dx with kind in {target, clutter}.
void write_truth_csv(const std::string& path, const SceneTruth& truth);

/// Header: mask_seed,fa_count,recon_mse; unpopulated metrics stay empty.
void write_mask_scores_csv(const std::string& path,
                           const std::vector<maskselect::MaskScore>& scores);

}  // namespace cssk::io
