#pragma once

#include "cssk/solvers/objective.hpp"

namespace cssk::solvers {

struct NcgResult {
  Image x;
  std::vector<SolveTracePoint> trace;  // non-increasing objective values
  bool line_search_failed = false;
  int iterations = 0;
};

/// Nonlinear conjugate gradient (Fletcher-Reeves with periodic and
/// non-descent restarts) with Armijo backtracking, starting from the
/// zero-fill reconstruction. On a line-search failure the best iterate so
/// far is returned with line_search_failed set.
NcgResult ncg_solve(const MeasurementSet& meas, const sensing::MeasurementOperator& op,
                    const frontend::FrontendParams& frontend_params,
                    const SolverParams& solver_params);

}  // namespace cssk::solvers
