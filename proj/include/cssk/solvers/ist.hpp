#pragma once

#include "cssk/solvers/objective.hpp"

namespace cssk::solvers {

/// sign(v) * max(|v| - tau, 0).
double soft_threshold(double v, double tau);
Image soft_threshold(const Image& v, double tau);

struct IstResult {
  Image x;
  std::vector<SolveTracePoint> trace;  // surrogate objective per iterate
  int iterations = 0;
};

/// Two-step iterative shrinkage for the surrogate
/// 0.5*||y - MFx||^2 + lambda_sparse*||x||_1:
///
///   x_{k+1} = (1-a) x_{k-1} + (a-b) x_k + b * S(x_k + A^H(y - A x_k), lambda)
///
/// with (a, b) fixed by the spectral bounds of MF (max eigenvalue 1 under
/// the unitary FFT; a surrogate lower bound is used for under-sampled masks,
/// and a full-open mask gives a = b = 1, plain IST). A two-step candidate
/// that would increase the surrogate falls back to the plain IST step, so
/// the trace never rises.
IstResult ist_solve(const MeasurementSet& meas, const sensing::MeasurementOperator& op,
                    const SolverParams& solver_params);

}  // namespace cssk::solvers
