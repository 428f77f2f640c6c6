#pragma once

#include "cssk/core/types.hpp"
#include "cssk/frontend/pipeline.hpp"
#include "cssk/sensing/operator.hpp"

namespace cssk::solvers {

/// One row of a solver convergence trace.
struct SolveTracePoint {
  int iter = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
};

/// Parameters shared by the iterative solvers.
struct SolverParams {
  double lambda_sparse = 1e-4;  // weight of the detection-domain L1 term
  double lambda_tv = 1e-4;      // weight of the total-variation term
  double epsilon_data = 0.0;    // stop once 0.5*||y - MFx||^2 <= epsilon_data (0 = run to tol)
  double smooth_mu = 1e-6;      // |t| smoothed as sqrt(t^2 + mu^2)
  int max_iters = 100;
  double grad_tol = 1e-6;  // stop when ||grad|| <= grad_tol * max(1, ||grad_0||)
  double alpha0 = 1.0;
  double backtrack_factor = 0.5;
  int max_backtracks = 20;

  void validate() const;
};

/// Smoothed composite objective
///
///   E(x) = lambda_sparse * sum phi(T_lin(x))
///        + lambda_tv * sum sqrt(Dx^2 + Dy^2 + mu^2)
///        + 0.5 * ||y - MFx||^2
///
/// with phi(t) = sqrt(t^2 + mu^2). T_lin is the linearized detection chain
/// demean -> matched filter -> divide by a standard-deviation map frozen
/// from the zero-fill reconstruction of the measurements, so the whole
/// objective is smooth and its gradient exact. TV uses isotropic forward
/// differences with Neumann boundaries.
class Objective {
 public:
  Objective(const sensing::MeasurementOperator& op, const MeasurementSet& meas,
            const frontend::FrontendParams& frontend_params, const SolverParams& solver_params);

  struct Eval {
    double value = 0.0;
    Image gradient;
    double data_term = 0.0;
  };

  Eval value_and_gradient(const Image& x) const;
  double value(const Image& x) const;

  /// Starting point used by the solvers: the zero-fill reconstruction.
  const Image& zero_fill_start() const { return zero_fill_; }
  const Image& frozen_std_map() const { return std_map_; }
  const SolverParams& params() const { return params_; }

 private:
  const sensing::MeasurementOperator& op_;
  const MeasurementSet& meas_;
  SolverParams params_;
  frontend::FrontendParams frontend_params_;
  Image psf_kernel_;
  Image zero_fill_;
  Image std_map_;
};

/// One-shot evaluation of the objective and its gradient.
Objective::Eval objective(const Image& x, const MeasurementSet& meas,
                          const sensing::MeasurementOperator& op,
                          const frontend::FrontendParams& frontend_params,
                          const SolverParams& solver_params);

}  // namespace cssk::solvers
