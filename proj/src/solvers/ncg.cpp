#include "cssk/solvers/ncg.hpp"

#include <cmath>

namespace cssk::solvers {

namespace {

double dot(const Image& a, const Image& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

double norm2(const Image& a) { return std::sqrt(dot(a, a)); }

}  // namespace

NcgResult ncg_solve(const MeasurementSet& meas, const sensing::MeasurementOperator& op,
                    const frontend::FrontendParams& frontend_params,
                    const SolverParams& solver_params) {
  const Objective objective(op, meas, frontend_params, solver_params);
  const SolverParams& p = objective.params();
  const double armijo_c1 = 1e-4;

  NcgResult result;
  result.x = objective.zero_fill_start();

  Objective::Eval eval = objective.value_and_gradient(result.x);
  double grad_norm = norm2(eval.gradient);
  const double grad_stop = p.grad_tol * std::max(1.0, grad_norm);
  result.trace.push_back({0, eval.value, grad_norm});

  Image direction(result.x.width, result.x.height);
  for (size_t i = 0; i < direction.size(); ++i) direction.data[i] = -eval.gradient.data[i];
  double grad_sq_prev = grad_norm * grad_norm;
  const size_t restart_period = result.x.size();
  size_t since_restart = 0;

  for (int iter = 1; iter <= p.max_iters; ++iter) {
    if (grad_norm <= grad_stop) break;
    if (p.epsilon_data > 0.0 && eval.data_term <= p.epsilon_data) break;

    double slope = dot(eval.gradient, direction);
    if (slope >= 0.0) {
      // Not a descent direction: restart with steepest descent.
      for (size_t i = 0; i < direction.size(); ++i) direction.data[i] = -eval.gradient.data[i];
      slope = -grad_sq_prev;
      since_restart = 0;
    }

    // Armijo backtracking.
    double alpha = p.alpha0;
    Image candidate(result.x.width, result.x.height);
    bool accepted = false;
    for (int bt = 0; bt <= p.max_backtracks; ++bt) {
      for (size_t i = 0; i < candidate.size(); ++i) {
        candidate.data[i] = result.x.data[i] + alpha * direction.data[i];
      }
      const double f_new = objective.value(candidate);
      if (f_new <= eval.value + armijo_c1 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= p.backtrack_factor;
    }
    if (!accepted) {
      result.line_search_failed = true;
      break;
    }

    result.x = std::move(candidate);
    eval = objective.value_and_gradient(result.x);
    grad_norm = norm2(eval.gradient);
    result.trace.push_back({iter, eval.value, grad_norm});
    result.iterations = iter;

    const double grad_sq = grad_norm * grad_norm;
    ++since_restart;
    if (since_restart >= restart_period) {
      for (size_t i = 0; i < direction.size(); ++i) direction.data[i] = -eval.gradient.data[i];
      since_restart = 0;
    } else {
      const double beta = grad_sq_prev > 0.0 ? grad_sq / grad_sq_prev : 0.0;
      for (size_t i = 0; i < direction.size(); ++i) {
        direction.data[i] = -eval.gradient.data[i] + beta * direction.data[i];
      }
    }
    grad_sq_prev = grad_sq;
  }

  return result;
}

}  // namespace cssk::solvers
