#include "cssk/solvers/ist.hpp"

#include <cmath>

namespace cssk::solvers {

double soft_threshold(double v, double tau) {
  if (tau < 0.0) raise(ErrorCode::ValidationError, "soft_threshold tau must be >= 0");
  if (v > tau) return v - tau;
  if (v < -tau) return v + tau;
  return 0.0;
}

Image soft_threshold(const Image& v, double tau) {
  if (tau < 0.0) raise(ErrorCode::ValidationError, "soft_threshold tau must be >= 0");
  Image out(v.width, v.height);
  for (size_t i = 0; i < v.size(); ++i) out.data[i] = soft_threshold(v.data[i], tau);
  return out;
}

namespace {

double surrogate(const sensing::MeasurementOperator& op, const MeasurementSet& meas,
                 const Image& x, double lambda) {
  std::vector<std::complex<double>> values = op.forward_values(x);
  double data = 0.0;
  for (size_t i = 0; i < values.size(); ++i) data += std::norm(values[i] - meas.values[i]);
  double l1 = 0.0;
  for (double v : x.data) l1 += std::abs(v);
  return 0.5 * data + lambda * l1;
}

Image ist_step(const sensing::MeasurementOperator& op, const MeasurementSet& meas,
               const Image& x, double lambda) {
  std::vector<std::complex<double>> residual = op.forward_values(x);
  for (size_t i = 0; i < residual.size(); ++i) residual[i] = meas.values[i] - residual[i];
  Image back = op.adjoint_values(residual);
  Image arg(x.width, x.height);
  for (size_t i = 0; i < arg.size(); ++i) arg.data[i] = x.data[i] + back.data[i];
  return soft_threshold(arg, lambda);
}

}  // namespace

IstResult ist_solve(const MeasurementSet& meas, const sensing::MeasurementOperator& op,
                    const SolverParams& solver_params) {
  solver_params.validate();
  validate_pairing(op.mask().width, op.mask().height, op.mask(), meas);
  const double lambda = solver_params.lambda_sparse;

  // Two-step weights from the spectral bounds of (MF)^H (MF): the largest
  // eigenvalue is 1; an under-sampled mask has zero modes, so a surrogate
  // smallest eigenvalue stands in. Full-open masks give rho = 0 and the
  // recursion collapses to plain IST.
  const bool full_mask = op.measurement_count() ==
                         static_cast<size_t>(op.mask().width) * op.mask().height;
  const double xi1 = full_mask ? 1.0 : 1e-1;
  const double rho = (1.0 - std::sqrt(xi1)) / (1.0 + std::sqrt(xi1));
  const double alpha = rho * rho + 1.0;
  const double beta = 2.0 * alpha / (1.0 + xi1);

  IstResult result;
  Image prev(op.mask().width, op.mask().height);  // x_{-1} = 0
  result.x = prev;                                // x_0 = 0
  double f_curr = surrogate(op, meas, result.x, lambda);
  result.trace.push_back({0, f_curr, 0.0});

  for (int iter = 1; iter <= solver_params.max_iters; ++iter) {
    Image shrunk = ist_step(op, meas, result.x, lambda);
    Image candidate(result.x.width, result.x.height);
    if (iter == 1) {
      candidate = shrunk;  // first step is plain IST
    } else {
      for (size_t i = 0; i < candidate.size(); ++i) {
        candidate.data[i] = (1.0 - alpha) * prev.data[i] + (alpha - beta) * result.x.data[i] +
                            beta * shrunk.data[i];
      }
    }
    double f_new = surrogate(op, meas, candidate, lambda);
    if (f_new > f_curr) {
      // Monotone fallback: the plain IST step never increases the surrogate.
      candidate = shrunk;
      f_new = surrogate(op, meas, candidate, lambda);
    }

    double step = 0.0;
    double base = 0.0;
    for (size_t i = 0; i < candidate.size(); ++i) {
      const double d = candidate.data[i] - result.x.data[i];
      step += d * d;
      base += result.x.data[i] * result.x.data[i];
    }
    prev = std::move(result.x);
    result.x = std::move(candidate);
    f_curr = f_new;
    result.trace.push_back({iter, f_curr, 0.0});
    result.iterations = iter;

    if (std::sqrt(step) <= solver_params.grad_tol * std::max(1.0, std::sqrt(base))) break;
  }
  return result;
}

}  // namespace cssk::solvers
