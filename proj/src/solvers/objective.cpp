#include "cssk/solvers/objective.hpp"

#include <cmath>

namespace cssk::solvers {

void SolverParams::validate() const {
  auto finite_nonneg = [](double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
      raise(ErrorCode::ValidationError, std::string(what) + " must be finite and >= 0");
    }
  };
  finite_nonneg(lambda_sparse, "lambda_sparse");
  finite_nonneg(lambda_tv, "lambda_tv");
  finite_nonneg(epsilon_data, "epsilon_data");
  if (!(smooth_mu > 0.0)) raise(ErrorCode::ValidationError, "smooth_mu must be > 0");
  if (max_iters < 1) raise(ErrorCode::ValidationError, "max_iters must be >= 1");
  if (!(grad_tol >= 0.0)) raise(ErrorCode::ValidationError, "grad_tol must be >= 0");
  if (!(alpha0 > 0.0)) raise(ErrorCode::ValidationError, "alpha0 must be > 0");
  if (!(backtrack_factor > 0.0) || !(backtrack_factor < 1.0)) {
    raise(ErrorCode::ValidationError, "backtrack_factor must be in (0,1)");
  }
  if (max_backtracks < 1) raise(ErrorCode::ValidationError, "max_backtracks must be >= 1");
}

Objective::Objective(const sensing::MeasurementOperator& op, const MeasurementSet& meas,
                     const frontend::FrontendParams& frontend_params,
                     const SolverParams& solver_params)
    : op_(op), meas_(meas), params_(solver_params), frontend_params_(frontend_params) {
  params_.validate();
  frontend_params_.validate();
  validate_pairing(op.mask().width, op.mask().height, op.mask(), meas);

  psf_kernel_ = sim::render_psf(frontend_params_.psf);
  zero_fill_ = op_.adjoint(meas_);

  // Freeze the detection chain's normalization: the standard-deviation map
  // of the matched-filtered zero-fill reconstruction.
  Image filtered =
      frontend::matched_filter(frontend::demean(zero_fill_, frontend_params_.demean_len),
                               frontend_params_.psf);
  const double floor = frontend::effective_var_floor(frontend_params_, filtered);
  Image variance = frontend::local_variance(filtered, frontend_params_.var_window,
                                            frontend_params_.var_guard, floor);
  std_map_ = Image(variance.width, variance.height);
  for (size_t i = 0; i < variance.size(); ++i) std_map_.data[i] = std::sqrt(variance.data[i]);
}

Objective::Eval Objective::value_and_gradient(const Image& x) const {
  if (x.width != op_.mask().width || x.height != op_.mask().height) {
    raise(ErrorCode::DimensionMismatch, "solver iterate does not match operator dimensions");
  }
  const double mu2 = params_.smooth_mu * params_.smooth_mu;
  Eval eval;
  eval.gradient = Image(x.width, x.height);

  // Data term 0.5*||y - MFx||^2; gradient (MF)^H (MFx - y).
  {
    std::vector<std::complex<double>> residual = op_.forward_values(x);
    double term = 0.0;
    for (size_t i = 0; i < residual.size(); ++i) {
      residual[i] -= meas_.values[i];
      term += std::norm(residual[i]);
    }
    eval.data_term = 0.5 * term;
    eval.value += eval.data_term;
    Image g = op_.adjoint_values(residual);
    for (size_t i = 0; i < g.size(); ++i) eval.gradient.data[i] += g.data[i];
  }

  // Detection-domain L1 term, smoothed.
  if (params_.lambda_sparse > 0.0) {
    Image u = frontend::matched_filter(frontend::demean(x, frontend_params_.demean_len),
                                       frontend_params_.psf);
    Image du(u.width, u.height);
    double term = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
      const double t = u.data[i] / std_map_.data[i];
      const double root = std::sqrt(t * t + mu2);
      term += root;
      du.data[i] = (t / root) / std_map_.data[i];
    }
    eval.value += params_.lambda_sparse * term;
    Image g = frontend::demean_adjoint(
        frontend::correlate2d_adjoint(du, psf_kernel_), frontend_params_.demean_len);
    for (size_t i = 0; i < g.size(); ++i) {
      eval.gradient.data[i] += params_.lambda_sparse * g.data[i];
    }
  }

  // Isotropic smoothed TV with forward differences, Neumann boundary.
  if (params_.lambda_tv > 0.0) {
    const int W = x.width;
    const int H = x.height;
    double term = 0.0;
    Image wx(W, H);  // dx / root
    Image wy(W, H);  // dy / root
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        const double dx = (c + 1 < W) ? x.at(r, c + 1) - x.at(r, c) : 0.0;
        const double dy = (r + 1 < H) ? x.at(r + 1, c) - x.at(r, c) : 0.0;
        const double root = std::sqrt(dx * dx + dy * dy + mu2);
        term += root;
        wx.at(r, c) = dx / root;
        wy.at(r, c) = dy / root;
      }
    }
    eval.value += params_.lambda_tv * term;
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        double g = 0.0;
        if (c + 1 < W) g -= wx.at(r, c);
        if (r + 1 < H) g -= wy.at(r, c);
        if (c > 0) g += wx.at(r, c - 1);
        if (r > 0) g += wy.at(r - 1, c);
        eval.gradient.at(r, c) += params_.lambda_tv * g;
      }
    }
  }

  return eval;
}

double Objective::value(const Image& x) const {
  // Value-only path for line searches: skips the adjoint chains.
  const double mu2 = params_.smooth_mu * params_.smooth_mu;
  double total = 0.0;

  std::vector<std::complex<double>> residual = op_.forward_values(x);
  double term = 0.0;
  for (size_t i = 0; i < residual.size(); ++i) term += std::norm(residual[i] - meas_.values[i]);
  total += 0.5 * term;

  if (params_.lambda_sparse > 0.0) {
    Image u = frontend::matched_filter(frontend::demean(x, frontend_params_.demean_len),
                                       frontend_params_.psf);
    double l1 = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
      const double t = u.data[i] / std_map_.data[i];
      l1 += std::sqrt(t * t + mu2);
    }
    total += params_.lambda_sparse * l1;
  }

  if (params_.lambda_tv > 0.0) {
    const int W = x.width;
    const int H = x.height;
    double tv = 0.0;
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        const double dx = (c + 1 < W) ? x.at(r, c + 1) - x.at(r, c) : 0.0;
        const double dy = (r + 1 < H) ? x.at(r + 1, c) - x.at(r, c) : 0.0;
        tv += std::sqrt(dx * dx + dy * dy + mu2);
      }
    }
    total += params_.lambda_tv * tv;
  }
  return total;
}

Objective::Eval objective(const Image& x, const MeasurementSet& meas,
                          const sensing::MeasurementOperator& op,
                          const frontend::FrontendParams& frontend_params,
                          const SolverParams& solver_params) {
  return Objective(op, meas, frontend_params, solver_params).value_and_gradient(x);
}

}  // namespace cssk::solvers
