#include "cssk/solvers/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cssk::solvers {

void GreedyParams::validate() const {
  if (group_size < 1) raise(ErrorCode::ValidationError, "group_size must be >= 1");
  if (max_rounds < 1) raise(ErrorCode::ValidationError, "max_rounds must be >= 1");
  subtract_psf.validate();
}

namespace {

double energy(const std::vector<std::complex<double>>& values) {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s);
}

// Measurements of a unit-amplitude PSF stamped at (row, col), clipped stamps
// rejected by the caller's border handling upstream.
std::vector<std::complex<double>> unit_response(const sensing::MeasurementOperator& op,
                                                const Image& kernel, int row, int col) {
  Image stamp(op.mask().width, op.mask().height);
  const int r = kernel.height / 2;
  for (int i = -r; i <= r; ++i) {
    for (int j = -r; j <= r; ++j) {
      const int rr = row + i;
      const int cc = col + j;
      if (rr < 0 || rr >= stamp.height || cc < 0 || cc >= stamp.width) continue;
      stamp.at(rr, cc) = kernel.at(i + r, j + r);
    }
  }
  return op.forward_values(stamp);
}

}  // namespace

GreedyResult greedy_detect(const MeasurementSet& meas, const sensing::MeasurementOperator& op,
                           const frontend::FrontendParams& frontend_params,
                           const GreedyParams& greedy_params) {
  frontend_params.validate();
  greedy_params.validate();
  validate_pairing(op.mask().width, op.mask().height, op.mask(), meas);

  const double stop = greedy_params.stop_threshold.value_or(frontend_params.threshold);
  const Image kernel = sim::render_psf(greedy_params.subtract_psf);

  // Matched-filter response at zero lag to a unit source shaped like the
  // subtraction kernel; equals sum(k^2) when the two kernels coincide.
  const Image mf_kernel = sim::render_psf(frontend_params.psf);
  double autocorr_peak = 0.0;
  {
    const int rs = kernel.height / 2;
    const int rm = mf_kernel.height / 2;
    const int r = std::min(rs, rm);
    for (int i = -r; i <= r; ++i) {
      for (int j = -r; j <= r; ++j) {
        autocorr_peak += kernel.at(i + rs, j + rs) * mf_kernel.at(i + rm, j + rm);
      }
    }
  }

  GreedyResult result;
  result.residual = meas;
  std::map<std::pair<int, int>, double> best_scores;

  frontend::FrontendParams fp = frontend_params;
  fp.threshold = stop;

  for (int round = 0; round < greedy_params.max_rounds; ++round) {
    Image recon = op.adjoint_values(result.residual.values);
    frontend::FrontendResult fe = frontend_pipeline(recon, fp);
    Image filtered = frontend::matched_filter(frontend::demean(recon, fp.demean_len), fp.psf);

    // Pixels already taken stay in the detection list; re-picking them burns
    // rounds without touching the residual (a variance dip keeps its z high
    // no matter what is subtracted), so only fresh pixels count.
    size_t taken = 0;
    for (const Exceedance& xcd : fe.xcds) {
      if (taken == static_cast<size_t>(greedy_params.group_size)) break;
      auto key = std::make_pair(xcd.row, xcd.col);
      if (!best_scores.emplace(key, xcd.score).second) continue;
      ++taken;

      // Amplitude from the detection chain: the demean removes the background
      // ramp before the estimate, and open_fraction compensates the zero-fill
      // loss. Clamping to twice the residual's projection keeps the
      // subtraction on the energy-non-increasing side.
      const std::vector<std::complex<double>> response =
          unit_response(op, kernel, xcd.row, xcd.col);
      double denom = 0.0;
      double numer = 0.0;
      for (size_t k = 0; k < response.size(); ++k) {
        denom += std::norm(response[k]);
        numer += (result.residual.values[k] * std::conj(response[k])).real();
      }
      if (denom <= 0.0 || autocorr_peak <= 0.0) continue;
      const double projection = numer / denom;
      const double estimate =
          filtered.at(xcd.row, xcd.col) / (op.open_fraction() * autocorr_peak);
      const double amplitude =
          std::clamp(estimate, std::min(0.0, 2.0 * projection), std::max(0.0, 2.0 * projection));
      for (size_t k = 0; k < response.size(); ++k) {
        result.residual.values[k] -= amplitude * response[k];
      }
    }
    if (taken == 0) break;
    result.rounds = round + 1;
    result.residual_energy.push_back(energy(result.residual.values));
  }

  result.detections.reserve(best_scores.size());
  for (const auto& [key, score] : best_scores) {
    result.detections.push_back({key.first, key.second, score});
  }
  std::sort(result.detections.begin(), result.detections.end(), exceedance_less);
  return result;
}

}  // namespace cssk::solvers
