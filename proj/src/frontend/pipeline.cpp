#include "cssk/frontend/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cssk::frontend {

void FrontendParams::validate() const {
  if (demean_len < 1 || demean_len % 2 == 0) {
    raise(ErrorCode::ValidationError, "demean_len must be odd and >= 1");
  }
  psf.validate();
  if (var_window < 1 || var_window % 2 == 0) {
    raise(ErrorCode::ValidationError, "var_window must be odd and >= 1");
  }
  if (var_guard < 1 || var_guard % 2 == 0 || var_guard >= var_window) {
    raise(ErrorCode::ValidationError, "var_guard must be odd and < var_window");
  }
  if (var_floor < 0.0 || !std::isfinite(var_floor)) {
    raise(ErrorCode::ValidationError, "var_floor must be finite and >= 0 (0 = automatic)");
  }
  if (!std::isfinite(threshold)) raise(ErrorCode::ValidationError, "threshold must be finite");
}

Image demean(const Image& img, int demean_len) {
  if (demean_len % 2 == 0 || demean_len < 1) {
    raise(ErrorCode::ValidationError, "demean_len must be odd and >= 1");
  }
  if (demean_len > img.width) {
    raise(ErrorCode::KernelTooLong, "demean_len " + std::to_string(demean_len) +
                                        " exceeds image width " + std::to_string(img.width));
  }
  const int half = demean_len / 2;
  const double inv_len = 1.0 / demean_len;
  Image out(img.width, img.height);
  for (int r = 0; r < img.height; ++r) {
    // Sliding window sum along the row, zero-padded.
    double window = 0.0;
    for (int c = 0; c <= std::min(half, img.width - 1); ++c) window += img.at(r, c);
    for (int c = 0; c < img.width; ++c) {
      out.at(r, c) = img.at(r, c) - window * inv_len;
      const int incoming = c + half + 1;
      const int outgoing = c - half;
      if (incoming < img.width) window += img.at(r, incoming);
      if (outgoing >= 0) window -= img.at(r, outgoing);
    }
  }
  return out;
}

Image demean_adjoint(const Image& img, int demean_len) {
  // Kernel delta - box/L is symmetric, so the transpose is the same operator.
  return demean(img, demean_len);
}

Image correlate2d(const Image& img, const Image& kernel) {
  if (kernel.width % 2 == 0 || kernel.height % 2 == 0) {
    raise(ErrorCode::ValidationError, "correlation kernel must be odd-sized");
  }
  const int rh = kernel.height / 2;
  const int rw = kernel.width / 2;
  Image out(img.width, img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      double acc = 0.0;
      const int i_lo = std::max(-rh, -r);
      const int i_hi = std::min(rh, img.height - 1 - r);
      const int j_lo = std::max(-rw, -c);
      const int j_hi = std::min(rw, img.width - 1 - c);
      for (int i = i_lo; i <= i_hi; ++i) {
        for (int j = j_lo; j <= j_hi; ++j) {
          acc += kernel.at(i + rh, j + rw) * img.at(r + i, c + j);
        }
      }
      out.at(r, c) = acc;
    }
  }
  return out;
}

Image correlate2d_adjoint(const Image& img, const Image& kernel) {
  Image rotated(kernel.width, kernel.height);
  for (int i = 0; i < kernel.height; ++i) {
    for (int j = 0; j < kernel.width; ++j) {
      rotated.at(i, j) = kernel.at(kernel.height - 1 - i, kernel.width - 1 - j);
    }
  }
  return correlate2d(img, rotated);
}

Image matched_filter(const Image& img, const sim::PsfModel& psf) {
  return correlate2d(img, sim::render_psf(psf));
}

Image local_variance(const Image& img, int var_window, int var_guard, double var_floor) {
  if (var_window % 2 == 0 || var_guard % 2 == 0 || var_guard >= var_window || var_guard < 1) {
    raise(ErrorCode::ValidationError, "variance windows must be odd with guard < window");
  }
  const int W = img.width;
  const int H = img.height;

  // Integral images of x and x^2 with a zero top row / left column.
  std::vector<double> sum((W + 1) * (H + 1), 0.0);
  std::vector<double> sumsq((W + 1) * (H + 1), 0.0);
  auto idx = [W](int r, int c) { return static_cast<size_t>(r) * (W + 1) + c; };
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      const double v = img.at(r, c);
      sum[idx(r + 1, c + 1)] = v + sum[idx(r, c + 1)] + sum[idx(r + 1, c)] - sum[idx(r, c)];
      sumsq[idx(r + 1, c + 1)] =
          v * v + sumsq[idx(r, c + 1)] + sumsq[idx(r + 1, c)] - sumsq[idx(r, c)];
    }
  }
  // Sum over the clipped box [r0,r1] x [c0,c1], inclusive.
  auto box = [&](const std::vector<double>& table, int r0, int r1, int c0, int c1,
                 long& count) -> double {
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, H - 1);
    c1 = std::min(c1, W - 1);
    if (r0 > r1 || c0 > c1) {
      count = 0;
      return 0.0;
    }
    count = static_cast<long>(r1 - r0 + 1) * (c1 - c0 + 1);
    return table[idx(r1 + 1, c1 + 1)] - table[idx(r0, c1 + 1)] - table[idx(r1 + 1, c0)] +
           table[idx(r0, c0)];
  };

  const int hw = var_window / 2;
  const int hg = var_guard / 2;
  Image out(W, H);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      long n_win = 0, n_guard = 0, tmp = 0;
      const double s_win = box(sum, r - hw, r + hw, c - hw, c + hw, n_win);
      const double q_win = box(sumsq, r - hw, r + hw, c - hw, c + hw, tmp);
      const double s_guard = box(sum, r - hg, r + hg, c - hg, c + hg, n_guard);
      const double q_guard = box(sumsq, r - hg, r + hg, c - hg, c + hg, tmp);
      const long n = n_win - n_guard;
      double var = var_floor;
      if (n > 0) {
        const double s = s_win - s_guard;
        const double q = q_win - q_guard;
        const double mean = s / n;
        var = std::max(q / n - mean * mean, var_floor);
      }
      out.at(r, c) = var;
    }
  }
  return out;
}

Image background_normalize(const Image& filtered, const Image& variance) {
  if (filtered.width != variance.width || filtered.height != variance.height) {
    raise(ErrorCode::DimensionMismatch, "filtered and variance maps differ in size");
  }
  Image out(filtered.width, filtered.height);
  for (size_t i = 0; i < filtered.size(); ++i) {
    out.data[i] = filtered.data[i] / std::sqrt(variance.data[i]);
  }
  return out;
}

std::vector<Exceedance> threshold_exceedances(const Image& norm_img, double threshold,
                                              int border_margin) {
  std::vector<Exceedance> xcds;
  const int W = norm_img.width;
  const int H = norm_img.height;
  const int m = std::max(0, border_margin);
  for (int r = m; r < H - m; ++r) {
    for (int c = m; c < W - m; ++c) {
      const double v = norm_img.at(r, c);
      if (!(v >= threshold)) continue;
      bool is_max = true;
      bool strictly_above_one = false;
      for (int i = -1; i <= 1 && is_max; ++i) {
        for (int j = -1; j <= 1; ++j) {
          if (i == 0 && j == 0) continue;
          const int rr = r + i;
          const int cc = c + j;
          if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
          const double nb = norm_img.at(rr, cc);
          if (v < nb) {
            is_max = false;
            break;
          }
          if (v > nb) strictly_above_one = true;
        }
      }
      if (is_max && strictly_above_one) xcds.push_back({r, c, v});
    }
  }
  std::sort(xcds.begin(), xcds.end(), exceedance_less);
  return xcds;
}

double effective_var_floor(const FrontendParams& params, const Image& filtered) {
  if (params.var_floor > 0.0) return params.var_floor;
  double mean = 0.0;
  for (double v : filtered.data) mean += v;
  mean /= static_cast<double>(filtered.size());
  double var = 0.0;
  for (double v : filtered.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(filtered.size());
  return std::max(1e-6 * var, 1e-300);
}

FrontendResult frontend_pipeline(const Image& img, const FrontendParams& params) {
  params.validate();
  Image demeaned = demean(img, params.demean_len);
  Image filtered = matched_filter(demeaned, params.psf);
  const double floor = effective_var_floor(params, filtered);
  Image variance = local_variance(filtered, params.var_window, params.var_guard, floor);
  FrontendResult result;
  result.norm_img = background_normalize(filtered, variance);
  result.xcds =
      threshold_exceedances(result.norm_img, params.threshold, params.psf.kernel_radius);
  return result;
}

}  // namespace cssk::frontend
