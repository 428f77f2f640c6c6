#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cssk/core/errors.hpp"

namespace cssk {

/// Real-valued 2D frame, row-major, arbitrary radiometric units.
/// Full sensor frames are even-sized (see validate_frame_dims); small
/// odd-sized images also occur as convolution kernels.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h);
  Image(int w, int h, std::vector<double> values);

  double& at(int row, int col) { return data[static_cast<size_t>(row) * width + col]; }
  double at(int row, int col) const { return data[static_cast<size_t>(row) * width + col]; }
  size_t size() const { return data.size(); }

  void validate() const;
};

/// Complex 2D spectrum, row-major, same indexing as Image.
struct Spectrum {
  int width = 0;
  int height = 0;
  std::vector<std::complex<double>> data;

  Spectrum() = default;
  Spectrum(int w, int h);
  Spectrum(int w, int h, std::vector<std::complex<double>> values);

  std::complex<double>& at(int row, int col) {
    return data[static_cast<size_t>(row) * width + col];
  }
  std::complex<double> at(int row, int col) const {
    return data[static_cast<size_t>(row) * width + col];
  }
  size_t size() const { return data.size(); }

  void validate() const;
};

enum class MaskKind : uint8_t { OnePerBlock = 0, Bernoulli = 1 };

/// Binary open/closed pattern over the Fourier plane. block_w x block_h is
/// the fat-pixel footprint; for OnePerBlock each tile has exactly one open
/// position.
struct Mask {
  int width = 0;
  int height = 0;
  int block_w = 1;
  int block_h = 1;
  MaskKind kind = MaskKind::OnePerBlock;
  uint64_t seed = 0;
  std::vector<uint8_t> open;  // 0 = blocked, 1 = open, row-major

  bool is_open(int row, int col) const {
    return open[static_cast<size_t>(row) * width + col] != 0;
  }
  size_t open_count() const;
  double open_fraction() const;

  /// Row-major list of open positions; the canonical measurement ordering.
  std::vector<uint32_t> open_positions() const;

  /// Deterministic content hash binding a MeasurementSet to this mask.
  /// Covers every field including the bitmap, so flipping any single
  /// open/closed bit changes the hash.
  uint64_t content_hash() const;

  void validate() const;

  bool operator==(const Mask& other) const = default;
};

/// Complex Fourier measurements at open mask positions, in row-major
/// open-position order.
struct MeasurementSet {
  std::vector<std::complex<double>> values;
  uint64_t mask_id = 0;
  double noise_sigma = 0.0;

  void validate() const;
};

/// Candidate detection: pixel location plus background-normalized score.
struct Exceedance {
  int row = 0;
  int col = 0;
  double score = 0.0;

  bool operator==(const Exceedance& other) const = default;
};

/// Exceedance ordering used everywhere: descending score, ties broken by
/// (row, col) ascending.
inline bool exceedance_less(const Exceedance& a, const Exceedance& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.row != b.row) return a.row < b.row;
  return a.col < b.col;
}

/// One point source: pixel position, amplitude, sub-pixel offsets in [0,1).
struct PointSource {
  int row = 0;
  int col = 0;
  double amplitude = 0.0;
  double dy = 0.0;
  double dx = 0.0;
};

/// Ground truth for a synthetic frame: the target plus stationary clutter.
struct SceneTruth {
  PointSource target;
  std::vector<PointSource> clutter;

  int sparsity_k() const { return 1 + static_cast<int>(clutter.size()); }
  void validate(int width, int height) const;
};

/// Frame dimensions accepted by the sensing/scene/mask pipeline: even and
/// at least 8 in both directions so fat-pixel blocks of 2, 4 and 8 can tile.
void validate_frame_dims(int width, int height);

/// Checks that measurements, mask, and frame dimensions belong together.
/// Throws DimensionMismatch or MaskBindingMismatch.
void validate_pairing(int width, int height, const Mask& mask, const MeasurementSet& meas);

}  // namespace cssk
