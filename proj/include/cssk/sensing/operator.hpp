#pragma once

#include <span>

#include "cssk/core/types.hpp"
#include "cssk/sensing/fft.hpp"

namespace cssk::sensing {

/// The measurement operator A = M o F: unitary 2D Fourier transform followed
/// by subsampling at the open mask positions in row-major order. Immutable
/// and safe to share across threads.
class MeasurementOperator {
 public:
  explicit MeasurementOperator(Mask mask);

  const Mask& mask() const { return mask_; }
  uint64_t mask_id() const { return mask_id_; }
  size_t measurement_count() const { return open_positions_.size(); }
  double open_fraction() const { return open_fraction_; }

  /// y = (M o F) x plus complex Gaussian noise (std noise_sigma per
  /// real/imag channel), deterministic in seed.
  MeasurementSet forward(const Image& img, double noise_sigma = 0.0, uint64_t seed = 0) const;

  /// Real part of F^H applied to the zero-filled embedding of the
  /// measurements; the exact adjoint of forward restricted to real images.
  Image adjoint(const MeasurementSet& meas) const;

  /// Inverse Fourier transform with unmeasured coefficients set to zero.
  /// Numerically identical to adjoint; kept as the named direct-recon
  /// baseline.
  Image zero_fill_reconstruct(const MeasurementSet& meas) const;

  /// Unchecked variants used inside solvers where binding is known by
  /// construction.
  std::vector<std::complex<double>> forward_values(const Image& img) const;
  Image adjoint_values(std::span<const std::complex<double>> values) const;

 private:
  Mask mask_;
  uint64_t mask_id_;
  std::vector<uint32_t> open_positions_;
  double open_fraction_;
};

}  // namespace cssk::sensing
