#include "cssk/sensing/operator.hpp"

#include "cssk/core/rng.hpp"

namespace cssk::sensing {

MeasurementOperator::MeasurementOperator(Mask mask) : mask_(std::move(mask)) {
  mask_.validate();
  mask_id_ = mask_.content_hash();
  open_positions_ = mask_.open_positions();
  open_fraction_ = static_cast<double>(open_positions_.size()) /
                   (static_cast<double>(mask_.width) * mask_.height);
}

std::vector<std::complex<double>> MeasurementOperator::forward_values(const Image& img) const {
  Spectrum spec = fft2(img);
  std::vector<std::complex<double>> values(open_positions_.size());
  for (size_t i = 0; i < open_positions_.size(); ++i) {
    values[i] = spec.data[open_positions_[i]];
  }
  return values;
}

MeasurementSet MeasurementOperator::forward(const Image& img, double noise_sigma,
                                            uint64_t seed) const {
  if (img.width != mask_.width || img.height != mask_.height) {
    raise(ErrorCode::DimensionMismatch,
          "image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
              " but mask is " + std::to_string(mask_.width) + "x" + std::to_string(mask_.height));
  }
  MeasurementSet meas;
  meas.values = forward_values(img);
  meas.mask_id = mask_id_;
  meas.noise_sigma = noise_sigma;
  if (noise_sigma > 0.0) {
    Rng rng(derive_seed(seed, "measure.noise"));
    for (auto& v : meas.values) {
      v += std::complex<double>(noise_sigma * rng.normal(), noise_sigma * rng.normal());
    }
  }
  return meas;
}

Image MeasurementOperator::adjoint_values(std::span<const std::complex<double>> values) const {
  Spectrum embedded(mask_.width, mask_.height);
  for (size_t i = 0; i < open_positions_.size(); ++i) {
    embedded.data[open_positions_[i]] = values[i];
  }
  return ifft2(embedded).image;
}

Image MeasurementOperator::adjoint(const MeasurementSet& meas) const {
  if (meas.mask_id != mask_id_) {
    raise(ErrorCode::MaskBindingMismatch, "measurements were taken through a different mask");
  }
  if (meas.values.size() != open_positions_.size()) {
    raise(ErrorCode::DimensionMismatch, "measurement count does not match mask open count");
  }
  return adjoint_values(meas.values);
}

Image MeasurementOperator::zero_fill_reconstruct(const MeasurementSet& meas) const {
  return adjoint(meas);
}

}  // namespace cssk::sensing
