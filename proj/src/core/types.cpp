#include "cssk/core/types.hpp"

#include <cmath>
#include <string>

namespace cssk {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MaskBindingMismatch: return "MaskBindingMismatch";
    case ErrorCode::SourceOutOfBounds: return "SourceOutOfBounds";
    case ErrorCode::KernelTooLong: return "KernelTooLong";
    case ErrorCode::BlockNotDivisible: return "BlockNotDivisible";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::LineSearchFailure: return "LineSearchFailure";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

namespace {

void check_positive_dims(int w, int h, const char* what) {
  if (w < 1 || h < 1) {
    raise(ErrorCode::ValidationError,
          std::string(what) + " dimensions must be positive, got " + std::to_string(w) + "x" +
              std::to_string(h));
  }
}

// FNV-1a, 64-bit.
struct Fnv1a {
  uint64_t state = 0xcbf29ce484222325ull;
  void update(const void* bytes, size_t n) {
    const auto* p = static_cast<const uint8_t*>(bytes);
    for (size_t i = 0; i < n; ++i) {
      state ^= p[i];
      state *= 0x100000001b3ull;
    }
  }
  template <typename T>
  void update_value(const T& v) {
    update(&v, sizeof(v));
  }
};

}  // namespace

Image::Image(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0.0) {
  check_positive_dims(w, h, "Image");
}

Image::Image(int w, int h, std::vector<double> values)
    : width(w), height(h), data(std::move(values)) {
  validate();
}

void Image::validate() const {
  check_positive_dims(width, height, "Image");
  if (data.size() != static_cast<size_t>(width) * height) {
    raise(ErrorCode::ValidationError, "Image data length does not match width*height");
  }
  for (double v : data) {
    if (!std::isfinite(v)) raise(ErrorCode::ValidationError, "Image contains non-finite value");
  }
}

Spectrum::Spectrum(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h) {
  check_positive_dims(w, h, "Spectrum");
}

Spectrum::Spectrum(int w, int h, std::vector<std::complex<double>> values)
    : width(w), height(h), data(std::move(values)) {
  validate();
}

void Spectrum::validate() const {
  check_positive_dims(width, height, "Spectrum");
  if (data.size() != static_cast<size_t>(width) * height) {
    raise(ErrorCode::ValidationError, "Spectrum data length does not match width*height");
  }
  for (const auto& v : data) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      raise(ErrorCode::ValidationError, "Spectrum contains non-finite value");
    }
  }
}

size_t Mask::open_count() const {
  size_t n = 0;
  for (uint8_t b : open) n += (b != 0);
  return n;
}

double Mask::open_fraction() const {
  return static_cast<double>(open_count()) / (static_cast<double>(width) * height);
}

std::vector<uint32_t> Mask::open_positions() const {
  std::vector<uint32_t> pos;
  pos.reserve(open_count());
  for (size_t i = 0; i < open.size(); ++i) {
    if (open[i]) pos.push_back(static_cast<uint32_t>(i));
  }
  return pos;
}

uint64_t Mask::content_hash() const {
  Fnv1a h;
  h.update_value(static_cast<uint32_t>(width));
  h.update_value(static_cast<uint32_t>(height));
  h.update_value(static_cast<uint16_t>(block_w));
  h.update_value(static_cast<uint16_t>(block_h));
  h.update_value(static_cast<uint8_t>(kind));
  h.update_value(seed);
  for (size_t i = 0; i < open.size(); ++i) {
    h.update_value(static_cast<uint8_t>(open[i] != 0));
  }
  return h.state;
}

void Mask::validate() const {
  validate_frame_dims(width, height);
  if (block_w < 1 || block_h < 1) {
    raise(ErrorCode::ValidationError, "Mask block dimensions must be positive");
  }
  if (open.size() != static_cast<size_t>(width) * height) {
    raise(ErrorCode::ValidationError, "Mask bitmap length does not match width*height");
  }
  if (open_count() < 1) raise(ErrorCode::ValidationError, "Mask must have at least one open position");
  if (kind == MaskKind::OnePerBlock) {
    if (width % block_w != 0 || height % block_h != 0) {
      raise(ErrorCode::BlockNotDivisible, "block dimensions must divide mask dimensions");
    }
    for (int br = 0; br < height / block_h; ++br) {
      for (int bc = 0; bc < width / block_w; ++bc) {
        int count = 0;
        for (int r = br * block_h; r < (br + 1) * block_h; ++r) {
          for (int c = bc * block_w; c < (bc + 1) * block_w; ++c) {
            count += is_open(r, c);
          }
        }
        if (count != 1) {
          raise(ErrorCode::ValidationError,
                "OnePerBlock mask tile (" + std::to_string(br) + "," + std::to_string(bc) +
                    ") has " + std::to_string(count) + " open positions");
        }
      }
    }
  }
}

void MeasurementSet::validate() const {
  if (noise_sigma < 0.0 || !std::isfinite(noise_sigma)) {
    raise(ErrorCode::ValidationError, "MeasurementSet noise_sigma must be finite and >= 0");
  }
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      raise(ErrorCode::ValidationError, "MeasurementSet contains non-finite value");
    }
  }
}

void SceneTruth::validate(int width, int height) const {
  auto check = [&](const PointSource& s, const char* what) {
    if (s.row < 0 || s.row >= height || s.col < 0 || s.col >= width) {
      raise(ErrorCode::ValidationError, std::string(what) + " outside frame bounds");
    }
    if (!(s.amplitude > 0.0) || !std::isfinite(s.amplitude)) {
      raise(ErrorCode::ValidationError, std::string(what) + " amplitude must be > 0");
    }
    if (s.dy < 0.0 || s.dy >= 1.0 || s.dx < 0.0 || s.dx >= 1.0) {
      raise(ErrorCode::ValidationError, std::string(what) + " sub-pixel offset outside [0,1)");
    }
  };
  check(target, "SceneTruth target");
  for (const auto& g : clutter) check(g, "SceneTruth clutter source");
}

void validate_frame_dims(int width, int height) {
  if (width < 8 || height < 8 || width % 2 != 0 || height % 2 != 0) {
    raise(ErrorCode::ValidationError,
          "frame dimensions must be even and >= 8, got " + std::to_string(width) + "x" +
              std::to_string(height));
  }
}

void validate_pairing(int width, int height, const Mask& mask, const MeasurementSet& meas) {
  if (mask.width != width || mask.height != height) {
    raise(ErrorCode::DimensionMismatch,
          "mask is " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
              " but frame is " + std::to_string(width) + "x" + std::to_string(height));
  }
  if (meas.values.size() != mask.open_count()) {
    raise(ErrorCode::DimensionMismatch,
          "measurement count " + std::to_string(meas.values.size()) +
              " does not match mask open count " + std::to_string(mask.open_count()));
  }
  if (meas.mask_id != mask.content_hash()) {
    raise(ErrorCode::MaskBindingMismatch, "measurements were taken through a different mask");
  }
}

}  // namespace cssk
