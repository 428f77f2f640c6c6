#pragma once

#include <string>
#include <vector>

#include "cssk/core/types.hpp"

namespace cssk::io {

/// Frame stack, magic "CSSK": version u16 = 1, dtype u8 = 1 (float32),
/// reserved u8, width u32, height u32, frame_count u32, then frame_count
/// row-major frames of little-endian float32. Values round to float32 on
/// write; a write/read/write cycle is byte-identical.
void write_frames(const std::string& path, const std::vector<Image>& frames);
std::vector<Image> read_frames(const std::string& path);

/// Sampling mask, magic "CSMK": version u16 = 1, width u32, height u32,
/// block_w u16, block_h u16, kind u8, seed u64, then ceil(w*h/8) bytes of
/// row-major bitmap (bit p%8 of byte p/8, LSB first, padding bits zero).
/// Mask invariants are re-checked on read.
void write_mask(const std::string& path, const Mask& mask);
Mask read_mask(const std::string& path);

/// Fourier measurements, magic "CSMS": version u16 = 1, width u32,
/// height u32, mask_id u64, noise_sigma f64, count u64, then count pairs of
/// little-endian float64 (re, im) in row-major open-position order.
void write_measurements(const std::string& path, const MeasurementSet& meas, int width,
                        int height);

struct StoredMeasurements {
  MeasurementSet meas;
  int width = 0;
  int height = 0;
};
StoredMeasurements read_measurements(const std::string& path);

/// 8-bit binary PGM with min-max stretch; diagnostic previews only.
void write_pgm(const std::string& path, const Image& img);

}  // namespace cssk::io
