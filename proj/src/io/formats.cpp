#include "cssk/io/formats.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <limits>

namespace cssk::io {

namespace {

void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u16(std::string& out, uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) raise(ErrorCode::IoError, "short write to '" + path + "'");
}

struct Reader {
  std::string bytes;
  size_t pos = 0;
  std::string path;

  Reader(const std::string& file_path) : path(file_path) {
    std::ifstream f(file_path, std::ios::binary);
    if (!f) raise(ErrorCode::IoError, "cannot open '" + file_path + "' for reading");
    bytes.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    if (f.bad()) raise(ErrorCode::IoError, "read failure on '" + file_path + "'");
  }

  void need(size_t k) {
    if (pos + k > bytes.size()) raise(ErrorCode::TruncatedFile, "'" + path + "' is truncated");
  }

  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(bytes[pos++]);
  }

  uint16_t u16() {
    need(2);
    uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<uint16_t>(static_cast<uint8_t>(bytes[pos++])) << (8 * i);
    return v;
  }

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos++])) << (8 * i);
    return v;
  }

  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes[pos++])) << (8 * i);
    return v;
  }

  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

  void expect_magic(const char* magic) {
    need(4);
    if (bytes.compare(pos, 4, magic) != 0) {
      raise(ErrorCode::BadMagic, "'" + path + "' does not start with " + magic);
    }
    pos += 4;
  }

  void expect_end() {
    if (pos != bytes.size()) {
      raise(ErrorCode::ValidationError,
            "'" + path + "' has " + std::to_string(bytes.size() - pos) + " trailing bytes");
    }
  }
};

int checked_dim(uint32_t v, const std::string& path) {
  if (v == 0 || v > (1u << 20)) {
    raise(ErrorCode::ValidationError, "'" + path + "' has implausible dimension");
  }
  return static_cast<int>(v);
}

}  // namespace

void write_frames(const std::string& path, const std::vector<Image>& frames) {
  if (frames.empty()) raise(ErrorCode::ValidationError, "no frames to write");
  const int w = frames.front().width;
  const int h = frames.front().height;
  for (const Image& f : frames) {
    f.validate();
    if (f.width != w || f.height != h) {
      raise(ErrorCode::DimensionMismatch, "frames in one stack must share dimensions");
    }
  }

  std::string out;
  out.reserve(20 + frames.size() * frames.front().size() * 4);
  out += "CSSK";
  put_u16(out, 1);  // version
  put_u8(out, 1);   // dtype float32
  put_u8(out, 0);   // reserved
  put_u32(out, static_cast<uint32_t>(w));
  put_u32(out, static_cast<uint32_t>(h));
  put_u32(out, static_cast<uint32_t>(frames.size()));
  for (const Image& f : frames) {
    for (double v : f.data) put_f32(out, static_cast<float>(v));
  }
  write_file(path, out);
}

std::vector<Image> read_frames(const std::string& path) {
  Reader r(path);
  r.expect_magic("CSSK");
  const uint16_t version = r.u16();
  if (version != 1) {
    raise(ErrorCode::UnsupportedVersion,
          "'" + path + "' has version " + std::to_string(version));
  }
  const uint8_t dtype = r.u8();
  if (dtype != 1) {
    raise(ErrorCode::UnsupportedVersion, "'" + path + "' has unsupported dtype");
  }
  r.u8();  // reserved
  const int w = checked_dim(r.u32(), path);
  const int h = checked_dim(r.u32(), path);
  const uint32_t count = r.u32();
  if (count == 0) raise(ErrorCode::ValidationError, "'" + path + "' holds zero frames");

  std::vector<Image> frames;
  frames.reserve(count);
  for (uint32_t f = 0; f < count; ++f) {
    Image img(w, h);
    for (double& v : img.data) v = static_cast<double>(r.f32());
    img.validate();
    frames.push_back(std::move(img));
  }
  r.expect_end();
  return frames;
}

void write_mask(const std::string& path, const Mask& mask) {
  mask.validate();
  std::string out;
  const size_t bits = mask.open.size();
  out.reserve(27 + (bits + 7) / 8);
  out += "CSMK";
  put_u16(out, 1);
  put_u32(out, static_cast<uint32_t>(mask.width));
  put_u32(out, static_cast<uint32_t>(mask.height));
  put_u16(out, static_cast<uint16_t>(mask.block_w));
  put_u16(out, static_cast<uint16_t>(mask.block_h));
  put_u8(out, static_cast<uint8_t>(mask.kind));
  put_u64(out, mask.seed);
  uint8_t byte = 0;
  for (size_t p = 0; p < bits; ++p) {
    if (mask.open[p]) byte |= static_cast<uint8_t>(1u << (p % 8));
    if (p % 8 == 7) {
      put_u8(out, byte);
      byte = 0;
    }
  }
  if (bits % 8 != 0) put_u8(out, byte);
  write_file(path, out);
}

Mask read_mask(const std::string& path) {
  Reader r(path);
  r.expect_magic("CSMK");
  const uint16_t version = r.u16();
  if (version != 1) {
    raise(ErrorCode::UnsupportedVersion,
          "'" + path + "' has version " + std::to_string(version));
  }
  Mask mask;
  mask.width = checked_dim(r.u32(), path);
  mask.height = checked_dim(r.u32(), path);
  mask.block_w = r.u16();
  mask.block_h = r.u16();
  const uint8_t kind = r.u8();
  if (kind > 1) raise(ErrorCode::ValidationError, "'" + path + "' has unknown mask kind");
  mask.kind = static_cast<MaskKind>(kind);
  mask.seed = r.u64();

  const size_t bits = static_cast<size_t>(mask.width) * mask.height;
  mask.open.resize(bits);
  uint8_t byte = 0;
  for (size_t p = 0; p < bits; ++p) {
    if (p % 8 == 0) byte = r.u8();
    mask.open[p] = (byte >> (p % 8)) & 1u;
  }
  r.expect_end();
  mask.validate();
  return mask;
}

void write_measurements(const std::string& path, const MeasurementSet& meas, int width,
                        int height) {
  meas.validate();
  validate_frame_dims(width, height);
  std::string out;
  out.reserve(38 + meas.values.size() * 16);
  out += "CSMS";
  put_u16(out, 1);
  put_u32(out, static_cast<uint32_t>(width));
  put_u32(out, static_cast<uint32_t>(height));
  put_u64(out, meas.mask_id);
  put_f64(out, meas.noise_sigma);
  put_u64(out, meas.values.size());
  for (const auto& v : meas.values) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  write_file(path, out);
}

StoredMeasurements read_measurements(const std::string& path) {
  Reader r(path);
  r.expect_magic("CSMS");
  const uint16_t version = r.u16();
  if (version != 1) {
    raise(ErrorCode::UnsupportedVersion,
          "'" + path + "' has version " + std::to_string(version));
  }
  StoredMeasurements stored;
  stored.width = checked_dim(r.u32(), path);
  stored.height = checked_dim(r.u32(), path);
  stored.meas.mask_id = r.u64();
  stored.meas.noise_sigma = r.f64();
  const uint64_t count = r.u64();
  if (count > static_cast<uint64_t>(stored.width) * stored.height) {
    raise(ErrorCode::ValidationError, "'" + path + "' claims more measurements than pixels");
  }
  stored.meas.values.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    const double re = r.f64();
    const double im = r.f64();
    stored.meas.values.emplace_back(re, im);
  }
  r.expect_end();
  stored.meas.validate();
  return stored;
}

void write_pgm(const std::string& path, const Image& img) {
  img.validate();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : img.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;

  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n255\n";
  out.reserve(out.size() + img.data.size());
  for (double v : img.data) {
    int g = static_cast<int>((v - lo) * scale + 0.5);
    out.push_back(static_cast<char>(std::clamp(g, 0, 255)));
  }
  write_file(path, out);
}

}  // namespace cssk::io
