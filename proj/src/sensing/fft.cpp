#include "cssk/sensing/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace cssk::sensing {

namespace {

// FFTW plan creation is not thread-safe; execution via fftw_execute_dft is.
// Plans are cached per (height, width, sign) and created with FFTW_UNALIGNED
// so they can run directly on std::vector storage.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int height, int width, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(height, width, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::vector<std::complex<double>> dummy(static_cast<size_t>(width) * height);
    fftw_plan plan = fftw_plan_dft_2d(
        height, width, reinterpret_cast<fftw_complex*>(dummy.data()),
        reinterpret_cast<fftw_complex*>(dummy.data()), sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void run_dft(int width, int height, const std::complex<double>* in, std::complex<double>* out,
             int sign) {
  fftw_plan plan = PlanCache::instance().get(height, width, sign);
  // in-place and out-of-place share the same plan under FFTW_UNALIGNED only
  // if buffers are distinct; copy into out first and transform in place.
  if (in != out) std::copy(in, in + static_cast<size_t>(width) * height, out);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(out),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

Spectrum fft2(const Image& img) {
  const size_t n = img.size();
  Spectrum spec(img.width, img.height);
  std::vector<std::complex<double>> in(n);
  for (size_t i = 0; i < n; ++i) in[i] = img.data[i];
  run_dft(img.width, img.height, in.data(), spec.data.data(), FFTW_FORWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : spec.data) v *= scale;
  return spec;
}

Spectrum ifft2_complex(const Spectrum& spec) {
  const size_t n = spec.size();
  Spectrum out(spec.width, spec.height);
  run_dft(spec.width, spec.height, spec.data.data(), out.data.data(), FFTW_BACKWARD);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : out.data) v *= scale;
  return out;
}

RealImage ifft2(const Spectrum& spec) {
  Spectrum full = ifft2_complex(spec);
  RealImage result;
  result.image = Image(spec.width, spec.height);
  double max_imag = 0.0;
  for (size_t i = 0; i < full.size(); ++i) {
    result.image.data[i] = full.data[i].real();
    max_imag = std::max(max_imag, std::abs(full.data[i].imag()));
  }
  result.imag_residual = max_imag;
  return result;
}

}  // namespace cssk::sensing
