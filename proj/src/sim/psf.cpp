#include "cssk/sim/psf.hpp"

#include <cmath>

namespace cssk::sim {

void PsfModel::validate() const {
  if (kernel_radius < 1) raise(ErrorCode::ValidationError, "PSF kernel_radius must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    raise(ErrorCode::ValidationError, "PSF sigma must be finite and > 0");
  }
}

Image render_psf(const PsfModel& psf, double dy, double dx) {
  psf.validate();
  const int r = psf.kernel_radius;
  const int n = 2 * r + 1;
  const double inv = 1.0 / (psf.sigma * std::sqrt(2.0));

  // Mass of the unit Gaussian inside pixel i along one axis, center at r+d.
  auto axis_mass = [&](double d) {
    std::vector<double> m(n);
    const double center = r + d;
    for (int i = 0; i < n; ++i) {
      m[i] = 0.5 * (std::erf((i + 0.5 - center) * inv) - std::erf((i - 0.5 - center) * inv));
    }
    return m;
  };

  const std::vector<double> row_mass = axis_mass(dy);
  const std::vector<double> col_mass = axis_mass(dx);

  Image kernel(n, n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      kernel.at(i, j) = row_mass[i] * col_mass[j];
      sum += kernel.at(i, j);
    }
  }
  if (!(sum > 0.0)) {
    // Fully degenerate sigma: all mass lands in the pixel containing the center.
    kernel.data.assign(kernel.size(), 0.0);
    kernel.at(std::min(n - 1, static_cast<int>(r + dy + 0.5)),
              std::min(n - 1, static_cast<int>(r + dx + 0.5))) = 1.0;
    return kernel;
  }
  for (auto& v : kernel.data) v /= sum;
  return kernel;
}

}  // namespace cssk::sim
