#include "pseg/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "pseg/errors.hpp"

namespace pseg::fft {
namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void run(Spectrum& data, int h, int w, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(h, w, buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

Spectrum forward(const std::vector<double>& image, int h, int w) {
  detail::require(static_cast<long>(image.size()) == static_cast<long>(h) * w, "fft::forward: size mismatch");
  Spectrum s(image.begin(), image.end());
  run(s, h, w, FFTW_FORWARD);
  return s;
}

std::vector<double> inverse_real(const Spectrum& spectrum, int h, int w) {
  detail::require(static_cast<long>(spectrum.size()) == static_cast<long>(h) * w, "fft::inverse_real: size mismatch");
  Spectrum s = spectrum;
  run(s, h, w, FFTW_BACKWARD);
  std::vector<double> out(s.size());
  const double norm = 1.0 / (static_cast<double>(h) * w);
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i].real() * norm;
  return out;
}

std::vector<double> circular_convolve(const std::vector<double>& a, const std::vector<double>& b, int h, int w) {
  Spectrum fa = forward(a, h, w);
  const Spectrum fb = forward(b, h, w);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  return inverse_real(fa, h, w);
}

}  // namespace pseg::fft
