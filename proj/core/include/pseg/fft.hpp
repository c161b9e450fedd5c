#pragma once

#include <complex>
#include <vector>

namespace pseg::fft {

using Spectrum = std::vector<std::complex<double>>;

/// Forward 2-D DFT of a real row-major image (full complex output, h x w).
Spectrum forward(const std::vector<double>& image, int h, int w);

/// Inverse 2-D DFT (normalized by 1/(h w)); returns the real part.
std::vector<double> inverse_real(const Spectrum& spectrum, int h, int w);

/// Signed frequency in cycles per sample for DFT bin `k` of an `n`-point axis.
inline double frequency(int k, int n) { return (k <= n / 2 ? k : k - n) / static_cast<double>(n); }

/// Circular convolution of two same-sized real images via the frequency domain.
std::vector<double> circular_convolve(const std::vector<double>& a, const std::vector<double>& b, int h, int w);

}  // namespace pseg::fft
