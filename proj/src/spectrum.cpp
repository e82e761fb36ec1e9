#include "treadmill/spectrum.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/FFT>

namespace treadmill::signal {

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double Spectrum::amplitude(std::size_t k) const {
  const double scale = (k == 0 || 2 * k == fft_size) ? 1.0 : 2.0;
  return scale * magnitude[k] / static_cast<double>(samples);
}

double Spectrum::total_power() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < magnitude.size(); ++k) {
    const double p = magnitude[k] * magnitude[k];
    sum += (k == 0 || 2 * k == fft_size) ? p : 2.0 * p;
  }
  return sum / (static_cast<double>(fft_size) * static_cast<double>(samples));
}

Spectrum compute_spectrum(std::span<const double> x, double rate, const SpectrumOptions& opts) {
  Spectrum s;
  s.rate = rate;
  s.samples = x.size();
  s.fft_size = opts.zero_pad ? next_power_of_two(x.size()) : x.size();

  const double mean =
      opts.remove_mean ? std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()) : 0.0;
  std::vector<double> buffer(s.fft_size, 0.0);
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double w = 1.0;
    if (opts.hann_window) w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / (n - 1.0));
    buffer[i] = (x[i] - mean) * w;
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, buffer);

  const std::size_t half = s.fft_size / 2;
  s.frequency.resize(half + 1);
  s.magnitude.resize(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    s.frequency[k] = static_cast<double>(k) * rate / static_cast<double>(s.fft_size);
    s.magnitude[k] = std::abs(out[k]);
  }
  return s;
}

}  // namespace treadmill::signal
