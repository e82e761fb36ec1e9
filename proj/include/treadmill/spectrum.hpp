#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace treadmill::signal {

struct SpectrumOptions {
  bool remove_mean = true;
  bool hann_window = false;  ///< rectangular when false
  bool zero_pad = true;      ///< pad to the next power of two
};

/// One-sided DFT magnitude |X_k| for k = 0 .. fft_size / 2.
struct Spectrum {
  double rate = 0.0;
  std::size_t samples = 0;   ///< input length N
  std::size_t fft_size = 0;  ///< transform length M >= N
  std::vector<double> frequency;
  std::vector<double> magnitude;

  double bin_width() const { return rate / static_cast<double>(fft_size); }
  /// Single-sided amplitude estimate in signal units (2|X_k| / N).
  double amplitude(std::size_t k) const;
  /// Mean power of the analysed (mean-removed) samples recovered from the
  /// spectrum. With a rectangular window this equals the population
  /// variance of the input.
  double total_power() const;
};

Spectrum compute_spectrum(std::span<const double> x, double rate, const SpectrumOptions& opts = {});

std::size_t next_power_of_two(std::size_t n);

}  // namespace treadmill::signal
