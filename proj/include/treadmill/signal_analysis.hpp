#pragma once

#include <string>
#include <utility>
#include <vector>

#include "treadmill/spectrum.hpp"
#include "treadmill/time_series.hpp"

namespace treadmill::signal {

struct SpectralPeak {
  double f0 = 0.0;         ///< Hz, centre of the largest bin
  /// Hz, vertex of a parabola fitted to 1/|X|^2 over the half-power region
  /// (f0 when that region spans fewer than three bins)
  double f0_refined = 0.0;
  double amplitude = 0.0;  ///< |X_k| at f0
  std::vector<std::pair<double, double>> secondary_peaks;  ///< (Hz, |X_k|), strongest first
  Spectrum spectrum;
};

struct PeakOptions {
  double dc_floor = 5.0;            ///< Hz; bins below are ignored
  double secondary_fraction = 0.1;  ///< of the main peak
  std::size_t max_secondary = 10;
  double flatness_ratio = 3.0;      ///< max/median below this is NoPeak
  SpectrumOptions spectrum;
};

/// Frequency of the strongest spectral bin above the DC floor.
/// Throws NoPeak for flat spectra and ChannelMissing.
SpectralPeak estimate_natural_frequency(const TimeSeries& ts, const std::string& channel,
                                        const PeakOptions& opts = {});

/// Envelope parameters of y(t) = A exp(-lambda t) cos(omega t), with the
/// derived damping ratio and quality factor.
struct DampingFit {
  double amplitude = 0.0;  ///< A, at the first sample of the series
  double lambda = 0.0;     ///< 1/s
  double omega = 0.0;      ///< rad/s
  double xi = 0.0;
  double q = 0.0;
  double residual = 0.0;   ///< weighted RMS of the log-envelope fit
  std::vector<double> peak_times;      ///< s, relative to the first sample
  std::vector<double> peak_envelopes;  ///< envelope estimate at each peak
};

double damping_ratio(double lambda, double omega);
double quality_factor(double xi);
/// Fills xi and q from lambda and omega.
DampingFit make_damping_fit(double amplitude, double lambda, double omega);

struct DampingOptions {
  double min_relative_peak = 0.02;  ///< of the largest envelope value
  double noise_factor = 5.0;        ///< peaks must exceed this many noise sigmas
  std::size_t min_peaks = 5;
  int max_iterations = 100;
  bool remove_offset = false;
};

/// Picks the peaks of |y| after the impact (minimum spacing of half an
/// oscillation period), estimates the envelope at each peak from the
/// samples a quarter period either side, and fits log(envelope) with
/// weighted linear least squares. The envelope estimate depends on lambda,
/// so the fit is repeated to a fixed point; on an exact damped cosine at
/// omega = 2 pi f0 the fixed point is the generating (A, lambda).
///
/// Throws TooFewPeaks and NonDecayingEnvelope.
DampingFit fit_damping(const TimeSeries& ts, const std::string& channel, double f0,
                       const DampingOptions& opts = {});

struct AxisNoise {
  std::string channel;
  double mean = 0.0;
  double band = 0.0;     ///< 2 sigma (population)
  double minimum = 0.0;  ///< after mean removal
  double maximum = 0.0;
  Spectrum spectrum;
};

struct NoiseReport {
  double belt_speed = 0.0;  ///< m/s
  std::vector<AxisNoise> axes;
};

/// Requires at least one second of data. Analyses every channel when
/// `channels` is empty.
NoiseReport noise_stats(const TimeSeries& ts, double belt_speed,
                        const std::vector<std::string>& channels = {},
                        const SpectrumOptions& spectrum = {});

}  // namespace treadmill::signal
