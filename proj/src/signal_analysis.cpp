#include "treadmill/signal_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "treadmill/errors.hpp"

namespace treadmill::signal {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Local maxima of |y| with greedy suppression of weaker neighbours closer
// than `min_separation` samples.
std::vector<std::size_t> pick_peaks(std::span<const double> y, std::size_t min_separation) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = std::abs(y[i]);
    const bool left = i == 0 || a > std::abs(y[i - 1]);
    const bool right = i + 1 == y.size() || a >= std::abs(y[i + 1]);
    if (left && right && a > 0.0) candidates.push_back(i);
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(y[candidates[a]]) > std::abs(y[candidates[b]]);
  });

  std::vector<char> taken(y.size(), 0);
  std::vector<std::size_t> accepted;
  for (auto o : order) {
    const std::size_t idx = candidates[o];
    const std::size_t lo = idx >= min_separation ? idx - min_separation + 1 : 0;
    const std::size_t hi = std::min(y.size() - 1, idx + min_separation - 1);
    bool blocked = false;
    for (std::size_t j = lo; j <= hi && !blocked; ++j) blocked = taken[j] != 0;
    if (blocked) continue;
    taken[idx] = 1;
    accepted.push_back(idx);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;
};

LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& w) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += w[i] * r * r;
  }
  fit.residual = std::sqrt(ss / sw);
  return fit;
}

}  // namespace

SpectralPeak estimate_natural_frequency(const TimeSeries& ts, const std::string& channel,
                                        const PeakOptions& opts) {
  const auto y = ts.channel(channel);
  if (ts.duration() < 0.1 - 1e-12)
    throw InvalidSpec(fmt::format("need at least 0.1 s of data, got {} s", ts.duration()));

  SpectralPeak peak;
  peak.spectrum = compute_spectrum(y, ts.rate(), opts.spectrum);
  const auto& mag = peak.spectrum.magnitude;
  const auto& freq = peak.spectrum.frequency;

  std::size_t first = 0;
  while (first < freq.size() && freq[first] < opts.dc_floor) ++first;
  // The Nyquist bin is excluded: f0 must lie strictly inside (0, rate/2).
  const std::size_t last = freq.size() - 1;
  if (first >= last) throw NoPeak("no spectral bins above the DC floor");

  std::size_t best = first;
  for (std::size_t k = first; k < last; ++k)
    if (mag[k] > mag[best]) best = k;

  const double med = median(std::vector<double>(mag.begin() + static_cast<std::ptrdiff_t>(first),
                                                mag.begin() + static_cast<std::ptrdiff_t>(last)));
  if (!(mag[best] > 0.0) || mag[best] < opts.flatness_ratio * med)
    throw NoPeak(fmt::format("spectrum of '{}' is flat (max/median = {})", channel,
                             med > 0.0 ? mag[best] / med : 0.0));

  peak.f0 = freq[best];
  peak.amplitude = mag[best];
  peak.f0_refined = peak.f0;
  // Half-power region around the peak; 1/|X|^2 of a damped mode is a
  // parabola in f there, so a quadratic least-squares fit locates the vertex.
  {
    const double half_power = 0.5 * mag[best] * mag[best];
    std::size_t lo = best, hi = best;
    while (lo > first && mag[lo - 1] * mag[lo - 1] >= half_power) --lo;
    while (hi + 1 < last && mag[hi + 1] * mag[hi + 1] >= half_power) ++hi;
    if (hi - lo >= 2) {
      const double fc = freq[best], scale = freq[hi] - freq[lo];
      Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
      Eigen::Vector3d atb = Eigen::Vector3d::Zero();
      for (std::size_t k = lo; k <= hi; ++k) {
        const double u = (freq[k] - fc) / scale;
        const Eigen::Vector3d row(1.0, u, u * u);
        ata += row * row.transpose();
        atb += row / (mag[k] * mag[k]);
      }
      const Eigen::Vector3d c = ata.ldlt().solve(atb);
      if (c(2) > 0.0) {
        const double vertex = fc - scale * c(1) / (2.0 * c(2));
        if (vertex >= freq[lo] && vertex <= freq[hi]) peak.f0_refined = vertex;
      }
    }
  }
  for (std::size_t k = std::max<std::size_t>(first, 1); k < last; ++k) {
    if (k == best) continue;
    if (mag[k] > mag[k - 1] && mag[k] >= mag[k + 1] && mag[k] >= opts.secondary_fraction * mag[best])
      peak.secondary_peaks.emplace_back(freq[k], mag[k]);
  }
  std::stable_sort(peak.secondary_peaks.begin(), peak.secondary_peaks.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (peak.secondary_peaks.size() > opts.max_secondary) peak.secondary_peaks.resize(opts.max_secondary);
  return peak;
}

double damping_ratio(double lambda, double omega) {
  return lambda / std::sqrt(lambda * lambda + omega * omega);
}

double quality_factor(double xi) { return 1.0 / (2.0 * xi); }

DampingFit make_damping_fit(double amplitude, double lambda, double omega) {
  DampingFit fit;
  fit.amplitude = amplitude;
  fit.lambda = lambda;
  fit.omega = omega;
  fit.xi = damping_ratio(lambda, omega);
  fit.q = quality_factor(fit.xi);
  return fit;
}

DampingFit fit_damping(const TimeSeries& ts, const std::string& channel, double f0,
                       const DampingOptions& opts) {
  const auto raw = ts.channel(channel);
  const double rate = ts.rate();
  if (!(f0 > 0.0) || !(f0 < rate / 2.0))
    throw InvalidSpec(fmt::format("oscillation frequency {} Hz outside (0, {})", f0, rate / 2.0));

  std::vector<double> y(raw.begin(), raw.end());
  if (opts.remove_offset) {
    const double m = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    for (auto& v : y) v -= m;
  }

  const double omega = 2.0 * std::numbers::pi * f0;
  const double half_period = rate / (2.0 * f0);
  const auto min_sep = static_cast<std::size_t>(std::max(1.0, std::floor(half_period) - 1.0));
  const auto quarter = static_cast<std::size_t>(std::max(1.0, std::round(rate / (4.0 * f0))));

  auto peaks = pick_peaks(y, min_sep);
  if (peaks.empty()) throw TooFewPeaks("signal has no peaks");
  const auto impact = *std::max_element(peaks.begin(), peaks.end(), [&](auto a, auto b) {
    return std::abs(y[a]) < std::abs(y[b]);
  });
  std::erase_if(peaks, [&](std::size_t i) {
    return i < impact || i < 2 * quarter || i + 2 * quarter >= y.size();
  });

  // Envelope at peak n: least-squares fit of exp(-lambda tau) (a cos + b sin)(omega tau)
  // over one period centred on the peak. Exact on a model damped cosine.
  const std::size_t half = 2 * quarter;
  auto envelope_at = [&](std::size_t n, double lambda) {
    double cc = 0.0, cs = 0.0, ss = 0.0, yc = 0.0, ys = 0.0;
    for (std::size_t k = n - half; k <= n + half; ++k) {
      const double tau = (static_cast<double>(k) - static_cast<double>(n)) / rate;
      const double decay = std::exp(-lambda * tau);
      const double c = decay * std::cos(omega * tau), sn = decay * std::sin(omega * tau);
      cc += c * c;
      cs += c * sn;
      ss += sn * sn;
      yc += y[k] * c;
      ys += y[k] * sn;
    }
    const double det = cc * ss - cs * cs;
    const double ca = (ss * yc - cs * ys) / det;
    const double cb = (cc * ys - cs * yc) / det;
    return std::sqrt(ca * ca + cb * cb);
  };

  // Noise sigma from the spectral median: white noise has E|X_k|^2 = N sigma^2
  // and a Rayleigh-distributed magnitude with median sqrt(N sigma^2 ln 2).
  const auto spectrum = compute_spectrum(y, rate, {.remove_mean = true, .hann_window = false, .zero_pad = true});
  const double noise_sigma =
      median(std::vector<double>(spectrum.magnitude.begin() + 1, spectrum.magnitude.end())) /
      std::sqrt(static_cast<double>(y.size()) * std::log(2.0));

  double e_max = 0.0;
  for (auto n : peaks) e_max = std::max(e_max, envelope_at(n, 0.0));
  const double floor = std::max(opts.min_relative_peak * e_max, opts.noise_factor * noise_sigma);
  std::erase_if(peaks, [&](std::size_t n) { return envelope_at(n, 0.0) < floor; });
  if (peaks.size() < opts.min_peaks)
    throw TooFewPeaks(fmt::format("{} peaks above the noise floor, need {}", peaks.size(), opts.min_peaks));

  std::vector<double> t(peaks.size()), log_env(peaks.size()), w(peaks.size()), env(peaks.size());
  for (std::size_t k = 0; k < peaks.size(); ++k) t[k] = static_cast<double>(peaks[k]) / rate;

  double lambda = 0.0;
  LineFit line;
  for (int it = 0; it < opts.max_iterations; ++it) {
    for (std::size_t k = 0; k < peaks.size(); ++k) {
      env[k] = envelope_at(peaks[k], lambda);
      log_env[k] = std::log(env[k]);
      w[k] = env[k] * env[k];
    }
    line = weighted_line(t, log_env, w);
    const double next = -line.slope;
    const bool converged = std::abs(next - lambda) <= 1e-14 * std::max(std::abs(next), 1.0);
    lambda = next;
    if (converged) break;
  }

  const double span = t.back() - t.front();
  if (!(lambda * span > 1e-9))
    throw NonDecayingEnvelope(fmt::format("fitted decay constant {} 1/s is not positive", lambda));

  auto fit = make_damping_fit(std::exp(line.intercept), lambda, omega);
  fit.residual = line.residual;
  fit.peak_times = std::move(t);
  fit.peak_envelopes = std::move(env);
  return fit;
}

NoiseReport noise_stats(const TimeSeries& ts, double belt_speed, const std::vector<std::string>& channels,
                        const SpectrumOptions& spectrum) {
  if (ts.duration() < 1.0 - 1e-9)
    throw InvalidSpec(fmt::format("noise statistics need at least 1 s of data, got {} s", ts.duration()));
  NoiseReport report;
  report.belt_speed = belt_speed;
  const auto names = channels.empty() ? ts.channel_names() : channels;
  for (const auto& name : names) {
    const auto y = ts.channel(name);
    AxisNoise axis;
    axis.channel = name;
    const double n = static_cast<double>(y.size());
    // Shifted by the first sample so a constant channel gives exactly zero.
    const double shift = y.front();
    double sum = 0.0;
    for (double v : y) sum += v - shift;
    const double shifted_mean = sum / n;
    axis.mean = shift + shifted_mean;
    double ss = 0.0;
    axis.minimum = axis.maximum = -shifted_mean;
    for (double v : y) {
      const double d = (v - shift) - shifted_mean;
      ss += d * d;
      axis.minimum = std::min(axis.minimum, d);
      axis.maximum = std::max(axis.maximum, d);
    }
    axis.band = 2.0 * std::sqrt(ss / n);
    axis.spectrum = compute_spectrum(y, ts.rate(), spectrum);
    report.axes.push_back(std::move(axis));
  }
  return report;
}

}  // namespace treadmill::signal
