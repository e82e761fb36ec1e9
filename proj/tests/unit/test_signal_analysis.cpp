#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "treadmill/errors.hpp"
#include "treadmill/signal_analysis.hpp"

using namespace treadmill;
using std::numbers::pi;

namespace {

TimeSeries damped(double amplitude, double lambda, double f, double rate, double seconds, double noise = 0.0,
                  unsigned seed = 1) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise > 0.0 ? noise : 1.0);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    y[i] = amplitude * std::exp(-lambda * t) * std::cos(2.0 * pi * f * t) + (noise > 0.0 ? g(rng) : 0.0);
  }
  return TimeSeries(rate, {"Fz"}, {y});
}

TimeSeries constant(double value, double rate, double seconds) {
  return TimeSeries(rate, {"Fx", "Fy", "Fz"},
                    std::vector<std::vector<double>>(3, std::vector<double>(static_cast<std::size_t>(rate * seconds),
                                                                            value)));
}

}  // namespace

TEST_CASE("natural frequency of a damped cosine") {
  const auto ts = damped(100.0, 10.0, 169.0, 10000.0, 1.0);
  const auto peak = signal::estimate_natural_frequency(ts, "Fz");
  CHECK(std::abs(peak.f0 - 169.0) <= peak.spectrum.bin_width());
  CHECK(std::abs(peak.f0_refined - 169.0) <= peak.spectrum.bin_width());
  CHECK(peak.f0 > 0.0);
  CHECK(peak.f0 < ts.rate() / 2.0);
  for (const auto& [f, a] : peak.secondary_peaks) CHECK(a <= peak.amplitude);

  // Amplitude scaling leaves the estimate unchanged.
  for (double k : {1e-3, 0.5, 7.0, 1e4}) {
    const auto scaled = signal::estimate_natural_frequency(damped(100.0 * k, 10.0, 169.0, 10000.0, 1.0), "Fz");
    CHECK(scaled.f0 == peak.f0);
    CHECK(scaled.f0_refined == doctest::Approx(peak.f0_refined).epsilon(1e-9));
  }

  CHECK_THROWS_AS(signal::estimate_natural_frequency(constant(3.0, 1000.0, 1.0), "Fz"), NoPeak);
  CHECK_THROWS_AS(signal::estimate_natural_frequency(ts, "Fx"), ChannelMissing);
}

TEST_CASE("secondary peaks") {
  const double rate = 5000.0;
  std::vector<double> y(5000);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    y[i] = std::exp(-5.0 * t) * (std::cos(2.0 * pi * 120.0 * t) + 0.4 * std::cos(2.0 * pi * 300.0 * t));
  }
  const auto peak = signal::estimate_natural_frequency(TimeSeries(rate, {"Fz"}, {y}), "Fz");
  CHECK(std::abs(peak.f0 - 120.0) <= peak.spectrum.bin_width());
  REQUIRE_FALSE(peak.secondary_peaks.empty());
  CHECK(std::abs(peak.secondary_peaks.front().first - 300.0) <= peak.spectrum.bin_width());
  for (const auto& [f, a] : peak.secondary_peaks) CHECK(a >= 0.1 * peak.amplitude);
}

TEST_CASE("damping fit recovers the decay constant") {
  SUBCASE("noise free") {
    const auto ts = damped(50.0, 50.0, 200.0, 10000.0, 1.0);
    const auto peak = signal::estimate_natural_frequency(ts, "Fz");
    const auto fit = signal::fit_damping(ts, "Fz", peak.f0_refined);
    CHECK(std::abs(fit.lambda - 50.0) / 50.0 < 0.01);
  }
  SUBCASE("exact frequency gives the generating envelope") {
    const auto ts = damped(50.0, 50.0, 200.0, 10000.0, 1.0);
    const auto fit = signal::fit_damping(ts, "Fz", 200.0);
    CHECK(fit.lambda == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(fit.amplitude == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(fit.residual < 1e-9);
  }
  SUBCASE("one percent noise") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto ts = damped(50.0, 50.0, 200.0, 10000.0, 1.0, 0.5, seed);
      const auto peak = signal::estimate_natural_frequency(ts, "Fz");
      const auto fit = signal::fit_damping(ts, "Fz", peak.f0_refined);
      CAPTURE(seed);
      CHECK(std::abs(fit.lambda - 50.0) / 50.0 < 0.05);
    }
  }
  SUBCASE("undamped cosine") {
    CHECK_THROWS_AS(signal::fit_damping(damped(1.0, 0.0, 200.0, 10000.0, 1.0), "Fz", 200.0), NonDecayingEnvelope);
  }
  SUBCASE("too few peaks") {
    CHECK_THROWS_AS(signal::fit_damping(damped(1.0, 2000.0, 200.0, 10000.0, 1.0), "Fz", 200.0),
                    TooFewPeaks);
  }
}

TEST_CASE("refit of a regenerated envelope is idempotent") {
  const auto ts = damped(80.0, 15.0, 169.0, 10000.0, 1.0, 0.8, 11);
  const auto peak = signal::estimate_natural_frequency(ts, "Fz");
  const auto fit = signal::fit_damping(ts, "Fz", peak.f0_refined);
  std::vector<double> y(ts.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = ts.time(i);
    y[i] = fit.amplitude * std::exp(-fit.lambda * t) * std::cos(fit.omega * t);
  }
  const auto again = signal::fit_damping(TimeSeries(ts.rate(), {"Fz"}, {y}), "Fz", fit.omega / (2.0 * pi));
  CHECK(again.lambda == doctest::Approx(fit.lambda).epsilon(1e-9));
  CHECK(again.amplitude == doctest::Approx(fit.amplitude).epsilon(1e-9));
}

TEST_CASE("damping ratio and quality factor") {
  // Published damping ratios of the three force directions.
  CHECK(signal::quality_factor(0.0148) == doctest::Approx(33.8).epsilon(0.002));
  CHECK(signal::quality_factor(0.033) == doctest::Approx(15.15).epsilon(0.001));
  CHECK(signal::quality_factor(0.0093) == doctest::Approx(53.76).epsilon(0.001));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 1000.0);
  for (int k = 0; k < 200; ++k) {
    const double lambda = u(rng), omega = 10.0 * u(rng);
    const auto fit = signal::make_damping_fit(1.0, lambda, omega);
    CHECK(fit.q * 2.0 * fit.xi == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(fit.xi - lambda / std::hypot(lambda, omega)) <= 1e-12 * fit.xi);
    CHECK(fit.xi >= 0.0);
    CHECK(fit.xi < 1.0);
  }
}

TEST_CASE("spectrum") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(3.0, 2.0);
  for (std::size_t n : {1000u, 1024u, 4097u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    for (bool pad : {true, false}) {
      const auto s = signal::compute_spectrum(x, 1000.0, {.remove_mean = true, .hann_window = false, .zero_pad = pad});
      CAPTURE(n);
      CHECK(std::abs(s.total_power() - var) / var < 1e-6);
      CHECK(s.frequency.size() == s.fft_size / 2 + 1);
      CHECK(s.fft_size >= n);
    }
  }
  CHECK(signal::next_power_of_two(1000) == 1024);
  CHECK(signal::next_power_of_two(1024) == 1024);

  // A sine on a bin centre shows its amplitude.
  std::vector<double> x(1024);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 2.5 * std::sin(2.0 * pi * 64.0 * static_cast<double>(i) / 1024.0);
  const auto s = signal::compute_spectrum(x, 1024.0);
  CHECK(s.amplitude(64) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("noise statistics") {
  const auto flat = signal::noise_stats(constant(12.345, 1000.0, 2.0), 1.0);
  REQUIRE(flat.axes.size() == 3);
  for (const auto& a : flat.axes) {
    CHECK(a.band == 0.0);
    CHECK(a.mean == 12.345);
    CHECK(a.minimum == 0.0);
    CHECK(a.maximum == 0.0);
  }
  CHECK(flat.belt_speed == 1.0);

  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(5.0, 1.0);
  std::vector<double> y(10000);
  for (auto& v : y) v = g(rng);
  const auto r = signal::noise_stats(TimeSeries(1000.0, {"Fz"}, {y}), 0.0);
  CHECK(std::abs(r.axes[0].band - 2.0) <= 0.1);
  CHECK(r.axes[0].mean == doctest::Approx(5.0).epsilon(0.01));
  CHECK(r.axes[0].minimum < 0.0);
  CHECK(r.axes[0].maximum > 0.0);

  CHECK(signal::noise_stats(constant(1.0, 1000.0, 2.0), 0.0, {"Fy"}).axes.size() == 1);
  CHECK_THROWS_AS(signal::noise_stats(constant(1.0, 1000.0, 2.0), 0.0, {"Mz"}), ChannelMissing);
  CHECK_THROWS_AS(signal::noise_stats(constant(1.0, 1000.0, 0.5), 0.0), InvalidSpec);
}
