#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "treadmill/errors.hpp"
#include "treadmill/signal_analysis.hpp"
#include "treadmill/simulator.hpp"

using namespace treadmill;
using sensing::Axis;

namespace {

bool same_samples(const TimeSeries& a, const TimeSeries& b) {
  if (a.channel_names() != b.channel_names() || a.size() != b.size() || a.rate() != b.rate()) return false;
  for (std::size_t c = 0; c < a.channel_names().size(); ++c)
    if (!std::equal(a.channel(c).begin(), a.channel(c).end(), b.channel(c).begin())) return false;
  return true;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("model validation and config") {
  const auto m = sim::model_from_config(Config{});
  CHECK_NOTHROW(sim::validate(m));
  CHECK(m.natural_frequency[2] == 169.0);
  CHECK(m.cop_distortion_x.coeffs != std::array<double, 9>{});

  auto bad = m;
  bad.damping[1] = 1.0;
  CHECK_THROWS_AS(sim::validate(bad), InvalidSpec);
  bad = m;
  bad.natural_frequency[0] = 0.0;
  CHECK_THROWS_AS(sim::validate(bad), InvalidSpec);
  bad = m;
  bad.sensor_positions[1] = Eigen::Vector2d(-0.5, 0.25);
  CHECK_THROWS_AS(sim::validate(bad), InvalidSpec);

  const auto c = sim::model_from_config(Config::parse("fn_z=150\nxi_z=0.02\nnoise_sigma=1,2,3\n"));
  CHECK(c.natural_frequency[2] == 150.0);
  CHECK(c.damping[2] == 0.02);
  CHECK(c.noise.white_sigma == std::array<double, 3>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(sim::model_from_config(Config::parse("cop_distortion_x=1,2\n")), ConfigError);
}

TEST_CASE("quantisation step is the amplifier resolution") {
  const auto m = sim::model_from_config(Config{});
  for (Axis a : {Axis::X, Axis::Z}) {
    const auto r = sensing::force_range(m.amplifier, a);
    CHECK(sim::quantize(r.resolution * 0.49, m.amplifier, a) == 0.0);
    CHECK(sim::quantize(r.resolution * 0.51, m.amplifier, a) == r.resolution);
    CHECK(sim::quantize(1e6, m.amplifier, a) == r.range);
    CHECK(sim::quantize(-1e6, m.amplifier, a) == -r.range);
  }
  sim::Rng rng(1);
  const auto ts = sim::simulate_impact(m, Axis::Z, 100.0, rng);
  const double res = sensing::force_range(m.amplifier, Axis::Z).resolution;
  for (double v : ts.channel("Fz")) CHECK(std::abs(v / res - std::round(v / res)) < 1e-6);
}

TEST_CASE("determinism") {
  const auto m = sim::model_from_config(Config{});
  auto twice = [&](auto make) {
    sim::Rng a(42), b(42);
    return std::pair{make(a), make(b)};
  };
  {
    auto [x, y] = twice([&](sim::Rng& r) { return sim::simulate_impact(m, Axis::Y, 50.0, r); });
    CHECK(same_samples(x, y));
  }
  {
    auto [x, y] = twice([&](sim::Rng& r) { return sim::simulate_noise(m, 1.5, 2.0, r); });
    CHECK(same_samples(x, y));
  }
  {
    auto [x, y] = twice([&](sim::Rng& r) { return sim::simulate_gait(m, {}, r).forces; });
    CHECK(same_samples(x, y));
  }
  {
    auto [x, y] = twice([&](sim::Rng& r) { return sim::simulate_cop_grid(m, {}, r).wrench; });
    CHECK(same_samples(x, y));
  }
  {
    sim::CalibrationProtocol p;
    p.reference_rate = 320.0;
    p.device_rate = 200.0;
    auto [x, y] = twice([&](sim::Rng& r) {
      return sim::simulate_calibration_run(m, {0.1, 0.1}, {0, 0, 1}, Eigen::Quaterniond::Identity(), p, {}, r);
    });
    CHECK(same_samples(x.reference, y.reference));
    CHECK(same_samples(x.device, y.device));
  }
  sim::Rng a(1), b(2);
  CHECK_FALSE(same_samples(sim::simulate_noise(m, 0.0, 1.0, a), sim::simulate_noise(m, 0.0, 1.0, b)));
}

TEST_CASE("impact response") {
  const auto m = sim::model_from_config(Config{});
  sim::Rng rng(7);

  SUBCASE("z impact recovers the model parameters") {
    const auto ts = sim::simulate_impact(m, Axis::Z, 200.0, rng);
    CHECK(ts.rate() == 10000.0);
    CHECK(ts.duration() == doctest::Approx(1.0));
    const auto peak = signal::estimate_natural_frequency(ts, "Fz");
    CHECK(std::abs(peak.f0 - 169.0) <= peak.spectrum.bin_width());
    const auto fit = signal::fit_damping(ts, "Fz", peak.f0_refined);
    CHECK(std::abs(fit.xi - 0.0093) / 0.0093 < 0.05);
  }

  SUBCASE("heavy damping") {
    auto heavy = m;
    heavy.damping[2] = 0.5;
    const double fd = sim::damped_frequency(169.0, 0.5);
    CHECK(fd == doctest::Approx(169.0 * std::sqrt(0.75)));
    const auto ts = sim::simulate_impact(heavy, Axis::Z, 1000.0, rng,
                                         {.noise_sigma = 0.0, .line_noise = false, .quantize = false});
    signal::DampingOptions o;
    o.min_relative_peak = 1e-6;
    o.min_peaks = 3;
    o.noise_factor = 0.0;
    const auto fit = signal::fit_damping(ts, "Fz", fd, o);
    CHECK(std::abs(fit.xi - 0.5) / 0.5 < 0.05);
    CHECK(std::abs(fit.lambda - 0.5 * 2.0 * std::numbers::pi * 169.0) / fit.lambda < 0.05);
  }

  SUBCASE("zero amplitude has no peak") {
    const auto silent = sim::simulate_impact(m, Axis::Z, 0.0, rng, {.noise_sigma = 0.0, .line_noise = false});
    CHECK_THROWS_AS(signal::estimate_natural_frequency(silent, "Fz"), NoPeak);
  }
}

TEST_CASE("belt noise") {
  SUBCASE("idle band equals the white noise") {
    auto m = sim::model_from_config(Config{});
    m.noise.line_amplitude = {0.0, 0.0, 0.0};
    sim::Rng rng(3);
    const auto r = signal::noise_stats(sim::simulate_noise(m, 0.0, 10.0, rng), 0.0);
    for (std::size_t a = 0; a < 3; ++a) {
      CAPTURE(a);
      CHECK(std::abs(r.axes[a].band / (2.0 * m.noise.white_sigma[a]) - 1.0) < 0.05);
    }
  }
  SUBCASE("50 Hz line") {
    const auto m = sim::model_from_config(Config{});
    sim::Rng rng(4);
    const auto r = signal::noise_stats(sim::simulate_noise(m, 0.0, 10.0, rng), 0.0);
    for (const auto& ax : r.axes) {
      const auto& s = ax.spectrum;
      const auto k = static_cast<std::size_t>(std::llround(50.0 / s.bin_width()));
      double line = 0.0;
      for (std::size_t j = k - 2; j <= k + 2; ++j) line = std::max(line, s.magnitude[j]);
      CHECK(line >= 3.0 * median({s.magnitude.begin() + 1, s.magnitude.end()}));
    }
  }
  SUBCASE("bands over belt speed") {
    const auto m = sim::model_from_config(Config{});
    std::array<double, 3> prev{};
    for (double v = 0.0; v <= 2.5 + 1e-9; v += 0.5) {
      sim::Rng rng(11);
      const auto r = signal::noise_stats(sim::simulate_noise(m, v, 10.0, rng), v);
      CAPTURE(v);
      if (v > 0.0) {
        CHECK(r.axes[0].band > prev[0]);
        CHECK(r.axes[1].band > prev[1]);
      }
      CHECK(r.axes[2].band <= 4.0);
      for (std::size_t a = 0; a < 3; ++a) prev[a] = r.axes[a].band;
    }
    CHECK(prev[0] <= 6.5);
    CHECK(prev[1] <= 8.5);
    CHECK(m.noise.motor_frequency(1.0) == doctest::Approx(1149.0 / 60.0 * 8.0));
  }
}

TEST_CASE("calibration protocol generator") {
  const sim::CalibrationProtocol p;
  CHECK(sim::protocol_force(p, 0.0) == 0.0);
  double peak = 0.0;
  for (double t = 0.0; t < sim::protocol_duration(p); t += 0.01) peak = std::max(peak, sim::protocol_force(p, t));
  CHECK(peak == doctest::Approx(200.0));

  const auto m = sim::model_from_config(Config{});
  sim::CalibrationProtocol fast = p;
  fast.reference_rate = 320.0;
  fast.device_rate = 200.0;
  fast.pose_rate = 50.0;
  sim::CalibrationDistortion d;
  d.device_noise = 0.0;
  d.reference_noise = 0.0;
  d.ringing = 0.0;
  sim::Rng rng(2);
  const auto fx = sim::simulate_calibration_run(m, {0.2, 0.1}, {0, 0, 1}, Eigen::Quaterniond::Identity(), fast, d, rng);
  REQUIRE(fx.truth.preload.size() == 2);
  REQUIRE(fx.truth.ramp_up.size() == 2);
  // Undistorted device differs from the protocol by quantisation only.
  const double res = sensing::force_range(m.amplifier, Axis::Z).resolution;
  const auto fz = fx.device.channel("Fz");
  for (std::size_t i = 0; i < fz.size(); i += 7) CHECK(std::abs(fz[i] - sim::protocol_force(fast, fx.device.time(i))) <= 0.5 * res + 1e-12);
  CHECK(fx.truth.max_error[2] <= res);
  CHECK(fx.pose.position.front().isApprox(Eigen::Vector3d(0.2, 0.1, -m.surface_height)));
}

TEST_CASE("cop grid and shear generators") {
  const auto m = sim::model_from_config(Config{});
  const auto grid = sim::cop_grid({});
  CHECK(grid.size() == 28);
  std::vector<double> ys;
  for (const auto& p : grid) ys.push_back(p.y());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), ys.end());
  CHECK(ys.size() == 8);
  sim::CopGridScenario rect;
  rect.stagger = false;
  CHECK(sim::cop_grid(rect).size() == 28);

  // The distorted position solves raw = p + D(raw).
  for (const auto& p : grid) {
    const auto raw = sim::distorted_position(m, p);
    CHECK((raw - p - Eigen::Vector2d(m.cop_distortion_x(raw), m.cop_distortion_y(raw))).norm() < 1e-12);
  }
  // Distortion peaks at the configured 20 / 12 mm over the surface.
  double px = 0.0, py = 0.0;
  for (double x = -0.761; x <= 0.761; x += 0.01)
    for (double y = -0.255; y <= 0.255; y += 0.01) {
      px = std::max(px, std::abs(m.cop_distortion_x({x, y})));
      py = std::max(py, std::abs(m.cop_distortion_y({x, y})));
    }
  CHECK(px == doctest::Approx(0.020).epsilon(0.05));
  CHECK(py == doctest::Approx(0.012).epsilon(0.05));

  sim::Rng rng(5);
  sim::ShearScenario sc;
  const auto trials = sim::simulate_shear_trials(m, {0.1, 0.0}, sc, rng);
  REQUIRE(trials.size() == 15);
  for (const auto& t : trials) {
    CHECK(t.size() == 200);
    for (const auto& w : t) {
      const double polar = std::acos(w.force.z() / w.force.norm()) * 180.0 / std::numbers::pi;
      CHECK(polar <= 35.0 + 1.0);
    }
  }
}
