// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "treadmill/calibration.hpp"
#include "treadmill/config.hpp"
#include "treadmill/cop.hpp"
#include "treadmill/csv.hpp"
#include "treadmill/gait.hpp"
#include "treadmill/plate_design.hpp"
#include "treadmill/sensing_model.hpp"
#include "treadmill/signal_analysis.hpp"
#include "treadmill/simulator.hpp"

using namespace treadmill;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

Outcome table_ranges() {
  struct Row {
    double charge, xy_range, xy_res, z_range, z_res;
  };
  const std::vector<Row> table{{1000, 129.9, 0.0019, 256.4, 0.0039},
                               {5000, 649.4, 0.0099, 1282.1, 0.0195},
                               {10000, 1298.7, 0.0198, 2564.1, 0.0391},
                               {50000, 6493.5, 0.0991, 12820.5, 0.1956}};
  double worst_range = 0.0, worst_res = 0.0;
  for (const auto& r : table) {
    const auto amp = sensing::preset(r.charge);
    const auto xy = sensing::force_range(amp, sensing::Axis::X);
    const auto z = sensing::force_range(amp, sensing::Axis::Z);
    worst_range = std::max({worst_range, std::abs(xy.range - r.xy_range), std::abs(z.range - r.z_range)});
    worst_res = std::max({worst_res, std::abs(xy.resolution - r.xy_res), std::abs(z.resolution - r.z_res)});
  }
  return {worst_range <= 0.1 && worst_res <= 1e-4,
          fmt::format("8 cells, worst |range| {:.3f} N, worst |resolution| {:.2e} N", worst_range, worst_res)};
}

// ---------------------------------------------------------------- 2

double bending_frequency(const design::PlateSpec& s) {
  const double i_s = s.width * (std::pow(s.h_sandwich, 3) - std::pow(s.h_inner, 3)) / 12.0;
  const double i_c = s.width * (std::pow(s.h_compound, 3) - std::pow(s.h_sandwich, 3)) / 12.0;
  const double ei = s.e_sandwich * i_s + s.e_carbon * i_c;
  const double force = 1.0;
  const double deflection = force * std::pow(s.length, 3) / (48.0 * ei);
  return std::sqrt(force / deflection / s.mass) / (2.0 * std::numbers::pi);
}

Outcome plate_equivalence() {
  std::mt19937_64 rng(376);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    design::PlateSpec s;
    s.width = 0.2 + 0.8 * u(rng);
    s.length = 0.5 + 2.0 * u(rng);
    s.h_inner = 0.002 + 0.02 * u(rng);
    s.h_sandwich = s.h_inner + 1e-4 + 0.005 * u(rng);
    s.h_compound = s.h_sandwich + 0.008 * u(rng);
    s.e_sandwich = 1e10 + 1e11 * u(rng);
    s.e_carbon = 1e10 + 2e11 * u(rng);
    s.mass = 5.0 + 100.0 * u(rng);
    const double oracle = bending_frequency(s);
    worst = std::max(worst, std::abs(design::natural_frequency(s) - oracle) / oracle);
  }
  return {worst <= 1e-12, fmt::format("1000 specs, worst relative difference {:.2e}", worst)};
}

// ---------------------------------------------------------------- 3

Outcome quality_factors() {
  const double qx = signal::quality_factor(0.0148), qy = signal::quality_factor(0.033),
               qz = signal::quality_factor(0.0093);
  const bool ok = std::abs(qx - 33.78) <= 0.05 && std::abs(qy - 15.15) <= 0.15 &&
                  std::abs(qz - 1.0 / (2.0 * 0.0093)) <= 1e-12 && std::abs(qz - 53.8) <= 0.05;
  return {ok, fmt::format("Q = {:.2f} / {:.2f} / {:.2f}", qx, qy, qz)};
}

// ---------------------------------------------------------------- 4

Outcome impact_round_trip() {
  auto model = sim::model_from_config(Config{});
  std::mt19937_64 draw(4);
  std::uniform_real_distribution<double> uf(50.0, 400.0), ux(0.005, 0.05);
  const double amplitude = 100.0;
  int good = 0, raw_bin = 0;
  double worst_bins = 0.0, worst_xi = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double fn = uf(draw), xi = ux(draw);
    model.natural_frequency[2] = fn;
    model.damping[2] = xi;
    sim::Rng rng(1000 + static_cast<unsigned>(k));
    const auto ts = sim::simulate_impact(model, sensing::Axis::Z, amplitude, rng,
                                         {.rate = 10000.0, .duration = 1.0, .noise_sigma = 0.01 * amplitude,
                                          .line_noise = false, .quantize = true});
    const auto& ch = ts.channel_names().front();
    try {
      const auto peak = signal::estimate_natural_frequency(ts, ch);
      const auto fit = signal::fit_damping(ts, ch, peak.f0_refined);
      const double bins = std::abs(peak.f0_refined - fn) / peak.spectrum.bin_width();
      if (std::abs(peak.f0 - fn) <= peak.spectrum.bin_width()) ++raw_bin;
      const double xi_err = std::abs(fit.xi - xi) / xi;
      worst_bins = std::max(worst_bins, bins);
      worst_xi = std::max(worst_xi, xi_err);
      if (bins <= 1.0 && xi_err <= 0.05) ++good;
    } catch (const std::exception&) {
      // counted as a miss
    }
  }
  return {good >= 95, fmt::format("{}/100 recovered, worst refined f0 {:.2f} bins ({}/100 on the peak bin alone), "
                                  "worst xi {:.2f} %",
                                  good, worst_bins, raw_bin, 100.0 * worst_xi)};
}

// ---------------------------------------------------------------- 5

calib::CalibrationRun calibration_run(const sim::CalibrationDistortion& base, unsigned seed) {
  auto d = base;
  d.device_noise = 0.0;
  d.reference_noise = 0.0;
  d.ringing = 0.0;
  const auto model = sim::model_from_config(Config{});
  sim::Rng rng(seed);
  const auto fx = sim::simulate_calibration_run(model, {0.25, -0.1}, Eigen::Vector3d::UnitZ(),
                                                Eigen::Quaterniond::Identity(), {}, d, rng);
  return calib::synchronize(fx.reference, fx.pose, fx.device, 1);
}

Outcome calibration_round_trip() {
  sim::CalibrationDistortion gain, quad, loop, offset;
  gain.gain = 1.01;
  quad.nonlinearity = 0.01;
  loop.hysteresis_width = 0.5;
  offset.plateau_offset = 0.8;

  const auto g = calibration_run(gain, 1);
  const double max_err = calib::max_error(g, calib::segment_protocol(g.reference))[2];
  const auto q = calibration_run(quad, 2);
  const auto lin = calib::linearity(q, calib::segment_protocol(q.reference))[2];
  const auto h = calibration_run(loop, 3);
  const auto hys = calib::hysteresis(h, calib::segment_protocol(h.reference))[2];
  const auto r = calibration_run(offset, 4);
  const auto rep = calib::repeatability(r, calib::segment_protocol(r.reference))[2];

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double l = lin.value_or(nan), hy = hys.value_or(nan), re = rep.value_or(nan);
  const bool ok = std::abs(max_err - 2.0) <= 0.1 && std::abs(l - 0.25) <= 0.03 && std::abs(hy - 0.25) <= 0.03 &&
                  std::abs(re - 0.40) <= 0.02;
  return {ok, fmt::format("max_error {:.4f} N, linearity {:.4f} %, hysteresis {:.4f} %, repeatability {:.4f} %",
                          max_err, l, hy, re)};
}

// ---------------------------------------------------------------- 6

Outcome shear_recovery() {
  const auto model = sim::model_from_config(Config{});
  sim::ShearScenario clean;
  clean.trials = 15;
  clean.sensor_noise = 0.0;
  sim::Rng rng(6);
  const auto exact = cop::calibrate_shear(sim::simulate_shear_trials(model, {0.2, -0.1}, clean, rng));
  const double exact_err = std::abs(-exact.a_z - model.surface_height);

  sim::ShearScenario noisy;
  noisy.trials = 15;
  const auto cal = cop::calibrate_shear(sim::simulate_shear_trials(model, {0.2, -0.1}, noisy, rng));
  const double noisy_err = std::abs(-cal.a_z - model.surface_height);
  const bool ok = exact.trials.size() == 15 && exact_err <= 1e-6 && noisy_err <= 0.005 && cal.spread_x <= 0.013 &&
                  cal.spread_y <= 0.003;
  return {ok, fmt::format("noise-free |a_z error| {:.1e} m; noisy {:.2e} m, spread {:.4f} / {:.4f} m", exact_err,
                          noisy_err, cal.spread_x, cal.spread_y)};
}

// ---------------------------------------------------------------- 7

Eigen::Vector2d worst_residual(const std::vector<cop::CopSample>& samples, const cop::CopCorrectionModel& m) {
  Eigen::Vector2d worst = Eigen::Vector2d::Zero();
  for (const auto& s : samples) worst = worst.cwiseMax((cop::correct_cop(s.cop, m) - *s.ground_truth).cwiseAbs());
  return worst;
}

Outcome cop_surface() {
  const auto model = sim::model_from_config(Config{});
  const double a_z = -model.surface_height;

  // Grid nodes through the noise-free distortion.
  std::vector<cop::CopSample> clean;
  for (const auto& p : sim::cop_grid(sim::CopGridScenario{})) {
    cop::CopSample s;
    s.cop = sim::distorted_position(model, p);
    s.ground_truth = p;
    clean.push_back(s);
  }
  const auto exact = cop::fit_cop_error_surface(clean, a_z);
  const auto exact_res = worst_residual(clean, exact);

  // Full recording with sensor noise, windowing and MoCap.
  sim::Rng rng(7);
  const auto rec = sim::simulate_cop_grid(model, {}, rng);
  const auto samples = cop::static_cop_samples(rec.wrench, rec.mocap, a_z);
  const auto noisy = cop::fit_cop_error_surface(samples, a_z);
  const auto noisy_res = worst_residual(samples, noisy);

  const bool ok = clean.size() == 28 && samples.size() == 28 && exact.r2_x >= 0.999 && exact.r2_y >= 0.999 &&
                  noisy.r2_x >= 0.999 && noisy.r2_y >= 0.999 && exact_res.maxCoeff() <= 1e-9 &&
                  noisy_res.x() <= 1e-3 && noisy_res.y() <= 5e-4;
  return {ok, fmt::format("28 points, R^2 {:.5f} / {:.5f}; noise-free residual {:.1e} m; noisy {:.2f} / {:.2f} mm",
                          noisy.r2_x, noisy.r2_y, exact_res.maxCoeff(), 1e3 * noisy_res.x(), 1e3 * noisy_res.y())};
}

// ---------------------------------------------------------------- 8

// k = 1 bit-identical, k = 0.1 and 10 within the forward error bound of the COP expression.
Outcome cop_invariances() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a_z = -0.078;
  double worst_ulps = 0.0;
  bool identity_exact = true, vertical_exact = true;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d f(150.0 * u(rng), 150.0 * u(rng), 500.0 + 300.0 * u(rng));
    const Eigen::Vector3d p(0.7 * u(rng), 0.25 * u(rng), a_z);
    const auto w = cop::wrench_at(f, p);
    const auto ref = cop::cop_from_wrench(w, a_z);
    for (double k : {0.1, 1.0, 10.0}) {
      const cop::Wrench kw{k * w.force, k * w.moment};
      const auto c = cop::cop_from_wrench(kw, a_z, 0.0);
      if (k == 1.0) {
        identity_exact = identity_exact && c == ref;
        continue;
      }
      // |My| + |a_z Fx| over |Fz|, and the same for x, bound the rounding error.
      const Eigen::Vector2d scale((std::abs(w.moment.y()) + std::abs(a_z * w.force.x())) / std::abs(w.force.z()),
                                  (std::abs(w.moment.x()) + std::abs(a_z * w.force.y())) / std::abs(w.force.z()));
      const double eps = std::numeric_limits<double>::epsilon();
      worst_ulps = std::max(worst_ulps, ((c - ref).cwiseAbs().array() / (eps * scale.array())).maxCoeff());
    }
    const auto v = cop::wrench_at({0.0, 0.0, f.z()}, p);
    vertical_exact = vertical_exact && cop::cop_from_wrench(v, 0.0) == cop::cop_from_wrench(v, a_z) &&
                     cop::cop_from_wrench(v, a_z) == cop::cop_from_wrench(v, -0.5);
  }
  return {identity_exact && vertical_exact && worst_ulps <= 4.0,
          fmt::format("k = 1 bit-identical: {}; k = 0.1, 10 within {:.2f} ulp of the bound; vertical independent of "
                      "a_z: {}",
                      identity_exact, worst_ulps, vertical_exact)};
}

// ---------------------------------------------------------------- 9

Outcome gait_round_trip() {
  const auto model = sim::model_from_config(Config{});
  sim::GaitScenario sc;
  sc.duration = 20.0;

  auto quiet = sc;
  quiet.noise_sigma = 0.0;
  sim::Rng r1(9);
  const auto clean = sim::simulate_gait(model, quiet, r1);
  const auto clean_strides = gait::segment_strides(clean.forces, sc.body_weight);
  const auto clean_e = gait::average_strides(clean.forces, clean_strides, sc.body_weight);
  double clean_band = 0.0;
  for (const auto& ax : clean_e.axes)
    for (double b : ax.band) clean_band = std::max(clean_band, b);

  sim::Rng r2(10);
  const auto noisy = sim::simulate_gait(model, sc, r2);
  const auto strides = gait::segment_strides(noisy.forces, sc.body_weight);
  const auto e = gait::average_strides(noisy.forces, strides, sc.body_weight, {.normalize = false});
  double worst = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    const double expected = 1.96 * model.noise.white_sigma[a];
    worst = std::max(worst, std::abs(e.mean_band(e.axes[a].channel) / expected - 1.0));
  }
  const bool ok = clean_strides.size() == 30 && strides.size() == 30 && clean_band == 0.0 && worst <= 0.05;
  return {ok, fmt::format("{} / {} strides, identical-stride band {}, noisy band off 1.96 sigma by {:.2f} %",
                          clean_strides.size(), strides.size(), clean_band, 100.0 * worst)};
}

// ---------------------------------------------------------------- 10

bool run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + TREADMILL_CLI + "\" " + args + " >>\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

bool run_pipelines(const fs::path& root) {
  fs::remove_all(root);
  fs::create_directories(root);
  const auto log = root / "log.txt";
  auto d = [&](const std::string& name) { return "\"" + (root / name).string() + "\""; };
  const std::vector<std::string> steps{
      "simulate impact --seed 21 --out " + d("impact"),
      "analyze impact --input " + d("impact/impact.csv") + " --out " + d("impact/analysis"),
      "simulate noise --seed 22 --speed 1.0 --out " + d("noise"),
      "analyze noise --input " + d("noise/noise.csv") + " --speed 1.0 --out " + d("noise/analysis"),
      "simulate calibration --seed 23 --grid 2x2 --out " + d("calibration"),
      "calibrate iso376 --dir " + d("calibration") + " --out " + d("calibration/analysis"),
      "simulate shear --seed 24 --out " + d("shear"),
      "cop shear --input " + d("shear/shear_trials.csv") + " --out " + d("shear/analysis"),
      "simulate cop-grid --seed 25 --out " + d("grid"),
      "cop surface --wrench " + d("grid/cop_wrench.csv") + " --mocap " + d("grid/cop_mocap.csv") +
          " --a-z -0.078 --out " + d("grid/analysis"),
      "cop apply --skip-outside --model " + d("grid/analysis/cop_model.txt") + " --input " +
          d("grid/cop_wrench.csv") + " --out " + d("grid/applied"),
      "simulate gait --seed 26 --out " + d("gait"),
      "gait average --input " + d("gait/gait.csv") + " --body-weight 700 --out " + d("gait/analysis"),
  };
  for (const auto& s : steps)
    if (!run_cli(s, log)) {
      std::fprintf(stderr, "pipeline step failed: %s\n", s.c_str());
      return false;
    }
  return true;
}

Outcome determinism() {
  const fs::path a = fs::current_path() / "acceptance_run_a", b = fs::current_path() / "acceptance_run_b";
  if (!run_pipelines(a) || !run_pipelines(b)) return {false, "a pipeline step failed"};
  std::size_t compared = 0, differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    const auto other = b / fs::relative(e.path(), a);
    ++compared;
    if (!fs::exists(other) || read_text_file(e.path()) != read_text_file(other)) ++differing;
  }
  return {compared >= 20 && differing == 0, fmt::format("{} CSV files compared, {} differ", compared, differing)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit;  // s, 0 for none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "amplifier table ranges", 1.0, table_ranges},
      {2, "closed-form plate frequency", 1.0, plate_equivalence},
      {3, "quality factors", 1.0, quality_factors},
      {4, "impact round trip", 30.0, impact_round_trip},
      {5, "calibration metrics round trip", 10.0, calibration_round_trip},
      {6, "shear offset recovery", 5.0, shear_recovery},
      {7, "COP surface correction", 5.0, cop_surface},
      {8, "COP invariances", 1.0, cop_invariances},
      {9, "gait round trip", 5.0, gait_round_trip},
      {10, "determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double t = seconds_since(t0);
    const bool in_time = c.limit <= 0.0 || t < c.limit;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), t,
                in_time ? "" : fmt::format(", limit {} s", c.limit).c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
