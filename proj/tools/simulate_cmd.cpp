#include <cmath>
#include <memory>
#include <numbers>

#include <fmt/format.h>

#include "common.hpp"
#include "treadmill/csv.hpp"
#include "treadmill/errors.hpp"
#include "treadmill/simulator.hpp"

namespace treadmill::cli {

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = ".";
};

void common_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->required();
  cmd->add_option("--config", c.config, "Treadmill model overrides (key=value)");
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

void write_scenario(const fs::path& dir, Config cfg, const Common& c) {
  cfg.set("seed", std::to_string(c.seed));
  write_text_file(dir / "scenario.cfg", cfg.to_string());
}

// -- impact ----------------------------------------------------------------

struct ImpactArgs {
  Common common;
  std::string axis = "z";
  double amplitude = 100.0;
  sim::ImpactOptions opts;
  bool no_line = false;
  bool no_quantize = false;
};

void run_impact(const ImpactArgs& a) {
  const auto model = sim::model_from_config(load_config_or_default(a.common.config));
  const auto axis = sensing::parse_axis(a.axis);
  auto opts = a.opts;
  opts.line_noise = !a.no_line;
  opts.quantize = !a.no_quantize;
  sim::Rng rng(a.common.seed);
  const auto ts = sim::simulate_impact(model, axis, a.amplitude, rng, opts);
  const auto dir = prepare_output(a.common.out);
  write_time_series_csv(dir / "impact.csv", ts);

  const auto i = static_cast<std::size_t>(axis);
  const double fn = model.natural_frequency[i], xi = model.damping[i];
  Config s;
  s.set("axis", sensing::axis_name(axis));
  s.set("channel", ts.channel_names().front());
  s.set("f_n", num(fn));
  s.set("xi", num(xi));
  s.set("f_d", num(sim::damped_frequency(fn, xi)));
  s.set("lambda", num(xi * 2.0 * std::numbers::pi * fn));
  s.set("amplitude", num(a.amplitude));
  s.set("rate", num(opts.rate));
  s.set("duration", num(opts.duration));
  write_scenario(dir, s, a.common);
  note(fmt::format("impact on {}: f_n = {} Hz, xi = {} -> {}", sensing::axis_name(axis), fn, xi,
                   (dir / "impact.csv").string()));
}

// -- noise -----------------------------------------------------------------

struct NoiseArgs {
  Common common;
  double speed = 0.0;
  double duration = 10.0;
  double rate = 1000.0;
};

void run_noise(const NoiseArgs& a) {
  const auto model = sim::model_from_config(load_config_or_default(a.common.config));
  sim::Rng rng(a.common.seed);
  const auto ts = sim::simulate_noise(model, a.speed, a.duration, rng, a.rate);
  const auto dir = prepare_output(a.common.out);
  write_time_series_csv(dir / "noise.csv", ts);
  Config s;
  s.set("speed", num(a.speed));
  s.set("duration", num(a.duration));
  s.set("rate", num(a.rate));
  s.set("motor_frequency", num(model.noise.motor_frequency(a.speed)));
  s.set("line_frequency", num(model.noise.line_frequency));
  s.set("noise_sigma", fmt::format("{},{},{}", num(model.noise.white_sigma[0]), num(model.noise.white_sigma[1]),
                                   num(model.noise.white_sigma[2])));
  write_scenario(dir, s, a.common);
  note(fmt::format("noise at {} m/s for {} s -> {}", a.speed, a.duration, (dir / "noise.csv").string()));
}

// -- calibration -----------------------------------------------------------

struct CalibrationArgs {
  Common common;
  std::string grid = "4x3";
  double margin = 0.1;
  std::string direction = "0.3,0.2,1";
  double tilt = 10.0;
  sim::CalibrationProtocol protocol;
  sim::CalibrationDistortion distortion;
  bool no_quantize = false;
};

void run_calibration(const CalibrationArgs& a) {
  const auto model = sim::model_from_config(load_config_or_default(a.common.config));
  const auto [nx, ny] = parse_dims(a.grid, "--grid");
  if (!(a.margin >= 0.0 && a.margin < 0.5)) throw ConfigError("--margin must lie in [0, 0.5)");
  const auto direction = parse_vector3(a.direction, "--direction");
  if (!(direction.norm() > 0.0)) throw ConfigError("--direction must not be zero");
  auto distortion = a.distortion;
  distortion.quantize = !a.no_quantize;
  const auto dir = prepare_output(a.common.out);

  const double hx = 0.5 * model.surface_length * (1.0 - 2.0 * a.margin);
  const double hy = 0.5 * model.surface_width * (1.0 - 2.0 * a.margin);
  sim::Rng rng(a.common.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Config expected;
  expected.set("points", std::to_string(nx * ny));
  expected.set("full_scale", num(a.protocol.full_scale));
  static const char* axes[] = {"x", "y", "z"};
  int id = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      ++id;
      const Eigen::Vector2d p(nx > 1 ? -hx + 2.0 * hx * i / (nx - 1) : 0.0, ny > 1 ? -hy + 2.0 * hy * j / (ny - 1) : 0.0);
      Eigen::Vector3d tilt_axis(unit(rng), unit(rng), unit(rng));
      if (tilt_axis.norm() < 1e-9) tilt_axis = Eigen::Vector3d::UnitX();
      const double angle = a.tilt * std::numbers::pi / 180.0 * 0.5 * (1.0 + unit(rng));
      const Eigen::Quaterniond q(Eigen::AngleAxisd(angle, tilt_axis.normalized()));
      const auto fx = sim::simulate_calibration_run(model, p, direction, q, a.protocol, distortion, rng);

      const std::string tag = fmt::format("point_{:02d}", id);
      write_time_series_csv(dir / (tag + "_reference.csv"), fx.reference);
      write_time_series_csv(dir / (tag + "_device.csv"), fx.device);
      write_csv(dir / (tag + "_pose.csv"), calib::pose_to_table(fx.pose));

      expected.set(tag + ".x", num(p.x()));
      expected.set(tag + ".y", num(p.y()));
      expected.set(tag + ".clock_offset", num(fx.truth.clock_offset));
      for (std::size_t k = 0; k < 3; ++k) {
        expected.set(fmt::format("{}.max_error_{}", tag, axes[k]), num(fx.truth.max_error[k]));
        for (const auto& [name, v] : {std::pair{"linearity", fx.truth.linearity_pct[k]},
                                      std::pair{"hysteresis", fx.truth.hysteresis_pct[k]},
                                      std::pair{"repeatability", fx.truth.repeatability_pct[k]}})
          if (v) expected.set(fmt::format("{}.{}_{}", tag, name, axes[k]), num(*v));
      }
    }
  write_text_file(dir / "expected.cfg", expected.to_string());
  Config s;
  s.set("grid", a.grid);
  s.set("gain", num(distortion.gain));
  s.set("nonlinearity", num(distortion.nonlinearity));
  s.set("hysteresis_width", num(distortion.hysteresis_width));
  s.set("plateau_offset", num(distortion.plateau_offset));
  write_scenario(dir, s, a.common);
  note(fmt::format("{} calibration points -> {}", id, dir.string()));
}

// -- shear -----------------------------------------------------------------

struct ShearArgs {
  Common common;
  std::string point = "0.1,-0.05";
  sim::ShearScenario scenario;
};

void run_shear(const ShearArgs& a) {
  const auto model = sim::model_from_config(load_config_or_default(a.common.config));
  const auto p = parse_list(a.point, "--point");
  if (p.size() != 2) throw ConfigError("--point: expected x,y");
  sim::Rng rng(a.common.seed);
  const auto trials = sim::simulate_shear_trials(model, {p[0], p[1]}, a.scenario, rng);
  const auto dir = prepare_output(a.common.out);
  write_csv(dir / "shear_trials.csv", cop::shear_trials_to_table(trials));
  Config s;
  s.set("a_z", num(-model.surface_height));
  s.set("point_x", num(p[0]));
  s.set("point_y", num(p[1]));
  s.set("trials", std::to_string(a.scenario.trials));
  s.set("sensor_noise", num(a.scenario.sensor_noise));
  write_scenario(dir, s, a.common);
  note(fmt::format("{} shear trials through ({}, {}) -> {}", trials.size(), p[0], p[1],
                   (dir / "shear_trials.csv").string()));
}

// -- COP grid --------------------------------------------------------------

struct CopGridArgs {
  Common common;
  std::string grid = "7x4";
  bool no_stagger = false;
  sim::CopGridScenario scenario;
};

void run_cop_grid(const CopGridArgs& a) {
  const auto model = sim::model_from_config(load_config_or_default(a.common.config));
  auto sc = a.scenario;
  std::tie(sc.nx, sc.ny) = parse_dims(a.grid, "--grid");
  sc.stagger = !a.no_stagger;
  sim::Rng rng(a.common.seed);
  const auto rec = sim::simulate_cop_grid(model, sc, rng);
  const auto dir = prepare_output(a.common.out);
  write_time_series_csv(dir / "cop_wrench.csv", rec.wrench);
  write_csv(dir / "cop_mocap.csv", rec.mocap);
  CsvTable truth;
  truth.header = {"x", "y", "raw_x", "raw_y"};
  truth.columns.resize(4);
  for (std::size_t k = 0; k < rec.points.size(); ++k) {
    truth.columns[0].push_back(rec.points[k].x());
    truth.columns[1].push_back(rec.points[k].y());
    truth.columns[2].push_back(rec.measured[k].x());
    truth.columns[3].push_back(rec.measured[k].y());
  }
  write_csv(dir / "cop_grid_truth.csv", truth);
  Config s;
  s.set("a_z", num(-model.surface_height));
  s.set("points", std::to_string(rec.points.size()));
  s.set("sensor_noise", num(sc.sensor_noise));
  write_scenario(dir, s, a.common);
  note(fmt::format("{} grid points -> {}", rec.points.size(), (dir / "cop_wrench.csv").string()));
}

// -- gait ------------------------------------------------------------------

struct GaitArgs {
  Common common;
  sim::GaitScenario scenario;
};

void run_gait(const GaitArgs& a) {
  const auto model = sim::model_from_config(load_config_or_default(a.common.config));
  sim::Rng rng(a.common.seed);
  const auto rec = sim::simulate_gait(model, a.scenario, rng);
  const auto dir = prepare_output(a.common.out);
  write_time_series_csv(dir / "gait.csv", rec.forces);
  CsvTable td;
  td.header = {"touchdown", "time"};
  td.columns.resize(2);
  for (std::size_t k = 0; k < rec.touchdown_times.size(); ++k) {
    td.columns[0].push_back(static_cast<double>(k + 1));
    td.columns[1].push_back(rec.touchdown_times[k]);
  }
  write_csv(dir / "touchdowns.csv", td);
  Config s;
  s.set("body_weight", num(a.scenario.body_weight));
  s.set("period", num(a.scenario.period));
  s.set("strides", std::to_string(rec.touchdowns.empty() ? 0 : rec.touchdowns.size() - 1));
  s.set("noise_sigma", num(a.scenario.noise_sigma < 0.0 ? model.noise.white_sigma[2] : a.scenario.noise_sigma));
  write_scenario(dir, s, a.common);
  note(fmt::format("{} touchdowns -> {}", rec.touchdowns.size(), (dir / "gait.csv").string()));
}

}  // namespace

void add_simulate_commands(CLI::App& app) {
  auto* simulate = app.add_subcommand("simulate", "Seeded synthetic recordings with known ground truth");
  simulate->require_subcommand(1);

  auto ia = std::make_shared<ImpactArgs>();
  auto* impact = simulate->add_subcommand("impact", "Damped impact response on one axis");
  common_flags(impact, ia->common);
  impact->add_option("--axis", ia->axis, "x, y or z")->capture_default_str();
  impact->add_option("--amplitude", ia->amplitude, "Initial amplitude (N)")->capture_default_str();
  impact->add_option("--rate", ia->opts.rate, "Sample rate (Hz)")->capture_default_str();
  impact->add_option("--duration", ia->opts.duration, "Record length (s)")->capture_default_str();
  impact->add_option("--noise", ia->opts.noise_sigma, "White noise sigma (N); default from the model");
  impact->add_flag("--no-line", ia->no_line, "Omit the mains line");
  impact->add_flag("--no-quantize", ia->no_quantize, "Skip ADC quantisation");
  impact->callback([ia] { run_impact(*ia); });

  auto na = std::make_shared<NoiseArgs>();
  auto* noise = simulate->add_subcommand("noise", "Idle or running force noise on Fx, Fy, Fz");
  common_flags(noise, na->common);
  noise->add_option("--speed", na->speed, "Belt speed (m/s)")->capture_default_str();
  noise->add_option("--duration", na->duration, "Record length (s)")->capture_default_str();
  noise->add_option("--rate", na->rate, "Sample rate (Hz)")->capture_default_str();
  noise->callback([na] { run_noise(*na); });

  auto ca = std::make_shared<CalibrationArgs>();
  auto* cal = simulate->add_subcommand("calibration", "Calibration point set with expected metrics");
  common_flags(cal, ca->common);
  cal->add_option("--grid", ca->grid, "Points along x and y, NxM")->capture_default_str();
  cal->add_option("--margin", ca->margin, "Edge margin as a fraction of the surface size")->capture_default_str();
  cal->add_option("--direction", ca->direction, "Load direction x,y,z in treadmill coordinates")
      ->capture_default_str();
  cal->add_option("--tilt", ca->tilt, "Largest reference sensor mounting tilt (deg)")->capture_default_str();
  cal->add_option("--full-scale", ca->protocol.full_scale, "Protocol maximum (N)")->capture_default_str();
  cal->add_option("--ramp-rate", ca->protocol.ramp_rate, "Ramp rate (N/s)")->capture_default_str();
  cal->add_option("--plateau", ca->protocol.plateau_duration, "Preload plateau length (s)")->capture_default_str();
  cal->add_option("--reference-rate", ca->protocol.reference_rate, "Reference sensor rate (Hz)")
      ->capture_default_str();
  cal->add_option("--device-rate", ca->protocol.device_rate, "Treadmill rate (Hz)")->capture_default_str();
  cal->add_option("--pose-rate", ca->protocol.pose_rate, "MoCap rate (Hz)")->capture_default_str();
  cal->add_option("--clock-offset", ca->protocol.clock_offset, "Reference minus device clock (s)")
      ->capture_default_str();
  cal->add_option("--gain", ca->distortion.gain, "Device gain")->capture_default_str();
  cal->add_option("--nonlinearity", ca->distortion.nonlinearity, "Quadratic nonlinearity epsilon")
      ->capture_default_str();
  cal->add_option("--hysteresis", ca->distortion.hysteresis_width, "Loop opening at mid range (N)")
      ->capture_default_str();
  cal->add_option("--plateau-offset", ca->distortion.plateau_offset, "Offset on the second preload (N)")
      ->capture_default_str();
  cal->add_option("--ringing", ca->distortion.ringing, "Ringing at preload edges (fraction of full scale)")
      ->capture_default_str();
  cal->add_option("--device-noise", ca->distortion.device_noise, "Device noise sigma (N); default from the model");
  cal->add_option("--reference-noise", ca->distortion.reference_noise, "Reference noise sigma (N)")
      ->capture_default_str();
  cal->add_flag("--no-quantize", ca->no_quantize, "Skip ADC quantisation");
  cal->callback([ca] { run_calibration(*ca); });

  auto sa = std::make_shared<ShearArgs>();
  auto* shear = simulate->add_subcommand("shear", "Forces of varying direction through one fixed point");
  common_flags(shear, sa->common);
  shear->add_option("--point", sa->point, "Application point x,y (m)")->capture_default_str();
  shear->add_option("--trials", sa->scenario.trials, "Number of trials")->capture_default_str();
  shear->add_option("--samples", sa->scenario.samples_per_trial, "Samples per trial")->capture_default_str();
  shear->add_option("--max-polar", sa->scenario.max_polar_deg, "Largest angle from vertical (deg)")
      ->capture_default_str();
  shear->add_option("--noise", sa->scenario.sensor_noise, "Noise per sensor and axis (N)")->capture_default_str();
  shear->callback([sa] { run_shear(*sa); });

  auto ga = std::make_shared<CopGridArgs>();
  auto* grid = simulate->add_subcommand("cop-grid", "Dead weight placed on a grid, with MoCap positions");
  common_flags(grid, ga->common);
  grid->add_option("--grid", ga->grid, "Columns x rows")->capture_default_str();
  grid->add_flag("--no-stagger", ga->no_stagger, "Rectangular lattice instead of staggered columns");
  grid->add_option("--x-span", ga->scenario.x_span, "First to last column (m)")->capture_default_str();
  grid->add_option("--y-span", ga->scenario.y_span, "First to last row (m)")->capture_default_str();
  grid->add_option("--weight", ga->scenario.weight_kg, "Dead weight (kg)")->capture_default_str();
  grid->add_option("--noise", ga->scenario.sensor_noise, "Noise per sensor and axis (N)")->capture_default_str();
  grid->callback([ga] { run_cop_grid(*ga); });

  auto wa = std::make_shared<GaitArgs>();
  auto* gait = simulate->add_subcommand("gait", "Walking ground reaction forces with known touchdowns");
  common_flags(gait, wa->common);
  gait->add_option("--body-weight", wa->scenario.body_weight, "Body weight (N)")->capture_default_str();
  gait->add_option("--period", wa->scenario.period, "Stride period (s)")->capture_default_str();
  gait->add_option("--duration", wa->scenario.duration, "Record length (s)")->capture_default_str();
  gait->add_option("--rate", wa->scenario.rate, "Sample rate (Hz)")->capture_default_str();
  gait->add_option("--noise", wa->scenario.noise_sigma, "Noise sigma (N); default from the model");
  gait->add_option("--skip-step", wa->scenario.skip_step, "Index of a stance to omit");
  gait->callback([wa] { run_gait(*wa); });
}

}  // namespace treadmill::cli
