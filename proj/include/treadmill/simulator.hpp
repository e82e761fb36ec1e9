#pragma once

#include <array>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "treadmill/calibration.hpp"
#include "treadmill/config.hpp"
#include "treadmill/cop.hpp"
#include "treadmill/sensing_model.hpp"
#include "treadmill/time_series.hpp"

namespace treadmill::sim {

using Rng = std::mt19937_64;

/// Force-channel disturbances. Sigmas and amplitudes refer to the summed
/// channels Fx, Fy, Fz.
struct NoiseModel {
  std::array<double, 3> white_sigma{0.2, 0.2, 0.46};  ///< N
  std::array<double, 3> line_amplitude{0.1, 0.1, 0.1};  ///< N
  double line_frequency = 50.0;                         ///< Hz
  double motor_rpm_per_speed = 1149.0;                  ///< rpm per m/s of belt speed
  double n_teeth = 8.0;
  std::array<double, 3> harmonic_gain{1.7, 2.25, 0.95};  ///< N per m/s

  /// Tooth-meshing frequency rpm / 60 * n_teeth at the given belt speed.
  double motor_frequency(double belt_speed) const { return motor_rpm_per_speed * belt_speed / 60.0 * n_teeth; }
};

struct TreadmillModel {
  std::array<double, 3> natural_frequency{385.0, 204.0, 169.0};  ///< Hz, x y z
  std::array<double, 3> damping{0.0148, 0.033, 0.0093};
  /// Corners of a rectangle centred on the origin.
  std::array<Eigen::Vector2d, 4> sensor_positions{
      Eigen::Vector2d(0.7, 0.25), Eigen::Vector2d(-0.7, 0.25), Eigen::Vector2d(-0.7, -0.25),
      Eigen::Vector2d(0.7, -0.25)};
  double surface_height = 0.078;  ///< m above the sensor plane
  double surface_length = 1.522;  ///< m, along x
  double surface_width = 0.510;   ///< m, along y
  sensing::AmplifierConfig amplifier;
  NoiseModel noise;
  /// COP error as a function of the measured position.
  cop::ErrorSurface cop_distortion_x;
  cop::ErrorSurface cop_distortion_y;
};

/// Throws InvalidSpec.
void validate(const TreadmillModel& model);

/// Keys (all optional): fn_x fn_y fn_z, xi_x xi_y xi_z, sensor_x sensor_y,
/// surface_height, surface_length, surface_width, amplifier keys, noise_sigma,
/// line_amplitude, line_frequency, motor_rpm_per_speed, n_teeth,
/// harmonic_gain (three values each where per axis), cop_distortion_x /
/// cop_distortion_y (9 coefficients over the surface normalised to [-1, 1])
/// with optional cop_distortion_x_amplitude / _y_amplitude rescaling the
/// peak magnitude over the surface.
TreadmillModel model_from_config(const Config& cfg);

/// Default COP distortion shapes scaled to the given peak magnitudes (m).
void set_cop_distortion(TreadmillModel& model, double amplitude_x, double amplitude_y);

/// Rounds to the amplifier resolution and clips to its range.
double quantize(double value, const sensing::AmplifierConfig& amp, sensing::Axis axis);

// -- impact ----------------------------------------------------------------

struct ImpactOptions {
  double rate = 10000.0;     ///< Hz
  double duration = 1.0;     ///< s
  double noise_sigma = -1.0; ///< N; negative uses the model's idle noise
  bool line_noise = true;
  bool quantize = true;
};

/// A exp(-lambda t) cos(2 pi f_d t) from t = 0, lambda = xi 2 pi f_n,
/// f_d = f_n sqrt(1 - xi^2), on a single channel named after the axis.
TimeSeries simulate_impact(const TreadmillModel& model, sensing::Axis axis, double amplitude, Rng& rng,
                           const ImpactOptions& opts = {});

double damped_frequency(double f_n, double xi);

// -- noise -----------------------------------------------------------------

TimeSeries simulate_noise(const TreadmillModel& model, double belt_speed, double duration, Rng& rng,
                          double rate = 1000.0);

// -- calibration -----------------------------------------------------------

struct CalibrationProtocol {
  double full_scale = 200.0;      ///< N
  double ramp_rate = 6.0;         ///< N/s
  double plateau_duration = 30.0; ///< s
  double rise_time = 0.5;         ///< s, preload edges
  double rest = 10.0;             ///< s between preloads and before the ramps
  double lead = 5.0;              ///< s of rest at the start
  double tail = 5.0;              ///< s of rest at the end
  int preloads = 2;
  int cycles = 2;
  double reference_rate = 1600.0;
  double device_rate = 1000.0;
  double pose_rate = 200.0;
  double clock_offset = 0.4137;   ///< reference clock minus device clock, s
};

struct CalibrationDistortion {
  double gain = 1.0;
  double nonlinearity = 0.0;      ///< epsilon in eps F|F| / full_scale
  double hysteresis_width = 0.0;  ///< N, loop opening at mid range
  double plateau_offset = 0.0;    ///< N added on the second preload plateau
  double ringing = 0.02;          ///< fraction of full scale excited at preload edges
  double device_noise = -1.0;     ///< N; negative uses the model's idle noise
  double reference_noise = 0.05;  ///< N
  bool quantize = true;
};

/// Ground truth emitted with a simulated calibration point.
struct CalibrationTruth {
  std::vector<calib::Interval> preload;  ///< device clock
  std::vector<calib::Interval> ramp_up;
  std::vector<calib::Interval> ramp_down;
  double clock_offset = 0.0;
  calib::OptionalAxisValues linearity_pct;
  calib::OptionalAxisValues hysteresis_pct;
  calib::OptionalAxisValues repeatability_pct;
  calib::AxisValues max_error{};
};

struct CalibrationFixture {
  TimeSeries reference;  ///< sensor frame, reference clock
  TimeSeries device;     ///< treadmill frame, device clock
  calib::PoseTrack pose; ///< reference clock
  CalibrationTruth truth;
};

/// Force along `direction` (treadmill frame, normalised internally) at
/// `point`. The reference sensor is mounted with `orientation` (sensor frame
/// to treadmill frame).
CalibrationFixture simulate_calibration_run(const TreadmillModel& model, const Eigen::Vector2d& point,
                                            const Eigen::Vector3d& direction,
                                            const Eigen::Quaterniond& orientation,
                                            const CalibrationProtocol& protocol,
                                            const CalibrationDistortion& distortion, Rng& rng);

/// Noise-free magnitude of the protocol at device time t.
double protocol_force(const CalibrationProtocol& protocol, double t);
double protocol_duration(const CalibrationProtocol& protocol);

// -- shear -----------------------------------------------------------------

struct ShearScenario {
  int trials = 15;
  int samples_per_trial = 200;
  double max_polar_deg = 35.0;
  double force_min = 100.0;      ///< N
  double force_max = 300.0;
  double sensor_noise = 0.25;    ///< N per sensor and axis
};

/// Per-sensor readings reproducing the wrench of force `f` applied at
/// `point` (z negative above the sensor plane).
std::array<Eigen::Vector3d, 4> sensor_readings(const TreadmillModel& model, const Eigen::Vector3d& f,
                                               const Eigen::Vector3d& point);

std::vector<std::vector<cop::Wrench>> simulate_shear_trials(const TreadmillModel& model, const Eigen::Vector2d& point,
                                                            const ShearScenario& scenario, Rng& rng);

// -- COP grid --------------------------------------------------------------

struct CopGridScenario {
  int nx = 7;
  int ny = 4;
  double x_span = 1.2;     ///< m, first to last column
  double y_span = 0.33;    ///< m, first to last row
  /// Odd columns shifted up and even columns down by a quarter row spacing,
  /// so both axes carry enough distinct coordinates for a quartic.
  bool stagger = true;
  double weight_kg = 15.0;
  double hold = 1.5;       ///< s loaded per point
  double gap = 0.5;        ///< s unloaded between points
  double rate = 1000.0;
  double mocap_rate = 200.0;
  double sensor_noise = 0.25;  ///< N per sensor and axis
};

struct CopGridRecording {
  TimeSeries wrench;                     ///< time, Fx..Mz
  CsvTable mocap;                        ///< time, x, y
  std::vector<Eigen::Vector2d> points;   ///< true weight positions
  std::vector<Eigen::Vector2d> measured; ///< noise-free distorted COP
};

std::vector<Eigen::Vector2d> cop_grid(const CopGridScenario& scenario);

/// Solves raw = p + D(raw) for the distorted COP of a load at p.
Eigen::Vector2d distorted_position(const TreadmillModel& model, const Eigen::Vector2d& p);

CopGridRecording simulate_cop_grid(const TreadmillModel& model, const CopGridScenario& scenario, Rng& rng);

// -- gait ------------------------------------------------------------------

struct GaitScenario {
  double body_weight = 700.0;    ///< N
  double period = 0.65;          ///< s, stride
  double duration = 20.0;        ///< s
  double rate = 2000.0;          ///< Hz
  double stance_fraction = 0.6;
  double peak_ratio = 1.2;       ///< vertical peak over body weight
  double valley_depth = 0.3;     ///< weight of the sin(3 pi s) term shaping the M
  double start_offset = 0.1;     ///< s to the first touchdown
  double noise_sigma = -1.0;     ///< N; negative uses the model's idle noise
  int skip_step = -1;            ///< index of a stance to omit, -1 for none
};

struct GaitRecording {
  TimeSeries forces;  ///< Fx, Fy, Fz
  std::vector<std::size_t> touchdowns;
  std::vector<double> touchdown_times;
};

/// Vertical stance profile over the stance fraction s in [0, 1], peak 1.
double stance_shape(double s, double valley_depth);

GaitRecording simulate_gait(const TreadmillModel& model, const GaitScenario& scenario, Rng& rng);

}  // namespace treadmill::sim
