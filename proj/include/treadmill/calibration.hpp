#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "treadmill/time_series.hpp"

namespace treadmill::calib {

inline const std::array<std::string, 3> kForceChannels{"Fx", "Fy", "Fz"};

using AxisValues = std::array<double, 3>;
using OptionalAxisValues = std::array<std::optional<double>, 3>;

struct Interval {
  double start = 0.0;  ///< s
  double end = 0.0;    ///< s
  double duration() const { return end - start; }
};

/// A load plateau or ramp. For ramps `low_level` and `high_level` are the
/// force levels the ramp connects; for plateaus both hold the plateau level.
struct Phase {
  Interval interval;
  double low_level = 0.0;
  double high_level = 0.0;
};

struct ProtocolPhases {
  std::vector<Phase> preload;
  std::vector<Phase> ramp_up;
  std::vector<Phase> ramp_down;
};

struct ProtocolOptions {
  double plateau_max_slope = 1.0;     ///< N/s
  double plateau_min_duration = 5.0;  ///< s
  double plateau_min_level = 0.8;     ///< fraction of the peak force
  double ramp_min_slope = 1.0;        ///< N/s
  double ramp_min_duration = 5.0;     ///< s
  double ramp_low_level = 0.2;        ///< ramps must start or end below this fraction
  double derivative_window = 0.5;     ///< s, central-difference span
  std::size_t expected_preloads = 2;
  std::size_t expected_ramps = 2;
};

/// Force magnitude over Fx/Fy/Fz, or |first channel| for single-channel data.
std::vector<double> force_magnitude(const TimeSeries& ts);

/// Finds the two preload plateaus and the two up/down ramp pairs.
/// Throws ProtocolMismatch listing the counts found otherwise.
ProtocolPhases segment_protocol(const TimeSeries& reference, const ProtocolOptions& opts = {});

/// Reference and device force on one common sample grid, in treadmill
/// coordinates.
struct CalibrationRun {
  TimeSeries reference;
  TimeSeries device;
  int point_id = 0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  ///< m
  double clock_offset = 0.0;  ///< reference time minus device time, s
};

/// Rigid-body pose samples of the reference sensor.
struct PoseTrack {
  std::vector<double> time;
  std::vector<Eigen::Vector3d> position;
  std::vector<Eigen::Quaterniond> orientation;  ///< sensor frame -> treadmill frame

  Eigen::Quaterniond orientation_at(double t) const;
  Eigen::Vector3d mean_position() const;
};

PoseTrack read_pose_csv(const std::filesystem::path& path);
PoseTrack pose_from_table(const CsvTable& table);
CsvTable pose_to_table(const PoseTrack& pose);

struct SyncOptions {
  double max_lag = 0.5;      ///< s, search range around the onset guess
  double onset_window = 1.0; ///< s either side of the first load onset
};

/// Rotates the reference into treadmill coordinates with the pose track,
/// estimates the clock offset by aligning the load onsets and
/// resamples the reference onto the device clock over the common window.
CalibrationRun synchronize(const TimeSeries& reference, const PoseTrack& pose, const TimeSeries& device,
                           int point_id, const SyncOptions& opts = {});

struct EvaluationOptions {
  double full_scale = 200.0;          ///< N, protocol maximum
  double transient_exclusion = 1.0;   ///< s trimmed from both ends of every phase
  double min_axis_span = 0.1;         ///< axes whose reference span is below this fraction of full scale are skipped
  int linearity_degree = 4;          ///< smoothing of the characteristic curve
  int hysteresis_degree = 6;          ///< smoothing of each branch
  std::size_t hysteresis_ramp = 0;    ///< which up/down pair to use
  bool terminal_linearity = true;     ///< false: least-squares line through the samples
};

/// Steady-state windows: every plateau and ramp trimmed by the transient
/// exclusion.
std::vector<Interval> evaluation_windows(const ProtocolPhases& phases, double exclusion);

AxisValues max_error(const CalibrationRun& run, const ProtocolPhases& phases, const EvaluationOptions& opts = {});
OptionalAxisValues linearity(const CalibrationRun& run, const ProtocolPhases& phases,
                             const EvaluationOptions& opts = {});
OptionalAxisValues repeatability(const CalibrationRun& run, const ProtocolPhases& phases,
                                 const EvaluationOptions& opts = {});
OptionalAxisValues hysteresis(const CalibrationRun& run, const ProtocolPhases& phases,
                              const EvaluationOptions& opts = {});

/// Largest value among the evaluated axes (0 when none were evaluated).
double worst(const OptionalAxisValues& v);

struct PointReport {
  int point_id = 0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  AxisValues max_error{};
  OptionalAxisValues linearity_pct;
  OptionalAxisValues repeatability_pct;
  OptionalAxisValues hysteresis_pct;
};

PointReport evaluate_run(const CalibrationRun& run, const ProtocolOptions& protocol = {},
                         const EvaluationOptions& opts = {});

struct CalibrationReport {
  std::vector<PointReport> points;
  double linearity_pct = 0.0;
  double repeatability_pct = 0.0;
  double hysteresis_pct = 0.0;
  AxisValues max_error{};
};

CalibrationReport assemble_report(std::vector<PointReport> points);

}  // namespace treadmill::calib
