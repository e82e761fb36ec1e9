#pragma once

#include <string>
#include <vector>

#include "treadmill/time_series.hpp"

namespace treadmill::gait {

inline constexpr double kGravity = 9.81;  ///< m/s^2

struct StrideWindow {
  std::size_t start = 0;  ///< touchdown sample
  std::size_t end = 0;    ///< next touchdown sample
  double start_time = 0.0;
  double end_time = 0.0;
  double duration() const { return end_time - start_time; }
  bool outlier = false;  ///< duration outside the tolerance around the median
};

struct SegmentOptions {
  std::string channel = "Fz";
  double rise_fraction = 0.05;    ///< of body weight
  double fall_fraction = 0.03;
  double onset_fraction = 0.005;  ///< touchdown refined back to this level
  double min_unloaded = 0.05;     ///< s below the fall level before a touchdown counts
  double outlier_tolerance = 0.3; ///< relative to the median stride duration
};

/// Touchdowns are upward crossings of the rise threshold that follow at least
/// `min_unloaded` seconds below the fall threshold, moved back to the last
/// sample at or below the onset level. Consecutive touchdowns bound a stride.
/// Throws NoStridesDetected (fewer than two touchdowns or non-positive
/// body weight).
std::vector<StrideWindow> segment_strides(const TimeSeries& ts, double body_weight,
                                          const SegmentOptions& opts = {});

struct EnsembleOptions {
  std::size_t grid_points = 101;
  bool normalize = true;   ///< divide by body weight
  bool sem = false;        ///< band = 1.96 * standard error instead of 1.96 * std
  bool skip_outliers = true;
};

struct AxisEnsemble {
  std::string channel;
  std::vector<double> mean;
  std::vector<double> band;  ///< 95 % half-width
};

struct StrideEnsemble {
  std::vector<double> normalized_time;  ///< percent of stride
  std::vector<AxisEnsemble> axes;
  std::size_t stride_count = 0;
  bool normalized = true;
  double body_weight = 0.0;  ///< N
  double mean_band(const std::string& channel) const;
};

/// Resamples every stride onto a 0..100 % grid with linear interpolation
/// and forms the per-point mean and 95 % band over strides. All force
/// channels present (Fx, Fy, Fz) are averaged.
/// Throws NoStridesDetected when no usable window remains.
StrideEnsemble average_strides(const TimeSeries& ts, const std::vector<StrideWindow>& windows, double body_weight,
                               const EnsembleOptions& opts = {});

CsvTable ensemble_to_table(const StrideEnsemble& e);
CsvTable strides_to_table(const std::vector<StrideWindow>& windows);

}  // namespace treadmill::gait
