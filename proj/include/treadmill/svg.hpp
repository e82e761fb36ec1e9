#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "treadmill/error_map.hpp"

namespace treadmill::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> band;  ///< optional half-width around y, drawn shaded
  bool markers = false;      ///< points instead of a polyline
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<double> reference_lines;  ///< horizontal, dashed
  bool log_y = false;
  bool equal_aspect = false;
};

std::string render(const LinePlot& plot);

/// Values row-major over (x, y); NaN cells are left blank.
struct HeatMap {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string value_label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;
  std::optional<Eigen::Vector2d> marker;
};

std::string render(const HeatMap& map);

/// Flat-shaded triangles coloured by the mean node error of one axis.
std::string render_error_map(const calib::ErrorMap& map, std::size_t axis, const std::string& title);

}  // namespace treadmill::plot
