#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace treadmill::calib {

struct MapNode {
  Eigen::Vector2d position;
  std::array<double, 3> error;  ///< per axis, N
};

/// Piecewise-linear interpolant over a Delaunay triangulation of the
/// calibration points. Defined on their convex hull only.
class ErrorMap {
 public:
  /// Throws InsufficientPoints for fewer than four or collinear points.
  explicit ErrorMap(std::vector<MapNode> nodes);

  /// Throws QueryOutsideHull.
  double evaluate(const Eigen::Vector2d& p, std::size_t axis) const;
  bool contains(const Eigen::Vector2d& p) const;

  const std::vector<MapNode>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }

 private:
  // Index of the triangle containing p and its barycentric weights, or -1.
  int locate(const Eigen::Vector2d& p, Eigen::Vector3d& weights) const;

  std::vector<MapNode> nodes_;
  std::vector<std::array<int, 3>> triangles_;
};

ErrorMap build_error_map(std::vector<MapNode> nodes);

/// Bowyer-Watson Delaunay triangulation; exposed for testing.
std::vector<std::array<int, 3>> delaunay(const std::vector<Eigen::Vector2d>& points);

}  // namespace treadmill::calib
