#include "treadmill/error_map.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "treadmill/errors.hpp"

namespace treadmill::calib {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

bool in_circumcircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                     const Eigen::Vector2d& p) {
  // Counter-clockwise (a, b, c) assumed.
  const double ax = a.x() - p.x(), ay = a.y() - p.y();
  const double bx = b.x() - p.x(), by = b.y() - p.y();
  const double cx = c.x() - p.x(), cy = c.y() - p.y();
  const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) - (bx * bx + by * by) * (ax * cy - cx * ay) +
                     (cx * cx + cy * cy) * (ax * by - bx * ay);
  return det > 0.0;
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Eigen::Vector2d>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw InsufficientPoints(fmt::format("triangulation needs at least 3 points, got {}", n));

  Eigen::Vector2d lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);
  const Eigen::Vector2d mid = 0.5 * (lo + hi);

  // Work in normalized coordinates with a super-triangle far outside.
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(points.size() + 3);
  for (const auto& p : points) pts.push_back((p - mid) / span);
  pts.emplace_back(-1e4, -1e4);
  pts.emplace_back(1e4, -1e4);
  pts.emplace_back(0.0, 1e4);

  std::vector<std::array<int, 3>> tris{{n, n + 1, n + 2}};
  for (int i = 0; i < n; ++i) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    std::map<std::pair<int, int>, int> edge_count;
    std::vector<std::array<int, 3>> keep;
    for (const auto& t : tris) {
      if (in_circumcircle(pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])],
                          pts[static_cast<std::size_t>(t[2])], p)) {
        for (int e = 0; e < 3; ++e) {
          int u = t[static_cast<std::size_t>(e)], v = t[static_cast<std::size_t>((e + 1) % 3)];
          ++edge_count[{std::min(u, v), std::max(u, v)}];
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [edge, count] : edge_count) {
      if (count != 1) continue;
      std::array<int, 3> t{edge.first, edge.second, i};
      if (cross(pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])],
                pts[static_cast<std::size_t>(t[2])]) < 0.0)
        std::swap(t[0], t[1]);
      keep.push_back(t);
    }
    tris = std::move(keep);
  }
  std::erase_if(tris, [n](const auto& t) { return t[0] >= n || t[1] >= n || t[2] >= n; });
  std::erase_if(tris, [&](const auto& t) {
    return std::abs(cross(points[static_cast<std::size_t>(t[0])], points[static_cast<std::size_t>(t[1])],
                          points[static_cast<std::size_t>(t[2])])) <= 1e-12 * span * span;
  });
  std::sort(tris.begin(), tris.end());
  return tris;
}

ErrorMap::ErrorMap(std::vector<MapNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 4)
    throw InsufficientPoints(fmt::format("error map needs at least 4 points, got {}", nodes_.size()));
  std::vector<Eigen::Vector2d> pts;
  for (const auto& node : nodes_) {
    for (const auto& q : pts)
      if (q == node.position)
        throw InsufficientPoints(fmt::format("duplicate calibration point ({}, {})", q.x(), q.y()));
    pts.push_back(node.position);
  }
  triangles_ = delaunay(pts);
  if (triangles_.empty()) throw InsufficientPoints("calibration points are collinear");
}

int ErrorMap::locate(const Eigen::Vector2d& p, Eigen::Vector3d& weights) const {
  for (std::size_t k = 0; k < triangles_.size(); ++k) {
    const auto& t = triangles_[k];
    const auto& a = nodes_[static_cast<std::size_t>(t[0])].position;
    const auto& b = nodes_[static_cast<std::size_t>(t[1])].position;
    const auto& c = nodes_[static_cast<std::size_t>(t[2])].position;
    const double area = cross(a, b, c);
    const double wa = cross(p, b, c) / area;
    const double wb = cross(a, p, c) / area;
    const double wc = 1.0 - wa - wb;
    constexpr double tol = -1e-12;
    if (wa >= tol && wb >= tol && wc >= tol) {
      weights = {wa, wb, wc};
      return static_cast<int>(k);
    }
  }
  return -1;
}

bool ErrorMap::contains(const Eigen::Vector2d& p) const {
  Eigen::Vector3d w;
  return locate(p, w) >= 0;
}

double ErrorMap::evaluate(const Eigen::Vector2d& p, std::size_t axis) const {
  for (const auto& node : nodes_)
    if (node.position == p) return node.error.at(axis);
  Eigen::Vector3d w;
  const int k = locate(p, w);
  if (k < 0) throw QueryOutsideHull(fmt::format("({}, {}) lies outside the calibrated area", p.x(), p.y()));
  const auto& t = triangles_[static_cast<std::size_t>(k)];
  double v = 0.0;
  for (std::size_t j = 0; j < 3; ++j) v += w[static_cast<Eigen::Index>(j)] * nodes_[static_cast<std::size_t>(t[j])].error.at(axis);
  return v;
}

ErrorMap build_error_map(std::vector<MapNode> nodes) { return ErrorMap(std::move(nodes)); }

}  // namespace treadmill::calib
