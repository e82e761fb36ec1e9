#include "treadmill/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace treadmill::plot {

namespace {

constexpr double kWidth = 720.0, kHeight = 440.0;
constexpr double kLeft = 80.0, kRight = 30.0, kTop = 40.0, kBottom = 60.0;
constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
      const double pad = std::max(std::abs(lo) * 0.05, 0.5);
      lo -= pad;
      hi += pad;
    }
  }
};

std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

// Linear ramp through blue, white and red.
std::string colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto mix = [](double a, double b, double u) { return static_cast<int>(std::lround(a + (b - a) * u)); };
  if (t < 0.5) {
    const double u = t / 0.5;
    return fmt::format("rgb({},{},{})", mix(49, 247, u), mix(54, 247, u), mix(149, 247, u));
  }
  const double u = (t - 0.5) / 0.5;
  return fmt::format("rgb({},{},{})", mix(247, 165, u), mix(247, 0, u), mix(247, 38, u));
}

class Frame {
 public:
  Frame(Range x, Range y, bool log_y) : x_(x), y_(y), log_y_(log_y) {}

  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const {
    if (log_y_) v = std::log10(std::max(v, 1e-300));
    return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom);
  }

  void axes(std::string& out, const std::string& title, const std::string& xl, const std::string& yl) const {
    out += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333"/>)"
                       "\n",
                       kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
    for (double t : nice_ticks(x_.lo, x_.hi)) {
      const double x = px(t);
      out += fmt::format(R"(<line x1="{0:.2f}" y1="{1}" x2="{0:.2f}" y2="{2}" stroke="#333"/>)"
                         "\n",
                         x, kHeight - kBottom, kHeight - kBottom + 5);
      out += fmt::format(R"(<text x="{:.2f}" y="{}" font-size="11" text-anchor="middle">{:g}</text>)"
                         "\n",
                         x, kHeight - kBottom + 18, t);
    }
    for (double t : nice_ticks(y_.lo, y_.hi)) {
      const double y = kHeight - kBottom - (t - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom);
      out += fmt::format(R"(<line x1="{0}" y1="{1:.2f}" x2="{2}" y2="{1:.2f}" stroke="#333"/>)"
                         "\n",
                         kLeft - 5, y, kLeft);
      const std::string label = log_y_ ? fmt::format("1e{:g}", t) : fmt::format("{:g}", t);
      out += fmt::format(R"(<text x="{}" y="{:.2f}" font-size="11" text-anchor="end">{}</text>)"
                         "\n",
                         kLeft - 8, y + 4, label);
    }
    out += fmt::format(R"(<text x="{}" y="24" font-size="15" text-anchor="middle">{}</text>)"
                       "\n",
                       kWidth / 2, escape(title));
    out += fmt::format(R"(<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>)"
                       "\n",
                       (kLeft + kWidth - kRight) / 2, kHeight - 18, escape(xl));
    out += fmt::format(
        R"svg(<text x="18" y="{0}" font-size="12" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>)svg"
        "\n",
        (kTop + kHeight - kBottom) / 2, escape(yl));
  }

 private:
  Range x_, y_;
  bool log_y_;
};

std::string open_svg() {
  return fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}" font-family="sans-serif">)"
      "\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
}

void colour_bar(std::string& out, double lo, double hi, const std::string& label) {
  const double x = kWidth - kRight + 8, top = kTop, h = kHeight - kTop - kBottom;
  constexpr int steps = 40;
  for (int i = 0; i < steps; ++i) {
    const double t = (i + 0.5) / steps;
    out += fmt::format(R"(<rect x="{}" y="{:.2f}" width="14" height="{:.2f}" fill="{}"/>)"
                       "\n",
                       x, top + h * (1.0 - static_cast<double>(i + 1) / steps), h / steps + 0.5, colour(t));
  }
  out += fmt::format(R"(<text x="{}" y="{}" font-size="10">{:.4g}</text>)"
                     "\n",
                     x, top - 4, hi);
  out += fmt::format(R"(<text x="{}" y="{}" font-size="10">{:.4g}</text>)"
                     "\n",
                     x, top + h + 12, lo);
  out += fmt::format(R"(<text x="{}" y="{}" font-size="10">{}</text>)"
                     "\n",
                     x - 30, top + h + 26, escape(label));
}

}  // namespace

std::string render(const LinePlot& plot) {
  Range xr, yr;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      xr.add(s.x[i]);
      const double b = i < s.band.size() ? s.band[i] : 0.0;
      for (double v : {s.y[i] - b, s.y[i] + b}) {
        if (plot.log_y) {
          if (v > 0.0) yr.add(std::log10(v));
        } else {
          yr.add(v);
        }
      }
    }
  for (double r : plot.reference_lines) yr.add(plot.log_y ? std::log10(std::max(r, 1e-300)) : r);
  xr.finish();
  yr.finish();
  if (plot.equal_aspect) {
    const double sx = (xr.hi - xr.lo) / (kWidth - kLeft - kRight);
    const double sy = (yr.hi - yr.lo) / (kHeight - kTop - kBottom);
    const double s = std::max(sx, sy);
    const double cx = 0.5 * (xr.lo + xr.hi), cy = 0.5 * (yr.lo + yr.hi);
    xr.lo = cx - 0.5 * s * (kWidth - kLeft - kRight);
    xr.hi = cx + 0.5 * s * (kWidth - kLeft - kRight);
    yr.lo = cy - 0.5 * s * (kHeight - kTop - kBottom);
    yr.hi = cy + 0.5 * s * (kHeight - kTop - kBottom);
  }
  const Frame frame(xr, yr, plot.log_y);

  std::string out = open_svg();
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* c = kPalette[k % kPalette.size()];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (!s.band.empty() && s.band.size() >= n && n > 1) {
      std::string pts;
      for (std::size_t i = 0; i < n; ++i) pts += fmt::format("{:.2f},{:.2f} ", frame.px(s.x[i]), frame.py(s.y[i] + s.band[i]));
      for (std::size_t i = n; i-- > 0;) pts += fmt::format("{:.2f},{:.2f} ", frame.px(s.x[i]), frame.py(s.y[i] - s.band[i]));
      out += fmt::format(R"(<polygon points="{}" fill="{}" fill-opacity="0.25" stroke="none"/>)"
                         "\n",
                         pts, c);
    }
    if (s.markers) {
      for (std::size_t i = 0; i < n; ++i)
        out += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="{}"/>)"
                           "\n",
                           frame.px(s.x[i]), frame.py(s.y[i]), c);
    } else {
      std::string pts;
      for (std::size_t i = 0; i < n; ++i) {
        if (plot.log_y && !(s.y[i] > 0.0)) continue;
        pts += fmt::format("{:.2f},{:.2f} ", frame.px(s.x[i]), frame.py(s.y[i]));
      }
      out += fmt::format(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="1.2"/>)"
                         "\n",
                         pts, c);
    }
    out += fmt::format(R"(<text x="{}" y="{}" font-size="11" fill="{}">{}</text>)"
                       "\n",
                       kLeft + 10, kTop + 16 + 14 * static_cast<double>(k), c, escape(s.label));
  }
  for (double r : plot.reference_lines)
    out += fmt::format(R"(<line x1="{}" y1="{:.2f}" x2="{}" y2="{:.2f}" stroke="#555" stroke-dasharray="6 4"/>)"
                       "\n",
                       kLeft, frame.py(r), kWidth - kRight, frame.py(r));
  frame.axes(out, plot.title, plot.x_label, plot.y_label);
  out += "</svg>\n";
  return out;
}

std::string render(const HeatMap& map) {
  Range xr, yr, vr;
  for (double v : map.x) xr.add(v);
  for (double v : map.y) yr.add(v);
  for (double v : map.values) vr.add(v);
  // Cells extend half a step beyond the outer grid values.
  auto widen = [](Range& r, const std::vector<double>& g) {
    const double step = g.size() > 1 ? (g.back() - g.front()) / static_cast<double>(g.size() - 1) : 0.0;
    if (step > 0.0) {
      r.lo -= 0.5 * step;
      r.hi += 0.5 * step;
    }
    r.finish();
  };
  widen(xr, map.x);
  widen(yr, map.y);
  vr.finish();
  const Frame frame(xr, yr, false);

  std::string out = open_svg();
  const std::size_t nx = map.x.size(), ny = map.y.size();
  for (std::size_t i = 0; i < nx; ++i) {
    const double x0 = i == 0 ? xr.lo : 0.5 * (map.x[i - 1] + map.x[i]);
    const double x1 = i + 1 == nx ? xr.hi : 0.5 * (map.x[i] + map.x[i + 1]);
    for (std::size_t j = 0; j < ny; ++j) {
      const double v = map.values[i * ny + j];
      if (!std::isfinite(v)) continue;
      const double y0 = j == 0 ? yr.lo : 0.5 * (map.y[j - 1] + map.y[j]);
      const double y1 = j + 1 == ny ? yr.hi : 0.5 * (map.y[j] + map.y[j + 1]);
      out += fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)"
                         "\n",
                         frame.px(x0), frame.py(y1), frame.px(x1) - frame.px(x0) + 0.3,
                         frame.py(y0) - frame.py(y1) + 0.3, colour((v - vr.lo) / (vr.hi - vr.lo)));
    }
  }
  if (map.marker)
    out += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="6" fill="red" stroke="black"/>)"
                       "\n",
                       frame.px(map.marker->x()), frame.py(map.marker->y()));
  frame.axes(out, map.title, map.x_label, map.y_label);
  colour_bar(out, vr.lo, vr.hi, map.value_label);
  out += "</svg>\n";
  return out;
}

std::string render_error_map(const calib::ErrorMap& map, std::size_t axis, const std::string& title) {
  Range xr, yr, vr;
  for (const auto& n : map.nodes()) {
    xr.add(n.position.x());
    yr.add(n.position.y());
    vr.add(n.error[axis]);
  }
  xr.finish();
  yr.finish();
  vr.finish();
  const Frame frame(xr, yr, false);

  std::string out = open_svg();
  for (const auto& t : map.triangles()) {
    double v = 0.0;
    std::string pts;
    for (int k : t) {
      const auto& n = map.nodes()[static_cast<std::size_t>(k)];
      v += n.error[axis] / 3.0;
      pts += fmt::format("{:.2f},{:.2f} ", frame.px(n.position.x()), frame.py(n.position.y()));
    }
    out += fmt::format(R"(<polygon points="{}" fill="{}" stroke="#666" stroke-width="0.5"/>)"
                       "\n",
                       pts, colour((v - vr.lo) / (vr.hi - vr.lo)));
  }
  for (const auto& n : map.nodes())
    out += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="black"/>)"
                       "\n",
                       frame.px(n.position.x()), frame.py(n.position.y()));
  frame.axes(out, title, "x (m)", "y (m)");
  colour_bar(out, vr.lo, vr.hi, "error (N)");
  out += "</svg>\n";
  return out;
}

}  // namespace treadmill::plot
