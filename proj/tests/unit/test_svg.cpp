#include <doctest.h>

#include <cmath>
#include <limits>
#include <regex>

#include "treadmill/svg.hpp"

using namespace treadmill;

namespace {

std::size_t count(const std::string& s, const std::string& part) {
  std::size_t n = 0;
  for (auto p = s.find(part); p != std::string::npos; p = s.find(part, p + 1)) ++n;
  return n;
}

// Every opened element is closed or self-closing, in order.
bool balanced(const std::string& svg) {
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([a-zA-Z]+)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[3] == "/") continue;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    } else {
      stack.push_back(m[2]);
    }
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("line plot") {
  plot::LinePlot p;
  p.title = "Spectrum <Fz> & more";
  p.x_label = "f (Hz)";
  p.y_label = "|X|";
  plot::Series s{"Fz", {}, {}, {}, false};
  for (int i = 0; i < 100; ++i) {
    s.x.push_back(i);
    s.y.push_back(1.0 + std::sin(i * 0.1));
  }
  s.band.assign(s.x.size(), 0.1);
  p.series.push_back(s);
  p.series.push_back({"points", {1.0, 2.0}, {0.5, 0.7}, {}, true});
  p.reference_lines = {1.0};
  const auto svg = plot::render(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(balanced(svg));
  CHECK(svg.find("&lt;Fz&gt; &amp; more") != std::string::npos);
  CHECK(svg.find("<Fz>") == std::string::npos);
  CHECK(count(svg, "<polyline") >= 1);
  CHECK(count(svg, "<circle") >= 2);
  CHECK(svg.find("nan") == std::string::npos);

  p.log_y = true;
  CHECK(balanced(plot::render(p)));
  CHECK(balanced(plot::render(plot::LinePlot{})));
}

TEST_CASE("heat map") {
  plot::HeatMap m;
  m.title = "f_n";
  m.x = {1.0, 1.5, 2.0};
  m.y = {1.0, 2.0};
  m.values = {10.0, 12.0, 8.0, std::numeric_limits<double>::quiet_NaN(), 5.0, 6.0};
  m.marker = Eigen::Vector2d(1.5, 1.0);
  const auto svg = plot::render(m);
  CHECK(balanced(svg));
  CHECK(count(svg, "<rect") >= 5);
  CHECK(svg.find("nan") == std::string::npos);
}

TEST_CASE("error map") {
  std::vector<calib::MapNode> nodes;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) nodes.push_back({{i * 0.4, j * 0.2}, {1.0 * i, 2.0 * j, 0.5}});
  const auto map = calib::build_error_map(nodes);
  const auto svg = plot::render_error_map(map, 1, "Fy");
  CHECK(balanced(svg));
  CHECK(count(svg, "<polygon") == map.triangles().size());
}
