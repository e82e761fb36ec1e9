#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <regex>

#include <fmt/format.h>

#include "common.hpp"
#include "treadmill/calibration.hpp"
#include "treadmill/csv.hpp"
#include "treadmill/error_map.hpp"
#include "treadmill/errors.hpp"
#include "treadmill/parallel.hpp"
#include "treadmill/svg.hpp"

namespace treadmill::cli {

namespace {

struct CalibrateArgs {
  std::string dir;
  std::string out = ".";
  unsigned jobs = 1;
  double full_scale = 200.0;
  double transient = 1.0;
  double min_axis_span = 0.1;
  int hysteresis_ramp = 1;
  bool ls_linearity = false;
  double max_lag = 0.5;
};

struct PointFiles {
  int id = 0;
  fs::path reference, device, pose;
};

std::vector<PointFiles> discover(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError(fmt::format("'{}' is not a directory", dir.string()));
  const std::regex pattern(R"(point_(\d+)_reference\.csv)");
  std::map<int, PointFiles> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    const std::string tag = m[1];
    PointFiles p{std::stoi(tag), entry.path(), dir / ("point_" + tag + "_device.csv"),
                 dir / ("point_" + tag + "_pose.csv")};
    for (const auto& f : {p.device, p.pose})
      if (!fs::exists(f)) throw ConfigError(fmt::format("point {}: missing '{}'", p.id, f.string()));
    found[p.id] = p;
  }
  if (found.empty())
    throw ConfigError(fmt::format("no point_XX_reference.csv files in '{}'", dir.string()));
  std::vector<PointFiles> out;
  for (auto& [id, p] : found) out.push_back(p);
  return out;
}

std::string opt(const std::optional<double>& v) { return num(v ? *v : std::numeric_limits<double>::quiet_NaN()); }

void run_iso376(const CalibrateArgs& a) {
  const auto files = discover(a.dir);
  calib::EvaluationOptions eo;
  eo.full_scale = a.full_scale;
  eo.transient_exclusion = a.transient;
  eo.min_axis_span = a.min_axis_span;
  if (a.hysteresis_ramp < 1) throw ConfigError("--hysteresis-ramp counts from 1");
  eo.hysteresis_ramp = static_cast<std::size_t>(a.hysteresis_ramp - 1);
  eo.terminal_linearity = !a.ls_linearity;
  calib::SyncOptions so;
  so.max_lag = a.max_lag;

  std::vector<calib::PointReport> points(files.size());
  std::vector<double> offsets(files.size());
  parallel_for(files.size(), a.jobs, [&](std::size_t i) {
    const auto& f = files[i];
    try {
      const auto run = calib::synchronize(read_time_series_csv(f.reference), calib::read_pose_csv(f.pose),
                                          read_time_series_csv(f.device), f.id, so);
      offsets[i] = run.clock_offset;
      points[i] = calib::evaluate_run(run, {}, eo);
    } catch (const AnalysisError& e) {
      throw AnalysisError(e.code(), fmt::format("point {}: {}", f.id, e.what()));
    }
  });
  const auto report = calib::assemble_report(points);
  const auto dir = prepare_output(a.out);

  Report pr;
  pr.header = {"point", "x", "y", "clock_offset"};
  for (const char* metric : {"max_error", "linearity", "repeatability", "hysteresis"})
    for (const char* ax : {"x", "y", "z"}) pr.header.push_back(fmt::format("{}_{}", metric, ax));
  for (const auto& p : report.points) {
    const auto idx = static_cast<std::size_t>(
        std::find_if(files.begin(), files.end(), [&](const PointFiles& f) { return f.id == p.point_id; }) -
        files.begin());
    std::vector<std::string> row{std::to_string(p.point_id), num(p.position.x()), num(p.position.y()),
                                 num(offsets[idx])};
    for (double v : p.max_error) row.push_back(num(v));
    for (const auto* set : {&p.linearity_pct, &p.repeatability_pct, &p.hysteresis_pct})
      for (const auto& v : *set) row.push_back(opt(v));
    pr.add(std::move(row));
  }
  write_report(dir / "calibration_points.csv", pr);

  Report sr;
  sr.header = {"metric", "value"};
  sr.add({"points", std::to_string(report.points.size())});
  sr.add({"linearity_pct", num(report.linearity_pct)});
  sr.add({"repeatability_pct", num(report.repeatability_pct)});
  sr.add({"hysteresis_pct", num(report.hysteresis_pct)});
  sr.add({"max_error_x", num(report.max_error[0])});
  sr.add({"max_error_y", num(report.max_error[1])});
  sr.add({"max_error_z", num(report.max_error[2])});
  write_report(dir / "calibration_summary.csv", sr);
  note(fmt::format("{} points: max error {:.2f}/{:.2f}/{:.2f} N, linearity {:.3f} %, repeatability {:.3f} %, "
                   "hysteresis {:.3f} %",
                   report.points.size(), report.max_error[0], report.max_error[1], report.max_error[2],
                   report.linearity_pct, report.repeatability_pct, report.hysteresis_pct));

  std::vector<calib::MapNode> nodes;
  for (const auto& p : report.points) nodes.push_back({p.position, p.max_error});
  try {
    const auto map = calib::build_error_map(nodes);
    for (std::size_t ax = 0; ax < 3; ++ax) {
      const char* name = ax == 0 ? "x" : ax == 1 ? "y" : "z";
      write_text_file(dir / fmt::format("error_map_{}.svg", name),
                      plot::render_error_map(map, ax, fmt::format("Maximum error F{}", name)));
    }
  } catch (const InsufficientPoints& e) {
    note(fmt::format("error map skipped: {}", e.what()));
  }
}

}  // namespace

void add_calibrate_commands(CLI::App& app) {
  auto* calibrate = app.add_subcommand("calibrate", "Static calibration against a reference sensor");
  calibrate->require_subcommand(1);
  auto a = std::make_shared<CalibrateArgs>();
  auto* iso = calibrate->add_subcommand(
      "iso376", "Accuracy, linearity, repeatability and hysteresis per calibration point, plus the error map");
  iso->add_option("--dir", a->dir, "Directory with point_XX_reference.csv, point_XX_device.csv, point_XX_pose.csv")
      ->required();
  iso->add_option("--full-scale", a->full_scale, "Protocol maximum force (N)")->capture_default_str();
  iso->add_option("--transient", a->transient, "Seconds trimmed from both ends of every phase")
      ->capture_default_str();
  iso->add_option("--min-axis-span", a->min_axis_span,
                  "Skip axes whose reference span is below this fraction of full scale")
      ->capture_default_str();
  iso->add_option("--hysteresis-ramp", a->hysteresis_ramp, "Up/down ramp pair used for hysteresis (1 or 2)")
      ->capture_default_str();
  iso->add_flag("--ls-linearity", a->ls_linearity, "Least-squares line instead of the terminal line");
  iso->add_option("--max-lag", a->max_lag, "Clock offset search range around the onset guess (s)")
      ->capture_default_str();
  iso->add_option("--out", a->out, "Output directory")->capture_default_str();
  iso->add_option("--jobs", a->jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  iso->callback([a] { run_iso376(*a); });
}

}  // namespace treadmill::cli
