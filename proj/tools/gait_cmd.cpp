#include <memory>

#include <fmt/format.h>

#include "common.hpp"
#include "treadmill/csv.hpp"
#include "treadmill/errors.hpp"
#include "treadmill/gait.hpp"
#include "treadmill/svg.hpp"

namespace treadmill::cli {

namespace {

struct GaitArgs {
  std::string input;
  double body_weight = 0.0;
  double mass = 0.0;
  bool no_normalize = false;
  bool sem = false;
  bool keep_outliers = false;
  std::size_t grid = 101;
  gait::SegmentOptions segment;
  std::string out = ".";
};

void run_average(const GaitArgs& a) {
  const double bw = a.body_weight > 0.0 ? a.body_weight : a.mass * gait::kGravity;
  if (!(bw > 0.0)) throw ConfigError("give --body-weight (N) or --mass (kg)");
  const auto ts = read_time_series_csv(a.input);
  const auto windows = gait::segment_strides(ts, bw, a.segment);
  gait::EnsembleOptions eo;
  eo.grid_points = a.grid;
  eo.normalize = !a.no_normalize;
  eo.sem = a.sem;
  eo.skip_outliers = !a.keep_outliers;
  const auto e = gait::average_strides(ts, windows, bw, eo);
  const auto dir = prepare_output(a.out);
  write_csv(dir / "strides.csv", gait::strides_to_table(windows));
  write_csv(dir / "ensemble.csv", gait::ensemble_to_table(e));

  const std::string unit = e.normalized ? "force / body weight" : "force (N)";
  for (const auto& ax : e.axes) {
    plot::LinePlot p{fmt::format("{} over {} strides (mean and 95 % band)", ax.channel, e.stride_count),
                     "stride (%)", unit, {{ax.channel, e.normalized_time, ax.mean, ax.band, false}}, {}, false, false};
    if (ax.channel == "Fz") p.reference_lines.push_back(e.normalized ? 1.0 : bw);
    write_text_file(dir / fmt::format("ensemble_{}.svg", ax.channel), plot::render(p));
  }
  std::size_t outliers = 0;
  for (const auto& w : windows) outliers += w.outlier ? 1 : 0;
  Report s;
  s.header = {"channel", "mean_band"};
  for (const auto& ax : e.axes) s.add({ax.channel, num(e.mean_band(ax.channel))});
  write_report(dir / "ensemble_summary.csv", s);
  note(fmt::format("{} strides ({} outliers), {} averaged", windows.size(), outliers, e.stride_count));
}

}  // namespace

void add_gait_commands(CLI::App& app) {
  auto* gait = app.add_subcommand("gait", "Stride segmentation and ensemble averaging");
  gait->require_subcommand(1);
  auto a = std::make_shared<GaitArgs>();
  auto* avg = gait->add_subcommand("average", "Mean stride with 95 % band from a walking or running recording");
  avg->add_option("--input", a->input, "CSV time,Fx,Fy,Fz")->required();
  auto* bw = avg->add_option("--body-weight", a->body_weight, "Body weight (N)");
  auto* mass = avg->add_option("--mass", a->mass, "Body mass (kg), used when --body-weight is absent");
  bw->excludes(mass);
  avg->add_flag("--no-normalize", a->no_normalize, "Keep forces in N instead of body weights");
  avg->add_flag("--sem", a->sem, "Band is 1.96 standard errors of the mean");
  avg->add_flag("--keep-outliers", a->keep_outliers, "Average strides flagged as duration outliers too");
  avg->add_option("--grid", a->grid, "Points on the 0..100 % stride grid")->capture_default_str();
  avg->add_option("--channel", a->segment.channel, "Channel used for touchdown detection")->capture_default_str();
  avg->add_option("--rise", a->segment.rise_fraction, "Touchdown threshold (fraction of body weight)")
      ->capture_default_str();
  avg->add_option("--fall", a->segment.fall_fraction, "Toe-off threshold (fraction of body weight)")
      ->capture_default_str();
  avg->add_option("--outlier-tolerance", a->segment.outlier_tolerance,
                  "Relative deviation from the median stride duration flagged as outlier")
      ->capture_default_str();
  avg->add_option("--out", a->out, "Output directory")->capture_default_str();
  avg->callback([a] { run_average(*a); });
}

}  // namespace treadmill::cli
