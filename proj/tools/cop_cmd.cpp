#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "common.hpp"
#include "treadmill/cop.hpp"
#include "treadmill/csv.hpp"
#include "treadmill/errors.hpp"
#include "treadmill/svg.hpp"

namespace treadmill::cli {

namespace {

struct ShearArgs {
  std::string input;
  bool pooled = false;
  std::string out = ".";
};

void run_shear(const ShearArgs& a) {
  const auto trials = cop::shear_trials_from_table(read_csv(a.input));
  const auto cal = cop::calibrate_shear(trials, a.pooled);
  const auto dir = prepare_output(a.out);

  Report tr;
  tr.header = {"trial", "a_z", "spread_x", "spread_y", "cop_x", "cop_y", "samples"};
  plot::Series pts{"per-trial a_z", {}, {}, {}, true};
  for (std::size_t k = 0; k < cal.trials.size(); ++k) {
    const auto& t = cal.trials[k];
    tr.add({std::to_string(k + 1), num(t.a_z), num(t.spread_x), num(t.spread_y), num(t.mean_cop.x()),
            num(t.mean_cop.y()), std::to_string(t.samples)});
    pts.x.push_back(static_cast<double>(k + 1));
    pts.y.push_back(t.a_z * 1e3);
  }
  write_report(dir / "shear_trials.csv", tr);

  Report sr;
  sr.header = {"metric", "value"};
  sr.add({"trials", std::to_string(trials.size())});
  sr.add({"a_z", num(cal.a_z)});
  sr.add({"a_z_ci", num(cal.a_z_ci)});
  sr.add({"a_z_std", num(cal.a_z_std)});
  sr.add({"spread_x", num(cal.spread_x)});
  sr.add({"spread_y", num(cal.spread_y)});
  write_report(dir / "shear_summary.csv", sr);

  plot::LinePlot p{"Sensor offset per trial", "trial", "a_z (mm)", {pts}, {cal.a_z * 1e3}, false, false};
  write_text_file(dir / "shear_trials.svg", plot::render(p));
  note(fmt::format("a_z = {:.2f} mm +- {:.2f} mm (95 %), residual spread {:.1f} / {:.1f} mm", cal.a_z * 1e3,
                   cal.a_z_ci * 1e3, cal.spread_x * 1e3, cal.spread_y * 1e3));
}

struct SurfaceArgs {
  std::string wrench;
  std::string mocap;
  double a_z = 0.0;
  double load_fraction = 0.5;
  double trim = 0.25;
  std::string out = ".";
};

void run_surface(const SurfaceArgs& a) {
  cop::StaticWindowOptions wo;
  wo.load_fraction = a.load_fraction;
  wo.trim = a.trim;
  const auto samples = cop::static_cop_samples(read_time_series_csv(a.wrench), read_csv(a.mocap), a.a_z, wo);
  const auto model = cop::fit_cop_error_surface(samples, a.a_z);
  const auto dir = prepare_output(a.out);
  cop::save_model(dir / "cop_model.txt", model);

  Report pr;
  pr.header = {"point", "true_x", "true_y", "raw_x", "raw_y", "corrected_x", "corrected_y"};
  plot::Series truth{"MoCap", {}, {}, {}, true}, raw{"measured", {}, {}, {}, true},
      fixed{"corrected", {}, {}, {}, true};
  double raw_ss = 0.0, fixed_ss = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    const auto c = cop::correct_cop(s.cop, model);
    const auto& g = *s.ground_truth;
    pr.add({std::to_string(k + 1), num(g.x()), num(g.y()), num(s.cop.x()), num(s.cop.y()), num(c.x()), num(c.y())});
    raw_ss += (s.cop - g).squaredNorm();
    fixed_ss += (c - g).squaredNorm();
    truth.x.push_back(g.x());
    truth.y.push_back(g.y());
    raw.x.push_back(s.cop.x());
    raw.y.push_back(s.cop.y());
    fixed.x.push_back(c.x());
    fixed.y.push_back(c.y());
  }
  write_report(dir / "cop_points.csv", pr);
  const double n = static_cast<double>(samples.size());
  Report sr;
  sr.header = {"metric", "value"};
  sr.add({"points", std::to_string(samples.size())});
  sr.add({"r2_x", num(model.r2_x)});
  sr.add({"r2_y", num(model.r2_y)});
  sr.add({"rms_raw", num(std::sqrt(raw_ss / n))});
  sr.add({"rms_corrected", num(std::sqrt(fixed_ss / n))});
  write_report(dir / "cop_summary.csv", sr);

  plot::LinePlot p{"Centre of pressure before and after correction", "x (m)", "y (m)", {truth, raw, fixed}, {},
                   false, true};
  write_text_file(dir / "cop_points.svg", plot::render(p));
  note(fmt::format("{} points, R^2 = {:.5f} / {:.5f}, RMS error {:.2f} mm -> {:.3f} mm", samples.size(), model.r2_x,
                   model.r2_y, 1e3 * std::sqrt(raw_ss / n), 1e3 * std::sqrt(fixed_ss / n)));
}

struct ApplyArgs {
  std::string model;
  std::string input;
  bool extrapolate = false;
  bool skip_outside = false;
  double min_fz = cop::kMinVerticalForce;
  std::string out = ".";
};

void run_apply(const ApplyArgs& a) {
  const auto model = cop::load_model(a.model);
  const auto ts = read_time_series_csv(a.input);
  const auto dir = prepare_output(a.out);
  Report r;
  r.header = {"time", "raw_x", "raw_y", "x", "y"};
  plot::Series raw{"measured", {}, {}, {}, false}, fixed{"corrected", {}, {}, {}, false};
  std::size_t skipped = 0, outside = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto w = cop::wrench_sample(ts, i);
    if (!(std::abs(w.force.z()) > a.min_fz)) {
      ++skipped;
      continue;
    }
    const auto p = cop::cop_from_wrench(w, model.a_z, a.min_fz);
    Eigen::Vector2d c;
    try {
      c = cop::correct_cop(p, model, a.extrapolate);
    } catch (const OutOfBounds&) {
      if (!a.skip_outside) throw;
      ++outside;
      continue;
    }
    r.add({num(ts.time(i)), num(p.x()), num(p.y()), num(c.x()), num(c.y())});
    raw.x.push_back(p.x());
    raw.y.push_back(p.y());
    fixed.x.push_back(c.x());
    fixed.y.push_back(c.y());
  }
  write_report(dir / "cop_corrected.csv", r);
  plot::LinePlot p{"Centre of pressure", "x (m)", "y (m)", {raw, fixed}, {}, false, true};
  write_text_file(dir / "cop_corrected.svg", plot::render(p));
  note(fmt::format("{} samples corrected, {} below {} N skipped, {} outside the calibrated area dropped",
                   r.rows.size(), skipped, a.min_fz, outside));
}

}  // namespace

void add_cop_commands(CLI::App& app) {
  auto* cop = app.add_subcommand("cop", "Centre of pressure calibration and correction");
  cop->require_subcommand(1);

  auto sa = std::make_shared<ShearArgs>();
  auto* shear = cop->add_subcommand("shear", "Sensor offset a_z from forces applied through one fixed point");
  shear->add_option("--input", sa->input, "CSV with header trial,Fx,Fy,Fz,Mx,My,Mz")->required();
  shear->add_flag("--pooled", sa->pooled, "Fit all trials as one sample set");
  shear->add_option("--out", sa->out, "Output directory")->capture_default_str();
  shear->callback([sa] { run_shear(*sa); });

  auto fa = std::make_shared<SurfaceArgs>();
  auto* surface = cop->add_subcommand("surface", "Fit the quartic COP error surfaces from a dead-weight grid");
  surface->add_option("--wrench", fa->wrench, "CSV time,Fx,Fy,Fz,Mx,My,Mz")->required();
  surface->add_option("--mocap", fa->mocap, "CSV time,x,y of the weight position")->required();
  surface->add_option("--a-z", fa->a_z, "Sensor offset from `cop shear` (m)")->required();
  surface->add_option("--load-fraction", fa->load_fraction, "Loaded above this fraction of the peak Fz")
      ->capture_default_str();
  surface->add_option("--trim", fa->trim, "Seconds dropped at both ends of a loaded window")->capture_default_str();
  surface->add_option("--out", fa->out, "Output directory")->capture_default_str();
  surface->callback([fa] { run_surface(*fa); });

  auto aa = std::make_shared<ApplyArgs>();
  auto* apply = cop->add_subcommand("apply", "Corrected COP trajectory from a wrench recording");
  apply->add_option("--model", aa->model, "Model file written by `cop surface`")->required();
  apply->add_option("--input", aa->input, "CSV time,Fx,Fy,Fz,Mx,My,Mz")->required();
  apply->add_flag("--extrapolate", aa->extrapolate, "Correct outside the calibrated area instead of failing");
  apply->add_flag("--skip-outside", aa->skip_outside, "Drop samples outside the calibrated area instead of failing");
  apply->add_option("--min-fz", aa->min_fz, "Samples with |Fz| at or below this are skipped (N)")
      ->capture_default_str();
  apply->add_option("--out", aa->out, "Output directory")->capture_default_str();
  apply->callback([aa] { run_apply(*aa); });
}

}  // namespace treadmill::cli
