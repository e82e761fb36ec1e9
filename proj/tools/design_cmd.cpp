#include <cstdio>
#include <memory>
#include <optional>

#include <fmt/format.h>

#include "common.hpp"
#include "treadmill/csv.hpp"
#include "treadmill/errors.hpp"
#include "treadmill/plate_design.hpp"
#include "treadmill/svg.hpp"

namespace treadmill::cli {

namespace {

struct SweepArgs {
  std::string config;
  std::string lengths;
  std::string thicknesses;
  std::string select;
  std::string out = ".";
  unsigned jobs = 1;
};

void run_sweep(const SweepArgs& a) {
  const Config cfg = Config::load(a.config);
  const auto base = design::plate_spec_from_config(cfg);
  const auto mass = design::mass_model_from_config(cfg);
  const auto lengths = parse_grid(a.lengths, "--lengths");
  const auto thick = parse_grid(a.thicknesses, "--thicknesses");
  const auto sweep = design::frequency_sweep(base, lengths, thick, mass, a.jobs);
  const auto dir = prepare_output(a.out);

  Report r;
  r.header = {"length", "thickness", "f_n", "valid"};
  std::size_t invalid = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i)
    for (std::size_t j = 0; j < thick.size(); ++j) {
      const bool ok = sweep.valid(i, j);
      if (!ok) {
        ++invalid;
        std::fputs(fmt::format("warning: cell l={} t={}: {}\n", lengths[i], thick[j],
                               sweep.cell_errors[i * thick.size() + j])
                       .c_str(),
                   stderr);
      }
      r.add({num(lengths[i]), num(thick[j]), num(sweep.at(i, j)), ok ? "1" : "0"});
    }
  write_report(dir / "sweep.csv", r);

  plot::HeatMap map;
  map.title = "Natural frequency of the running plate";
  map.x_label = "plate length (m)";
  map.y_label = "carbon layer thickness (mm)";
  map.value_label = "f_n (Hz)";
  map.x = lengths;
  for (double t : thick) map.y.push_back(t * 1e3);
  map.values = sweep.f_n;
  if (!a.select.empty()) {
    const auto v = parse_list(a.select, "--select");
    if (v.size() != 2) throw ConfigError("--select: expected length,thickness");
    map.marker = Eigen::Vector2d(v[0], v[1] * 1e3);
  } else {
    map.marker = Eigen::Vector2d(base.length, 0.5 * (base.h_compound - base.h_sandwich) * 1e3);
  }
  write_text_file(dir / "sweep.svg", plot::render(map));
  note(fmt::format("design sweep: {} x {} cells ({} invalid) -> {}", lengths.size(), thick.size(), invalid,
                   (dir / "sweep.csv").string()));
}

}  // namespace

void add_design_commands(CLI::App& app) {
  auto* design = app.add_subcommand("design", "Plate design tools");
  design->require_subcommand(1);
  auto a = std::make_shared<SweepArgs>();
  auto* sweep = design->add_subcommand("sweep", "Natural frequency over plate length and carbon layer thickness");
  sweep->add_option("--config", a->config,
                    "Plate spec (width, length, h_inner, h_sandwich, h_compound, e_sandwich, e_carbon, mass; "
                    "optional mass_model=constant|areal with fixed_mass, sandwich_areal_density, carbon_density)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--lengths", a->lengths, "Length grid in m, start:stop:count or a comma list")->required();
  sweep->add_option("--thicknesses", a->thicknesses, "Carbon thickness grid per face in m")->required();
  sweep->add_option("--select", a->select, "Design point length,thickness to mark (default: the base spec)");
  sweep->add_option("--out", a->out, "Output directory")->capture_default_str();
  sweep->add_option("--jobs", a->jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->callback([a] { run_sweep(*a); });
}

}  // namespace treadmill::cli
