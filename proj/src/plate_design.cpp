#include "treadmill/plate_design.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "treadmill/errors.hpp"
#include "treadmill/parallel.hpp"

namespace treadmill::design {

void validate(const PlateSpec& s) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidSpec(fmt::format("{} must be positive and finite, got {}", name, v));
  };
  positive(s.width, "width");
  positive(s.length, "length");
  positive(s.mass, "mass");
  positive(s.e_sandwich, "e_sandwich");
  positive(s.e_carbon, "e_carbon");
  positive(s.h_inner, "h_inner");
  if (!(s.h_inner < s.h_sandwich))
    throw InvalidSpec(fmt::format("h_inner ({}) must be below h_sandwich ({})", s.h_inner, s.h_sandwich));
  // h_compound == h_sandwich is the degenerate plate without carbon layers.
  if (!(s.h_sandwich <= s.h_compound) || !std::isfinite(s.h_compound))
    throw InvalidSpec(fmt::format("h_sandwich ({}) must not exceed h_compound ({})", s.h_sandwich,
                                  s.h_compound));
}

double bending_stiffness(const PlateSpec& s) {
  const double sandwich = s.e_sandwich * (std::pow(s.h_sandwich, 3) - std::pow(s.h_inner, 3));
  const double carbon = s.e_carbon * (std::pow(s.h_compound, 3) - std::pow(s.h_sandwich, 3));
  return s.width * (sandwich + carbon) / 12.0;
}

double natural_frequency(const PlateSpec& s) {
  validate(s);
  const double pi = std::numbers::pi;
  const double sandwich = s.e_sandwich * (std::pow(s.h_sandwich, 3) - std::pow(s.h_inner, 3));
  const double carbon = s.e_carbon * (std::pow(s.h_compound, 3) - std::pow(s.h_sandwich, 3));
  return std::sqrt(s.width * (sandwich + carbon) / (pi * pi * s.mass * std::pow(s.length, 3)));
}

double MassModel::mass_for(const PlateSpec& base, double length, double carbon_thickness) const {
  if (kind == Kind::Constant) return base.mass;
  return fixed_mass +
         base.width * length * (sandwich_areal_density + 2.0 * carbon_thickness * carbon_density);
}

FrequencySweep frequency_sweep(const PlateSpec& base, const std::vector<double>& lengths,
                               const std::vector<double>& carbon_thicknesses,
                               const MassModel& mass_model, unsigned jobs) {
  auto increasing = [](const std::vector<double>& g, const char* name) {
    if (g.empty()) throw InvalidSpec(fmt::format("{} grid is empty", name));
    for (std::size_t i = 1; i < g.size(); ++i)
      if (!(g[i] > g[i - 1])) throw InvalidSpec(fmt::format("{} grid is not increasing", name));
  };
  increasing(lengths, "length");
  increasing(carbon_thicknesses, "thickness");

  FrequencySweep sweep;
  sweep.lengths = lengths;
  sweep.thicknesses = carbon_thicknesses;
  const std::size_t cols = carbon_thicknesses.size();
  sweep.f_n.assign(lengths.size() * cols, std::numeric_limits<double>::quiet_NaN());
  sweep.cell_errors.assign(lengths.size() * cols, std::string());

  parallel_for(lengths.size(), jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < cols; ++j) {
      PlateSpec cell = base;
      cell.length = lengths[i];
      cell.h_compound = base.h_sandwich + 2.0 * carbon_thicknesses[j];
      cell.mass = mass_model.mass_for(base, lengths[i], carbon_thicknesses[j]);
      try {
        sweep.f_n[i * cols + j] = natural_frequency(cell);
      } catch (const InvalidSpec& e) {
        sweep.cell_errors[i * cols + j] = e.what();
      }
    }
  });
  return sweep;
}

PlateSpec plate_spec_from_config(const Config& cfg) {
  PlateSpec s;
  s.width = cfg.get_double("width");
  s.length = cfg.get_double("length");
  s.h_inner = cfg.get_double("h_inner");
  s.h_sandwich = cfg.get_double("h_sandwich");
  s.h_compound = cfg.get_double("h_compound");
  s.e_sandwich = cfg.get_double("e_sandwich");
  s.e_carbon = cfg.get_double("e_carbon");
  s.mass = cfg.get_double("mass");
  return s;
}

MassModel mass_model_from_config(const Config& cfg) {
  MassModel m;
  const auto kind = cfg.get_string("mass_model", "constant");
  if (kind == "constant") return m;
  if (kind != "areal") throw ConfigError("mass_model must be 'constant' or 'areal', got '" + kind + "'");
  m.kind = MassModel::Kind::Areal;
  m.fixed_mass = cfg.get_double("fixed_mass");
  m.sandwich_areal_density = cfg.get_double("sandwich_areal_density");
  m.carbon_density = cfg.get_double("carbon_density");
  return m;
}

}  // namespace treadmill::design
