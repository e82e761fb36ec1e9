#include "treadmill/sensing_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "treadmill/errors.hpp"

namespace treadmill::sensing {

Axis parse_axis(const std::string& name) {
  if (name == "x" || name == "X" || name == "Fx") return Axis::X;
  if (name == "y" || name == "Y" || name == "Fy") return Axis::Y;
  if (name == "z" || name == "Z" || name == "Fz") return Axis::Z;
  throw ConfigError("unknown axis '" + name + "' (expected x, y or z)");
}

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

AmplifierConfig preset(double charge_range) {
  AmplifierConfig cfg;
  cfg.charge_range = charge_range;
  if (!is_preset(cfg))
    throw ConfigError(fmt::format("{} pC is not a preset amplifier range", charge_range));
  return cfg;
}

bool is_preset(const AmplifierConfig& cfg) {
  return std::find(kPresetChargeRanges.begin(), kPresetChargeRanges.end(), cfg.charge_range) !=
         kPresetChargeRanges.end();
}

void validate(const AmplifierConfig& cfg) {
  for (double v : {cfg.charge_range, cfg.sensitivity_xy, cfg.sensitivity_z, cfg.adc_counts})
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidSpec(fmt::format("amplifier parameters must be positive, got {}", v));
}

ForceRange force_range(const AmplifierConfig& cfg, Axis axis) {
  validate(cfg);
  const double range = cfg.charge_range / cfg.sensitivity(axis);
  return {range, range / cfg.adc_counts};
}

double max_frequency_for_accuracy(double natural_frequency, double accuracy_pct) {
  if (!(natural_frequency >= 0.0))
    throw InvalidSpec(fmt::format("natural frequency must be non-negative, got {}", natural_frequency));
  double factor = 0.0;
  if (accuracy_pct == 10.0)
    factor = 0.3;
  else if (accuracy_pct == 5.0)
    factor = 0.2;
  else if (accuracy_pct == 1.0)
    factor = 0.1;
  else
    throw UnknownAccuracyClass(fmt::format("no accuracy class for {} %", accuracy_pct));
  return factor * natural_frequency;
}

AmplifierConfig amplifier_from_config(const Config& cfg) {
  AmplifierConfig a;
  a.charge_range = cfg.get_double("charge_range", a.charge_range);
  a.sensitivity_xy = cfg.get_double("sensitivity_xy", a.sensitivity_xy);
  a.sensitivity_z = cfg.get_double("sensitivity_z", a.sensitivity_z);
  a.adc_counts = cfg.get_double("adc_counts", a.adc_counts);
  try {
    validate(a);
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
  return a;
}

}  // namespace treadmill::sensing
