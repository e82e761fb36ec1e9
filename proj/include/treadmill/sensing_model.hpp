#pragma once

#include <array>
#include <string>

#include "treadmill/config.hpp"

namespace treadmill::sensing {

enum class Axis { X, Y, Z };

Axis parse_axis(const std::string& name);
const char* axis_name(Axis axis);

/// Charge amplifier setting plus the piezo sensitivities it divides by.
struct AmplifierConfig {
  double charge_range = 1000.0;  ///< pC
  double sensitivity_xy = 7.7;   ///< pC/N
  double sensitivity_z = 3.9;    ///< pC/N
  double adc_counts = 65536.0;

  double sensitivity(Axis axis) const { return axis == Axis::Z ? sensitivity_z : sensitivity_xy; }
};

/// The four switchable ranges of the shipped amplifier, in pC.
inline constexpr std::array<double, 4> kPresetChargeRanges{1000.0, 5000.0, 10000.0, 50000.0};

AmplifierConfig preset(double charge_range);
bool is_preset(const AmplifierConfig& cfg);

void validate(const AmplifierConfig& cfg);

struct ForceRange {
  double range;       ///< N
  double resolution;  ///< N per ADC count
};

ForceRange force_range(const AmplifierConfig& cfg, Axis axis);

/// Usable bandwidth for a given sensor accuracy, as a fraction of f_n:
/// 10 % -> 0.3, 5 % -> 0.2, 1 % -> 0.1. Other percentages throw
/// UnknownAccuracyClass.
double max_frequency_for_accuracy(double natural_frequency, double accuracy_pct);

/// Keys: charge_range, sensitivity_xy, sensitivity_z, adc_counts (all
/// optional, defaulting to the 1000 pC preset).
AmplifierConfig amplifier_from_config(const Config& cfg);

}  // namespace treadmill::sensing
