#pragma once

#include <string>
#include <vector>

#include "treadmill/config.hpp"

namespace treadmill::design {

/// Geometry and material of the compound running plate (SI units).
///
/// Layers nest symmetrically: a sandwich plate of outer thickness
/// `h_sandwich` with a hollow core `h_inner`, wrapped by carbon-fibre
/// layers up to the total stack thickness `h_compound`.
struct PlateSpec {
  double width = 0.0;        ///< b, m
  double length = 0.0;       ///< free length l, m
  double h_inner = 0.0;      ///< m
  double h_sandwich = 0.0;   ///< m
  double h_compound = 0.0;   ///< m
  double e_sandwich = 0.0;   ///< face modulus, Pa
  double e_carbon = 0.0;     ///< Pa
  double mass = 0.0;         ///< floating mass, kg
};

/// Throws InvalidSpec naming the first violated constraint.
void validate(const PlateSpec& spec);

/// First bending-mode natural frequency in Hz.
double natural_frequency(const PlateSpec& spec);

/// Bending stiffness E*I summed over the sandwich and carbon layers, N*m^2.
double bending_stiffness(const PlateSpec& spec);

/// How the floating mass follows the plate dimensions during a sweep.
struct MassModel {
  enum class Kind { Constant, Areal };
  Kind kind = Kind::Constant;
  double fixed_mass = 0.0;             ///< kg, Areal only
  double sandwich_areal_density = 0.0; ///< kg/m^2, Areal only
  double carbon_density = 0.0;         ///< kg/m^3, Areal only

  double mass_for(const PlateSpec& base, double length, double carbon_thickness) const;
};

struct FrequencySweep {
  std::vector<double> lengths;
  std::vector<double> thicknesses;       ///< carbon layer thickness per face, m
  std::vector<double> f_n;               ///< row-major over (length, thickness)
  std::vector<std::string> cell_errors;  ///< empty string when the cell is valid

  double at(std::size_t i, std::size_t j) const { return f_n[i * thicknesses.size() + j]; }
  bool valid(std::size_t i, std::size_t j) const {
    return cell_errors[i * thicknesses.size() + j].empty();
  }
};

/// Evaluates every (length, carbon thickness) pair with
/// h_compound = h_sandwich + 2 * thickness. Invalid cells are flagged with
/// their error message and hold NaN. `jobs` > 1 splits rows across threads.
FrequencySweep frequency_sweep(const PlateSpec& base, const std::vector<double>& lengths,
                               const std::vector<double>& carbon_thicknesses,
                               const MassModel& mass_model, unsigned jobs = 1);

/// Keys: width, length, h_inner, h_sandwich, h_compound, e_sandwich,
/// e_carbon, mass.
PlateSpec plate_spec_from_config(const Config& cfg);
MassModel mass_model_from_config(const Config& cfg);

}  // namespace treadmill::design
