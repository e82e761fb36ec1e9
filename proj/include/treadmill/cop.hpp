#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "treadmill/polynomial.hpp"
#include "treadmill/time_series.hpp"

namespace treadmill::cop {

/// Force and moment at the sensor-plane origin (treadmill centre). The z
/// axis points down into the plate, so body weight gives F_z > 0 and the
/// running surface sits at negative z.
struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   ///< N
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();  ///< N*m
};

inline constexpr double kMinVerticalForce = 10.0;  ///< N

/// a_x = (F_x a_z - M_y) / F_z, a_y = (F_y a_z + M_x) / F_z.
/// Throws InsufficientLoad when |F_z| <= min_fz.
Eigen::Vector2d cop_from_wrench(const Wrench& w, double a_z, double min_fz = kMinVerticalForce);

/// Sums four sensor force triplets located at (x_i, y_i, 0).
Wrench wrench_from_sensor_array(const std::array<Eigen::Vector3d, 4>& readings,
                                const std::array<Eigen::Vector2d, 4>& positions);

/// Wrench of force `f` applied at `point`, about the origin.
Wrench wrench_at(const Eigen::Vector3d& f, const Eigen::Vector3d& point);

struct ShearFit {
  double a_z = 0.0;       ///< m
  double spread_x = 0.0;  ///< population std of a_x at the optimum, m
  double spread_y = 0.0;
  Eigen::Vector2d mean_cop = Eigen::Vector2d::Zero();
  std::size_t samples = 0;
};

/// Sensor offset minimising Var(a_x) + Var(a_y) over wrenches that share one
/// application point. Closed form: the objective is quadratic in a_z.
/// Throws DegenerateDirections (all forces parallel), InsufficientLoad.
ShearFit optimize_shear_offset(std::span<const Wrench> samples, double min_fz = kMinVerticalForce);

struct ShearCalibration {
  std::vector<ShearFit> trials;
  double a_z = 0.0;           ///< mean over trials
  double a_z_ci = 0.0;        ///< 95 % half-width of the mean
  double a_z_std = 0.0;       ///< sample std over trials
  double spread_x = 0.0;      ///< mean over trials
  double spread_y = 0.0;
};

/// Fits every trial separately and averages. With `pooled` the samples of
/// all trials form one set and the summary holds that single fit.
ShearCalibration calibrate_shear(const std::vector<std::vector<Wrench>>& trials, bool pooled = false);

/// Separable quartic S(x, y) = c0 + sum_n a_n u^n + b_n v^n with u, v the
/// normalised coordinates. Coefficient order: c0, a1..a4, b1..b4.
struct ErrorSurface {
  Normalizer nx;
  Normalizer ny;
  std::array<double, 9> coeffs{};
  double operator()(const Eigen::Vector2d& p) const;
};

std::array<double, 9> surface_basis(double u, double v);

struct CopSample {
  Wrench wrench;
  Eigen::Vector2d cop = Eigen::Vector2d::Zero();  ///< measured, m
  std::optional<Eigen::Vector2d> ground_truth;    ///< MoCap, m
};

struct CopCorrectionModel {
  double a_z = 0.0;
  ErrorSurface sx;
  ErrorSurface sy;
  double r2_x = 1.0;
  double r2_y = 1.0;
  Eigen::Vector2d lower = Eigen::Vector2d::Zero();  ///< calibrated box
  Eigen::Vector2d upper = Eigen::Vector2d::Zero();
};

/// Least-squares fit of COP_measured - COP_truth over the measured
/// positions. Throws RankDeficient (condition number above 1e12 or fewer
/// than 9 points) and InsufficientPoints when a sample lacks ground truth.
CopCorrectionModel fit_cop_error_surface(const std::vector<CopSample>& points, double a_z);

/// raw - S(raw). Throws OutOfBounds outside the calibrated box unless
/// `allow_extrapolation`.
Eigen::Vector2d correct_cop(const Eigen::Vector2d& raw, const CopCorrectionModel& model,
                            bool allow_extrapolation = false);

std::string format_model(const CopCorrectionModel& model);
CopCorrectionModel parse_model(const std::string& text, const std::string& source = "<memory>");
void save_model(const std::filesystem::path& path, const CopCorrectionModel& model);
CopCorrectionModel load_model(const std::filesystem::path& path);

// -- file plumbing --------------------------------------------------------

inline const std::array<std::string, 6> kWrenchChannels{"Fx", "Fy", "Fz", "Mx", "My", "Mz"};

Wrench wrench_sample(const TimeSeries& ts, std::size_t i);
std::vector<Wrench> wrenches(const TimeSeries& ts);

/// Reads `trial,Fx,Fy,Fz,Mx,My,Mz`; rows are grouped by trial id in order of
/// first appearance.
std::vector<std::vector<Wrench>> shear_trials_from_table(const CsvTable& table);
CsvTable shear_trials_to_table(const std::vector<std::vector<Wrench>>& trials);

struct StaticWindowOptions {
  double load_fraction = 0.5;  ///< of the peak F_z
  double trim = 0.25;          ///< s dropped at both ends of a loaded window
  double min_duration = 0.3;   ///< s after trimming
};

/// Splits a dead-weight recording into loaded windows, averages the wrench
/// in each and pairs it with the mean MoCap position (`time,x,y`) over the
/// same interval.
std::vector<CopSample> static_cop_samples(const TimeSeries& wrench, const CsvTable& mocap, double a_z,
                                          const StaticWindowOptions& opts = {});

}  // namespace treadmill::cop
