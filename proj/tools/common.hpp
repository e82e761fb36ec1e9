#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "treadmill/config.hpp"

namespace treadmill::cli {

namespace fs = std::filesystem;

/// Mixed text/number CSV for reports; numbers go through format_number.
struct Report {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string num(double v);
void write_report(const fs::path& path, const Report& report);

/// Creates the directory (and parents) if needed.
fs::path prepare_output(const std::string& dir);

/// "start:stop:count" or a comma list of increasing values.
std::vector<double> parse_grid(const std::string& text, const std::string& what);
std::vector<double> parse_list(const std::string& text, const std::string& what);
Eigen::Vector3d parse_vector3(const std::string& text, const std::string& what);
/// "NxM"
std::pair<int, int> parse_dims(const std::string& text, const std::string& what);

Config load_config_or_default(const std::string& path);

void note(const std::string& message);

void add_design_commands(CLI::App& app);
void add_analyze_commands(CLI::App& app);
void add_calibrate_commands(CLI::App& app);
void add_cop_commands(CLI::App& app);
void add_gait_commands(CLI::App& app);
void add_simulate_commands(CLI::App& app);

}  // namespace treadmill::cli
