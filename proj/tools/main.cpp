#include <cstdio>
#include <exception>

#include <fmt/format.h>

#include "common.hpp"
#include "treadmill/errors.hpp"

namespace {

const char* category_name(treadmill::ErrorCategory c) {
  switch (c) {
    case treadmill::ErrorCategory::Parse: return "parse";
    case treadmill::ErrorCategory::Config: return "config";
    case treadmill::ErrorCategory::Analysis: return "analysis";
  }
  return "analysis";
}

int exit_code(treadmill::ErrorCategory c) {
  switch (c) {
    case treadmill::ErrorCategory::Parse: return 2;
    case treadmill::ErrorCategory::Config: return 3;
    case treadmill::ErrorCategory::Analysis: return 4;
  }
  return 4;
}

void report_error(const char* category, const std::string& code, const std::string& message) {
  std::fputs(fmt::format("error: category={} code={} message={}\n", category, code, message).c_str(), stderr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instrumented treadmill analysis: plate design, impact and noise analysis, calibration, "
               "centre of pressure correction, gait averaging and a seeded simulator."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "treadmill 1.0.0");
  treadmill::cli::add_design_commands(app);
  treadmill::cli::add_analyze_commands(app);
  treadmill::cli::add_calibrate_commands(app);
  treadmill::cli::add_cop_commands(app);
  treadmill::cli::add_gait_commands(app);
  treadmill::cli::add_simulate_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("config", "UsageError", e.what());
    return 3;
  } catch (const treadmill::Error& e) {
    report_error(category_name(e.category()), e.code(), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    report_error("analysis", "InternalError", e.what());
    return 4;
  }
  return 0;
}
