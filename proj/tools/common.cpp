#include "common.hpp"

#include <cstdio>

#include <fmt/format.h>

#include "treadmill/csv.hpp"
#include "treadmill/errors.hpp"

namespace treadmill::cli {

std::string num(double v) { return format_number(v); }

void write_report(const fs::path& path, const Report& report) {
  std::string out;
  for (std::size_t c = 0; c < report.header.size(); ++c) out += (c ? "," : "") + report.header[c];
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
    out += '\n';
  }
  write_text_file(path, out);
}

fs::path prepare_output(const std::string& dir) {
  const fs::path p(dir.empty() ? "." : dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p))
    throw ConfigError(fmt::format("cannot create output directory '{}': {}", p.string(), ec.message()));
  return p;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(',', pos);
    const std::string item = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: cannot parse '{}' as a number", what, item));
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  if (text.find(':') == std::string::npos) return parse_list(text, what);
  const auto a = text.find(':'), b = text.find(':', a + 1);
  if (b == std::string::npos) throw ConfigError(fmt::format("{}: expected start:stop:count, got '{}'", what, text));
  const double lo = parse_list(text.substr(0, a), what).at(0);
  const double hi = parse_list(text.substr(a + 1, b - a - 1), what).at(0);
  const double n = parse_list(text.substr(b + 1), what).at(0);
  if (!(n >= 1.0) || n != std::floor(n)) throw ConfigError(fmt::format("{}: count must be a positive integer", what));
  const auto count = static_cast<std::size_t>(n);
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

Eigen::Vector3d parse_vector3(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what);
  if (v.size() != 3) throw ConfigError(fmt::format("{}: expected three comma-separated values", what));
  return {v[0], v[1], v[2]};
}

std::pair<int, int> parse_dims(const std::string& text, const std::string& what) {
  int a = 0, b = 0;
  char sep = 0;
  if (std::sscanf(text.c_str(), "%d%c%d", &a, &sep, &b) != 3 || (sep != 'x' && sep != 'X') || a < 1 || b < 1)
    throw ConfigError(fmt::format("{}: expected NxM, got '{}'", what, text));
  return {a, b};
}

Config load_config_or_default(const std::string& path) { return path.empty() ? Config{} : Config::load(path); }

void note(const std::string& message) { std::fputs((message + "\n").c_str(), stdout); }

}  // namespace treadmill::cli
