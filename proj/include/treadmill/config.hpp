#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace treadmill {

/// Flat key=value configuration with `#` comments.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text, const std::string& source = "<memory>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  std::string to_string() const;

 private:
  std::string source_ = "<memory>";
  std::map<std::string, std::string> values_;
};

}  // namespace treadmill
