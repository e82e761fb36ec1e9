#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "treadmill/csv.hpp"

namespace treadmill {

/// Uniformly sampled multi-channel signal.
///
/// Every channel holds the same number of samples (at least two) and the
/// sample rate is strictly positive. Sample i sits at start_time + i / rate.
class TimeSeries {
 public:
  TimeSeries(double rate, std::vector<std::string> names,
             std::vector<std::vector<double>> samples, double start_time = 0.0);

  double rate() const { return rate_; }
  double dt() const { return 1.0 / rate_; }
  double start_time() const { return start_time_; }
  double time(std::size_t i) const { return start_time_ + static_cast<double>(i) / rate_; }
  std::size_t size() const { return samples_.front().size(); }
  double duration() const { return static_cast<double>(size() - 1) / rate_; }

  const std::vector<std::string>& channel_names() const { return names_; }
  bool has_channel(const std::string& name) const;
  /// Throws ChannelMissing.
  std::span<const double> channel(const std::string& name) const;
  std::span<const double> channel(std::size_t index) const { return samples_.at(index); }

 private:
  double rate_;
  double start_time_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> samples_;
};

/// Builds a series from a table whose first column is `time`. The rate is
/// inferred from the span; any sample deviating from the uniform grid by
/// more than `max_jitter` seconds is a ParseError.
TimeSeries time_series_from_table(const CsvTable& table, double max_jitter = 1e-6);
CsvTable time_series_to_table(const TimeSeries& ts);

TimeSeries read_time_series_csv(const std::filesystem::path& path);
void write_time_series_csv(const std::filesystem::path& path, const TimeSeries& ts);

}  // namespace treadmill
