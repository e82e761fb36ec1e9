#include "treadmill/time_series.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "treadmill/errors.hpp"

namespace treadmill {

TimeSeries::TimeSeries(double rate, std::vector<std::string> names,
                       std::vector<std::vector<double>> samples, double start_time)
    : rate_(rate), start_time_(start_time), names_(std::move(names)), samples_(std::move(samples)) {
  if (!(rate_ > 0.0) || !std::isfinite(rate_))
    throw InvalidSpec(fmt::format("sample rate must be positive, got {}", rate_));
  if (names_.empty() || names_.size() != samples_.size())
    throw InvalidSpec("time series needs one name per channel and at least one channel");
  const auto n = samples_.front().size();
  if (n < 2) throw InvalidSpec("time series needs at least two samples");
  for (std::size_t c = 0; c < samples_.size(); ++c)
    if (samples_[c].size() != n)
      throw InvalidSpec(fmt::format("channel '{}' has {} samples, expected {}", names_[c],
                                    samples_[c].size(), n));
}

bool TimeSeries::has_channel(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::span<const double> TimeSeries::channel(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw ChannelMissing("no channel named '" + name + "'");
  return samples_[static_cast<std::size_t>(it - names_.begin())];
}

TimeSeries time_series_from_table(const CsvTable& table, double max_jitter) {
  if (table.header.empty() || table.header.front() != "time")
    throw ParseError("row 1, column 1: first column must be 'time'");
  if (table.header.size() < 2) throw ParseError("row 1: no data channels after 'time'");
  const auto& t = table.columns.front();
  if (t.size() < 2) throw ParseError("need at least two samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw ParseError(fmt::format("row {}, column 1: time not strictly increasing", i + 2));

  const double span = t.back() - t.front();
  const double rate = static_cast<double>(t.size() - 1) / span;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double expected = t.front() + static_cast<double>(i) / rate;
    if (std::abs(t[i] - expected) > max_jitter)
      throw ParseError(fmt::format("row {}, column 1: sample time {} deviates {} s from uniform grid",
                                   i + 2, t[i], t[i] - expected));
  }
  std::vector<std::string> names(table.header.begin() + 1, table.header.end());
  std::vector<std::vector<double>> samples(table.columns.begin() + 1, table.columns.end());
  return TimeSeries(rate, std::move(names), std::move(samples), t.front());
}

CsvTable time_series_to_table(const TimeSeries& ts) {
  CsvTable table;
  table.header.push_back("time");
  std::vector<double> t(ts.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = ts.time(i);
  table.columns.push_back(std::move(t));
  for (std::size_t c = 0; c < ts.channel_names().size(); ++c) {
    table.header.push_back(ts.channel_names()[c]);
    auto ch = ts.channel(c);
    table.columns.emplace_back(ch.begin(), ch.end());
  }
  return table;
}

TimeSeries read_time_series_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  try {
    return time_series_from_table(table);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_time_series_csv(const std::filesystem::path& path, const TimeSeries& ts) {
  write_csv(path, time_series_to_table(ts));
}

}  // namespace treadmill
