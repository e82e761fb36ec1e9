#include "treadmill/gait.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "treadmill/errors.hpp"

namespace treadmill::gait {

std::vector<StrideWindow> segment_strides(const TimeSeries& ts, double body_weight, const SegmentOptions& opts) {
  if (!(body_weight > 0.0))
    throw NoStridesDetected(fmt::format("body weight {} N gives no load thresholds", body_weight));
  const auto f = ts.channel(opts.channel);
  const double rise = opts.rise_fraction * body_weight;
  const double fall = opts.fall_fraction * body_weight;
  const double onset = opts.onset_fraction * body_weight;
  const auto min_run = static_cast<std::size_t>(std::ceil(opts.min_unloaded * ts.rate() - 1e-9));

  std::vector<std::size_t> touchdowns;
  bool loaded = f[0] >= rise;
  bool armed = false;
  std::size_t run = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (loaded) {
      if (f[i] < fall) {
        loaded = false;
        run = 1;
        armed = run >= min_run;
      }
      continue;
    }
    if (f[i] < fall) {
      if (++run >= min_run) armed = true;
    } else {
      run = 0;
    }
    if (f[i] >= rise) {
      loaded = true;
      if (!armed) continue;
      armed = false;
      std::size_t j = i;
      while (j > 0 && f[j] > onset) --j;
      touchdowns.push_back(j);
    }
  }
  if (touchdowns.size() < 2)
    throw NoStridesDetected(fmt::format("found {} touchdown(s) in '{}'; a stride needs two", touchdowns.size(),
                                        opts.channel));

  std::vector<StrideWindow> windows;
  for (std::size_t k = 0; k + 1 < touchdowns.size(); ++k)
    windows.push_back({touchdowns[k], touchdowns[k + 1], ts.time(touchdowns[k]), ts.time(touchdowns[k + 1])});

  std::vector<double> durations;
  for (const auto& w : windows) durations.push_back(w.duration());
  auto mid = durations.begin() + static_cast<std::ptrdiff_t>(durations.size() / 2);
  std::nth_element(durations.begin(), mid, durations.end());
  double median = *mid;
  if (durations.size() % 2 == 0) median = 0.5 * (median + *std::max_element(durations.begin(), mid));
  for (auto& w : windows) w.outlier = std::abs(w.duration() - median) > opts.outlier_tolerance * median;
  return windows;
}

double StrideEnsemble::mean_band(const std::string& channel) const {
  for (const auto& a : axes) {
    if (a.channel != channel) continue;
    double s = 0.0;
    for (double b : a.band) s += b;
    return s / static_cast<double>(a.band.size());
  }
  throw ChannelMissing(fmt::format("ensemble has no channel '{}'", channel));
}

StrideEnsemble average_strides(const TimeSeries& ts, const std::vector<StrideWindow>& windows, double body_weight,
                               const EnsembleOptions& opts) {
  if (opts.grid_points < 2) throw InvalidSpec("stride grid needs at least 2 points");
  if (opts.normalize && !(body_weight > 0.0))
    throw InvalidSpec(fmt::format("cannot normalise by body weight {} N", body_weight));
  std::vector<StrideWindow> used;
  for (const auto& w : windows) {
    if (opts.skip_outliers && w.outlier) continue;
    if (w.end <= w.start || w.end >= ts.size()) throw InvalidSpec("stride window outside the recording");
    used.push_back(w);
  }
  if (used.empty()) throw NoStridesDetected("no usable stride windows");

  const std::size_t g = opts.grid_points;
  StrideEnsemble e;
  e.stride_count = used.size();
  e.normalized = opts.normalize;
  e.body_weight = body_weight;
  for (std::size_t j = 0; j < g; ++j)
    e.normalized_time.push_back(100.0 * static_cast<double>(j) / static_cast<double>(g - 1));

  const double scale = opts.normalize ? body_weight : 1.0;
  const double n = static_cast<double>(used.size());
  for (const char* name : {"Fx", "Fy", "Fz"}) {
    if (!ts.has_channel(name)) continue;
    const auto y = ts.channel(name);
    // strides x grid
    std::vector<std::vector<double>> v(used.size(), std::vector<double>(g));
    for (std::size_t k = 0; k < used.size(); ++k) {
      const double a = static_cast<double>(used[k].start);
      const double span = static_cast<double>(used[k].end - used[k].start);
      for (std::size_t j = 0; j < g; ++j) {
        const double u = a + span * static_cast<double>(j) / static_cast<double>(g - 1);
        const auto i0 = static_cast<std::size_t>(u);
        const double frac = u - static_cast<double>(i0);
        const double val = frac == 0.0 ? y[i0] : y[i0] + frac * (y[i0 + 1] - y[i0]);
        v[k][j] = val / scale;
      }
    }
    AxisEnsemble axis;
    axis.channel = name;
    axis.mean.resize(g);
    axis.band.assign(g, 0.0);
    for (std::size_t j = 0; j < g; ++j) {
      // Deviations from the first stride keep identical strides exactly at zero spread.
      const double ref = v[0][j];
      double sum = 0.0;
      for (std::size_t k = 0; k < used.size(); ++k) sum += v[k][j] - ref;
      const double md = sum / n;
      axis.mean[j] = ref + md;
      if (used.size() > 1) {
        double ss = 0.0;
        for (std::size_t k = 0; k < used.size(); ++k) ss += (v[k][j] - ref - md) * (v[k][j] - ref - md);
        const double sd = std::sqrt(ss / (n - 1.0));
        axis.band[j] = 1.96 * (opts.sem ? sd / std::sqrt(n) : sd);
      }
    }
    e.axes.push_back(std::move(axis));
  }
  if (e.axes.empty()) throw ChannelMissing("recording has none of Fx, Fy, Fz");
  return e;
}

CsvTable ensemble_to_table(const StrideEnsemble& e) {
  CsvTable t;
  t.header.push_back("percent");
  t.columns.push_back(e.normalized_time);
  for (const auto& a : e.axes) {
    t.header.push_back(a.channel + "_mean");
    t.columns.push_back(a.mean);
    t.header.push_back(a.channel + "_band");
    t.columns.push_back(a.band);
  }
  return t;
}

CsvTable strides_to_table(const std::vector<StrideWindow>& windows) {
  CsvTable t;
  t.header = {"stride", "start", "end", "duration", "outlier"};
  t.columns.resize(5);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    t.columns[0].push_back(static_cast<double>(k + 1));
    t.columns[1].push_back(windows[k].start_time);
    t.columns[2].push_back(windows[k].end_time);
    t.columns[3].push_back(windows[k].duration());
    t.columns[4].push_back(windows[k].outlier ? 1.0 : 0.0);
  }
  return t;
}

}  // namespace treadmill::gait
