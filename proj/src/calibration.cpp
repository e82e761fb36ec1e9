#include "treadmill/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "treadmill/errors.hpp"
#include "treadmill/polynomial.hpp"

namespace treadmill::calib {

namespace {

using Run = std::pair<std::size_t, std::size_t>;  // inclusive sample range

std::vector<Run> runs_of(const std::vector<char>& mask, std::size_t min_length) {
  std::vector<Run> out;
  std::size_t i = 0;
  while (i < mask.size()) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < mask.size() && mask[j + 1]) ++j;
    if (j - i + 1 >= min_length) out.emplace_back(i, j);
    i = j + 1;
  }
  return out;
}

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Sample index range [first, last] of `ts` inside the interval; empty when first > last.
Run sample_range(const TimeSeries& ts, const Interval& iv) {
  const double a = std::ceil((iv.start - ts.start_time()) * ts.rate() - 1e-9);
  const double b = std::floor((iv.end - ts.start_time()) * ts.rate() + 1e-9);
  const double lo = std::max(a, 0.0);
  const double hi = std::min(b, static_cast<double>(ts.size()) - 1.0);
  if (hi < lo) return {1, 0};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

Interval trimmed(const Interval& iv, double exclusion) { return {iv.start + exclusion, iv.end - exclusion}; }

struct Samples {
  std::vector<double> ref;
  std::vector<double> dev;
};

Samples collect(const CalibrationRun& run, std::size_t axis, const std::vector<Interval>& windows) {
  Samples s;
  const auto ref = run.reference.channel(kForceChannels[axis]);
  const auto dev = run.device.channel(kForceChannels[axis]);
  for (const auto& w : windows) {
    const auto [a, b] = sample_range(run.reference, w);
    for (std::size_t i = a; i <= b && a <= b; ++i) {
      s.ref.push_back(ref[i]);
      s.dev.push_back(dev[i]);
    }
  }
  return s;
}

std::pair<double, double> axis_extent(const CalibrationRun& run, std::size_t axis,
                                      const std::vector<Interval>& windows) {
  const auto ref = run.reference.channel(kForceChannels[axis]);
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& w : windows) {
    const auto [a, b] = sample_range(run.reference, w);
    for (std::size_t i = a; i <= b && a <= b; ++i) {
      if (!any) lo = hi = ref[i];
      lo = std::min(lo, ref[i]);
      hi = std::max(hi, ref[i]);
      any = true;
    }
  }
  return {lo, hi};
}

std::vector<Interval> intervals(const std::vector<Phase>& phases) {
  std::vector<Interval> out;
  for (const auto& p : phases) out.push_back(p.interval);
  return out;
}

std::vector<Interval> trimmed_all(const std::vector<Phase>& phases, double exclusion) {
  std::vector<Interval> out;
  for (const auto& p : phases) {
    const auto t = trimmed(p.interval, exclusion);
    if (t.end > t.start) out.push_back(t);
  }
  return out;
}

double interpolate(std::span<const double> y, double start, double rate, double t) {
  const double u = (t - start) * rate;
  if (u <= 0.0) return y.front();
  const double last = static_cast<double>(y.size() - 1);
  if (u >= last) return y.back();
  const auto i = static_cast<std::size_t>(u);
  const double f = u - static_cast<double>(i);
  return y[i] + f * (y[i + 1] - y[i]);
}

}  // namespace

std::vector<double> force_magnitude(const TimeSeries& ts) {
  std::vector<double> out(ts.size(), 0.0);
  const bool vector_force = std::all_of(kForceChannels.begin(), kForceChannels.end(),
                                        [&](const auto& c) { return ts.has_channel(c); });
  if (!vector_force) {
    const auto y = ts.channel(0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(y[i]);
    return out;
  }
  const auto fx = ts.channel("Fx"), fy = ts.channel("Fy"), fz = ts.channel("Fz");
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(fx[i] * fx[i] + fy[i] * fy[i] + fz[i] * fz[i]);
  return out;
}

ProtocolPhases segment_protocol(const TimeSeries& reference, const ProtocolOptions& opts) {
  const auto f = force_magnitude(reference);
  const std::size_t n = f.size();
  const double rate = reference.rate();
  const double fmax = *std::max_element(f.begin(), f.end());

  ProtocolPhases phases;
  auto mismatch = [&](const std::string& why) {
    return ProtocolMismatch(fmt::format("{}: found {} preload plateaus, {} up-ramps, {} down-ramps; expected {}, {}, {}",
                                        why, phases.preload.size(), phases.ramp_up.size(), phases.ramp_down.size(),
                                        opts.expected_preloads, opts.expected_ramps, opts.expected_ramps));
  };
  if (!(fmax > 0.0)) throw mismatch("reference carries no load");

  const auto k = static_cast<std::size_t>(std::max(1.0, std::round(0.5 * opts.derivative_window * rate)));
  std::vector<double> slope(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i >= k ? i - k : 0;
    const std::size_t b = std::min(n - 1, i + k);
    slope[i] = (f[b] - f[a]) * rate / static_cast<double>(b - a);
  }
  auto time_of = [&](double idx) { return reference.start_time() + idx / rate; };
  auto window_min = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
    a = std::max<std::ptrdiff_t>(a, 0);
    b = std::min<std::ptrdiff_t>(b, static_cast<std::ptrdiff_t>(n) - 1);
    return *std::min_element(f.begin() + a, f.begin() + b + 1);
  };
  auto window_max = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
    a = std::max<std::ptrdiff_t>(a, 0);
    b = std::min<std::ptrdiff_t>(b, static_cast<std::ptrdiff_t>(n) - 1);
    return *std::max_element(f.begin() + a, f.begin() + b + 1);
  };

  // Plateaus: flat and high. Boundaries grow outward while the force stays
  // within tolerance of the plateau median.
  std::vector<char> mask(n);
  for (std::size_t i = 0; i < n; ++i)
    mask[i] = std::abs(slope[i]) < opts.plateau_max_slope && f[i] >= opts.plateau_min_level * fmax;
  const auto min_plateau = static_cast<std::size_t>(opts.plateau_min_duration * rate);
  for (auto [a, b] : runs_of(mask, min_plateau)) {
    std::vector<double> seg(f.begin() + static_cast<std::ptrdiff_t>(a), f.begin() + static_cast<std::ptrdiff_t>(b) + 1);
    const double level = median_of(seg);
    double ss = 0.0;
    for (double v : seg) ss += (v - level) * (v - level);
    const double tol = std::max(0.01 * level, 4.0 * std::sqrt(ss / static_cast<double>(seg.size())));
    while (a > 0 && std::abs(f[a - 1] - level) <= tol) --a;
    while (b + 1 < n && std::abs(f[b + 1] - level) <= tol) ++b;
    phases.preload.push_back({{time_of(static_cast<double>(a)), time_of(static_cast<double>(b))}, level, level});
  }

  // Ramps: sustained slope. Boundaries come from the line through the ramp
  // interior meeting the levels just before and after it.
  const auto min_ramp = static_cast<std::size_t>(opts.ramp_min_duration * rate);
  for (int sign : {+1, -1}) {
    for (std::size_t i = 0; i < n; ++i) mask[i] = sign * slope[i] > opts.ramp_min_slope;
    for (auto [a, b] : runs_of(mask, min_ramp)) {
      const std::size_t len = b - a + 1;
      const std::size_t ia = a + len / 10, ib = b - len / 10;
      double st = 0, sf = 0, stt = 0, stf = 0;
      const double m = static_cast<double>(ib - ia + 1);
      for (std::size_t i = ia; i <= ib; ++i) {
        const double t = static_cast<double>(i);
        st += t;
        sf += f[i];
        stt += t * t;
        stf += t * f[i];
      }
      const double slope_idx = (m * stf - st * sf) / (m * stt - st * st);
      const double icpt = (sf - slope_idx * st) / m;
      const auto ka = static_cast<std::ptrdiff_t>(a), kb = static_cast<std::ptrdiff_t>(b);
      const auto kk = static_cast<std::ptrdiff_t>(k);
      double low = 0.0, high = 0.0, t_start = 0.0, t_end = 0.0;
      if (sign > 0) {
        low = window_min(ka - 2 * kk, ka + kk);
        high = window_max(kb - kk, kb + 2 * kk);
        t_start = (low - icpt) / slope_idx;
        t_end = (high - icpt) / slope_idx;
      } else {
        high = window_max(ka - 2 * kk, ka + kk);
        low = window_min(kb - kk, kb + 2 * kk);
        t_start = (high - icpt) / slope_idx;
        t_end = (low - icpt) / slope_idx;
      }
      if (low > opts.ramp_low_level * fmax || high < opts.plateau_min_level * fmax) continue;
      Phase ph{{time_of(t_start), time_of(t_end)}, low, high};
      (sign > 0 ? phases.ramp_up : phases.ramp_down).push_back(ph);
    }
  }

  auto by_start = [](const Phase& a, const Phase& b) { return a.interval.start < b.interval.start; };
  std::sort(phases.preload.begin(), phases.preload.end(), by_start);
  std::sort(phases.ramp_up.begin(), phases.ramp_up.end(), by_start);
  std::sort(phases.ramp_down.begin(), phases.ramp_down.end(), by_start);

  if (phases.preload.size() != opts.expected_preloads || phases.ramp_up.size() != opts.expected_ramps ||
      phases.ramp_down.size() != opts.expected_ramps)
    throw mismatch("protocol phase count mismatch");
  return phases;
}

// -- pose ------------------------------------------------------------------

Eigen::Quaterniond PoseTrack::orientation_at(double t) const {
  if (orientation.size() == 1 || t <= time.front()) return orientation.front();
  if (t >= time.back()) return orientation.back();
  const auto it = std::upper_bound(time.begin(), time.end(), t);
  const auto i = static_cast<std::size_t>(it - time.begin()) - 1;
  const double f = (t - time[i]) / (time[i + 1] - time[i]);
  return orientation[i].slerp(f, orientation[i + 1]);
}

Eigen::Vector3d PoseTrack::mean_position() const {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : position) sum += p;
  return sum / static_cast<double>(position.size());
}

PoseTrack pose_from_table(const CsvTable& table) {
  static const std::array<std::string, 8> cols{"time", "x", "y", "z", "qw", "qx", "qy", "qz"};
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (c >= table.header.size() || table.header[c] != cols[c])
      throw ParseError(fmt::format("row 1, column {}: pose header must be time,x,y,z,qw,qx,qy,qz", c + 1));
  PoseTrack pose;
  const std::size_t n = table.rows();
  if (n == 0) throw ParseError("pose file has no samples");
  for (std::size_t i = 0; i < n; ++i) {
    const double t = table.columns[0][i];
    if (i > 0 && !(t > pose.time.back()))
      throw ParseError(fmt::format("row {}, column 1: time not strictly increasing", i + 2));
    pose.time.push_back(t);
    pose.position.emplace_back(table.columns[1][i], table.columns[2][i], table.columns[3][i]);
    Eigen::Quaterniond q(table.columns[4][i], table.columns[5][i], table.columns[6][i], table.columns[7][i]);
    if (!(q.norm() > 1e-9)) throw ParseError(fmt::format("row {}: zero quaternion", i + 2));
    pose.orientation.push_back(q.normalized());
  }
  return pose;
}

PoseTrack read_pose_csv(const std::filesystem::path& path) {
  try {
    return pose_from_table(read_csv(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

CsvTable pose_to_table(const PoseTrack& pose) {
  CsvTable t;
  t.header = {"time", "x", "y", "z", "qw", "qx", "qy", "qz"};
  t.columns.resize(8);
  for (std::size_t i = 0; i < pose.time.size(); ++i) {
    t.columns[0].push_back(pose.time[i]);
    for (int k = 0; k < 3; ++k) t.columns[1 + static_cast<std::size_t>(k)].push_back(pose.position[i][k]);
    t.columns[4].push_back(pose.orientation[i].w());
    t.columns[5].push_back(pose.orientation[i].x());
    t.columns[6].push_back(pose.orientation[i].y());
    t.columns[7].push_back(pose.orientation[i].z());
  }
  return t;
}

// -- synchronisation -------------------------------------------------------

CalibrationRun synchronize(const TimeSeries& reference, const PoseTrack& pose, const TimeSeries& device,
                           int point_id, const SyncOptions& opts) {
  const std::size_t nr = reference.size();
  std::array<std::vector<double>, 3> rotated;
  for (auto& r : rotated) r.resize(nr);
  {
    const auto fx = reference.channel("Fx"), fy = reference.channel("Fy"), fz = reference.channel("Fz");
    for (std::size_t i = 0; i < nr; ++i) {
      const Eigen::Vector3d v = pose.orientation_at(reference.time(i)) * Eigen::Vector3d(fx[i], fy[i], fz[i]);
      for (int a = 0; a < 3; ++a) rotated[static_cast<std::size_t>(a)][i] = v[a];
    }
  }
  std::vector<double> ref_mag(nr);
  for (std::size_t i = 0; i < nr; ++i)
    ref_mag[i] = std::sqrt(rotated[0][i] * rotated[0][i] + rotated[1][i] * rotated[1][i] + rotated[2][i] * rotated[2][i]);
  const auto dev_mag = force_magnitude(device);

  auto onset = [](const std::vector<double>& m) {
    const double half = 0.5 * *std::max_element(m.begin(), m.end());
    std::size_t i = 0;
    while (i + 1 < m.size() && m[i] < half) ++i;
    return i;
  };
  const std::size_t dev_on = onset(dev_mag);
  const std::size_t ref_on = onset(ref_mag);
  const double guess = reference.time(ref_on) - device.time(dev_on);

  const double dr = device.rate();
  const auto half_window = static_cast<std::ptrdiff_t>(opts.onset_window * dr);
  const std::size_t w0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(dev_on) - half_window));
  const std::size_t w1 = std::min(device.size() - 1, dev_on + static_cast<std::size_t>(half_window));
  const auto max_shift = static_cast<std::ptrdiff_t>(opts.max_lag * dr);
  const double wn = static_cast<double>(w1 - w0 + 1);

  // Residual of the best affine fit dev ~ a ref(t + lag) + b around the onset.
  // Unlike a derivative correlation it is not pulled by device ringing.
  auto residual = [&](double lag) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = w0; i <= w1; ++i) {
      const double x = interpolate(ref_mag, reference.start_time(), reference.rate(), device.time(i) + lag);
      const double y = dev_mag[i];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
    }
    const double vxx = sxx - sx * sx / wn, vxy = sxy - sx * sy / wn, vyy = syy - sy * sy / wn;
    return vxx > 0.0 ? vyy - vxy * vxy / vxx : vyy;
  };
  std::vector<double> scores(static_cast<std::size_t>(2 * max_shift + 1));
  std::size_t best = 0;
  for (std::ptrdiff_t m = -max_shift; m <= max_shift; ++m) {
    const auto idx = static_cast<std::size_t>(m + max_shift);
    scores[idx] = residual(guess + static_cast<double>(m) / dr);
    if (scores[idx] < scores[best]) best = idx;
  }
  double frac = 0.0;
  if (best > 0 && best + 1 < scores.size()) {
    const double a = scores[best - 1], b = scores[best], c = scores[best + 1];
    const double denom = a - 2.0 * b + c;
    if (denom > 0.0) frac = 0.5 * (a - c) / denom;
  }
  const double lag = guess + (static_cast<double>(best) - static_cast<double>(max_shift) + frac) / dr;

  const double ref_first = reference.time(0), ref_last = reference.time(nr - 1);
  std::size_t i0 = 0;
  while (i0 < device.size() && device.time(i0) + lag < ref_first) ++i0;
  std::size_t i1 = device.size() - 1;
  while (i1 > i0 && device.time(i1) + lag > ref_last) --i1;
  if (i1 <= i0) throw ProtocolMismatch("reference and device recordings do not overlap");

  std::vector<std::vector<double>> ref_out(3), dev_out(3);
  for (std::size_t a = 0; a < 3; ++a) {
    const auto dch = device.channel(kForceChannels[a]);
    for (std::size_t i = i0; i <= i1; ++i) {
      ref_out[a].push_back(interpolate(rotated[a], reference.start_time(), reference.rate(), device.time(i) + lag));
      dev_out[a].push_back(dch[i]);
    }
  }
  const std::vector<std::string> names(kForceChannels.begin(), kForceChannels.end());
  CalibrationRun run{TimeSeries(dr, names, std::move(ref_out), device.time(i0)),
                     TimeSeries(dr, names, std::move(dev_out), device.time(i0)), point_id,
                     pose.mean_position().head<2>(), lag};
  return run;
}

// -- metrics ---------------------------------------------------------------

std::vector<Interval> evaluation_windows(const ProtocolPhases& phases, double exclusion) {
  std::vector<Interval> out;
  for (const auto* group : {&phases.preload, &phases.ramp_up, &phases.ramp_down}) {
    const auto t = trimmed_all(*group, exclusion);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

AxisValues max_error(const CalibrationRun& run, const ProtocolPhases& phases, const EvaluationOptions& opts) {
  AxisValues out{};
  const auto windows = evaluation_windows(phases, opts.transient_exclusion);
  for (std::size_t a = 0; a < 3; ++a) {
    const auto s = collect(run, a, windows);
    for (std::size_t i = 0; i < s.ref.size(); ++i) out[a] = std::max(out[a], std::abs(s.dev[i] - s.ref[i]));
  }
  return out;
}

OptionalAxisValues linearity(const CalibrationRun& run, const ProtocolPhases& phases, const EvaluationOptions& opts) {
  OptionalAxisValues out;
  const auto windows = trimmed_all(phases.ramp_up, opts.transient_exclusion);
  const auto full = intervals(phases.ramp_up);
  for (std::size_t a = 0; a < 3; ++a) {
    const auto [lo, hi] = axis_extent(run, a, full);
    if (hi - lo < opts.min_axis_span * opts.full_scale) continue;
    const auto s = collect(run, a, windows);
    double worst_dev = 0.0;
    if (opts.terminal_linearity) {
      // Smoothed characteristic over the full ramp range against the line
      // joining its end points.
      const auto p = fit_polynomial(s.ref, s.dev, opts.linearity_degree);
      const double p_lo = p(lo), p_hi = p(hi);
      constexpr int kGrid = 2000;
      for (int g = 0; g <= kGrid; ++g) {
        const double x = lo + (hi - lo) * g / kGrid;
        const double line = p_lo + (p_hi - p_lo) * (x - lo) / (hi - lo);
        worst_dev = std::max(worst_dev, std::abs(p(x) - line));
      }
    } else {
      const auto line = fit_polynomial(s.ref, s.dev, 1);
      for (std::size_t i = 0; i < s.ref.size(); ++i) worst_dev = std::max(worst_dev, std::abs(s.dev[i] - line(s.ref[i])));
    }
    out[a] = 100.0 * worst_dev / opts.full_scale;
  }
  return out;
}

OptionalAxisValues repeatability(const CalibrationRun& run, const ProtocolPhases& phases,
                                 const EvaluationOptions& opts) {
  OptionalAxisValues out;
  if (phases.preload.size() < 2) throw ProtocolMismatch("repeatability needs two preload plateaus");
  for (std::size_t a = 0; a < 3; ++a) {
    std::array<double, 2> mean{};
    bool excited = true;
    for (std::size_t p = 0; p < 2; ++p) {
      const auto s = collect(run, a, {trimmed(phases.preload[p].interval, opts.transient_exclusion)});
      if (s.dev.empty()) throw ProtocolMismatch("preload plateau shorter than the transient exclusion");
      const double ref_mean = std::accumulate(s.ref.begin(), s.ref.end(), 0.0) / static_cast<double>(s.ref.size());
      excited = excited && std::abs(ref_mean) >= opts.min_axis_span * opts.full_scale;
      mean[p] = std::accumulate(s.dev.begin(), s.dev.end(), 0.0) / static_cast<double>(s.dev.size());
    }
    if (excited) out[a] = 100.0 * std::abs(mean[0] - mean[1]) / opts.full_scale;
  }
  return out;
}

OptionalAxisValues hysteresis(const CalibrationRun& run, const ProtocolPhases& phases, const EvaluationOptions& opts) {
  OptionalAxisValues out;
  const std::size_t k = opts.hysteresis_ramp;
  if (k >= phases.ramp_up.size() || k >= phases.ramp_down.size())
    throw ProtocolMismatch(fmt::format("no up/down ramp pair #{}", k + 1));
  const std::vector<Interval> up_window{trimmed(phases.ramp_up[k].interval, opts.transient_exclusion)};
  const std::vector<Interval> down_window{trimmed(phases.ramp_down[k].interval, opts.transient_exclusion)};

  for (std::size_t a = 0; a < 3; ++a) {
    const auto up = collect(run, a, up_window);
    const auto down = collect(run, a, down_window);
    if (up.ref.empty() || down.ref.empty()) continue;
    const auto [rlo, rhi] = std::minmax_element(up.ref.begin(), up.ref.end());
    if (*rhi - *rlo < opts.min_axis_span * opts.full_scale) continue;
    const auto [dlo, dhi] = std::minmax_element(up.dev.begin(), up.dev.end());

    const auto [ulo, uhi] = std::minmax_element(down.ref.begin(), down.ref.end());
    const auto [vlo, vhi] = std::minmax_element(down.dev.begin(), down.dev.end());

    // Both branches are smoothed by polynomial fits and compared over their
    // common range, once as device(reference) and once as
    // reference(device) scaled back to device units by the loading gain.
    const auto up_fwd = fit_polynomial(up.ref, up.dev, opts.hysteresis_degree);
    const auto down_fwd = fit_polynomial(down.ref, down.dev, opts.hysteresis_degree);
    const auto up_inv = fit_polynomial(up.dev, up.ref, opts.hysteresis_degree);
    const auto down_inv = fit_polynomial(down.dev, down.ref, opts.hysteresis_degree);
    const double gain = (up_fwd(*rhi) - up_fwd(*rlo)) / (*rhi - *rlo);

    constexpr int kGrid = 2000;
    double worst_dev = 0.0;
    const double flo = std::max(*rlo, *ulo), fhi = std::min(*rhi, *uhi);
    for (int g = 0; g <= kGrid && fhi > flo; ++g) {
      const double x = flo + (fhi - flo) * g / kGrid;
      worst_dev = std::max(worst_dev, std::abs(down_fwd(x) - up_fwd(x)));
    }
    const double dlo2 = std::max(*dlo, *vlo), dhi2 = std::min(*dhi, *vhi);
    for (int g = 0; g <= kGrid && dhi2 > dlo2; ++g) {
      const double x = dlo2 + (dhi2 - dlo2) * g / kGrid;
      worst_dev = std::max(worst_dev, std::abs((down_inv(x) - up_inv(x)) * gain));
    }
    out[a] = 100.0 * worst_dev / opts.full_scale;
  }
  return out;
}

double worst(const OptionalAxisValues& v) {
  double w = 0.0;
  for (const auto& x : v)
    if (x) w = std::max(w, *x);
  return w;
}

PointReport evaluate_run(const CalibrationRun& run, const ProtocolOptions& protocol, const EvaluationOptions& opts) {
  const auto phases = segment_protocol(run.reference, protocol);
  PointReport r;
  r.point_id = run.point_id;
  r.position = run.position;
  r.max_error = max_error(run, phases, opts);
  r.linearity_pct = linearity(run, phases, opts);
  r.repeatability_pct = repeatability(run, phases, opts);
  r.hysteresis_pct = hysteresis(run, phases, opts);
  return r;
}

CalibrationReport assemble_report(std::vector<PointReport> points) {
  CalibrationReport report;
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.point_id < b.point_id; });
  for (const auto& p : points) {
    report.linearity_pct = std::max(report.linearity_pct, worst(p.linearity_pct));
    report.repeatability_pct = std::max(report.repeatability_pct, worst(p.repeatability_pct));
    report.hysteresis_pct = std::max(report.hysteresis_pct, worst(p.hysteresis_pct));
    for (std::size_t a = 0; a < 3; ++a) report.max_error[a] = std::max(report.max_error[a], p.max_error[a]);
  }
  report.points = std::move(points);
  return report;
}

}  // namespace treadmill::calib
