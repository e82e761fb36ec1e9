#include "treadmill/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "treadmill/errors.hpp"

namespace treadmill::sim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::array<sensing::Axis, 3> kAxes{sensing::Axis::X, sensing::Axis::Y, sensing::Axis::Z};

std::array<double, 3> triple(const Config& cfg, const std::string& key, std::array<double, 3> fallback) {
  if (!cfg.has(key)) return fallback;
  const auto v = cfg.get_doubles(key);
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() != 3) throw ConfigError(fmt::format("'{}' needs 1 or 3 values, got {}", key, v.size()));
  return {v[0], v[1], v[2]};
}

// Peak |S| over a dense grid of the normalised square.
double surface_peak(const cop::ErrorSurface& s) {
  double peak = 0.0;
  constexpr int n = 200;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Eigen::Vector2d p(s.nx.invert(-1.0 + 2.0 * i / n), s.ny.invert(-1.0 + 2.0 * j / n));
      peak = std::max(peak, std::abs(s(p)));
    }
  return peak;
}

void scale_surface(cop::ErrorSurface& s, double amplitude) {
  const double peak = surface_peak(s);
  if (!(peak > 0.0)) {
    if (amplitude != 0.0) throw InvalidSpec("cannot rescale an all-zero COP distortion");
    return;
  }
  for (auto& c : s.coeffs) c *= amplitude / peak;
}

void set_surface_frame(TreadmillModel& m) {
  for (auto* s : {&m.cop_distortion_x, &m.cop_distortion_y}) {
    s->nx = Normalizer::spanning(-0.5 * m.surface_length, 0.5 * m.surface_length);
    s->ny = Normalizer::spanning(-0.5 * m.surface_width, 0.5 * m.surface_width);
  }
}

}  // namespace

void validate(const TreadmillModel& m) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (!(m.natural_frequency[a] > 0.0))
      throw InvalidSpec(fmt::format("natural frequency {} must be positive", m.natural_frequency[a]));
    if (!(m.damping[a] > 0.0 && m.damping[a] < 1.0))
      throw InvalidSpec(fmt::format("damping ratio {} outside (0, 1)", m.damping[a]));
  }
  const double sx = std::abs(m.sensor_positions[0].x()), sy = std::abs(m.sensor_positions[0].y());
  if (!(sx > 0.0 && sy > 0.0)) throw InvalidSpec("sensor rectangle is degenerate");
  for (const auto& p : m.sensor_positions)
    if (std::abs(std::abs(p.x()) - sx) > 1e-12 || std::abs(std::abs(p.y()) - sy) > 1e-12)
      throw InvalidSpec("sensors must form a rectangle centred on the origin");
  if (!(m.surface_height >= 0.0)) throw InvalidSpec("surface height must not be negative");
  if (!(m.surface_length > 0.0 && m.surface_width > 0.0)) throw InvalidSpec("surface dimensions must be positive");
  sensing::validate(m.amplifier);
}

void set_cop_distortion(TreadmillModel& model, double amplitude_x, double amplitude_y) {
  set_surface_frame(model);
  model.cop_distortion_x.coeffs = {0.0, 0.3, 0.8, 0.2, -0.5, 0.1, 0.4, 0.0, -0.2};
  model.cop_distortion_y.coeffs = {0.0, 0.1, 0.3, 0.0, -0.2, 0.5, 0.6, 0.1, -0.3};
  scale_surface(model.cop_distortion_x, amplitude_x);
  scale_surface(model.cop_distortion_y, amplitude_y);
}

TreadmillModel model_from_config(const Config& cfg) {
  TreadmillModel m;
  m.natural_frequency = {cfg.get_double("fn_x", m.natural_frequency[0]), cfg.get_double("fn_y", m.natural_frequency[1]),
                         cfg.get_double("fn_z", m.natural_frequency[2])};
  m.damping = {cfg.get_double("xi_x", m.damping[0]), cfg.get_double("xi_y", m.damping[1]),
               cfg.get_double("xi_z", m.damping[2])};
  const double sx = cfg.get_double("sensor_x", 0.7), sy = cfg.get_double("sensor_y", 0.25);
  m.sensor_positions = {Eigen::Vector2d(sx, sy), Eigen::Vector2d(-sx, sy), Eigen::Vector2d(-sx, -sy),
                        Eigen::Vector2d(sx, -sy)};
  m.surface_height = cfg.get_double("surface_height", m.surface_height);
  m.surface_length = cfg.get_double("surface_length", m.surface_length);
  m.surface_width = cfg.get_double("surface_width", m.surface_width);
  m.amplifier = sensing::amplifier_from_config(cfg);
  m.noise.white_sigma = triple(cfg, "noise_sigma", m.noise.white_sigma);
  m.noise.line_amplitude = triple(cfg, "line_amplitude", m.noise.line_amplitude);
  m.noise.line_frequency = cfg.get_double("line_frequency", m.noise.line_frequency);
  m.noise.motor_rpm_per_speed = cfg.get_double("motor_rpm_per_speed", m.noise.motor_rpm_per_speed);
  m.noise.n_teeth = cfg.get_double("n_teeth", m.noise.n_teeth);
  m.noise.harmonic_gain = triple(cfg, "harmonic_gain", m.noise.harmonic_gain);

  set_cop_distortion(m, cfg.get_double("cop_distortion_x_amplitude", 0.020),
                     cfg.get_double("cop_distortion_y_amplitude", 0.012));
  for (auto [key, surface] : {std::pair{"cop_distortion_x", &m.cop_distortion_x},
                              std::pair{"cop_distortion_y", &m.cop_distortion_y}}) {
    if (!cfg.has(key)) continue;
    const auto v = cfg.get_doubles(key);
    if (v.size() != 9) throw ConfigError(fmt::format("'{}' needs 9 coefficients, got {}", key, v.size()));
    std::copy(v.begin(), v.end(), surface->coeffs.begin());
    const std::string amp_key = std::string(key) + "_amplitude";
    if (cfg.has(amp_key)) scale_surface(*surface, cfg.get_double(amp_key));
  }
  validate(m);
  return m;
}

double quantize(double value, const sensing::AmplifierConfig& amp, sensing::Axis axis) {
  const auto r = sensing::force_range(amp, axis);
  const double q = std::round(value / r.resolution) * r.resolution;
  return std::clamp(q, -r.range, r.range);
}

double damped_frequency(double f_n, double xi) { return f_n * std::sqrt(1.0 - xi * xi); }

// -- impact ----------------------------------------------------------------

TimeSeries simulate_impact(const TreadmillModel& model, sensing::Axis axis, double amplitude, Rng& rng,
                           const ImpactOptions& opts) {
  validate(model);
  const auto a = static_cast<std::size_t>(axis);
  const double fn = model.natural_frequency[a], xi = model.damping[a];
  const double lambda = xi * 2.0 * kPi * fn;
  const double fd = damped_frequency(fn, xi);
  const double sigma = opts.noise_sigma < 0.0 ? model.noise.white_sigma[a] : opts.noise_sigma;
  const auto n = static_cast<std::size_t>(std::llround(opts.duration * opts.rate)) + 1;

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double line_phase = phase(rng);
  const double line = opts.line_noise ? model.noise.line_amplitude[a] : 0.0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / opts.rate;
    double v = amplitude * std::exp(-lambda * t) * std::cos(2.0 * kPi * fd * t);
    v += sigma * gauss(rng);
    v += line * std::sin(2.0 * kPi * model.noise.line_frequency * t + line_phase);
    y[i] = opts.quantize ? quantize(v, model.amplifier, axis) : v;
  }
  return TimeSeries(opts.rate, {std::string("F") + sensing::axis_name(axis)}, {std::move(y)});
}

// -- noise -----------------------------------------------------------------

TimeSeries simulate_noise(const TreadmillModel& model, double belt_speed, double duration, Rng& rng, double rate) {
  validate(model);
  if (!(belt_speed >= 0.0)) throw InvalidSpec(fmt::format("belt speed {} m/s must not be negative", belt_speed));
  if (!(duration > 0.0)) throw InvalidSpec("noise duration must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration * rate)) + 1;
  const double fm = model.noise.motor_frequency(belt_speed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::vector<std::vector<double>> ch(3, std::vector<double>(n));
  for (std::size_t a = 0; a < 3; ++a) {
    const double line_phase = phase(rng), motor_phase = phase(rng);
    const double harmonic = model.noise.harmonic_gain[a] * belt_speed;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate;
      double v = model.noise.white_sigma[a] * gauss(rng);
      v += model.noise.line_amplitude[a] * std::sin(2.0 * kPi * model.noise.line_frequency * t + line_phase);
      v += harmonic * std::sin(2.0 * kPi * fm * t + motor_phase);
      ch[a][i] = quantize(v, model.amplifier, kAxes[a]);
    }
  }
  return TimeSeries(rate, {"Fx", "Fy", "Fz"}, std::move(ch));
}

// -- calibration -----------------------------------------------------------

namespace {

struct Segment {
  enum Kind { Rest, Rise, Plateau, Fall, RampUp, RampDown } kind;
  double start;
  double end;
  int preload = -1;
};

std::vector<Segment> protocol_segments(const CalibrationProtocol& p) {
  std::vector<Segment> s;
  double t = 0.0;
  auto add = [&](Segment::Kind k, double d, int preload = -1) {
    s.push_back({k, t, t + d, preload});
    t += d;
  };
  add(Segment::Rest, p.lead);
  for (int k = 0; k < p.preloads; ++k) {
    add(Segment::Rise, p.rise_time, k);
    add(Segment::Plateau, p.plateau_duration, k);
    add(Segment::Fall, p.rise_time, k);
    add(Segment::Rest, p.rest);
  }
  const double ramp = p.full_scale / p.ramp_rate;
  for (int c = 0; c < p.cycles; ++c) {
    add(Segment::RampUp, ramp);
    add(Segment::RampDown, ramp);
  }
  add(Segment::Rest, p.tail);
  return s;
}

struct ProtocolState {
  double force = 0.0;
  bool loading = true;
  int preload = -1;  ///< preload index while inside a preload square
};

ProtocolState protocol_state(const std::vector<Segment>& segs, const CalibrationProtocol& p, double t) {
  bool loading = true;
  for (const auto& s : segs) {
    if (t > s.end) {
      if (s.kind == Segment::Rise || s.kind == Segment::RampUp) loading = true;
      if (s.kind == Segment::Fall || s.kind == Segment::RampDown) loading = false;
      continue;
    }
    if (t < s.start) break;
    const double u = (t - s.start) / (s.end - s.start);
    switch (s.kind) {
      case Segment::Rest: return {0.0, loading, -1};
      case Segment::Rise: return {p.full_scale * u, true, s.preload};
      case Segment::Plateau: return {p.full_scale, true, s.preload};
      case Segment::Fall: return {p.full_scale * (1.0 - u), false, s.preload};
      case Segment::RampUp: return {p.full_scale * u, true, -1};
      case Segment::RampDown: return {p.full_scale * (1.0 - u), false, -1};
    }
  }
  return {0.0, loading, -1};
}

// Device error on one axis carrying force component f.
double axis_error(const CalibrationDistortion& d, double fs, double f, bool loading) {
  const double sign = f < 0.0 ? -1.0 : 1.0;
  double e = (d.gain - 1.0) * f + d.nonlinearity * f * std::abs(f) / fs;
  e += (loading ? 0.5 : -0.5) * d.hysteresis_width * sign * std::sin(kPi * std::abs(f) / fs);
  return e;
}

void expected_metrics(const CalibrationProtocol& p, const CalibrationDistortion& d, const Eigen::Vector3d& dir,
                      CalibrationTruth& truth) {
  const double fs = p.full_scale;
  constexpr int n = 20000;
  for (std::size_t a = 0; a < 3; ++a) {
    const double c = dir[static_cast<Eigen::Index>(a)];
    double max_err = 0.0, lin = 0.0, hyst = 0.0;
    const double top = c * fs;
    const double e_top = axis_error(d, fs, top, true);
    for (int k = 0; k <= n; ++k) {
      const double f = top * k / n;
      const double up = axis_error(d, fs, f, true), down = axis_error(d, fs, f, false);
      max_err = std::max({max_err, std::abs(up), std::abs(down)});
      const double line = e_top * k / n;  // terminal line through (0, 0) and (top, top + e_top)
      lin = std::max(lin, std::abs(up - line));
      hyst = std::max(hyst, std::abs(up - down));
    }
    if (p.preloads >= 2) max_err = std::max(max_err, std::abs(e_top + d.plateau_offset * c));
    truth.max_error[a] = max_err;
    if (std::abs(top) >= 0.1 * fs) {
      truth.linearity_pct[a] = 100.0 * lin / fs;
      truth.hysteresis_pct[a] = 100.0 * hyst / fs;
      truth.repeatability_pct[a] = 100.0 * std::abs(d.plateau_offset * c) / fs;
    }
  }
}

}  // namespace

double protocol_duration(const CalibrationProtocol& p) { return protocol_segments(p).back().end; }

double protocol_force(const CalibrationProtocol& p, double t) {
  return protocol_state(protocol_segments(p), p, t).force;
}

CalibrationFixture simulate_calibration_run(const TreadmillModel& model, const Eigen::Vector2d& point,
                                            const Eigen::Vector3d& direction, const Eigen::Quaterniond& orientation,
                                            const CalibrationProtocol& p, const CalibrationDistortion& d, Rng& rng) {
  validate(model);
  if (!(direction.norm() > 0.0)) throw InvalidSpec("force direction must be non-zero");
  if (!(p.full_scale > 0.0 && p.ramp_rate > 0.0 && p.rise_time > 0.0))
    throw InvalidSpec("protocol levels and rates must be positive");
  const Eigen::Vector3d dir = direction.normalized();
  const Eigen::Quaterniond q = orientation.normalized();
  const auto segs = protocol_segments(p);
  const double total = segs.back().end;
  const double fs = p.full_scale;
  std::normal_distribution<double> gauss(0.0, 1.0);

  CalibrationTruth truth;
  truth.clock_offset = p.clock_offset;
  std::vector<double> edges;  // ringing onsets, signed
  std::vector<double> edge_sign;
  for (const auto& s : segs) {
    if (s.kind == Segment::Plateau) truth.preload.push_back({s.start, s.end});
    if (s.kind == Segment::RampUp) truth.ramp_up.push_back({s.start, s.end});
    if (s.kind == Segment::RampDown) truth.ramp_down.push_back({s.start, s.end});
    if (s.kind == Segment::Rise || s.kind == Segment::Fall) {
      edges.push_back(s.end);
      edge_sign.push_back(s.kind == Segment::Rise ? 1.0 : -1.0);
    }
  }
  expected_metrics(p, d, dir, truth);

  // Device: treadmill frame, device clock.
  const auto nd = static_cast<std::size_t>(std::floor(total * p.device_rate)) + 1;
  std::vector<std::vector<double>> dev(3, std::vector<double>(nd));
  for (std::size_t i = 0; i < nd; ++i) {
    const double t = static_cast<double>(i) / p.device_rate;
    const auto st = protocol_state(segs, p, t);
    for (std::size_t a = 0; a < 3; ++a) {
      const double c = dir[static_cast<Eigen::Index>(a)];
      const double f = st.force * c;
      double v = f + axis_error(d, fs, f, st.loading);
      if (st.preload == 1) v += d.plateau_offset * c * st.force / fs;
      const double lambda = model.damping[a] * 2.0 * kPi * model.natural_frequency[a];
      const double fd = damped_frequency(model.natural_frequency[a], model.damping[a]);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const double tau = t - edges[e];
        if (tau >= 0.0) v += edge_sign[e] * d.ringing * fs * c * std::exp(-lambda * tau) * std::cos(2.0 * kPi * fd * tau);
      }
      const double sigma = d.device_noise < 0.0 ? model.noise.white_sigma[a] : d.device_noise;
      v += sigma * gauss(rng);
      dev[a][i] = d.quantize ? quantize(v, model.amplifier, kAxes[a]) : v;
    }
  }

  // Reference: sensor frame, reference clock (device time + offset).
  const double ref_span = total + p.clock_offset;
  const auto nr = static_cast<std::size_t>(std::floor(ref_span * p.reference_rate)) + 1;
  std::vector<std::vector<double>> ref(3, std::vector<double>(nr));
  const Eigen::Quaterniond q_inv = q.conjugate();
  for (std::size_t i = 0; i < nr; ++i) {
    const double t_ref = static_cast<double>(i) / p.reference_rate;
    const double force = protocol_state(segs, p, t_ref - p.clock_offset).force;
    const Eigen::Vector3d v = q_inv * (force * dir);
    for (std::size_t a = 0; a < 3; ++a) ref[a][i] = v[static_cast<Eigen::Index>(a)] + d.reference_noise * gauss(rng);
  }

  calib::PoseTrack pose;
  const auto np = static_cast<std::size_t>(std::floor(ref_span * p.pose_rate)) + 1;
  for (std::size_t i = 0; i < np; ++i) {
    pose.time.push_back(static_cast<double>(i) / p.pose_rate);
    pose.position.emplace_back(point.x(), point.y(), -model.surface_height);
    pose.orientation.push_back(q);
  }

  const std::vector<std::string> names{"Fx", "Fy", "Fz"};
  return {TimeSeries(p.reference_rate, names, std::move(ref)), TimeSeries(p.device_rate, names, std::move(dev)),
          std::move(pose), std::move(truth)};
}

// -- shear -----------------------------------------------------------------

std::array<Eigen::Vector3d, 4> sensor_readings(const TreadmillModel& model, const Eigen::Vector3d& f,
                                               const Eigen::Vector3d& point) {
  std::array<Eigen::Vector3d, 4> r;
  const double sx = std::abs(model.sensor_positions[0].x()), sy = std::abs(model.sensor_positions[0].y());
  // Vertical load split bilinearly at the point where the line of action
  // crosses the sensor plane.
  Eigen::Vector2d cross = point.head<2>();
  if (f.z() != 0.0) cross -= point.z() * f.head<2>() / f.z();
  const cop::Wrench target = cop::wrench_at(f, point);
  double r2 = 0.0;
  for (const auto& p : model.sensor_positions) r2 += p.squaredNorm();
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = model.sensor_positions[i];
    const double wx = 0.5 * (1.0 + (p.x() > 0 ? 1.0 : -1.0) * cross.x() / sx);
    const double wy = 0.5 * (1.0 + (p.y() > 0 ? 1.0 : -1.0) * cross.y() / sy);
    r[i] = Eigen::Vector3d(0.25 * f.x(), 0.25 * f.y(), wx * wy * f.z());
  }
  // Tangential pattern carrying the remaining vertical moment.
  std::array<Eigen::Vector2d, 4> pos = model.sensor_positions;
  const double mz = target.moment.z() - cop::wrench_from_sensor_array(r, pos).moment.z();
  const double k = mz / r2;
  for (std::size_t i = 0; i < 4; ++i) {
    r[i].x() += -k * pos[i].y();
    r[i].y() += k * pos[i].x();
  }
  return r;
}

std::vector<std::vector<cop::Wrench>> simulate_shear_trials(const TreadmillModel& model, const Eigen::Vector2d& point,
                                                            const ShearScenario& sc, Rng& rng) {
  validate(model);
  if (sc.trials < 1 || sc.samples_per_trial < 1) throw InvalidSpec("shear scenario needs trials and samples");
  if (!(model.surface_height > 0.0)) throw InvalidSpec("shear trials need a positive surface height");
  const Eigen::Vector3d at(point.x(), point.y(), -model.surface_height);
  std::uniform_real_distribution<double> polar_u(0.0, 1.0), azimuth(0.0, 2.0 * kPi), amp(sc.force_min, sc.force_max);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double max_polar = sc.max_polar_deg * kPi / 180.0;
  std::vector<std::vector<cop::Wrench>> trials(static_cast<std::size_t>(sc.trials));
  for (auto& trial : trials) {
    for (int k = 0; k < sc.samples_per_trial; ++k) {
      const double theta = max_polar * polar_u(rng), phi = azimuth(rng), mag = amp(rng);
      const Eigen::Vector3d f = mag * Eigen::Vector3d(std::sin(theta) * std::cos(phi),
                                                      std::sin(theta) * std::sin(phi), std::cos(theta));
      auto readings = sensor_readings(model, f, at);
      for (auto& r : readings)
        for (int j = 0; j < 3; ++j) r[j] += sc.sensor_noise * gauss(rng);
      trial.push_back(cop::wrench_from_sensor_array(readings, model.sensor_positions));
    }
  }
  return trials;
}

// -- COP grid --------------------------------------------------------------

std::vector<Eigen::Vector2d> cop_grid(const CopGridScenario& sc) {
  if (sc.nx < 1 || sc.ny < 1) throw InvalidSpec("COP grid needs at least one row and column");
  std::vector<Eigen::Vector2d> pts;
  const double dy = sc.ny > 1 ? sc.y_span / (sc.ny - 1) : 0.0;
  for (int j = 0; j < sc.ny; ++j)
    for (int i = 0; i < sc.nx; ++i) {
      const double shift = sc.stagger ? (i % 2 ? 0.25 : -0.25) * dy : 0.0;
      pts.emplace_back(sc.nx > 1 ? -0.5 * sc.x_span + sc.x_span * i / (sc.nx - 1) : 0.0,
                       (sc.ny > 1 ? -0.5 * sc.y_span + dy * j : 0.0) + shift);
    }
  return pts;
}

Eigen::Vector2d distorted_position(const TreadmillModel& model, const Eigen::Vector2d& p) {
  Eigen::Vector2d raw = p;
  for (int it = 0; it < 200; ++it) {
    const Eigen::Vector2d next = p + Eigen::Vector2d(model.cop_distortion_x(raw), model.cop_distortion_y(raw));
    const bool done = (next - raw).cwiseAbs().maxCoeff() == 0.0;
    raw = next;
    if (done) break;
  }
  return raw;
}

CopGridRecording simulate_cop_grid(const TreadmillModel& model, const CopGridScenario& sc, Rng& rng) {
  validate(model);
  const auto pts = cop_grid(sc);
  for (const auto& p : pts)
    if (std::abs(p.x()) > 0.5 * model.surface_length || std::abs(p.y()) > 0.5 * model.surface_width)
      throw InvalidSpec(fmt::format("grid point ({}, {}) lies off the surface", p.x(), p.y()));
  const double load = sc.weight_kg * 9.81;
  const double slot = sc.hold + sc.gap;
  const double total = sc.gap + slot * static_cast<double>(pts.size());
  const auto n = static_cast<std::size_t>(std::floor(total * sc.rate)) + 1;
  std::normal_distribution<double> gauss(0.0, 1.0);

  CopGridRecording rec{TimeSeries(1.0, {"_"}, {{0.0, 0.0}}), {}, pts, {}};
  for (const auto& p : pts) rec.measured.push_back(distorted_position(model, p));

  auto point_at = [&](double t, bool& loaded) {
    const double u = (t - sc.gap) / slot;
    const auto k = static_cast<std::ptrdiff_t>(std::floor(u));
    loaded = k >= 0 && k < static_cast<std::ptrdiff_t>(pts.size()) && (t - sc.gap - static_cast<double>(k) * slot) < sc.hold;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(pts.size()) - 1));
  };

  std::vector<std::vector<double>> ch(6, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sc.rate;
    bool loaded = false;
    const std::size_t k = point_at(t, loaded);
    const Eigen::Vector3d f(0.0, 0.0, loaded ? load : 0.0);
    const Eigen::Vector3d at(rec.measured[k].x(), rec.measured[k].y(), 0.0);
    auto readings = sensor_readings(model, f, at);
    for (auto& r : readings)
      for (int j = 0; j < 3; ++j) r[j] += sc.sensor_noise * gauss(rng);
    const auto w = cop::wrench_from_sensor_array(readings, model.sensor_positions);
    for (int j = 0; j < 3; ++j) {
      ch[static_cast<std::size_t>(j)][i] = w.force[j];
      ch[static_cast<std::size_t>(j + 3)][i] = w.moment[j];
    }
  }
  rec.wrench = TimeSeries(sc.rate, {cop::kWrenchChannels.begin(), cop::kWrenchChannels.end()}, std::move(ch));

  rec.mocap.header = {"time", "x", "y"};
  rec.mocap.columns.resize(3);
  const auto nm = static_cast<std::size_t>(std::floor(total * sc.mocap_rate)) + 1;
  for (std::size_t i = 0; i < nm; ++i) {
    const double t = static_cast<double>(i) / sc.mocap_rate;
    bool loaded = false;
    const std::size_t k = point_at(t, loaded);
    rec.mocap.columns[0].push_back(t);
    rec.mocap.columns[1].push_back(pts[k].x());
    rec.mocap.columns[2].push_back(pts[k].y());
  }
  return rec;
}

// -- gait ------------------------------------------------------------------

double stance_shape(double s, double valley_depth) {
  auto raw = [valley_depth](double x) { return std::sin(kPi * x) + valley_depth * std::sin(3.0 * kPi * x); };
  // Peak by a dense scan refined with golden-section search around the best node.
  double best = 0.0, best_x = 0.0;
  constexpr int n = 2000;
  for (int i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / n;
    if (raw(x) > best) {
      best = raw(x);
      best_x = x;
    }
  }
  double lo = std::max(0.0, best_x - 1.0 / n), hi = std::min(1.0, best_x + 1.0 / n);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (raw(a) > raw(b)) hi = b;
    else lo = a;
  }
  const double peak = std::max(best, raw(0.5 * (lo + hi)));
  return raw(s) / peak;
}

GaitRecording simulate_gait(const TreadmillModel& model, const GaitScenario& sc, Rng& rng) {
  validate(model);
  if (!(sc.period > 0.0 && sc.duration > 0.0 && sc.rate > 0.0)) throw InvalidSpec("gait timing must be positive");
  if (!(sc.stance_fraction > 0.0 && sc.stance_fraction < 1.0)) throw InvalidSpec("stance fraction outside (0, 1)");
  if (!(sc.body_weight >= 0.0)) throw InvalidSpec("body weight must not be negative");
  const auto n = static_cast<std::size_t>(std::llround(sc.duration * sc.rate)) + 1;

  GaitRecording rec{TimeSeries(1.0, {"_"}, {{0.0, 0.0}}), {}, {}};
  std::vector<std::size_t> stances;
  for (int k = 0;; ++k) {
    const auto td = static_cast<std::size_t>(std::llround((sc.start_offset + k * sc.period) * sc.rate));
    if (td >= n) break;
    if (k == sc.skip_step) continue;
    stances.push_back(td);
    if (sc.body_weight > 0.0) {
      rec.touchdowns.push_back(td);
      rec.touchdown_times.push_back(static_cast<double>(td) / sc.rate);
    }
  }

  // Peak normalisation computed once.
  const double stance_len = sc.stance_fraction * sc.period * sc.rate;
  const double norm = stance_shape(0.5, sc.valley_depth) /
                      (std::sin(kPi * 0.5) + sc.valley_depth * std::sin(3.0 * kPi * 0.5));
  std::vector<std::vector<double>> ch(3, std::vector<double>(n, 0.0));
  for (auto td : stances) {
    for (std::size_t i = td; i < n; ++i) {
      const double s = static_cast<double>(i - td) / stance_len;
      if (s > 1.0) break;
      const double shape = norm * (std::sin(kPi * s) + sc.valley_depth * std::sin(3.0 * kPi * s));
      ch[2][i] = sc.body_weight * sc.peak_ratio * shape;
      ch[0][i] = -0.15 * sc.body_weight * std::sin(2.0 * kPi * s);
      ch[1][i] = 0.04 * sc.body_weight * std::sin(kPi * s);
    }
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t a = 0; a < 3; ++a) {
    const double sigma = sc.noise_sigma < 0.0 ? model.noise.white_sigma[a] : sc.noise_sigma;
    if (sigma > 0.0)
      for (auto& v : ch[a]) v += sigma * gauss(rng);
  }
  rec.forces = TimeSeries(sc.rate, {"Fx", "Fy", "Fz"}, std::move(ch));
  return rec;
}

}  // namespace treadmill::sim
