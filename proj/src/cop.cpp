#include "treadmill/cop.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "treadmill/config.hpp"
#include "treadmill/errors.hpp"

namespace treadmill::cop {

Eigen::Vector2d cop_from_wrench(const Wrench& w, double a_z, double min_fz) {
  const double fz = w.force.z();
  if (!(std::abs(fz) > min_fz))
    throw InsufficientLoad(fmt::format("|F_z| = {} N is not above {} N", std::abs(fz), min_fz));
  return {(w.force.x() * a_z - w.moment.y()) / fz, (w.force.y() * a_z + w.moment.x()) / fz};
}

Wrench wrench_from_sensor_array(const std::array<Eigen::Vector3d, 4>& readings,
                                const std::array<Eigen::Vector2d, 4>& positions) {
  Wrench w;
  for (std::size_t i = 0; i < 4; ++i) {
    const Eigen::Vector3d r(positions[i].x(), positions[i].y(), 0.0);
    w.force += readings[i];
    w.moment += r.cross(readings[i]);
  }
  return w;
}

Wrench wrench_at(const Eigen::Vector3d& f, const Eigen::Vector3d& point) { return {f, point.cross(f)}; }

ShearFit optimize_shear_offset(std::span<const Wrench> samples, double min_fz) {
  const std::size_t n = samples.size();
  if (n < 3) throw DegenerateDirections(fmt::format("need at least 3 wrenches, got {}", n));
  std::vector<double> ax(n), bx(n), ay(n), by(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& w = samples[k];
    const double fz = w.force.z();
    if (!(std::abs(fz) > min_fz))
      throw InsufficientLoad(fmt::format("sample {}: |F_z| = {} N is not above {} N", k, std::abs(fz), min_fz));
    ax[k] = w.force.x() / fz;
    bx[k] = -w.moment.y() / fz;
    ay[k] = w.force.y() / fz;
    by[k] = w.moment.x() / fz;
  }
  auto mean = [n](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(n);
  };
  auto cov = [&](const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += (a[k] - ma) * (b[k] - mb);
    return s / static_cast<double>(n);
  };
  const double vx = cov(ax, ax), vy = cov(ay, ay);
  if (vx < 1e-8 && vy < 1e-8)
    throw DegenerateDirections(fmt::format("force directions barely vary (var {} and {})", vx, vy));

  ShearFit fit;
  fit.samples = n;
  fit.a_z = -(cov(ax, bx) + cov(ay, by)) / (vx + vy);
  std::vector<double> cx(n), cy(n);
  for (std::size_t k = 0; k < n; ++k) {
    cx[k] = ax[k] * fit.a_z + bx[k];
    cy[k] = ay[k] * fit.a_z + by[k];
  }
  fit.mean_cop = {mean(cx), mean(cy)};
  fit.spread_x = std::sqrt(cov(cx, cx));
  fit.spread_y = std::sqrt(cov(cy, cy));
  return fit;
}

ShearCalibration calibrate_shear(const std::vector<std::vector<Wrench>>& trials, bool pooled) {
  if (trials.empty()) throw DegenerateDirections("no shear trials");
  ShearCalibration cal;
  if (pooled) {
    std::vector<Wrench> all;
    for (const auto& t : trials) all.insert(all.end(), t.begin(), t.end());
    cal.trials.push_back(optimize_shear_offset(all));
  } else {
    for (const auto& t : trials) cal.trials.push_back(optimize_shear_offset(t));
  }
  const double n = static_cast<double>(cal.trials.size());
  for (const auto& f : cal.trials) {
    cal.a_z += f.a_z / n;
    cal.spread_x += f.spread_x / n;
    cal.spread_y += f.spread_y / n;
  }
  if (cal.trials.size() > 1) {
    double ss = 0.0;
    for (const auto& f : cal.trials) ss += (f.a_z - cal.a_z) * (f.a_z - cal.a_z);
    cal.a_z_std = std::sqrt(ss / (n - 1.0));
    cal.a_z_ci = 1.96 * cal.a_z_std / std::sqrt(n);
  }
  return cal;
}

// -- error surface ---------------------------------------------------------

std::array<double, 9> surface_basis(double u, double v) {
  return {1.0, u, u * u, u * u * u, u * u * u * u, v, v * v, v * v * v, v * v * v * v};
}

double ErrorSurface::operator()(const Eigen::Vector2d& p) const {
  const auto b = surface_basis(nx.apply(p.x()), ny.apply(p.y()));
  double s = 0.0;
  for (std::size_t i = 0; i < 9; ++i) s += coeffs[i] * b[i];
  return s;
}

namespace {

double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted) {
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (y - fitted).squaredNorm();
  const double scale = std::max(y.squaredNorm(), 1e-300);
  if (ss_tot <= 1e-24 * scale || ss_tot == 0.0) return ss_res <= 1e-24 * scale ? 1.0 : 0.0;
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

}  // namespace

CopCorrectionModel fit_cop_error_surface(const std::vector<CopSample>& points, double a_z) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 9) throw RankDeficient(fmt::format("quartic surface needs at least 9 points, got {}", n));

  CopCorrectionModel model;
  model.a_z = a_z;
  model.lower = model.upper = points.front().cop;
  for (const auto& p : points) {
    if (!p.ground_truth) throw InsufficientPoints("COP sample without ground truth");
    model.lower = model.lower.cwiseMin(p.cop);
    model.upper = model.upper.cwiseMax(p.cop);
  }
  const Normalizer nx = Normalizer::spanning(model.lower.x(), model.upper.x());
  const Normalizer ny = Normalizer::spanning(model.lower.y(), model.upper.y());

  Eigen::MatrixXd a(n, 9);
  Eigen::VectorXd ex(n), ey(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    const auto b = surface_basis(nx.apply(p.cop.x()), ny.apply(p.cop.y()));
    for (Eigen::Index j = 0; j < 9; ++j) a(i, j) = b[static_cast<std::size_t>(j)];
    ex(i) = p.cop.x() - p.ground_truth->x();
    ey(i) = p.cop.y() - p.ground_truth->y();
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(cond <= 1e12)) throw RankDeficient(fmt::format("design matrix condition number {:.3g}", cond));

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd cx = qr.solve(ex);
  const Eigen::VectorXd cy = qr.solve(ey);
  model.sx.nx = model.sy.nx = nx;
  model.sx.ny = model.sy.ny = ny;
  for (std::size_t j = 0; j < 9; ++j) {
    model.sx.coeffs[j] = cx(static_cast<Eigen::Index>(j));
    model.sy.coeffs[j] = cy(static_cast<Eigen::Index>(j));
  }
  model.r2_x = r_squared(ex, a * cx);
  model.r2_y = r_squared(ey, a * cy);
  return model;
}

Eigen::Vector2d correct_cop(const Eigen::Vector2d& raw, const CopCorrectionModel& model, bool allow_extrapolation) {
  if (!allow_extrapolation) {
    const Eigen::Vector2d tol = 1e-9 * (model.upper - model.lower).cwiseMax(1.0);
    if ((raw.array() < (model.lower - tol).array()).any() || (raw.array() > (model.upper + tol).array()).any())
      throw OutOfBounds(fmt::format("COP ({}, {}) outside the calibrated area [{}, {}] x [{}, {}]", raw.x(), raw.y(),
                                    model.lower.x(), model.upper.x(), model.lower.y(), model.upper.y()));
  }
  return {raw.x() - model.sx(raw), raw.y() - model.sy(raw)};
}

// -- persistence -----------------------------------------------------------

namespace {

std::string join(const std::array<double, 9>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + format_number(c[i]);
  return s;
}

}  // namespace

std::string format_model(const CopCorrectionModel& m) {
  std::string s = "# COP correction model\n";
  s += "version=1\n";
  s += "a_z=" + format_number(m.a_z) + "\n";
  s += "x_center=" + format_number(m.sx.nx.center) + "\n";
  s += "x_half_range=" + format_number(m.sx.nx.half_range) + "\n";
  s += "y_center=" + format_number(m.sx.ny.center) + "\n";
  s += "y_half_range=" + format_number(m.sx.ny.half_range) + "\n";
  s += "lower=" + format_number(m.lower.x()) + "," + format_number(m.lower.y()) + "\n";
  s += "upper=" + format_number(m.upper.x()) + "," + format_number(m.upper.y()) + "\n";
  s += "sx=" + join(m.sx.coeffs) + "\n";
  s += "sy=" + join(m.sy.coeffs) + "\n";
  s += "r2_x=" + format_number(m.r2_x) + "\n";
  s += "r2_y=" + format_number(m.r2_y) + "\n";
  return s;
}

CopCorrectionModel parse_model(const std::string& text, const std::string& source) {
  const auto cfg = Config::parse(text, source);
  if (cfg.get_int("version") != 1)
    throw ConfigError(fmt::format("{}: unsupported model version {}", source, cfg.get_string("version")));
  CopCorrectionModel m;
  m.a_z = cfg.get_double("a_z");
  const Normalizer nx{cfg.get_double("x_center"), cfg.get_double("x_half_range")};
  const Normalizer ny{cfg.get_double("y_center"), cfg.get_double("y_half_range")};
  if (!(nx.half_range > 0.0) || !(ny.half_range > 0.0))
    throw ConfigError(fmt::format("{}: normalisation half ranges must be positive", source));
  m.sx.nx = m.sy.nx = nx;
  m.sx.ny = m.sy.ny = ny;
  auto pair = [&](const std::string& key) {
    const auto v = cfg.get_doubles(key);
    if (v.size() != 2) throw ConfigError(fmt::format("{}: '{}' needs 2 values", source, key));
    return Eigen::Vector2d(v[0], v[1]);
  };
  m.lower = pair("lower");
  m.upper = pair("upper");
  for (auto [key, surface] : {std::pair{"sx", &m.sx}, std::pair{"sy", &m.sy}}) {
    const auto v = cfg.get_doubles(key);
    if (v.size() != 9) throw ConfigError(fmt::format("{}: '{}' needs 9 coefficients, got {}", source, key, v.size()));
    std::copy(v.begin(), v.end(), surface->coeffs.begin());
  }
  m.r2_x = cfg.get_double("r2_x");
  m.r2_y = cfg.get_double("r2_y");
  return m;
}

void save_model(const std::filesystem::path& path, const CopCorrectionModel& model) {
  write_text_file(path, format_model(model));
}

CopCorrectionModel load_model(const std::filesystem::path& path) {
  return parse_model(read_text_file(path), path.string());
}

// -- file plumbing ---------------------------------------------------------

Wrench wrench_sample(const TimeSeries& ts, std::size_t i) {
  Wrench w;
  for (int k = 0; k < 3; ++k) {
    w.force[k] = ts.channel(kWrenchChannels[static_cast<std::size_t>(k)])[i];
    w.moment[k] = ts.channel(kWrenchChannels[static_cast<std::size_t>(k + 3)])[i];
  }
  return w;
}

std::vector<Wrench> wrenches(const TimeSeries& ts) {
  std::vector<Wrench> out(ts.size());
  std::array<std::span<const double>, 6> ch;
  for (std::size_t k = 0; k < 6; ++k) ch[k] = ts.channel(kWrenchChannels[k]);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].force = {ch[0][i], ch[1][i], ch[2][i]};
    out[i].moment = {ch[3][i], ch[4][i], ch[5][i]};
  }
  return out;
}

std::vector<std::vector<Wrench>> shear_trials_from_table(const CsvTable& table) {
  if (table.header.empty() || table.header[0] != "trial")
    throw ParseError("row 1, column 1: shear file must start with a 'trial' column");
  std::array<const std::vector<double>*, 6> cols{};
  for (std::size_t k = 0; k < 6; ++k) {
    if (table.find(kWrenchChannels[k]) < 0)
      throw ParseError(fmt::format("row 1: shear file lacks column '{}'", kWrenchChannels[k]));
    cols[k] = &table.column(kWrenchChannels[k]);
  }
  std::map<double, std::size_t> index;
  std::vector<std::vector<Wrench>> trials;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    const double id = table.columns[0][i];
    auto [it, inserted] = index.emplace(id, trials.size());
    if (inserted) trials.emplace_back();
    trials[it->second].push_back(
        {{(*cols[0])[i], (*cols[1])[i], (*cols[2])[i]}, {(*cols[3])[i], (*cols[4])[i], (*cols[5])[i]}});
  }
  return trials;
}

CsvTable shear_trials_to_table(const std::vector<std::vector<Wrench>>& trials) {
  CsvTable t;
  t.header = {"trial", "Fx", "Fy", "Fz", "Mx", "My", "Mz"};
  t.columns.resize(7);
  for (std::size_t k = 0; k < trials.size(); ++k) {
    for (const auto& w : trials[k]) {
      t.columns[0].push_back(static_cast<double>(k + 1));
      for (int j = 0; j < 3; ++j) {
        t.columns[1 + static_cast<std::size_t>(j)].push_back(w.force[j]);
        t.columns[4 + static_cast<std::size_t>(j)].push_back(w.moment[j]);
      }
    }
  }
  return t;
}

std::vector<CopSample> static_cop_samples(const TimeSeries& wrench, const CsvTable& mocap, double a_z,
                                          const StaticWindowOptions& opts) {
  for (const char* c : {"time", "x", "y"})
    if (mocap.find(c) < 0) throw ParseError(fmt::format("row 1: MoCap file lacks column '{}'", c));
  const auto& mt = mocap.column("time");
  const auto& mx = mocap.column("x");
  const auto& my = mocap.column("y");

  const auto all = wrenches(wrench);
  double peak = 0.0;
  for (const auto& w : all) peak = std::max(peak, w.force.z());
  if (!(peak > kMinVerticalForce)) throw InsufficientLoad("recording carries no vertical load");

  std::vector<CopSample> out;
  const auto trim = static_cast<std::size_t>(std::round(opts.trim * wrench.rate()));
  const auto min_len = static_cast<std::size_t>(std::round(opts.min_duration * wrench.rate()));
  std::size_t i = 0;
  while (i < all.size()) {
    if (all[i].force.z() <= opts.load_fraction * peak) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].force.z() > opts.load_fraction * peak) ++j;
    const std::size_t a = i + trim;
    const std::size_t b = j >= trim ? j - trim : 0;
    i = j + 1;
    if (b < a || b - a + 1 < min_len) continue;

    CopSample s;
    for (std::size_t k = a; k <= b; ++k) {
      s.wrench.force += all[k].force;
      s.wrench.moment += all[k].moment;
    }
    s.wrench.force /= static_cast<double>(b - a + 1);
    s.wrench.moment /= static_cast<double>(b - a + 1);
    s.cop = cop_from_wrench(s.wrench, a_z);

    const double t0 = wrench.time(a), t1 = wrench.time(b);
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    std::size_t count = 0;
    for (std::size_t k = 0; k < mt.size(); ++k) {
      if (mt[k] < t0 - 1e-9 || mt[k] > t1 + 1e-9) continue;
      sum += Eigen::Vector2d(mx[k], my[k]);
      ++count;
    }
    if (count == 0)
      throw ParseError(fmt::format("no MoCap samples between {} s and {} s", format_number(t0), format_number(t1)));
    s.ground_truth = sum / static_cast<double>(count);
    out.push_back(s);
  }
  return out;
}

}  // namespace treadmill::cop
