#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "treadmill/errors.hpp"
#include "treadmill/plate_design.hpp"

using namespace treadmill;
using design::PlateSpec;

namespace {

PlateSpec base_spec() { return {0.5, 1.5, 0.009, 0.010, 0.014, 7.0e10, 7.0e10, 45.0}; }

// Three-point bending deflection, Hooke's law and the spring-mass frequency,
// composed step by step.
double composed_frequency(const PlateSpec& s) {
  const double i_sandwich = s.width * (std::pow(s.h_sandwich, 3) - std::pow(s.h_inner, 3)) / 12.0;
  const double i_carbon = s.width * (std::pow(s.h_compound, 3) - std::pow(s.h_sandwich, 3)) / 12.0;
  const double ei = s.e_sandwich * i_sandwich + s.e_carbon * i_carbon;
  const double force = 1.0;
  const double deflection = force * std::pow(s.length, 3) / (48.0 * ei);
  const double stiffness = force / deflection;
  return std::sqrt(stiffness / s.mass) / (2.0 * std::numbers::pi);
}

PlateSpec random_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PlateSpec s;
  s.width = 0.2 + 0.8 * u(rng);
  s.length = 0.5 + 2.0 * u(rng);
  s.h_inner = 0.002 + 0.02 * u(rng);
  s.h_sandwich = s.h_inner + 0.0002 + 0.005 * u(rng);
  s.h_compound = s.h_sandwich + 0.008 * u(rng);
  s.e_sandwich = 1e10 + 1e11 * u(rng);
  s.e_carbon = 1e10 + 2e11 * u(rng);
  s.mass = 5.0 + 100.0 * u(rng);
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("natural frequency equals the composed bending model") {
  CHECK(rel(design::natural_frequency(base_spec()), composed_frequency(base_spec())) < 1e-12);
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto s = random_spec(rng);
    worst = std::max(worst, rel(design::natural_frequency(s), composed_frequency(s)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("scaling laws") {
  const auto s = base_spec();
  const double f = design::natural_frequency(s);
  auto heavy = s;
  heavy.mass *= 4.0;
  CHECK(rel(design::natural_frequency(heavy), f / 2.0) < 1e-14);
  auto longer = s;
  longer.length *= 2.0;
  CHECK(rel(design::natural_frequency(longer), f * std::pow(2.0, -1.5)) < 1e-14);

  double prev = 0.0;
  for (double hc = s.h_sandwich; hc < 0.03; hc += 0.001) {
    auto t = s;
    t.h_compound = hc;
    const double v = design::natural_frequency(t);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("without carbon layers only the sandwich term remains") {
  auto s = base_spec();
  s.h_compound = s.h_sandwich;
  s.e_carbon = 1e15;  // irrelevant without a carbon layer
  const double expected =
      std::sqrt(s.width * s.e_sandwich * (std::pow(s.h_sandwich, 3) - std::pow(s.h_inner, 3)) /
                (std::numbers::pi * std::numbers::pi * s.mass * std::pow(s.length, 3)));
  CHECK(rel(design::natural_frequency(s), expected) < 1e-14);
}

TEST_CASE("exchanging moduli of geometrically identical layers") {
  auto s = base_spec();
  s.e_sandwich = 7.0e10;
  s.e_carbon = 1.3e11;
  // h_c^3 - h_s^3 == h_s^3 - h_i^3
  s.h_compound = std::cbrt(2.0 * std::pow(s.h_sandwich, 3) - std::pow(s.h_inner, 3));
  auto swapped = s;
  std::swap(swapped.e_sandwich, swapped.e_carbon);
  CHECK(rel(design::natural_frequency(swapped), design::natural_frequency(s)) < 1e-12);
}

TEST_CASE("invalid specs are rejected") {
  auto s = base_spec();
  s.h_inner = s.h_sandwich;
  CHECK_THROWS_AS(design::natural_frequency(s), InvalidSpec);
  s = base_spec();
  s.h_compound = s.h_sandwich * 0.99;
  CHECK_THROWS_AS(design::natural_frequency(s), InvalidSpec);
  s = base_spec();
  s.width = -1.0;
  CHECK_THROWS_AS(design::natural_frequency(s), InvalidSpec);
  s = base_spec();
  s.mass = 0.0;
  CHECK_THROWS_AS(design::natural_frequency(s), InvalidSpec);
}

TEST_CASE("sweep") {
  const auto s = base_spec();
  const design::MassModel constant;

  SUBCASE("single cell equals the base spec") {
    const double t = 0.5 * (s.h_compound - s.h_sandwich);
    const auto sw = design::frequency_sweep(s, {s.length}, {t}, constant);
    REQUIRE(sw.f_n.size() == 1);
    CHECK(rel(sw.at(0, 0), design::natural_frequency(s)) < 1e-14);
  }

  SUBCASE("matches a brute-force recomputation and decreases with length") {
    std::vector<double> lengths, thick;
    for (int i = 0; i <= 10; ++i) lengths.push_back(1.0 + 0.1 * i);
    for (int j = 0; j <= 6; ++j) thick.push_back(0.001 + 0.0005 * j);
    const auto sw = design::frequency_sweep(s, lengths, thick, constant, 3);
    for (std::size_t i = 0; i < lengths.size(); ++i)
      for (std::size_t j = 0; j < thick.size(); ++j) {
        auto c = s;
        c.length = lengths[i];
        c.h_compound = s.h_sandwich + 2.0 * thick[j];
        CHECK(sw.valid(i, j));
        CHECK(rel(sw.at(i, j), composed_frequency(c)) < 1e-12);
        if (i > 0) CHECK(sw.at(i, j) < sw.at(i - 1, j));
      }
    const auto serial = design::frequency_sweep(s, lengths, thick, constant, 1);
    CHECK(serial.f_n == sw.f_n);
  }

  SUBCASE("areal mass model") {
    design::MassModel areal;
    areal.kind = design::MassModel::Kind::Areal;
    areal.fixed_mass = 20.0;
    areal.sandwich_areal_density = 8.0;
    areal.carbon_density = 1600.0;
    const auto sw = design::frequency_sweep(s, {1.2, 1.8}, {0.002}, areal);
    auto c = s;
    c.length = 1.8;
    c.h_compound = s.h_sandwich + 0.004;
    c.mass = 20.0 + 0.5 * 1.8 * (8.0 + 2.0 * 0.002 * 1600.0);
    CHECK(rel(sw.at(1, 0), composed_frequency(c)) < 1e-12);
  }

  SUBCASE("invalid cells are flagged, not fatal") {
    const auto sw = design::frequency_sweep(s, {1.0, 1.5}, {-0.001, 0.001}, constant);
    CHECK_FALSE(sw.valid(0, 0));
    CHECK(std::isnan(sw.at(0, 0)));
    CHECK(sw.valid(0, 1));
    CHECK(sw.cell_errors[0].find("h_compound") != std::string::npos);
  }

  SUBCASE("grids must be increasing and non-empty") {
    CHECK_THROWS_AS(design::frequency_sweep(s, {}, {0.001}, constant), InvalidSpec);
    CHECK_THROWS_AS(design::frequency_sweep(s, {1.5, 1.0}, {0.001}, constant), InvalidSpec);
  }
}

TEST_CASE("plate spec from config") {
  const auto cfg = Config::parse(
      "width=0.5\nlength=1.5\nh_inner=0.009\nh_sandwich=0.010\nh_compound=0.014\n"
      "e_sandwich=7e10\ne_carbon=7e10\nmass=45\n");
  const auto s = design::plate_spec_from_config(cfg);
  CHECK(s.h_compound == doctest::Approx(0.014));
  CHECK(design::mass_model_from_config(cfg).kind == design::MassModel::Kind::Constant);
  CHECK_THROWS_AS(design::plate_spec_from_config(Config::parse("width=0.5\n")), ConfigError);
  CHECK_THROWS_AS(design::mass_model_from_config(Config::parse("mass_model=cubic\n")), ConfigError);
}
