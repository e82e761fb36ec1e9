#include <doctest.h>

#include <cmath>

#include "treadmill/errors.hpp"
#include "treadmill/sensing_model.hpp"

using namespace treadmill;
using sensing::Axis;

namespace {

struct TableRow {
  double charge;
  double range_xy, resolution_xy, range_z, resolution_z;
};

// Printed range table of the shipped amplifier.
constexpr TableRow kTable[] = {
    {1000.0, 129.9, 0.0019, 256.4, 0.0039},
    {5000.0, 649.4, 0.0099, 1282.1, 0.0195},
    {10000.0, 1298.7, 0.0198, 2564.1, 0.0391},
    {50000.0, 6493.5, 0.0991, 12820.5, 0.1956},
};

}  // namespace

TEST_CASE("preset ranges reproduce the amplifier table") {
  for (const auto& row : kTable) {
    CAPTURE(row.charge);
    const auto cfg = sensing::preset(row.charge);
    const auto xy = sensing::force_range(cfg, Axis::X);
    const auto y = sensing::force_range(cfg, Axis::Y);
    const auto z = sensing::force_range(cfg, Axis::Z);
    CHECK(std::abs(xy.range - row.range_xy) <= 0.1);
    CHECK(std::abs(xy.resolution - row.resolution_xy) <= 0.0001);
    CHECK(std::abs(z.range - row.range_z) <= 0.1);
    CHECK(std::abs(z.resolution - row.resolution_z) <= 0.0001);
    CHECK(y.range == xy.range);
  }
}

TEST_CASE("range properties") {
  for (double q : sensing::kPresetChargeRanges) {
    const auto cfg = sensing::preset(q);
    for (Axis a : {Axis::X, Axis::Z}) {
      const auto r = sensing::force_range(cfg, a);
      CHECK(r.resolution * cfg.adc_counts == doctest::Approx(r.range).epsilon(1e-15));
      CHECK(r.range == doctest::Approx(q / cfg.sensitivity(a)).epsilon(1e-15));
    }
  }
  // Linear in the charge range.
  sensing::AmplifierConfig a, b;
  a.charge_range = 1234.0;
  b.charge_range = 3.0 * 1234.0;
  CHECK(sensing::force_range(b, Axis::Z).range ==
        doctest::Approx(3.0 * sensing::force_range(a, Axis::Z).range).epsilon(1e-15));

  sensing::AmplifierConfig bad;
  bad.sensitivity_z = 0.0;
  CHECK_THROWS_AS(sensing::force_range(bad, Axis::Z), InvalidSpec);
  CHECK_THROWS_AS(sensing::preset(2000.0), ConfigError);
}

TEST_CASE("accuracy classes") {
  CHECK(sensing::max_frequency_for_accuracy(200.0, 10.0) == doctest::Approx(60.0));
  CHECK(sensing::max_frequency_for_accuracy(200.0, 5.0) == doctest::Approx(40.0));
  CHECK(sensing::max_frequency_for_accuracy(200.0, 1.0) == doctest::Approx(20.0));
  CHECK_THROWS_AS(sensing::max_frequency_for_accuracy(200.0, 2.0), UnknownAccuracyClass);
  CHECK_THROWS_AS(sensing::max_frequency_for_accuracy(-1.0, 5.0), InvalidSpec);

  for (double f = 0.0; f < 500.0; f += 17.0) {
    const double f10 = sensing::max_frequency_for_accuracy(f, 10.0);
    const double f5 = sensing::max_frequency_for_accuracy(f, 5.0);
    const double f1 = sensing::max_frequency_for_accuracy(f, 1.0);
    CHECK(f10 >= f5);
    CHECK(f5 >= f1);
    CHECK(f1 <= f);
    CHECK(sensing::max_frequency_for_accuracy(2.0 * f, 5.0) == doctest::Approx(2.0 * f5));
  }
}

TEST_CASE("axis names and config") {
  CHECK(sensing::parse_axis("Fz") == Axis::Z);
  CHECK(std::string(sensing::axis_name(Axis::Y)) == "y");
  CHECK_THROWS_AS(sensing::parse_axis("w"), ConfigError);
  const auto cfg = sensing::amplifier_from_config(Config::parse("charge_range=5000\n"));
  CHECK(cfg.charge_range == 5000.0);
  CHECK(cfg.sensitivity_z == 3.9);
  CHECK_THROWS_AS(sensing::amplifier_from_config(Config::parse("adc_counts=-1\n")), ConfigError);
}
