#pragma once

#include <span>

#include <Eigen/Dense>

namespace treadmill {

/// Affine map of [lo, hi] onto [-1, 1].
struct Normalizer {
  double center = 0.0;
  double half_range = 1.0;

  static Normalizer spanning(double lo, double hi);
  double apply(double v) const { return (v - center) / half_range; }
  double invert(double u) const { return center + u * half_range; }
};

/// Polynomial in the normalised variable, coefficients lowest order first.
struct Polynomial1D {
  Normalizer normalizer;
  Eigen::VectorXd coeffs;

  double operator()(double x) const;
};

/// Least-squares polynomial fit of y = p(x). Throws IllConditionedFit when
/// the design matrix is rank deficient (fewer distinct abscissae than
/// coefficients, or numerically so).
Polynomial1D fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);

}  // namespace treadmill
