#include "treadmill/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "treadmill/errors.hpp"

namespace treadmill {

Normalizer Normalizer::spanning(double lo, double hi) {
  Normalizer n;
  n.center = 0.5 * (lo + hi);
  n.half_range = 0.5 * (hi - lo);
  if (!(n.half_range > 0.0)) n.half_range = 1.0;
  return n;
}

double Polynomial1D::operator()(double x) const {
  const double u = normalizer.apply(x);
  double acc = 0.0;
  for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * u + coeffs[k];
  return acc;
}

Polynomial1D fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::Index terms = degree + 1;
  if (n < terms)
    throw IllConditionedFit(fmt::format("{} samples cannot determine a degree-{} polynomial", n, degree));

  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  Polynomial1D p;
  p.normalizer = Normalizer::spanning(*lo, *hi);

  Eigen::MatrixXd a(n, terms);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = p.normalizer.apply(x[static_cast<std::size_t>(i)]);
    double pw = 1.0;
    for (Eigen::Index k = 0; k < terms; ++k) {
      a(i, k) = pw;
      pw *= u;
    }
    b[i] = y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < terms)
    throw IllConditionedFit(fmt::format("degree-{} polynomial fit is rank deficient (rank {} of {})",
                                        degree, qr.rank(), terms));
  p.coeffs = qr.solve(b);
  return p;
}

}  // namespace treadmill
