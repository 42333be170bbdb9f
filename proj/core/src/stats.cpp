#include "socnet/stats.hpp"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "socnet/error.hpp"

namespace socnet {

double pearson_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(dof / (1.0 - r2));
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

Correlation pearson_with_se(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::invalid_argument, "pearson: samples differ in length");
  }
  const std::size_t n = x.size();
  if (n < 3) {
    throw Error(ErrorCode::undefined_correlation, "pearson: need at least 3 pairs");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(ErrorCode::undefined_correlation, "pearson: zero variance");
  }
  Correlation c;
  c.n = n;
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  c.p_value = pearson_p_value(c.r, n);
  c.standard_error = std::sqrt((1.0 - c.r * c.r) / static_cast<double>(n - 2));
  return c;
}

}  // namespace socnet
