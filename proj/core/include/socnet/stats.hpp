#pragma once

#include <cstddef>
#include <span>

namespace socnet {

/// Sample Pearson correlation with its two-sided p-value and the standard
/// error sqrt((1 - r^2) / (n - 2)).
struct Correlation {
  double r = 0.0;
  double p_value = 1.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};

/// Pearson r of paired samples. Requires n >= 3 and non-zero variance in
/// both samples; throws Error(undefined_correlation) otherwise.
Correlation pearson_with_se(std::span<const double> x, std::span<const double> y);

/// Two-sided p-value of a Pearson r over n pairs (t-distribution with n-2
/// degrees of freedom).
double pearson_p_value(double r, std::size_t n);

}  // namespace socnet
