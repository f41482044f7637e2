#pragma once

#include <span>
#include <vector>

namespace onionlab {

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double se_mean = 0.0;
  double se_variance = 0.0;  // normal-theory approximation sqrt(2/(n-1)) * variance
  int count = 0;
};

Summary summarize(std::span<const double> values);

/// Least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit least_squares(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);
/// Two-sided Student t quantile at level 1 - alpha/2 (alpha = 0.05 only).
double t_quantile_975(int dof);

/// Kolmogorov-Smirnov distance between the sample, standardized by its own
/// mean and standard deviation, and N(0,1). Ties are handled by comparing
/// both one-sided limits of the empirical CDF at every jump.
double ks_standard_normal(std::span<const double> values);

/// KS distance of an already standardized sample against N(0,1).
double ks_distance_normal(std::vector<double> z);

}  // namespace onionlab
