#include "onionlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "onionlab/error.hpp"

namespace onionlab {

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / (s.count - 1);
    s.se_mean = std::sqrt(s.variance / s.count);
    s.se_variance = s.variance * std::sqrt(2.0 / (s.count - 1));
  }
  return s;
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("least_squares: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidInput("least_squares: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double t_quantile_975(int dof) {
  static const double table[] = {0,     12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                 2.201, 2.179,  2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                 2.080, 2.074,  2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) throw InvalidInput("t_quantile_975: dof must be >= 1");
  if (dof <= 30) return table[dof];
  return 1.959964 + 2.4 / dof;
}

double ks_distance_normal(std::vector<double> z) {
  if (z.empty()) return 0.0;
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < z.size()) {
    std::size_t j = i;
    while (j < z.size() && z[j] == z[i]) ++j;
    const double phi = normal_cdf(z[i]);
    const double below = static_cast<double>(i) / n;  // F(z-)
    const double at = static_cast<double>(j) / n;     // F(z)
    d = std::max({d, std::abs(at - phi), std::abs(phi - below)});
    i = j;
  }
  return d;
}

double ks_standard_normal(std::span<const double> values) {
  const Summary s = summarize(values);
  if (s.count < 2 || s.variance <= 0.0) throw InvalidInput("ks_standard_normal: need a non-degenerate sample");
  const double sd = std::sqrt(s.variance);
  std::vector<double> z;
  z.reserve(values.size());
  for (double v : values) z.push_back((v - s.mean) / sd);
  return ks_distance_normal(std::move(z));
}

}  // namespace onionlab
