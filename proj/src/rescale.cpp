#include "onionlab/rescale.hpp"

#include <cmath>

#include "onionlab/error.hpp"

namespace onionlab {

namespace {

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

// Point of S^(d-1) with geodesic log coordinates u (at the pole e_d).
std::vector<double> sphere_exp(std::span<const double> u) {
  const double t = norm(u);
  std::vector<double> out(u.size() + 1);
  const double s = t == 0.0 ? 1.0 : std::sin(t) / t;
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = u[j] * s;
  out[u.size()] = std::cos(t);
  return out;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("rescale: lambda must be positive");
}

}  // namespace

std::vector<double> rescale_point(std::span<const double> x, double lambda) {
  check_lambda(lambda);
  const int d = static_cast<int>(x.size());
  const double rho = norm(x);
  const double side = norm(x.first(d - 1));
  if (side == 0.0 && x[d - 1] <= 0.0) throw PolePoint("rescale: point on the segment [0, -e_d]");
  const double theta = std::atan2(side, x[d - 1]);
  const double s = std::pow(lambda, 1.0 / (d + 1));
  std::vector<double> w(d);
  for (int j = 0; j < d - 1; ++j) w[j] = side == 0.0 ? 0.0 : s * theta * x[j] / side;
  w[d - 1] = s * s * (1.0 - rho);
  return w;
}

std::vector<double> unrescale_point(std::span<const double> w, double lambda) {
  check_lambda(lambda);
  const int d = static_cast<int>(w.size());
  const double s = std::pow(lambda, 1.0 / (d + 1));
  std::vector<double> u(w.begin(), w.end() - 1);
  for (double& c : u) c /= s;
  auto x = sphere_exp(u);
  const double rho = 1.0 - w[d - 1] / (s * s);
  for (double& c : x) c *= rho;
  return x;
}

RescaledCloud to_rescaled(const PointCloud& cloud, double lambda) {
  const int d = cloud.dim();
  if (d < 2) throw InvalidInput("to_rescaled: dimension must be >= 2");
  std::vector<double> coords;
  coords.reserve(cloud.coords().size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto w = rescale_point(cloud.point(i), lambda);
    coords.insert(coords.end(), w.begin(), w.end());
  }
  return RescaledCloud{lambda, PointCloud(d, cloud.ids(), std::move(coords))};
}

PointCloud from_rescaled(const RescaledCloud& rc) {
  const int d = rc.points.dim();
  std::vector<double> coords;
  coords.reserve(rc.points.coords().size());
  for (std::size_t i = 0; i < rc.points.size(); ++i) {
    const auto x = unrescale_point(rc.points.point(i), rc.lambda);
    coords.insert(coords.end(), x.begin(), x.end());
  }
  return PointCloud(d, rc.points.ids(), std::move(coords));
}

bool in_cap(std::span<const double> x, std::span<const double> x0) {
  if (x.size() != x0.size()) throw InvalidInput("in_cap: dimension mismatch");
  const double r0 = norm(x0);
  if (r0 == 0.0) throw InvalidInput("in_cap: x0 must be nonzero");
  double dot = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) dot += x[j] * x0[j];
  return dot / r0 > r0;
}

double rescaled_geodesic_angle(std::span<const double> v, std::span<const double> v0, double lambda) {
  const int d = static_cast<int>(v.size()) + 1;
  const double s = std::pow(lambda, 1.0 / (d + 1));
  std::vector<double> a(v.begin(), v.end()), b(v0.begin(), v0.end());
  for (double& c : a) c /= s;
  for (double& c : b) c /= s;
  const auto pa = sphere_exp(a);
  const auto pb = sphere_exp(b);
  double diff = 0.0, sum = 0.0;
  for (int j = 0; j < d; ++j) {
    diff += (pa[j] - pb[j]) * (pa[j] - pb[j]);
    sum += (pa[j] + pb[j]) * (pa[j] + pb[j]);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

double quasi_paraboloid_height(std::span<const double> v, std::span<const double> v0, double h0, double lambda) {
  const int d = static_cast<int>(v.size()) + 1;
  if (std::isinf(lambda)) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) dist2 += (v[j] - v0[j]) * (v[j] - v0[j]);
    return h0 - dist2 / 2.0;
  }
  const double L = std::pow(lambda, 2.0 / (d + 1));
  const double c = std::cos(rescaled_geodesic_angle(v, v0, lambda));
  if (c <= 0.0) return -std::numeric_limits<double>::infinity();
  return L * (1.0 - (1.0 - h0 / L) / c);
}

bool in_paraboloid(std::span<const double> w, const Paraboloid& p) {
  const std::size_t m = w.size() - 1;
  if (p.v0.size() != m) throw InvalidInput("in_paraboloid: dimension mismatch");
  const auto v = w.first(m);
  const double h = w[m];
  if (std::isinf(p.lambda)) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) dist2 += (v[j] - p.v0[j]) * (v[j] - p.v0[j]);
    return p.direction == ParaboloidDirection::Down ? h < p.h0 - dist2 / 2.0 : h > p.h0 + dist2 / 2.0;
  }
  const int d = static_cast<int>(m) + 1;
  const double L = std::pow(p.lambda, 2.0 / (d + 1));
  const double c = std::cos(rescaled_geodesic_angle(v, p.v0, p.lambda));
  if (c <= 0.0) return false;
  if (p.direction == ParaboloidDirection::Down) return h < L * (1.0 - (1.0 - p.h0 / L) / c);
  return h > L * (1.0 - (1.0 - p.h0 / L) * c);
}

double intensity_density(std::span<const double> v, double h, double lambda, int d) {
  if (static_cast<int>(v.size()) != d - 1) throw InvalidInput("intensity_density: dimension mismatch");
  const double t = norm(v) * std::pow(lambda, -1.0 / (d + 1));
  double radial = 1.0;
  if (d > 2 && t > 0.0) radial = std::pow(std::sin(t) / t, d - 2);
  return radial * (1.0 - std::pow(lambda, -2.0 / (d + 1)) * h);
}

}  // namespace onionlab
