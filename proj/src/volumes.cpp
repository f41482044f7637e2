#include "onionlab/volumes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "onionlab/error.hpp"
#include "onionlab/predicates.hpp"

namespace onionlab {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Sum of cone volumes from `apex` over an outward triangulation of the boundary.
double cone_volume(int d, const std::vector<std::vector<double>>& simplices, const std::vector<double>& apex) {
  double total = 0.0;
  std::vector<double> a(d * d);
  for (const auto& s : simplices) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a[i * d + j] = s[i * d + j] - apex[j];
    }
    total += std::abs(detail::det_double(a, d));
  }
  return total / factorial(d);
}

}  // namespace

const char* to_string(VolumeMethod m) { return m == VolumeMethod::Exact ? "exact" : "projection-MC"; }

double unit_ball_volume(int m) {
  if (m < 0) throw InvalidInput("unit_ball_volume: negative dimension");
  return std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0 + 1.0);
}

double ball_intrinsic_volume(int d, int k) {
  if (d < 1 || k < 0 || k > d) throw InvalidInput("ball_intrinsic_volume: need 0 <= k <= d");
  return binomial(d, k) * unit_ball_volume(d) / unit_ball_volume(d - k);
}

double hull_volume(int dim, const std::vector<double>& coords) {
  const std::size_t n = coords.size() / dim;
  if (n < static_cast<std::size_t>(dim) + 1) return 0.0;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto pt = [&](std::size_t i) { return coords.begin() + i * dim; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(pt(a), pt(a) + dim, pt(b), pt(b) + dim);
  });
  std::vector<PointId> ids;
  std::vector<double> unique;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && std::equal(pt(order[i]), pt(order[i]) + dim, pt(order[i - 1]))) continue;
    ids.push_back(static_cast<PointId>(ids.size()));
    unique.insert(unique.end(), pt(order[i]), pt(order[i]) + dim);
  }
  if (dim == 1) {
    const auto [lo, hi] = std::minmax_element(unique.begin(), unique.end());
    return *hi - *lo;
  }
  const PointCloud cloud(dim, std::move(ids), std::move(unique));
  const FaceLattice lat = convex_hull(cloud);
  if (!lat.full_dimensional()) return 0.0;
  std::vector<double> apex(dim, 0.0);
  for (std::size_t i = 0; i < lat.support.size(); ++i) {
    for (int j = 0; j < dim; ++j) apex[j] += lat.support.coord(i, j) / lat.support.size();
  }
  std::vector<std::vector<double>> simplices;
  for (const auto& s : lat.boundary_simplices) {
    std::vector<double> flat;
    for (PointId id : s) {
      const auto p = lat.support.point(lat.support.index_or_throw(id));
      flat.insert(flat.end(), p.begin(), p.end());
    }
    simplices.push_back(std::move(flat));
  }
  return cone_volume(dim, simplices, apex);
}

IntrinsicVolumes intrinsic_volumes(const FaceLattice& lattice, int n_directions, std::uint64_t seed) {
  if (!lattice.full_dimensional()) throw DegenerateHull("intrinsic_volumes: hull is not full-dimensional");
  const int d = lattice.dim_ambient;
  const PointCloud& sup = lattice.support;
  IntrinsicVolumes iv;
  iv.values.assign(d + 1, 0.0);
  iv.method_tags.assign(d + 1, VolumeMethod::Exact);
  iv.stderrs.assign(d + 1, 0.0);
  iv.values[0] = 1.0;

  std::vector<std::vector<double>> simplices;
  simplices.reserve(lattice.boundary_simplices.size());
  for (const auto& s : lattice.boundary_simplices) {
    std::vector<double> flat;
    flat.reserve(d * d);
    for (PointId id : s) {
      const auto p = sup.point(sup.index_or_throw(id));
      flat.insert(flat.end(), p.begin(), p.end());
    }
    simplices.push_back(std::move(flat));
  }
  std::vector<double> apex(d, 0.0);
  for (std::size_t i = 0; i < sup.size(); ++i) {
    for (int j = 0; j < d; ++j) apex[j] += sup.coord(i, j) / static_cast<double>(sup.size());
  }
  iv.values[d] = cone_volume(d, simplices, apex);

  // Half the surface measure, each facet simplex through its Gram determinant.
  double surface = 0.0;
  const int f = d - 1;
  std::vector<double> diff(f * d), gram(f * f);
  for (const auto& s : simplices) {
    for (int i = 0; i < f; ++i) {
      for (int j = 0; j < d; ++j) diff[i * d + j] = s[(i + 1) * d + j] - s[j];
    }
    for (int i = 0; i < f; ++i) {
      for (int k = 0; k < f; ++k) {
        double g = 0.0;
        for (int j = 0; j < d; ++j) g += diff[i * d + j] * diff[k * d + j];
        gram[i * f + k] = g;
      }
    }
    surface += std::sqrt(std::max(0.0, detail::det_double(gram, f))) / factorial(f);
  }
  iv.values[d - 1] = 0.5 * surface;

  if (d >= 3) {
    if (n_directions < 1) throw InvalidInput("intrinsic_volumes: n_directions must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<double> frame, proj;
    for (int k = 1; k <= d - 2; ++k) {
      const double c = binomial(d, k) * unit_ball_volume(d) / (unit_ball_volume(k) * unit_ball_volume(d - k));
      double sum = 0.0, sum2 = 0.0;
      for (int rep = 0; rep < n_directions; ++rep) {
        // Orthonormal k-frame by Gram-Schmidt on Gaussian vectors.
        frame.assign(k * d, 0.0);
        for (int i = 0; i < k; ++i) {
          double norm = 0.0;
          do {
            for (int j = 0; j < d; ++j) frame[i * d + j] = gauss(rng);
            for (int l = 0; l < i; ++l) {
              double dot = 0.0;
              for (int j = 0; j < d; ++j) dot += frame[i * d + j] * frame[l * d + j];
              for (int j = 0; j < d; ++j) frame[i * d + j] -= dot * frame[l * d + j];
            }
            norm = 0.0;
            for (int j = 0; j < d; ++j) norm += frame[i * d + j] * frame[i * d + j];
          } while (norm < 1e-12);
          norm = std::sqrt(norm);
          for (int j = 0; j < d; ++j) frame[i * d + j] /= norm;
        }
        proj.assign(sup.size() * k, 0.0);
        for (std::size_t p = 0; p < sup.size(); ++p) {
          for (int i = 0; i < k; ++i) {
            double dot = 0.0;
            for (int j = 0; j < d; ++j) dot += frame[i * d + j] * sup.coord(p, j);
            proj[p * k + i] = dot;
          }
        }
        const double vol = hull_volume(k, proj);
        sum += vol;
        sum2 += vol * vol;
      }
      const double n = n_directions;
      const double mean = sum / n;
      const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
      iv.values[k] = c * mean;
      iv.stderrs[k] = c * std::sqrt(var / n);
      iv.method_tags[k] = VolumeMethod::ProjectionMC;
    }
  }
  return iv;
}

}  // namespace onionlab
