#include "onionlab/sampler.hpp"

#include <cmath>

#include "onionlab/error.hpp"
#include "onionlab/volumes.hpp"

namespace onionlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_key(const SeedSpec& seed) {
  return splitmix64(splitmix64(seed.master_seed) ^ splitmix64(~seed.replication_index));
}

std::mt19937_64 make_engine(const SeedSpec& seed) {
  const std::uint64_t key = stream_key(seed);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(seed.replication_index),
                    static_cast<std::uint32_t>(seed.replication_index >> 32)};
  return std::mt19937_64(seq);
}

void detail::uniform_in_ball(int d, std::mt19937_64& rng, double* out) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  while (true) {
    double norm2 = 0.0;
    for (int j = 0; j < d; ++j) {
      out[j] = gauss(rng);
      norm2 += out[j] * out[j];
    }
    if (norm2 == 0.0) continue;
    const double r = std::pow(unif(rng), 1.0 / d);
    const double scale = r / std::sqrt(norm2);
    double len2 = 0.0, side2 = 0.0;
    for (int j = 0; j < d; ++j) {
      out[j] *= scale;
      len2 += out[j] * out[j];
      if (j + 1 < d) side2 += out[j] * out[j];
    }
    if (len2 >= 1.0 || len2 == 0.0) continue;
    if (side2 == 0.0 && out[d - 1] <= 0.0) continue;
    return;
  }
}

PointCloud sample_ball_binomial(int d, std::int64_t n_points, const SeedSpec& seed) {
  if (d < 2) throw InvalidInput("sample_ball_binomial: d must be >= 2");
  if (n_points < 1) throw InvalidInput("sample_ball_binomial: n_points must be >= 1");
  auto rng = make_engine(seed);
  std::vector<PointId> ids(n_points);
  std::vector<double> coords(static_cast<std::size_t>(n_points) * d);
  for (std::int64_t i = 0; i < n_points; ++i) {
    ids[i] = i;
    detail::uniform_in_ball(d, rng, coords.data() + i * d);
  }
  return PointCloud(d, std::move(ids), std::move(coords));
}

PointCloud sample_ball_poisson(int d, double lambda, const SeedSpec& seed) {
  if (d < 2) throw InvalidInput("sample_ball_poisson: d must be >= 2");
  if (!(lambda > 0.0)) throw InvalidInput("sample_ball_poisson: lambda must be positive");
  auto rng = make_engine(seed);
  std::poisson_distribution<std::int64_t> count(lambda * unit_ball_volume(d));
  const std::int64_t n = count(rng);
  std::vector<PointId> ids(n);
  std::vector<double> coords(static_cast<std::size_t>(n) * d);
  for (std::int64_t i = 0; i < n; ++i) {
    ids[i] = i;
    detail::uniform_in_ball(d, rng, coords.data() + i * d);
  }
  return PointCloud(d, std::move(ids), std::move(coords));
}

PointCloud sample_halfspace_poisson(int d_minus_1, double r, double H, double intensity, const SeedSpec& seed) {
  if (d_minus_1 < 1) throw InvalidInput("sample_halfspace_poisson: d-1 must be >= 1");
  if (!(r > 0.0) || !(H > 0.0)) throw InvalidInput("sample_halfspace_poisson: r and H must be positive");
  if (!(intensity > 0.0)) throw InvalidInput("sample_halfspace_poisson: intensity must be positive");
  const int d = d_minus_1 + 1;
  auto rng = make_engine(seed);
  const double volume = unit_ball_volume(d_minus_1) * std::pow(r, d_minus_1) * H;
  std::poisson_distribution<std::int64_t> count(intensity * volume);
  std::uniform_real_distribution<double> unif;
  const std::int64_t n = count(rng);
  std::vector<PointId> ids(n);
  std::vector<double> coords(static_cast<std::size_t>(n) * d);
  std::vector<double> dir(d_minus_1);
  for (std::int64_t i = 0; i < n; ++i) {
    ids[i] = i;
    double* p = coords.data() + i * d;
    if (d_minus_1 == 1) {
      p[0] = r * (2.0 * unif(rng) - 1.0);
    } else {
      std::normal_distribution<double> gauss;
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (double& x : dir) {
          x = gauss(rng);
          norm2 += x * x;
        }
      } while (norm2 == 0.0);
      const double rad = r * std::pow(unif(rng), 1.0 / d_minus_1) / std::sqrt(norm2);
      for (int j = 0; j < d_minus_1; ++j) p[j] = dir[j] * rad;
    }
    p[d_minus_1] = H * unif(rng);
  }
  return PointCloud(d, std::move(ids), std::move(coords));
}

}  // namespace onionlab
