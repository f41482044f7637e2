#pragma once

#include <cstdint>
#include <random>

#include "onionlab/point_cloud.hpp"

namespace onionlab {

/// A replication stream: the engine key is a hash of both fields.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replication_index = 0;
};

std::uint64_t stream_key(const SeedSpec& seed);
std::mt19937_64 make_engine(const SeedSpec& seed);

/// Poisson process of intensity lambda in the open unit ball B^d.
PointCloud sample_ball_poisson(int d, double lambda, const SeedSpec& seed);

/// n_points i.i.d. uniform points in the open unit ball.
PointCloud sample_ball_binomial(int d, std::int64_t n_points, const SeedSpec& seed);

/// Poisson process of the given intensity on the cylinder C(r) x [0, H] in
/// R^(d-1) x R_+, where C(r) is the (d-1)-ball of radius r. Points are (v, h).
PointCloud sample_halfspace_poisson(int d_minus_1, double r, double H, double intensity, const SeedSpec& seed);

namespace detail {
/// Uniform point in the open unit d-ball off the segment [0, -e_d].
void uniform_in_ball(int d, std::mt19937_64& rng, double* out);
}  // namespace detail

}  // namespace onionlab
