#pragma once

#include <limits>
#include <span>
#include <vector>

#include "onionlab/point_cloud.hpp"

namespace onionlab {

/// Image of a ball cloud under T^lambda: points (v, h) in R^(d-1) x R_+ with
/// the ids of their preimages. d is points.dim().
struct RescaledCloud {
  double lambda = 1.0;
  PointCloud points{2};
};

enum class ParaboloidDirection { Up, Down };

/// Downward or upward paraboloid with apex (v0, h0). lambda = infinity is the
/// exact paraboloid; a finite lambda gives the quasi-paraboloid of that scale.
struct Paraboloid {
  std::vector<double> v0;
  double h0 = 0.0;
  ParaboloidDirection direction = ParaboloidDirection::Down;
  double lambda = std::numeric_limits<double>::infinity();
};

RescaledCloud to_rescaled(const PointCloud& cloud, double lambda);
PointCloud from_rescaled(const RescaledCloud& rc);

/// Single-point versions of the map and its inverse; w = (v, h).
std::vector<double> rescale_point(std::span<const double> x, double lambda);
std::vector<double> unrescale_point(std::span<const double> w, double lambda);

/// x in cap(x0) = {<x, x0/|x0|> > |x0|}.
bool in_cap(std::span<const double> x, std::span<const double> x0);

/// Membership of w = (v, h) in the open (quasi-)paraboloid p.
bool in_paraboloid(std::span<const double> w, const Paraboloid& p);

/// Geodesic angle on S^(d-1) between the points with rescaled horizontal
/// coordinates v and v0.
double rescaled_geodesic_angle(std::span<const double> v, std::span<const double> v0, double lambda);

/// Height of the boundary of the downward quasi-paraboloid with apex (v0, h0)
/// above v; -infinity where the cap does not reach.
double quasi_paraboloid_height(std::span<const double> v, std::span<const double> v0, double h0, double lambda);

/// Density of the rescaled Poisson process on W_lambda.
double intensity_density(std::span<const double> v, double h, double lambda, int d);

}  // namespace onionlab
