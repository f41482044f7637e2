#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "onionlab/hull.hpp"
#include "onionlab/peeling.hpp"
#include "onionlab/point_cloud.hpp"

namespace onionlab {

/// Observation window C(r) x [0, H]; statistics use |v| <= r_inner.
struct Window {
  double r = 8.0;
  double H = 20.0;
  double r_inner = 1.0;

  /// H = max(20, r^2/8) and r_inner = r / 2^(n+1).
  static Window with_defaults(double r, int n);
};

/// Half-space-model points (v, h) with lifted heights z = h + |v|^2/2.
struct LiftedCloud {
  PointCloud base{2};
  std::vector<double> z;
};

LiftedCloud lift(const PointCloud& cloud);

struct ParabolicDiagram {
  PointCloud cloud{2};
  std::vector<int> labels;  // 0 when peeling was cut short first
  /// Lower-hull lattices in lifted space; ids refer to cloud points.
  std::vector<FaceLattice> layers;
  int n_layers = 0;
  bool complete = true;
  Window window;

  int layer_of(PointId id) const;
  bool in_inner_window(std::size_t index) const;
};

/// Parabolic hull peeling: lower-hull peeling of the lifted cloud.
ParabolicDiagram parabolic_peel(const PointCloud& cloud, const Window& window, int max_layers = 0);

/// Parabolic layer of w in cloud + {w}.
int parabolic_layer_index(std::span<const double> w, const PointCloud& cloud, const Window& window);

/// Whether the empty-paraboloid criterion certifies that w lies on one of the
/// first n layers of cloud + {w}: some downward paraboloid with w on its
/// boundary contains only points of the first n-1 layers. Throws
/// GeneralPositionViolated on exact ties.
bool criterion_check(std::span<const double> w, const PointCloud& cloud, int n);

/// Score of the inserted point (0, h0): (#k-faces of layer n containing it)/(k+1)
/// if it lies on layer n of cloud + {(0,h0)}, else 0.
Rational limit_score(double h0, const PointCloud& cloud, const Window& window, int n, int k);

/// Scores of several inserted points at once, one independent insertion per point.
std::vector<Rational> limit_scores(std::span<const std::vector<double>> points, const PointCloud& cloud, int n, int k);

/// Scores of several points inserted together into one cloud.
std::vector<Rational> joint_limit_scores(std::span<const std::vector<double>> points, const PointCloud& cloud, int n,
                                         int k);

/// Deterministic tree rooted at (0, h0) with n generations (n = 1 is the root alone).
PointCloud tree_fixture(int n, double h0, int d);

/// Depth in the tree of each fixture point, in cloud order.
std::vector<int> tree_fixture_depths(int n, int d);

/// Samples the part of Pi_down(w0) on the side of the hyperplane through w0
/// orthogonal to v1 - v0 and checks that every sample lies in Pi_down(w1).
/// w0 must be on the boundary of Pi_down(w1).
bool half_paraboloid_check(std::span<const double> w0, std::span<const double> w1, int samples = 10000,
                           std::uint64_t seed = 1);

/// Heights of the layer-n points inside the inner window.
std::vector<double> layer_height_profile(const ParabolicDiagram& diagram, int n);

}  // namespace onionlab
