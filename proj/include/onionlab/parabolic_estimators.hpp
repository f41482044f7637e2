#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "onionlab/experiments.hpp"
#include "onionlab/parabolic.hpp"

namespace onionlab {

/// Surface measure of the unit sphere S^(d-1) in R^d.
double sphere_surface(int d);

/// Limit-model estimation on the half-space process of intensity one.
struct ParabolicPlan {
  int n = 1;
  int k = 0;
  int d = 2;
  std::vector<double> h_grid;  // trapezoid nodes, strictly increasing from 0
  Window window;
  int replications = 200;
  std::uint64_t seed = 1;
  /// Rerun every replication in a window of twice the radius and compare.
  bool window_check = true;
  /// Throw WindowTooSmall when some node shifts by more than 2 standard errors.
  bool throw_on_window = true;
  int threads = 0;

  void validate() const;
};

struct NodeEstimate {
  double h = 0.0;
  double mean = 0.0;  // E xi((0,h))
  double se = 0.0;
  double mean_sq = 0.0;  // E xi((0,h))^2
  double se_sq = 0.0;
  double window_shift = 0.0;  // doubled window minus base window, paired
  double window_shift_se = 0.0;
};

struct ParabolicConstant {
  ConstantEstimate constant;  // sphere_surface(d) * integral of E xi
  ConstantEstimate i1;        // integral of E xi^2
  std::vector<NodeEstimate> nodes;
  double tail_ratio = 0.0;  // integrand at the last node over its peak
  /// Largest |window shift| in units of the node standard error.
  double worst_window_shift = 0.0;
  bool window_ok = true;
};

ParabolicConstant estimate_constant_parabolic(const ParabolicPlan& plan);

/// Two inserted points (0, h0) and (v1, h1).
struct TwoPointQuery {
  double h0 = 0.0;
  std::vector<double> v1;
  double h1 = 0.0;
};

struct TwoPointNode {
  TwoPointQuery query;
  double c = 0.0;  // E[xi0 xi1 (joint insertion)] - E[xi0] E[xi1]
  double se = 0.0;
  double joint = 0.0;
  double single0 = 0.0;
  double single1 = 0.0;
};

/// Both expectations come from the same clouds; standard errors use the
/// influence function of the product-of-means term.
std::vector<TwoPointNode> estimate_two_point(const ParabolicPlan& plan, const std::vector<TwoPointQuery>& queries);

struct VarianceConstant {
  ConstantEstimate i1;
  ConstantEstimate i2;
  ConstantEstimate total;  // sphere_surface(d) * (I1 + I2)
  /// Ball-model rescaled variance at the largest lambda when a sweep is supplied.
  std::optional<ConstantEstimate> ball;
};

/// I1 by the trapezoid rule on plan.h_grid; I2 as a trapezoid rule in
/// (h0, h1) times a midpoint rule in |v1| on [0, v_max] with v_cells cells.
/// Only d = 2 and d = 3 are accepted (v1 reduced by rotational symmetry).
VarianceConstant estimate_variance_constant(const ParabolicPlan& plan, double v_max, int v_cells,
                                            const ExperimentResult* ball_sweep = nullptr);

}  // namespace onionlab
