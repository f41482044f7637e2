#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "onionlab/hull.hpp"

namespace onionlab {

enum class VolumeMethod { Exact, ProjectionMC };

const char* to_string(VolumeMethod m);

struct IntrinsicVolumes {
  std::vector<double> values;  // V_0..V_d
  std::vector<VolumeMethod> method_tags;
  std::vector<double> stderrs;  // 0 for exact entries
};

/// Intrinsic volumes of a full-dimensional hull. V_d and V_{d-1} are exact
/// sums over the boundary triangulation; intermediate orders use Kubota's
/// formula averaged over n_directions random k-subspaces.
IntrinsicVolumes intrinsic_volumes(const FaceLattice& lattice, int n_directions = 4096,
                                   std::uint64_t seed = 0x6f6e696f6e6c6162ULL);

/// kappa_m, the volume of the m-dimensional unit ball.
double unit_ball_volume(int m);

/// V_k(B^d) = C(d,k) kappa_d / kappa_{d-k}.
double ball_intrinsic_volume(int d, int k);

/// Volume of conv(points) for a point set spanning R^dim; 0 for lower-dimensional sets.
double hull_volume(int dim, const std::vector<double>& coords);

}  // namespace onionlab
