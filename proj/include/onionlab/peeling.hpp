#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "onionlab/hull.hpp"
#include "onionlab/point_cloud.hpp"

namespace onionlab {

using Rational = boost::rational<long long>;

struct PeelOptions {
  /// Stop after this many layers; 0 peels until no point is left.
  int max_layers = 0;
};

/// Result of convex hull peeling. labels[i] is the layer of cloud point i
/// (1-based); it is 0 only for points below max_layers when peeling was cut short.
struct PeelingDiagram {
  PointCloud cloud{1};
  std::vector<int> labels;
  std::vector<FaceLattice> layers;
  int n_layers = 0;
  bool complete = true;

  int layer_of(PointId id) const;
  std::map<PointId, int> layer_map() const;
};

PeelingDiagram peel(const PointCloud& cloud, const PeelOptions& options = {});

/// Layer of x in peel(cloud + {x}). Peeling stops as soon as x is labeled.
int layer_index(std::span<const double> x, const PointCloud& cloud);

/// (#k-faces of layers[n] containing the point) / (k+1) if the point sits on
/// layer n, else 0.
Rational score(PointId id, const PeelingDiagram& diagram, int n, int k);

struct LayerStat {
  int n = 0;
  int dim_hull = -1;
  std::map<int, long long> face_counts;
  /// V_k(B^d) - V_k(layer), k = 0..d; empty for lower-dimensional layers.
  std::vector<std::optional<double>> defect_volumes;
  std::vector<double> defect_stderrs;
  bool origin_interior = false;
};

struct LayerStats {
  int dim = 0;
  std::vector<LayerStat> layers;
};

/// Statistics of layers 1..max_layer (those that exist). Set mc_directions
/// to 0 to skip intrinsic volumes altogether.
LayerStats layer_stats(const PeelingDiagram& diagram, int max_layer = 5, int mc_directions = 4096,
                       std::uint64_t seed = 0x6f6e696f6e6c6162ULL);

int total_layers(const PeelingDiagram& diagram);

}  // namespace onionlab
