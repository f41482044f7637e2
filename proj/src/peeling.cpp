#include "onionlab/peeling.hpp"

#include <algorithm>

#include "lattice_build.hpp"
#include "onionlab/error.hpp"
#include "onionlab/volumes.hpp"
#include "peel_engine.hpp"

namespace onionlab {

int PeelingDiagram::layer_of(PointId id) const { return labels[cloud.index_or_throw(id)]; }

std::map<PointId, int> PeelingDiagram::layer_map() const {
  std::map<PointId, int> m;
  for (std::size_t i = 0; i < cloud.size(); ++i) m[cloud.id(i)] = labels[i];
  return m;
}

PeelingDiagram peel(const PointCloud& cloud, const PeelOptions& options) {
  if (cloud.empty()) throw InvalidInput("peel: empty point cloud");
  const auto src = detail::ExactSource::plain(cloud.dim(), cloud.coords());
  const detail::PointView view(src);
  auto run = detail::peel_rows(view, detail::HullMode::Full, options.max_layers);
  PeelingDiagram diagram;
  diagram.cloud = cloud;
  diagram.labels = std::move(run.labels);
  diagram.complete = run.complete;
  diagram.n_layers = static_cast<int>(run.layers.size());
  diagram.layers.reserve(run.layers.size());
  for (const auto& hc : run.layers) diagram.layers.push_back(detail::to_face_lattice(hc, view, cloud));
  return diagram;
}

int layer_index(std::span<const double> x, const PointCloud& cloud) {
  if (static_cast<int>(x.size()) != cloud.dim()) throw InvalidInput("layer_index: dimension mismatch");
  const PointId xid = cloud.empty() ? 0 : cloud.max_id() + 1;
  const PointCloud joint = cloud.with_point(xid, x);
  const auto src = detail::ExactSource::plain(joint.dim(), joint.coords());
  const detail::PointView view(src);
  const auto row = static_cast<detail::Row>(joint.size() - 1);
  const auto run = detail::peel_rows(view, detail::HullMode::Full, 0, row);
  return run.labels[row];
}

Rational score(PointId id, const PeelingDiagram& diagram, int n, int k) {
  const int label = diagram.layer_of(id);
  if (k < 0) throw InvalidInput("score: k must be >= 0");
  if (label != n || n < 1 || n > diagram.n_layers) return Rational(0);
  const FaceLattice& lat = diagram.layers[n - 1];
  if (k >= static_cast<int>(lat.faces.size())) return Rational(0);
  long long count = 0;
  for (const auto& face : lat.faces[k]) {
    if (std::binary_search(face.begin(), face.end(), id)) ++count;
  }
  return Rational(count, k + 1);
}

LayerStats layer_stats(const PeelingDiagram& diagram, int max_layer, int mc_directions, std::uint64_t seed) {
  LayerStats stats;
  const int d = diagram.cloud.dim();
  stats.dim = d;
  const int top = std::min(max_layer, diagram.n_layers);
  for (int n = 1; n <= top; ++n) {
    const FaceLattice& lat = diagram.layers[n - 1];
    LayerStat s;
    s.n = n;
    s.dim_hull = lat.dim_hull;
    for (const auto& [k, c] : k_face_counts(lat)) s.face_counts[k] = static_cast<long long>(c);
    if (lat.full_dimensional()) {
      s.origin_interior = std::all_of(lat.facet_normals.begin(), lat.facet_normals.end(),
                                      [](const FacetNormal& f) { return f.offset > 0.0; });
      if (mc_directions > 0) {
        const auto iv = intrinsic_volumes(lat, mc_directions, seed + static_cast<std::uint64_t>(n));
        s.defect_volumes.resize(d + 1);
        s.defect_stderrs.resize(d + 1);
        for (int k = 0; k <= d; ++k) {
          s.defect_volumes[k] = ball_intrinsic_volume(d, k) - iv.values[k];
          s.defect_stderrs[k] = iv.stderrs[k];
        }
      }
    }
    stats.layers.push_back(std::move(s));
  }
  return stats;
}

int total_layers(const PeelingDiagram& diagram) { return diagram.n_layers; }

}  // namespace onionlab
