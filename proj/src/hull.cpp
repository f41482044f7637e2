#include "onionlab/hull.hpp"

#include <algorithm>
#include <numeric>

#include "hull_engine.hpp"
#include "lattice_build.hpp"
#include "onionlab/error.hpp"

namespace onionlab {

std::vector<PointId> FaceLattice::vertices() const {
  std::vector<PointId> v;
  if (faces.empty()) return v;
  for (const auto& f : faces[0]) v.push_back(f[0]);
  std::sort(v.begin(), v.end());
  return v;
}

FaceLattice convex_hull(const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidInput("convex_hull: empty point cloud");
  const auto src = detail::ExactSource::plain(cloud.dim(), cloud.coords());
  const detail::PointView view(src);
  detail::Orientation orient(view);
  std::vector<detail::Row> active(cloud.size());
  std::iota(active.begin(), active.end(), detail::Row{0});
  const auto hc = detail::compute_hull(view, orient, active, detail::HullMode::Full);
  return detail::to_face_lattice(hc, view, cloud);
}

std::map<int, std::size_t> k_face_counts(const FaceLattice& lattice) {
  std::map<int, std::size_t> counts;
  for (std::size_t k = 0; k < lattice.faces.size(); ++k) counts[static_cast<int>(k)] = lattice.faces[k].size();
  return counts;
}

}  // namespace onionlab
