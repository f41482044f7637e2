#include "lattice_build.hpp"

#include <algorithm>
#include <cmath>

namespace onionlab::detail {

namespace {

FacetNormal facet_normal(const PointView& view, std::span<const Row> simplex) {
  const int m = view.dim();
  const int n = m + 1;
  // D(x) = det[p_0 1; ...; p_{m-1} 1; x 1] is affine in x and positive outside.
  std::vector<double> a(n * n);
  for (int i = 0; i < m; ++i) {
    const double* p = view.p(simplex[i]);
    for (int j = 0; j < m; ++j) a[i * n + j] = p[j];
    a[i * n + m] = 1.0;
  }
  auto eval = [&](int unit) {
    for (int j = 0; j < m; ++j) a[m * n + j] = (j == unit) ? 1.0 : 0.0;
    a[m * n + m] = 1.0;
    return det_double(a, n);
  };
  const double d0 = eval(-1);
  FacetNormal fn;
  fn.normal.resize(m);
  double norm = 0.0;
  for (int j = 0; j < m; ++j) {
    fn.normal[j] = eval(j) - d0;
    norm += fn.normal[j] * fn.normal[j];
  }
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& c : fn.normal) c /= norm;
    fn.offset = -d0 / norm;
  }
  return fn;
}

}  // namespace

FaceLattice to_face_lattice(const HullComputation& hc, const PointView& view, const PointCloud& cloud) {
  const RowLattice& lat = hc.lattice;
  FaceLattice out;
  out.dim_ambient = view.dim();
  out.dim_hull = lat.dim_hull;
  out.degenerate = hc.degenerate;

  std::vector<Row> referenced;
  auto id_of = [&](Row r) {
    referenced.push_back(r);
    return cloud.id(view.source_row(r));
  };
  out.faces.resize(lat.faces.size());
  for (std::size_t k = 0; k < lat.faces.size(); ++k) {
    auto& level = out.faces[k];
    level.reserve(lat.faces[k].size());
    for (const auto& face : lat.faces[k]) {
      std::vector<PointId> ids;
      ids.reserve(face.size());
      for (Row r : face) ids.push_back(id_of(r));
      std::sort(ids.begin(), ids.end());
      level.push_back(std::move(ids));
    }
    std::sort(level.begin(), level.end());
  }
  for (const auto& facet : lat.facets) out.facet_normals.push_back(facet_normal(view, facet.simplex));
  for (const auto& s : lat.simplices) {
    std::vector<PointId> ids;
    for (Row r : s) ids.push_back(id_of(r));
    out.boundary_simplices.push_back(std::move(ids));
  }
  for (Row r : lat.boundary_nonvertices) out.boundary_points.push_back(id_of(r));
  std::sort(out.boundary_points.begin(), out.boundary_points.end());

  std::sort(referenced.begin(), referenced.end());
  referenced.erase(std::unique(referenced.begin(), referenced.end()), referenced.end());
  std::vector<std::size_t> idx;
  idx.reserve(referenced.size());
  for (Row r : referenced) idx.push_back(view.source_row(r));
  out.support = cloud.subset(idx);
  return out;
}

}  // namespace onionlab::detail
