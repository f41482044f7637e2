#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "onionlab/point_cloud.hpp"

namespace onionlab {

/// Outward unit normal and offset of a facet: inside points satisfy normal . x <= offset.
struct FacetNormal {
  std::vector<double> normal;
  double offset = 0.0;
};

/// Face lattice of a convex hull (or of the lower hull in the lifted
/// parabolic model). faces[k] lists the k-faces as sorted id-sets of their
/// vertices. A full-dimensional hull lists k = 0..dim_ambient-1; a hull of
/// affine dimension m < dim_ambient also lists the body itself as faces[m].
struct FaceLattice {
  int dim_ambient = 0;
  int dim_hull = -1;
  std::vector<std::vector<std::vector<PointId>>> faces;
  std::vector<FacetNormal> facet_normals;
  /// Outward-oriented simplicial triangulation of the boundary (full-dimensional hulls only).
  std::vector<std::vector<PointId>> boundary_simplices;
  /// Input points on the boundary that are not vertices (exact degeneracies only).
  std::vector<PointId> boundary_points;
  /// Coordinates of every point referenced above.
  PointCloud support{1};
  /// True when exact coplanarities were met and resolved.
  bool degenerate = false;

  std::vector<PointId> vertices() const;
  bool full_dimensional() const { return dim_hull == dim_ambient; }
};

FaceLattice convex_hull(const PointCloud& cloud);

/// Number of faces per dimension 0..dim_hull (dimensions absent from the lattice are omitted).
std::map<int, std::size_t> k_face_counts(const FaceLattice& lattice);

}  // namespace onionlab
