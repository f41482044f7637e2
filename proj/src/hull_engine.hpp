#pragma once

// Internal hull machinery working on view rows. Public entry points
// (convex_hull, peel, parabolic_peel) translate rows to point ids.

#include <span>
#include <vector>

#include "onionlab/predicates.hpp"

namespace onionlab::detail {

enum class HullMode {
  Full,   ///< whole boundary of conv(active)
  Lower,  ///< faces of conv(active) with outward normal pointing down the last column
};

struct RowFacet {
  std::vector<Row> rows;     ///< vertices of the facet, sorted
  std::vector<Row> simplex;  ///< m affinely independent rows on the facet, outward oriented
};

struct RowLattice {
  int dim_ambient = 0;
  int dim_hull = -1;
  /// faces[k]: sorted vertex-row sets. For Full mode on a full-dimensional
  /// hull k runs over 0..m-1; otherwise the top face is included.
  std::vector<std::vector<std::vector<Row>>> faces;
  std::vector<RowFacet> facets;                ///< true facets of the relevant boundary (full-dim only)
  std::vector<std::vector<Row>> simplices;     ///< outward oriented triangulation of that boundary
  std::vector<Row> boundary_nonvertices;
};

struct HullComputation {
  RowLattice lattice;
  std::vector<Row> consumed;  ///< rows not in the open interior (the peeled layer)
  bool degenerate = false;
};

/// Hull of the `active` rows of `view`. For 2D views `active` may be passed
/// presorted lexicographically, which lets peeling reuse one sort.
HullComputation compute_hull(const PointView& view, Orientation& orient, std::span<const Row> active,
                             HullMode mode, bool active_sorted_2d = false);

/// Lexicographic order of rows (exact on ties), as consumed by the 2D chain.
std::vector<Row> sort_rows_lexicographic(const PointView& view, std::vector<Row> rows);

}  // namespace onionlab::detail
