#pragma once

#include "hull_engine.hpp"
#include "onionlab/hull.hpp"

namespace onionlab::detail {

/// Converts a row-level hull into the public lattice. View rows index into
/// `cloud`; normals are taken in view coordinates (lifted for the parabolic
/// model) and the support keeps the cloud's own coordinates.
FaceLattice to_face_lattice(const HullComputation& hc, const PointView& view, const PointCloud& cloud);

}  // namespace onionlab::detail
