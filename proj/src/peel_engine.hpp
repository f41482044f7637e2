#pragma once

#include <optional>

#include "hull_engine.hpp"

namespace onionlab::detail {

struct PeelRun {
  std::vector<int> labels;  // per view row, 0 when never reached
  std::vector<HullComputation> layers;
  bool complete = true;
};

/// Iterated hull peeling over all rows of the view. Stops after max_layers
/// layers (0 = no limit) or as soon as `stop_at` has been labeled.
PeelRun peel_rows(const PointView& view, HullMode mode, int max_layers, std::optional<Row> stop_at = std::nullopt);

}  // namespace onionlab::detail
