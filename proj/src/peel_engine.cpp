#include "peel_engine.hpp"

#include <algorithm>
#include <numeric>

#include "onionlab/error.hpp"

namespace onionlab::detail {

PeelRun peel_rows(const PointView& view, HullMode mode, int max_layers, std::optional<Row> stop_at) {
  PeelRun run;
  run.labels.assign(view.size(), 0);
  Orientation orient(view);
  std::vector<Row> active(view.size());
  std::iota(active.begin(), active.end(), Row{0});
  // The monotone chain wants lexicographic order; filtering keeps it.
  const bool planar = view.dim() == 2;
  if (planar) active = sort_rows_lexicographic(view, std::move(active));

  int layer = 0;
  std::vector<char> taken(view.size(), 0);
  while (!active.empty()) {
    if (max_layers > 0 && layer >= max_layers) {
      run.complete = false;
      break;
    }
    ++layer;
    HullComputation hc = compute_hull(view, orient, active, mode, planar);
    if (hc.consumed.empty()) throw Error("peel: a layer consumed no points");
    for (Row r : hc.consumed) {
      run.labels[r] = layer;
      taken[r] = 1;
    }
    std::erase_if(active, [&](Row r) { return taken[r] != 0; });
    run.layers.push_back(std::move(hc));
    if (stop_at && taken[*stop_at]) {
      run.complete = active.empty();
      break;
    }
  }
  return run;
}

}  // namespace onionlab::detail
