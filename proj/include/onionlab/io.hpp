#pragma once

#include <string>
#include <vector>

#include "onionlab/experiments.hpp"
#include "onionlab/hull.hpp"
#include "onionlab/parabolic_estimators.hpp"
#include "onionlab/peeling.hpp"
#include "onionlab/point_cloud.hpp"
#include "onionlab/rescale.hpp"

namespace onionlab {

/// CSV with header "id,x1,...,xd". ParseError messages name the file and line.
PointCloud read_point_cloud_csv(const std::string& path);
void write_point_cloud_csv(const std::string& path, const PointCloud& cloud);

/// Same format from an in-memory string; `source` is used in error messages.
PointCloud parse_point_cloud_csv(const std::string& text, const std::string& source = "<string>");

std::string face_lattice_json(const FaceLattice& lattice);

/// CSV "id,v1,...,v(d-1),h" plus a JSON sidecar at path + ".json" holding lambda.
void write_rescaled_cloud(const std::string& path, const RescaledCloud& rc);
RescaledCloud read_rescaled_cloud(const std::string& path);

/// {"layer_of": {id: layer}, "n_layers": .., "complete": .., "stats": [..]}.
std::string diagram_json(const PeelingDiagram& diagram, const LayerStats& stats);
/// Long-format layer statistics: n,stat,k,value,stderr.
void write_layer_stats_csv(const std::string& path, const LayerStats& stats);

/// One line of the long-format results table.
struct ResultRow {
  std::string model;
  int d = 0;
  int n = 0;
  int k = 0;
  double lambda = 0.0;  // NaN for statistics pooled over the grid
  std::string stat;
  double value = 0.0;
  double stderr_ = 0.0;
  int reps = 0;
};

/// Per-(lambda, n, k) means and variances of face counts (and defects when
/// recorded), insufficient-layer counts, slopes and constants.
std::vector<ResultRow> result_rows(const ExperimentResult& result);
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);
/// Plan, seeds and headline numbers as JSON.
std::string result_summary_json(const ExperimentResult& result);
std::string parabolic_summary_json(const ParabolicPlan& plan, const ParabolicConstant& pc);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line plot written as a standalone SVG; log axes take log10 of positive data.
void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series, bool log_axes);

/// Loads a TOML or JSON plan (chosen by extension). Missing or mistyped keys
/// raise ParseError naming the key and an example value.
ExperimentPlan load_plan(const std::string& path);
ExperimentPlan parse_plan_toml(const std::string& text, const std::string& source = "<string>");
ExperimentPlan parse_plan_json(const std::string& text, const std::string& source = "<string>");
std::string plan_json(const ExperimentPlan& plan);

/// 64-bit FNV-1a hash, used to tag outputs with their configuration.
std::uint64_t fnv1a(const std::string& data);

}  // namespace onionlab
