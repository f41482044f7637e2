#include "onionlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "onionlab/error.hpp"

namespace onionlab {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

void close_checked(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw Error("write to " + path + " failed");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& where) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(where + ": '" + s + "' is not a number");
  return v;
}

json lattice_to_json(const FaceLattice& lat) {
  json j;
  j["dim_ambient"] = lat.dim_ambient;
  j["dim_hull"] = lat.dim_hull;
  j["degenerate"] = lat.degenerate;
  j["faces"] = lat.faces;
  json normals = json::array();
  for (const auto& f : lat.facet_normals) normals.push_back({{"normal", f.normal}, {"offset", f.offset}});
  j["facet_normals"] = normals;
  j["boundary_points"] = lat.boundary_points;
  json counts = json::object();
  for (const auto& [k, c] : k_face_counts(lat)) counts[std::to_string(k)] = c;
  j["face_counts"] = counts;
  return j;
}

json stats_to_json(const LayerStats& stats) {
  json arr = json::array();
  for (const auto& s : stats.layers) {
    json j;
    j["n"] = s.n;
    j["dim_hull"] = s.dim_hull;
    json counts = json::object();
    for (const auto& [k, c] : s.face_counts) counts[std::to_string(k)] = c;
    j["face_counts"] = counts;
    json defects = json::array();
    for (const auto& v : s.defect_volumes) defects.push_back(v ? json(*v) : json(nullptr));
    j["defect_volumes"] = defects;
    j["defect_stderrs"] = s.defect_stderrs;
    j["origin_interior"] = s.origin_interior;
    arr.push_back(j);
  }
  return arr;
}

json plan_to_json(const ExperimentPlan& p) {
  json j;
  j["model"] = p.model == Model::Ball ? "ball" : "parabolic";
  j["d"] = p.d;
  j["n_max"] = p.n_max;
  j["k_set"] = p.k_set;
  j["lambda_grid"] = p.lambda_grid;
  j["replications"] = p.replications;
  j["seed"] = p.seed;
  j["volumes"] = p.volumes;
  j["mc_directions"] = p.mc_directions;
  j["full_peel"] = p.full_peel;
  j["threads"] = p.threads;
  j["r"] = p.r;
  j["H"] = p.H;
  j["intensity"] = p.intensity;
  j["h_grid"] = p.h_grid;
  return j;
}

json constant_to_json(const ConstantEstimate& c) {
  return {{"value", c.value},           {"se", c.se},
          {"ci_low", c.ci_low},         {"ci_high", c.ci_high},
          {"reps", c.reps},             {"diagnostic", c.diagnostic},
          {"diagnostic_se", c.diagnostic_se}, {"stable", c.stable}};
}

}  // namespace

PointCloud parse_point_cloud_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int dim = -1;
  std::vector<PointId> ids;
  std::vector<double> coords;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (dim < 0) {
      if (cells.size() < 2 || cells[0] != "id") throw ParseError(where + ": expected header 'id,x1,...,xd'");
      dim = static_cast<int>(cells.size()) - 1;
      continue;
    }
    if (static_cast<int>(cells.size()) != dim + 1) {
      throw ParseError(where + ": expected " + std::to_string(dim + 1) + " fields, found " +
                       std::to_string(cells.size()));
    }
    ids.push_back(parse_number<PointId>(cells[0], where));
    for (int j = 1; j <= dim; ++j) {
      const double v = parse_number<double>(cells[j], where);
      if (!std::isfinite(v)) throw ParseError(where + ": non-finite coordinate");
      coords.push_back(v);
    }
  }
  if (dim < 0) throw ParseError(source + ": empty file, expected header 'id,x1,...,xd'");
  try {
    return PointCloud(dim, std::move(ids), std::move(coords));
  } catch (const InvalidInput& e) {
    throw ParseError(source + ": " + e.what());
  }
}

PointCloud read_point_cloud_csv(const std::string& path) { return parse_point_cloud_csv(slurp(path), path); }

void write_point_cloud_csv(const std::string& path, const PointCloud& cloud) {
  auto out = open_out(path);
  out << "id";
  for (int j = 1; j <= cloud.dim(); ++j) out << ",x" << j;
  out << "\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out << cloud.id(i);
    for (int j = 0; j < cloud.dim(); ++j) out << ',' << fmt(cloud.coord(i, j));
    out << "\n";
  }
  close_checked(out, path);
}

std::string face_lattice_json(const FaceLattice& lattice) { return lattice_to_json(lattice).dump(2); }

void write_rescaled_cloud(const std::string& path, const RescaledCloud& rc) {
  write_point_cloud_csv(path, rc.points);
  auto out = open_out(path + ".json");
  out << json{{"lambda", rc.lambda}, {"d", rc.points.dim()}, {"points", rc.points.size()}}.dump(2) << "\n";
  close_checked(out, path + ".json");
}

RescaledCloud read_rescaled_cloud(const std::string& path) {
  RescaledCloud rc;
  rc.points = read_point_cloud_csv(path);
  json side;
  try {
    side = json::parse(slurp(path + ".json"));
  } catch (const json::exception& e) {
    throw ParseError(path + ".json: " + e.what());
  }
  if (!side.contains("lambda") || !side["lambda"].is_number()) {
    throw ParseError(path + ".json: missing numeric key 'lambda'");
  }
  rc.lambda = side["lambda"].get<double>();
  return rc;
}

std::string diagram_json(const PeelingDiagram& diagram, const LayerStats& stats) {
  json layer_of = json::object();
  for (std::size_t i = 0; i < diagram.cloud.size(); ++i) {
    layer_of[std::to_string(diagram.cloud.id(i))] = diagram.labels[i];
  }
  json j;
  j["layer_of"] = layer_of;
  j["n_layers"] = diagram.n_layers;
  j["complete"] = diagram.complete;
  j["stats"] = stats_to_json(stats);
  return j.dump(2);
}

void write_layer_stats_csv(const std::string& path, const LayerStats& stats) {
  auto out = open_out(path);
  out << "n,stat,k,value,stderr\n";
  for (const auto& s : stats.layers) {
    out << s.n << ",dim_hull,," << s.dim_hull << ",\n";
    for (const auto& [k, c] : s.face_counts) out << s.n << ",faces," << k << ',' << c << ",\n";
    for (std::size_t k = 0; k < s.defect_volumes.size(); ++k) {
      if (!s.defect_volumes[k]) continue;
      out << s.n << ",defect," << k << ',' << fmt(*s.defect_volumes[k]) << ',' << fmt(s.defect_stderrs[k]) << "\n";
    }
  }
  close_checked(out, path);
}

std::vector<ResultRow> result_rows(const ExperimentResult& result) {
  const ExperimentPlan& p = result.plan;
  const std::string model = p.model == Model::Ball ? "ball" : "parabolic";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ResultRow> rows;
  auto push = [&](int n, int k, double lambda, const std::string& stat, double v, double se, int reps) {
    rows.push_back({model, p.d, n, k, lambda, stat, v, se, reps});
  };
  for (const LambdaBlock& b : result.blocks) {
    const int reps = static_cast<int>(b.reps.size());
    push(0, 0, b.lambda, "insufficient_layers", b.insufficient_layers, nan, reps);
    push(0, 0, b.lambda, "score_identity_failures", b.score_identity_failures, nan, reps);
    for (int n = 1; n <= p.n_max; ++n) {
      for (int k : p.k_set) {
        const Summary s = summarize(replicate_values(b, Quantity::Faces, n, k));
        push(n, k, b.lambda, "faces_mean", s.mean, s.se_mean, s.count);
        push(n, k, b.lambda, "faces_variance", s.variance, s.se_variance, s.count);
        if (p.volumes) {
          const Summary v = summarize(replicate_values(b, Quantity::Defect, n, k));
          push(n, k, b.lambda, "defect_mean", v.mean, v.se_mean, v.count);
          push(n, k, b.lambda, "defect_variance", v.variance, v.se_variance, v.count);
          push(n, k, b.lambda, "defect_excluded", reps - v.count, nan, reps);
        }
      }
    }
    if (p.full_peel) {
      const Summary s = summarize(replicate_values(b, Quantity::TotalLayers, 1, 0));
      push(0, 0, b.lambda, "total_layers_mean", s.mean, s.se_mean, s.count);
    }
  }
  if (result.blocks.size() >= 4) {
    const int reps = static_cast<int>(result.blocks.back().reps.size());
    for (int n = 1; n <= p.n_max; ++n) {
      for (int k : p.k_set) {
        for (Stat st : {Stat::Mean, Stat::Variance}) {
          try {
            const SlopeFit f = fit_slope(result, Quantity::Faces, st, n, k);
            push(n, k, nan, std::string("faces_") + to_string(st) + "_slope", f.slope, f.se, reps);
            push(n, k, nan, std::string("faces_") + to_string(st) + "_slope_halfwidth", f.half_width, nan, reps);
          } catch (const InvalidInput&) {
            // Zero statistics (e.g. k = d) have no log-log slope.
          }
          if (!p.volumes) continue;
          try {
            const SlopeFit f = fit_slope(result, Quantity::Defect, st, n, k);
            push(n, k, nan, std::string("defect_") + to_string(st) + "_slope", f.slope, f.se, reps);
            push(n, k, nan, std::string("defect_") + to_string(st) + "_slope_halfwidth", f.half_width, nan, reps);
          } catch (const InvalidInput&) {
          }
        }
      }
    }
    if (p.full_peel) {
      const LayerScaling s = layer_count_scaling(result);
      push(0, 0, nan, "total_layers_slope", s.fit.slope, s.fit.se, reps);
      push(0, 0, nan, "total_layers_slope_halfwidth", s.fit.half_width, nan, reps);
      push(0, 0, nan, "beta", s.beta, s.beta_se, reps);
    }
  }
  if (!result.blocks.empty()) {
    for (int n = 1; n <= p.n_max; ++n) {
      for (int k : p.k_set) {
        const ConstantEstimate c = estimate_constant_ball(result, n, k);
        push(n, k, nan, "constant", c.value, c.se, c.reps);
        push(n, k, nan, "constant_diagnostic", c.diagnostic, c.diagnostic_se, c.reps);
      }
    }
  }
  return rows;
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  auto out = open_out(path);
  out << "model,d,n,k,lambda,stat,value,stderr,reps\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.d << ',' << r.n << ',' << r.k << ',' << fmt(r.lambda) << ',' << r.stat << ','
        << fmt(r.value) << ',' << fmt(r.stderr_) << ',' << r.reps << "\n";
  }
  close_checked(out, path);
}

std::string result_summary_json(const ExperimentResult& result) {
  const ExperimentPlan& p = result.plan;
  json j;
  j["plan"] = plan_to_json(p);
  json blocks = json::array();
  for (std::size_t b = 0; b < result.blocks.size(); ++b) {
    const auto& blk = result.blocks[b];
    blocks.push_back({{"lambda", blk.lambda},
                      {"replications", blk.reps.size()},
                      {"stream", b},
                      {"insufficient_layers", blk.insufficient_layers},
                      {"score_identity_failures", blk.score_identity_failures}});
  }
  j["blocks"] = blocks;
  json series = json::array();
  if (result.blocks.size() >= 4) {
    for (int n = 1; n <= p.n_max; ++n) {
      for (int k : p.k_set) {
        try {
          const SlopeFit f = fit_slope(result, Quantity::Faces, Stat::Mean, n, k);
          const SlopeFit v = fit_slope(result, Quantity::Faces, Stat::Variance, n, k);
          series.push_back({{"n", n},
                            {"k", k},
                            {"mean_slope", f.slope},
                            {"mean_slope_halfwidth", f.half_width},
                            {"variance_slope", v.slope},
                            {"variance_slope_halfwidth", v.half_width}});
        } catch (const InvalidInput&) {
        }
      }
    }
  }
  j["slopes"] = series;
  json constants = json::array();
  if (!result.blocks.empty()) {
    for (int n = 1; n <= p.n_max; ++n) {
      for (int k : p.k_set) {
        json c = constant_to_json(estimate_constant_ball(result, n, k));
        c["n"] = n;
        c["k"] = k;
        constants.push_back(c);
      }
    }
    json mono = json::array();
    for (const auto& r : monotonicity_table(result, p.k_set.front())) {
      mono.push_back({{"n", r.n}, {"value", r.value}, {"se", r.se}, {"flag", r.flag}});
    }
    j["monotonicity"] = mono;
  }
  j["constants"] = constants;
  return j.dump(2);
}

std::string parabolic_summary_json(const ParabolicPlan& plan, const ParabolicConstant& pc) {
  json j;
  j["plan"] = {{"n", plan.n},
               {"k", plan.k},
               {"d", plan.d},
               {"h_grid", plan.h_grid},
               {"window", {{"r", plan.window.r}, {"H", plan.window.H}, {"r_inner", plan.window.r_inner}}},
               {"replications", plan.replications},
               {"seed", plan.seed}};
  j["constant"] = constant_to_json(pc.constant);
  j["i1"] = constant_to_json(pc.i1);
  j["tail_ratio"] = pc.tail_ratio;
  j["worst_window_shift"] = pc.worst_window_shift;
  j["window_ok"] = pc.window_ok;
  json nodes = json::array();
  for (const auto& e : pc.nodes) {
    nodes.push_back({{"h", e.h}, {"mean", e.mean}, {"se", e.se}, {"mean_sq", e.mean_sq}, {"window_shift", e.window_shift}});
  }
  j["nodes"] = nodes;
  return j.dump(2);
}

std::string plan_json(const ExperimentPlan& plan) { return plan_to_json(plan).dump(2); }

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace onionlab
