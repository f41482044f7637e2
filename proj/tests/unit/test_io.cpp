#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "onionlab/error.hpp"
#include "onionlab/io.hpp"
#include "onionlab/sampler.hpp"
#include "test_util.hpp"

#include <nlohmann/json.hpp>

using namespace onionlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "onionlab_unit_io";
  fs::create_directories(p);
  return p;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("point cloud CSV round trip") {
  const PointCloud c = sample_ball_poisson(3, 50, {1, 0});
  const auto path = (scratch_dir() / "cloud.csv").string();
  write_point_cloud_csv(path, c);
  const PointCloud back = read_point_cloud_csv(path);
  CHECK(back.dim() == 3);
  CHECK(back.ids() == c.ids());
  CHECK(back.coords() == c.coords());
}

TEST_CASE("malformed CSV rows are reported with their line") {
  const std::string text = "id,x1,x2\n0,0.1,0.2\n1,0.3\n";
  const std::string msg = message_of([&] { parse_point_cloud_csv(text, "pts.csv"); });
  CHECK(msg.find("pts.csv:3") != std::string::npos);
  CHECK_THROWS_AS(parse_point_cloud_csv("id,x1\n0,abc\n"), ParseError);
  CHECK_THROWS_AS(parse_point_cloud_csv("x,y\n0,1\n"), ParseError);
  CHECK_THROWS_AS(parse_point_cloud_csv(""), ParseError);
  // Duplicate ids are rejected by the cloud itself.
  CHECK_THROWS_AS(parse_point_cloud_csv("id,x1\n0,1\n0,2\n"), ParseError);
}

TEST_CASE("diagram JSON of a square with its center") {
  const PointCloud c = testutil::make_cloud(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  const PeelingDiagram dg = peel(c);
  const auto j = nlohmann::json::parse(diagram_json(dg, layer_stats(dg, 5, 0)));
  CHECK(j["layer_of"]["4"] == 2);
  CHECK(j["layer_of"]["0"] == 1);
  CHECK(j["n_layers"] == 2);
  CHECK(j["stats"][0]["face_counts"]["0"] == 4);
  const auto lat = nlohmann::json::parse(face_lattice_json(dg.layers[0]));
  CHECK(lat["faces"][0].size() == 4);
  CHECK(lat["facet_normals"].size() == 4);
}

TEST_CASE("rescaled cloud keeps lambda in its sidecar") {
  RescaledCloud rc = to_rescaled(sample_ball_poisson(2, 200, {2, 0}), 200.0);
  const auto path = (scratch_dir() / "rescaled.csv").string();
  write_rescaled_cloud(path, rc);
  const RescaledCloud back = read_rescaled_cloud(path);
  CHECK(back.lambda == 200.0);
  CHECK(back.points.coords() == rc.points.coords());
}

TEST_CASE("plans from TOML and JSON") {
  const ExperimentPlan p = parse_plan_toml(R"(
model = "ball"
d = 3
n_max = 2
k_set = [0, 1]
lambda_grid = [100.0, 200, 400, 800]
replications = 10
seed = 5
volumes = true
)");
  CHECK(p.d == 3);
  CHECK(p.k_set == std::vector<int>{0, 1});
  CHECK(p.lambda_grid.back() == 800.0);
  CHECK(p.volumes);

  const std::string missing = message_of([] { parse_plan_toml("model = \"ball\"\nd = 2\nn_max = 1\nreplications = 5\nseed = 1\n", "plan.toml"); });
  CHECK(missing.find("missing required key 'lambda_grid'") != std::string::npos);
  CHECK(missing.find("plan.toml") != std::string::npos);
  const std::string typed = message_of([] { parse_plan_toml("model = \"ball\"\nd = \"two\"\n"); });
  CHECK(typed.find("'d'") != std::string::npos);
  CHECK_THROWS_AS(parse_plan_toml("model = \n"), ParseError);

  const ExperimentPlan j = parse_plan_json(
      R"({"model": "ball", "d": 2, "n_max": 3, "lambda_grid": [1, 2, 3, 4], "replications": 4, "seed": 9})");
  CHECK(j.n_max == 3);
  CHECK(j.seed == 9);
  CHECK_THROWS_AS(parse_plan_json(R"({"model": "ball", "d": 2, "n_max": 3, "lambda_grid": [4, 3], "replications": 4, "seed": 9})"),
                  ParseError);

  const ExperimentPlan bundled = load_plan(std::string(ONIONLAB_SOURCE_DIR) + "/configs/d2_faces.toml");
  CHECK(bundled.d == 2);
  CHECK(bundled.n_max == 3);
  CHECK(bundled.replications == 200);
  CHECK(bundled.lambda_grid == std::vector<double>{500, 1000, 2000, 4000, 8000});
}

TEST_CASE("results table and summary") {
  ExperimentPlan p;
  p.n_max = 1;
  p.lambda_grid = {50, 100, 200, 400};
  p.replications = 20;
  p.threads = 1;
  const ExperimentResult res = run_ball_sweep(p);
  const auto rows = result_rows(res);
  const auto path = (scratch_dir() / "results.csv").string();
  write_results_csv(path, rows);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "model,d,n,k,lambda,stat,value,stderr,reps");
  bool has_slope = false;
  for (const auto& r : rows) has_slope = has_slope || r.stat == "faces_mean_slope";
  CHECK(has_slope);
  const auto j = nlohmann::json::parse(result_summary_json(res));
  CHECK(j["plan"]["lambda_grid"].size() == 4);
  CHECK(j["slopes"].size() == 1);
}

TEST_CASE("SVG plots and hashes") {
  const auto path = (scratch_dir() / "plot.svg").string();
  write_svg_plot(path, "a < b", "x", "y", {{"s", {1, 10, 100}, {2, 4, 8}}}, true);
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("<svg", 0) == 0);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
