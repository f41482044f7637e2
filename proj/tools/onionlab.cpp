// onionlab command-line front end.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "onionlab/error.hpp"
#include "onionlab/experiments.hpp"
#include "onionlab/io.hpp"
#include "onionlab/parabolic.hpp"
#include "onionlab/parabolic_estimators.hpp"
#include "onionlab/peeling.hpp"
#include "onionlab/rescale.hpp"
#include "onionlab/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace onionlab;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Collects everything needed to reproduce a run and writes it next to the outputs.
class Manifest {
 public:
  Manifest(std::string command_line, std::string config_text, fs::path out_dir)
      : command_line_(std::move(command_line)), config_text_(std::move(config_text)), dir_(std::move(out_dir)) {
    started_ = utc_now();
    config_hash_ = hex(fnv1a(config_text_));
    run_id_ = hex(fnv1a(command_line_ + "\n" + config_text_ + "\n" ONIONLAB_VERSION));
    fs::create_directories(dir_);
  }

  const std::string& run_id() const { return run_id_; }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }
  void output(const std::string& p) { outputs_.push_back(p); }
  void verification(const std::string& name, bool ok) {
    verifications_[name] = ok;
    all_ok_ = all_ok_ && ok;
  }
  bool ok() const { return all_ok_; }

  void write_json(const std::string& name, json j) {
    j["run_id"] = run_id_;
    const std::string p = path(name);
    std::ofstream out(p);
    out << j.dump(2) << "\n";
    out.close();
    if (!out) throw Error("write to " + p + " failed");
    output(p);
  }

  // Returns the manifest path.
  std::string finish() {
    json outs = json::array();
    for (const auto& p : outputs_) {
      if (!fs::exists(p)) throw Error("expected output " + p + " was not written");
      outs.push_back({{"path", p}, {"fnv1a", hex(fnv1a(read_file(p)))}});
    }
    json m;
    m["run_id"] = run_id_;
    m["command_line"] = command_line_;
    m["config"] = config_text_;
    m["config_hash"] = config_hash_;
    m["version"] = ONIONLAB_VERSION;
    m["seeds"] = seeds_;
    m["started"] = started_;
    m["finished"] = utc_now();
    m["outputs"] = outs;
    m["verifications"] = verifications_;
    const std::string p = path("manifest_" + run_id_ + ".json");
    std::ofstream out(p);
    out << m.dump(2) << "\n";
    out.close();
    if (!out) throw Error("write to " + p + " failed");
    return p;
  }

 private:
  std::string command_line_, config_text_;
  fs::path dir_;
  std::string started_, config_hash_, run_id_;
  json seeds_ = json::object();
  json verifications_ = json::object();
  std::vector<std::string> outputs_;
  bool all_ok_ = true;
};

std::string joined_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
  return g;
}

void svg_series(Manifest& m, const ExperimentResult& res) {
  const ExperimentPlan& p = res.plan;
  for (Stat st : {Stat::Mean, Stat::Variance}) {
    std::vector<PlotSeries> series;
    for (int n = 1; n <= p.n_max; ++n) {
      PlotSeries s;
      s.label = "n=" + std::to_string(n) + ", k=" + std::to_string(p.k_set.front());
      for (const auto& b : res.blocks) {
        const Summary sm = summarize(replicate_values(b, Quantity::Faces, n, p.k_set.front()));
        s.x.push_back(b.lambda);
        s.y.push_back(st == Stat::Mean ? sm.mean : sm.variance);
      }
      series.push_back(std::move(s));
    }
    const std::string name = std::string("faces_") + to_string(st) + ".svg";
    write_svg_plot(m.path(name), std::string("face count ") + to_string(st) + " (run " + m.run_id() + ")", "lambda",
                   to_string(st), series, true);
    m.output(m.path(name));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex hull peeling and parabolic hull peeling experiments"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  int threads = 0;
  app.add_option("--out-dir,-o", out_dir, "Directory for outputs and the run manifest");
  app.add_option("--threads", threads, "Worker threads (default: ONIONLAB_THREADS or all cores)");

  // peel
  auto* peel_cmd = app.add_subcommand("peel", "Peel a CSV point cloud or a generated ball sample");
  std::string input;
  int d = 2;
  double lambda = 100.0;
  std::uint64_t seed = 1;
  int max_layers = 0, mc_dirs = 1024, stats_layers = 5;
  peel_cmd->add_option("--input,-i", input, "CSV with header id,x1,...,xd");
  peel_cmd->add_option("--d", d, "Dimension of a generated sample");
  peel_cmd->add_option("--lambda", lambda, "Intensity of a generated sample");
  peel_cmd->add_option("--seed", seed, "Seed of a generated sample");
  peel_cmd->add_option("--max-layers", max_layers, "Stop after this many layers (0 = all)");
  peel_cmd->add_option("--stats-layers", stats_layers, "Layers covered by the statistics");
  peel_cmd->add_option("--mc-directions", mc_dirs, "Projection directions for intrinsic volumes (0 = skip)");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Write a Poisson sample of the ball, optionally rescaled");
  std::uint64_t rep = 0;
  bool rescale = false;
  sample_cmd->add_option("--d", d, "Dimension")->required();
  sample_cmd->add_option("--lambda", lambda, "Intensity")->required();
  sample_cmd->add_option("--seed", seed, "Master seed");
  sample_cmd->add_option("--replication", rep, "Replication index");
  sample_cmd->add_flag("--rescale", rescale, "Also write the rescaled cloud with a JSON sidecar");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a ball-model sweep from a TOML or JSON plan");
  std::string config;
  bool dry_run = false, svg = false;
  sweep_cmd->add_option("config", config, "Plan file (.toml or .json)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_flag("--dry-run", dry_run, "Print the validated plan and exit");
  sweep_cmd->add_flag("--svg", svg, "Write log-log SVG plots");

  // constants
  auto* const_cmd = app.add_subcommand("constants", "Limit constant of E[N_{n,k}] from the parabolic model");
  int n = 1, k = 0, reps = 1000;
  double r = 8.0, h_max = 8.0, dh = 0.25;
  std::string ball_config;
  const_cmd->add_option("--n", n, "Layer");
  const_cmd->add_option("--k", k, "Face dimension");
  const_cmd->add_option("--d", d, "Dimension");
  const_cmd->add_option("--reps", reps, "Replications");
  const_cmd->add_option("--r", r, "Window radius");
  const_cmd->add_option("--h-max", h_max, "Last height node");
  const_cmd->add_option("--dh", dh, "Height step");
  const_cmd->add_option("--seed", seed, "Seed");
  const_cmd->add_option("--ball-config", ball_config, "Also run this ball plan and compare")->check(CLI::ExistingFile);

  // clt
  auto* clt_cmd = app.add_subcommand("clt", "KS distance of standardized face counts to N(0,1)");
  clt_cmd->add_option("--d", d, "Dimension");
  clt_cmd->add_option("--lambda", lambda, "Intensity")->required();
  clt_cmd->add_option("--n", n, "Layer");
  clt_cmd->add_option("--k", k, "Face dimension");
  clt_cmd->add_option("--reps", reps, "Replications (>= 300)");
  clt_cmd->add_option("--seed", seed, "Seed");

  // profile
  auto* prof_cmd = app.add_subcommand("profile", "Rescaled vertex counts across deep layers");
  double t_max = 1.2, t_step = 0.05, beta = 0.0;
  prof_cmd->add_option("--d", d, "Dimension");
  prof_cmd->add_option("--lambda", lambda, "Intensity")->required();
  prof_cmd->add_option("--reps", reps, "Replications");
  prof_cmd->add_option("--seed", seed, "Seed");
  prof_cmd->add_option("--t-max", t_max, "Largest rescaled depth");
  prof_cmd->add_option("--t-step", t_step, "Rescaled depth step");
  prof_cmd->add_option("--beta", beta, "Rescaled total layer count (estimated when omitted)");

  // fixture
  auto* fix_cmd = app.add_subcommand("fixture", "Write the tree fixture and verify its layers");
  double h0 = 8.0;
  fix_cmd->add_option("--n", n, "Generations")->required();
  fix_cmd->add_option("--h0", h0, "Root height");
  fix_cmd->add_option("--d", d, "Dimension");

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string cmdline = joined_args(argc, argv);
    if (*peel_cmd) {
      std::string cfg = cmdline;
      PointCloud cloud(d);
      if (!input.empty()) {
        cloud = read_point_cloud_csv(input);
        cfg = read_file(input);
      } else {
        cloud = sample_ball_poisson(d, lambda, {seed, 0});
      }
      Manifest m(cmdline, cfg, out_dir);
      m.seed("sample", seed);
      PeelOptions opt;
      opt.max_layers = max_layers;
      const PeelingDiagram dg = peel(cloud, opt);
      const LayerStats st = layer_stats(dg, stats_layers, dg.cloud.dim() >= 2 ? mc_dirs : 0);
      auto j = json::parse(diagram_json(dg, st));
      m.write_json("diagram.json", j);
      write_layer_stats_csv(m.path("layer_stats.csv"), st);
      m.output(m.path("layer_stats.csv"));
      std::cout << "points " << cloud.size() << ", layers " << dg.n_layers << (dg.complete ? "" : " (cut short)")
                << "\n";
      std::cout << "manifest " << m.finish() << "\n";
      return m.ok() ? 0 : 1;
    }
    if (*sample_cmd) {
      Manifest m(cmdline, cmdline, out_dir);
      m.seed("master", seed);
      m.seed("replication", rep);
      const PointCloud cloud = sample_ball_poisson(d, lambda, {seed, rep});
      write_point_cloud_csv(m.path("sample.csv"), cloud);
      m.output(m.path("sample.csv"));
      if (rescale) {
        write_rescaled_cloud(m.path("rescaled.csv"), to_rescaled(cloud, lambda));
        m.output(m.path("rescaled.csv"));
        m.output(m.path("rescaled.csv.json"));
      }
      std::cout << "points " << cloud.size() << "\nmanifest " << m.finish() << "\n";
      return 0;
    }
    if (*sweep_cmd) {
      ExperimentPlan plan = load_plan(config);
      if (threads > 0) plan.threads = threads;
      if (dry_run) {
        std::cout << plan_json(plan) << "\n";
        return 0;
      }
      if (plan.model != Model::Ball) throw InvalidInput("sweep: only ball plans can be swept; use `constants`");
      Manifest m(cmdline, read_file(config), out_dir);
      m.seed("master", plan.seed);
      const ExperimentResult res = run_ball_sweep(plan);
      write_results_csv(m.path("results.csv"), result_rows(res));
      m.output(m.path("results.csv"));
      m.write_json("summary.json", json::parse(result_summary_json(res)));
      if (svg) svg_series(m, res);
      bool identity = true;
      for (const auto& b : res.blocks) identity = identity && b.score_identity_failures == 0;
      m.verification("score_identity", identity);
      std::cout << "manifest " << m.finish() << "\n";
      return m.ok() ? 0 : 1;
    }
    if (*const_cmd) {
      Manifest m(cmdline, ball_config.empty() ? cmdline : read_file(ball_config), out_dir);
      ParabolicPlan pp;
      pp.n = n;
      pp.k = k;
      pp.d = d;
      pp.window = Window::with_defaults(r, n);
      pp.h_grid = grid(0.0, h_max, dh);
      pp.replications = reps;
      pp.seed = seed;
      pp.throw_on_window = false;
      pp.threads = threads;
      m.seed("parabolic", seed);
      const ParabolicConstant pc = estimate_constant_parabolic(pp);
      json out = json::parse(parabolic_summary_json(pp, pc));
      std::printf("parabolic C = %.5f +- %.5f (tail ratio %.2e, window shift %.2f se)\n", pc.constant.value,
                  pc.constant.se, pc.tail_ratio, pc.worst_window_shift);
      m.verification("window", pc.window_ok);
      if (!ball_config.empty()) {
        ExperimentPlan plan = load_plan(ball_config);
        if (threads > 0) plan.threads = threads;
        m.seed("ball", plan.seed);
        const ConstantEstimate c = estimate_constant_ball(run_ball_sweep(plan), n, k);
        const double rel = std::abs(c.value - pc.constant.value) / c.value;
        out["ball"] = {{"value", c.value}, {"se", c.se}, {"relative_difference", rel}};
        std::printf("ball C = %.5f +- %.5f, relative difference %.4f\n", c.value, c.se, rel);
      }
      m.write_json("constants.json", out);
      std::cout << "manifest " << m.finish() << "\n";
      return m.ok() ? 0 : 1;
    }
    if (*clt_cmd) {
      Manifest m(cmdline, cmdline, out_dir);
      m.seed("master", seed);
      ExperimentPlan plan;
      plan.d = d;
      plan.n_max = n;
      plan.k_set = {k};
      plan.replications = reps;
      plan.seed = seed;
      plan.threads = threads;
      const CltResult c = clt_diagnostic(plan, lambda, n, k);
      std::printf("KS = %.5f over %d replications (5%% critical value %.5f)\n", c.ks, c.reps, c.critical_5pct);
      m.write_json("clt.json", {{"lambda", c.lambda}, {"n", c.n}, {"k", c.k}, {"reps", c.reps}, {"ks", c.ks},
                                {"critical_5pct", c.critical_5pct}});
      std::cout << "manifest " << m.finish() << "\n";
      return 0;
    }
    if (*prof_cmd) {
      Manifest m(cmdline, cmdline, out_dir);
      m.seed("master", seed);
      if (!(beta > 0.0)) {
        ExperimentPlan plan;
        plan.d = d;
        plan.n_max = 1;
        plan.lambda_grid = {lambda};
        plan.replications = std::max(2, reps);
        plan.seed = seed ^ 0x62657461ULL;
        plan.full_peel = true;
        plan.threads = threads;
        m.seed("beta", plan.seed);
        beta = estimate_constant_ball(run_ball_sweep(plan), 1, 0, Quantity::TotalLayers).value;
      }
      const auto prof = layer_profile(lambda, grid(t_step, t_max, t_step), reps, seed, d, beta, threads);
      json rows = json::array();
      PlotSeries est{"estimate", {}, {}}, conj{"conjectured", {}, {}};
      for (const auto& p : prof) {
        rows.push_back({{"t", p.t}, {"layer", p.layer}, {"estimate", p.estimate}, {"se", p.se},
                        {"conjecture", p.conjecture}});
        est.x.push_back(p.t);
        est.y.push_back(p.estimate);
        conj.x.push_back(p.t);
        conj.y.push_back(p.conjecture);
      }
      m.write_json("profile.json", {{"beta", beta}, {"lambda", lambda}, {"d", d}, {"points", rows}});
      write_svg_plot(m.path("profile.svg"), "layer profile (run " + m.run_id() + ")", "t", "rescaled vertices",
                     {est, conj}, false);
      m.output(m.path("profile.svg"));
      std::cout << "beta " << beta << "\nmanifest " << m.finish() << "\n";
      return 0;
    }
    if (*fix_cmd) {
      Manifest m(cmdline, cmdline, out_dir);
      const PointCloud tree = tree_fixture(n, h0, d);
      const auto depth = tree_fixture_depths(n, d);
      Window w;
      double extent = 0.0, top = 0.0;
      for (std::size_t i = 0; i < tree.size(); ++i) {
        for (int j = 0; j + 1 < d; ++j) extent = std::max(extent, std::abs(tree.coord(i, j)));
        top = std::max(top, tree.coord(i, d - 1));
      }
      w.r = std::sqrt(static_cast<double>(d - 1)) * extent + 1.0;
      w.H = top + 1.0;
      const ParabolicDiagram dg = parabolic_peel(tree, w);
      bool ok = true;
      for (std::size_t i = 0; i < tree.size(); ++i) ok = ok && dg.labels[i] == n - depth[i];
      write_point_cloud_csv(m.path("fixture.csv"), tree);
      m.output(m.path("fixture.csv"));
      m.verification("layers_match_depths", ok);
      m.write_json("fixture_report.json", {{"n", n}, {"h0", h0}, {"d", d}, {"points", tree.size()},
                                           {"verdict", ok ? "PASS" : "FAIL"}});
      std::cout << "verification " << (ok ? "PASS" : "FAIL") << "\nmanifest " << m.finish() << "\n";
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
