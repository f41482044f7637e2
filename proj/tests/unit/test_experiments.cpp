#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "onionlab/error.hpp"
#include "onionlab/experiments.hpp"
#include "onionlab/parabolic_estimators.hpp"
#include "onionlab/parallel.hpp"
#include "onionlab/stats.hpp"

using namespace onionlab;

namespace {

ExperimentPlan small_plan() {
  ExperimentPlan p;
  p.d = 2;
  p.n_max = 2;
  p.k_set = {0, 1};
  p.lambda_grid = {50, 100, 200, 400};
  p.replications = 20;
  p.seed = 11;
  p.threads = 1;
  return p;
}

}  // namespace

TEST_CASE("summary statistics") {
  const std::vector<double> v{1, 2, 3, 4};
  const Summary s = summarize(v);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.se_mean == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(s.count == 4);
}

TEST_CASE("KS calibration on normal samples") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int n : {300, 1000, 4000}) {
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    CHECK(ks_standard_normal(v) < 1.36 / std::sqrt(n));
  }
  // Uniform data is far from normal once enough points are drawn.
  std::uniform_real_distribution<double> u;
  std::vector<double> w(20000);
  for (double& x : w) x = std::exp(3.0 * u(rng));
  CHECK(ks_standard_normal(w) > 0.05);
}

TEST_CASE("KS counts both sides of a tie") {
  // Standardized values are -sqrt(3)/2 (twice) and +sqrt(3)/2 (twice).
  const std::vector<double> v{0, 0, 1, 1};
  const double z = std::sqrt(3.0) / 2.0;
  const double phi = 0.5 * std::erfc(z / std::sqrt(2.0));
  CHECK(ks_standard_normal(v) == doctest::Approx(0.5 - phi));
  CHECK_THROWS_AS(ks_standard_normal(std::vector<double>{1, 1, 1}), InvalidInput);
}

TEST_CASE("t quantiles") {
  CHECK(t_quantile_975(19) == doctest::Approx(2.093));
  CHECK(t_quantile_975(1000) == doctest::Approx(1.96).epsilon(0.01));
}

TEST_CASE("log-log regression recovers a synthetic exponent") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  const std::vector<double> lambdas{500, 1000, 2000, 4000, 8000};
  auto synthetic = [&](double b, Stat stat) {
    std::vector<std::vector<double>> samples;
    for (double l : lambdas) {
      std::vector<double> s(200);
      for (double& x : s) {
        x = stat == Stat::Mean ? 3.0 * std::pow(l, b) * (1.0 + 0.1 * g(rng)) : 2.0 * std::pow(l, b / 2.0) * g(rng);
      }
      samples.push_back(std::move(s));
    }
    return fit_loglog(lambdas, samples, stat);
  };
  // The half-width is a 95% interval: check its coverage over many synthetic series.
  for (Stat stat : {Stat::Mean, Stat::Variance}) {
    for (double b : {1.0 / 3.0, -2.0 / 3.0}) {
      int covered = 0;
      for (int t = 0; t < 100; ++t) {
        const SlopeFit f = synthetic(b, stat);
        CHECK(f.groups == 20);
        CHECK(f.points == 5);
        if (std::abs(f.slope - b) <= f.half_width) ++covered;
      }
      CHECK(covered >= 88);
    }
  }
  const std::vector<std::vector<double>> three(3, std::vector<double>(40, 1.0));
  CHECK_THROWS_AS(fit_loglog({1, 2, 3}, three, Stat::Mean), InvalidInput);
}

TEST_CASE("plan validation") {
  ExperimentPlan p = small_plan();
  CHECK_NOTHROW(p.validate());
  p.lambda_grid = {100, 100, 200, 400};
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = small_plan();
  p.replications = 1;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = small_plan();
  p.k_set = {3};
  CHECK_THROWS_AS(p.validate(), InvalidInput);
}

TEST_CASE("ball sweep is reproducible and schedule independent") {
  ExperimentPlan p = small_plan();
  p.volumes = true;
  const ExperimentResult a = run_ball_sweep(p);
  p.threads = 3;
  const ExperimentResult b = run_ball_sweep(p);
  REQUIRE(a.blocks.size() == 4);
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    CHECK(a.blocks[i].score_identity_failures == 0);
    for (std::size_t r = 0; r < a.blocks[i].reps.size(); ++r) {
      CHECK(a.blocks[i].reps[r].faces == b.blocks[i].reps[r].faces);
      CHECK(a.blocks[i].reps[r].n_points == b.blocks[i].reps[r].n_points);
      // Polygons have as many edges as vertices.
      CHECK(a.blocks[i].reps[r].faces[0][0] == a.blocks[i].reps[r].faces[0][1]);
      // Defect area and half perimeter are positive for a polygon inside the disk.
      CHECK(a.blocks[i].reps[r].defects[0][2] > 0.0);
      CHECK(a.blocks[i].reps[r].defects[0][1] > 0.0);
    }
  }
  p.seed = 12;
  const ExperimentResult c = run_ball_sweep(p);
  CHECK(c.blocks[0].reps[0].n_points != a.blocks[0].reps[0].n_points);
}

TEST_CASE("constants, monotonicity table and CLT wrapper") {
  ExperimentPlan p = small_plan();
  const ExperimentResult res = run_ball_sweep(p);
  const ConstantEstimate c = estimate_constant_ball(res, 1, 0);
  const auto v = replicate_values(res.blocks.back(), Quantity::Faces, 1, 0);
  const Summary s = summarize(v);
  CHECK(c.value == doctest::Approx(s.mean * std::pow(400.0, -1.0 / 3.0)));
  CHECK(c.value > 3.0 * c.se);
  CHECK(c.reps == 20);

  const auto table = monotonicity_table(res, 0);
  REQUIRE(table.size() == 2);
  CHECK(!table[0].flag.empty());
  CHECK(table[1].flag.empty());
  p.n_max = 1;
  p.k_set = {0};
  CHECK(monotonicity_table(run_ball_sweep(p), 0).size() == 1);

  const CltResult clt = clt_diagnostic(res, 3, 1, 0);
  CHECK(clt.reps == 20);
  CHECK(clt.ks > 0.0);
  CHECK_THROWS_AS(clt_diagnostic(small_plan(), 100.0, 1, 0), InvalidInput);
}

TEST_CASE("layer counts and profile") {
  ExperimentPlan p = small_plan();
  p.full_peel = true;
  p.n_max = 1;
  p.k_set = {0};
  const ExperimentResult res = run_ball_sweep(p);
  const LayerScaling s = layer_count_scaling(res);
  CHECK(s.beta > 0.0);
  CHECK(s.fit.slope > 0.3);
  p.full_peel = false;
  CHECK_THROWS_AS(layer_count_scaling(run_ball_sweep(p)), InvalidInput);

  const auto prof = layer_profile(400.0, {0.01, 0.5, 3.0}, 10, 3, 2, s.beta, 1);
  REQUIRE(prof.size() == 3);
  CHECK(prof[0].layer == 1);
  CHECK(prof[0].estimate > prof[1].estimate);
  CHECK(prof[2].estimate == 0.0);
  CHECK(prof[2].conjecture == 0.0);
}

TEST_CASE("intensity check integrates the density") {
  BoxCount b;
  b.v_lo = {0.0};
  b.v_hi = {1.0};
  b.h_lo = 1.0;
  b.h_hi = 2.0;
  const double lambda = 4000.0;
  const auto out = rescaled_intensity_check(2, lambda, {b}, 10, 4, 1);
  // In d = 2 the density is 1 - lambda^(-2/3) h, independent of v.
  CHECK(out[0].expected == doctest::Approx(1.0 - std::pow(lambda, -2.0 / 3.0) * 1.5).epsilon(1e-9));
  CHECK(out[0].mean > 0.0);
  BoxCount bad = b;
  bad.v_lo = {0.0, 0.0};
  CHECK_THROWS_AS(rescaled_intensity_check(2, lambda, {bad}, 10, 4, 1), InvalidInput);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw InvalidInput("seven");
                  }),
                  InvalidInput);
  CHECK(resolve_threads(5) == 5);
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("sphere surface") {
  CHECK(sphere_surface(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(sphere_surface(3) == doctest::Approx(4.0 * std::numbers::pi));
}

TEST_CASE("parabolic constant on a small grid") {
  ParabolicPlan p;
  p.n = 1;
  p.window = Window::with_defaults(6.0, 1);
  for (int i = 0; i <= 16; ++i) p.h_grid.push_back(0.25 * i);
  p.replications = 40;
  p.seed = 3;
  p.threads = 1;
  const ParabolicConstant c = estimate_constant_parabolic(p);
  // A point inserted at height 0 is always a vertex of the first layer.
  CHECK(c.nodes[0].mean == 1.0);
  CHECK(c.nodes[0].se == 0.0);
  CHECK(c.nodes.back().mean < c.nodes[0].mean);
  CHECK(c.constant.value > 0.0);
  CHECK(c.i1.value > 0.0);
  CHECK(c.i1.value <= c.constant.value / sphere_surface(2) + 1e-12);
  CHECK(c.window_ok);

  ParabolicPlan bad = p;
  bad.h_grid = {0.0, 1.0, 0.5};
  CHECK_THROWS_AS(estimate_constant_parabolic(bad), InvalidInput);
}

TEST_CASE("two-point correlations") {
  ParabolicPlan p;
  p.n = 1;
  p.window = Window::with_defaults(8.0, 1);
  p.h_grid = {0.0, 1.0};
  p.replications = 300;
  p.seed = 9;
  p.threads = 1;
  const std::vector<TwoPointQuery> q{{0.3, {0.3}, 0.3}, {0.3, {-0.3}, 0.3}, {0.3, {6.0}, 0.3}};
  const auto c = estimate_two_point(p, q);
  REQUIRE(c.size() == 3);
  CHECK(std::abs(c[0].c - c[1].c) <= 3.0 * std::hypot(c[0].se, c[1].se));
  // Correlation decays with distance.
  CHECK(std::abs(c[2].c) < 0.02);
  CHECK(std::abs(c[2].c) < std::abs(c[0].c) / 3.0);
  CHECK(std::abs(c[0].c) > 2.0 * c[0].se);

  ParabolicPlan p4 = p;
  p4.d = 4;
  CHECK_THROWS_AS(estimate_variance_constant(p4, 1.0, 2), InvalidInput);
}
