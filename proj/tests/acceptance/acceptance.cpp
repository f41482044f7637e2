// Acceptance suite: one PASS/FAIL line per criterion, exit code 0 iff all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "onionlab/error.hpp"
#include "onionlab/experiments.hpp"
#include "onionlab/parabolic.hpp"
#include "onionlab/parabolic_estimators.hpp"
#include "onionlab/peeling.hpp"
#include "onionlab/rescale.hpp"
#include "onionlab/sampler.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace onionlab;
using testutil::make_cloud;
using testutil::random_ball;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [miss]");
  }
};

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string f4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::vector<std::vector<double>> random_halfspace(int d, int n, double r, double H, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-r, r), uh(0.0, H);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < n; ++i) {
    std::vector<double> p(d);
    for (int j = 0; j + 1 < d; ++j) p[j] = u(rng);
    p[d - 1] = uh(rng);
    pts.push_back(p);
  }
  return pts;
}

const Window kWide{100.0, 100.0, 10.0};

// Sweeps shared by several criteria.
const ExperimentResult& sweep_d2() {
  static const ExperimentResult res = [] {
    ExperimentPlan p;
    p.d = 2;
    p.n_max = 3;
    p.k_set = {0, 1};
    p.replications = 500;
    p.seed = 20240601;
    p.volumes = true;
    p.mc_directions = 1;  // d = 2 volumes are exact
    return run_ball_sweep(p);
  }();
  return res;
}

const ExperimentResult& sweep_d3() {
  static const ExperimentResult res = [] {
    ExperimentPlan p;
    p.d = 3;
    p.n_max = 3;
    p.k_set = {0, 1, 2};
    p.lambda_grid = {500, 1000, 2000, 4000};
    p.replications = 200;
    p.seed = 20240602;
    return run_ball_sweep(p);
  }();
  return res;
}

Outcome criterion1() {
  Outcome o;
  for (int n = 1; n <= 3; ++n) {
    const SlopeFit f = fit_slope(sweep_d2(), Quantity::Faces, Stat::Mean, n, 0, 0, 200);
    o.require(std::abs(f.slope - 1.0 / 3.0) <= 0.08, "n=" + std::to_string(n) + " slope " + f3(f.slope) + " +- " + f3(f.half_width));
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  for (int n = 1; n <= 3; ++n) {
    const SlopeFit f = fit_slope(sweep_d3(), Quantity::Faces, Stat::Mean, n, 0);
    o.require(std::abs(f.slope - 0.5) <= 0.10, "n=" + std::to_string(n) + " slope " + f3(f.slope) + " +- " + f3(f.half_width));
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  for (int n = 1; n <= 2; ++n) {
    const SlopeFit f = fit_slope(sweep_d2(), Quantity::Faces, Stat::Variance, n, 0);
    o.require(std::abs(f.slope - 1.0 / 3.0) <= 0.15, "n=" + std::to_string(n) + " variance slope " + f3(f.slope) + " +- " + f3(f.half_width));
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (int n = 1; n <= 2; ++n) {
    const SlopeFit f = fit_slope(sweep_d2(), Quantity::Defect, Stat::Mean, n, 2);
    o.require(std::abs(f.slope + 2.0 / 3.0) <= 0.10, "n=" + std::to_string(n) + " defect area slope " + f3(f.slope) + " +- " + f3(f.half_width));
  }
  int excluded = 0;
  for (const auto& b : sweep_d2().blocks) {
    excluded += static_cast<int>(b.reps.size() - replicate_values(b, Quantity::Defect, 2, 2).size());
  }
  o.require(true, "excluded layers " + std::to_string(excluded));
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (int n = 1; n <= 2; ++n) {
    const ConstantEstimate ball = estimate_constant_ball(sweep_d2(), n, 0);
    ParabolicPlan p;
    p.n = n;
    p.k = 0;
    p.d = 2;
    p.window = Window::with_defaults(8.0, n);
    for (int i = 0; i <= 32; ++i) p.h_grid.push_back(0.25 * i);
    p.replications = 2000;
    p.seed = 20240605 + n;
    const ParabolicConstant pc = estimate_constant_parabolic(p);
    const double rel = std::abs(pc.constant.value - ball.value) / ball.value;
    const bool overlap = pc.constant.ci_low <= ball.ci_high && ball.ci_low <= pc.constant.ci_high;
    o.require(rel <= 0.10 && overlap, "n=" + std::to_string(n) + " ball " + f4(ball.value) + " +- " + f4(ball.se) +
                                          " parabolic " + f4(pc.constant.value) + " +- " + f4(pc.constant.se) +
                                          " rel " + f4(rel));
    o.require(pc.tail_ratio < 1e-3, "tail " + f4(pc.tail_ratio));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (int n = 1; n <= 2; ++n) {
    const CltResult c = clt_diagnostic(sweep_d2(), 4, n, 0);
    o.require(c.lambda == 8000.0 && c.reps == 500 && c.ks < 0.08, "n=" + std::to_string(n) + " KS " + f4(c.ks));
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  for (int d : {2, 3}) {
    ExperimentPlan p;
    p.d = d;
    p.n_max = 1;
    p.replications = 100;
    p.seed = 20240607 + d;
    p.full_peel = true;
    if (d == 3) p.lambda_grid = {500, 1000, 2000, 4000};
    const LayerScaling s = layer_count_scaling(p);
    const double target = 2.0 / (d + 1);
    o.require(std::abs(s.fit.slope - target) <= 0.08,
              "d=" + std::to_string(d) + " slope " + f3(s.fit.slope) + " +- " + f3(s.fit.half_width) + " beta " + f4(s.beta));
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  // Score sums over every replication of both sweeps.
  long long checked = 0, failures = 0;
  for (const auto* res : {&sweep_d2(), &sweep_d3()}) {
    for (const auto& b : res->blocks) {
      checked += static_cast<long long>(b.reps.size());
      failures += b.score_identity_failures;
    }
  }
  o.require(failures == 0, "score sums " + std::to_string(checked - failures) + "/" + std::to_string(checked));

  // Monotonicity and additive bound on nested pairs, ball and limit models.
  std::mt19937_64 rng(8);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + t % 2;
    const int ny = 10 + static_cast<int>(rng() % 30);
    const int nx = static_cast<int>(rng() % (ny + 1));
    auto y = random_ball(d, ny, rng);
    std::vector<std::vector<double>> x(y.begin(), y.begin() + nx);
    const auto w = random_ball(d, 1, rng)[0];
    const int lx = layer_index(w, make_cloud(d, x));
    const int ly = layer_index(w, make_cloud(d, y));
    if (!(lx <= ly && ly <= lx + (ny - nx))) ++bad;
  }
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + t % 2;
    const int ny = 10 + static_cast<int>(rng() % 30);
    const int nx = static_cast<int>(rng() % (ny + 1));
    auto y = random_halfspace(d, ny, 4, 6, rng);
    std::vector<std::vector<double>> x(y.begin(), y.begin() + nx);
    const auto w = random_halfspace(d, 1, 2, 3, rng)[0];
    const int lx = parabolic_layer_index(w, make_cloud(d, x), kWide);
    const int ly = parabolic_layer_index(w, make_cloud(d, y), kWide);
    if (!(lx <= ly && ly <= lx + (ny - nx))) ++bad;
  }
  o.require(bad == 0, "nested pairs " + std::to_string(2000 - bad) + "/2000");

  // Caps map to down quasi-paraboloids.
  int cap_bad = 0;
  const double lambdas[] = {100.0, 1e3, 1e4};
  for (int t = 0; t < 10000; ++t) {
    const int d = 2 + t % 2;
    const double lam = lambdas[t % 3];
    double x[3], x0[3];
    detail::uniform_in_ball(d, rng, x);
    detail::uniform_in_ball(d, rng, x0);
    const std::span<const double> xs(x, d), x0s(x0, d);
    const auto w = rescale_point(xs, lam);
    const auto w0 = rescale_point(x0s, lam);
    const Paraboloid down{std::vector<double>(w0.begin(), w0.end() - 1), w0.back(), ParaboloidDirection::Down, lam};
    if (in_cap(xs, x0s) != in_paraboloid(w, down)) ++cap_bad;
  }
  o.require(cap_bad == 0, "cap pairs " + std::to_string(10000 - cap_bad) + "/10000");

  // Up/down duality, finite and infinite scale.
  int dual_bad = 0;
  for (int t = 0; t < 10000; ++t) {
    const int d = 2 + t % 2;
    const double lam = t % 4 == 0 ? std::numeric_limits<double>::infinity() : lambdas[t % 3];
    std::vector<double> w0, w1;
    if (std::isinf(lam)) {
      w0 = random_halfspace(d, 1, 3, 6, rng)[0];
      w1 = random_halfspace(d, 1, 3, 6, rng)[0];
    } else {
      double a[3], b[3];
      detail::uniform_in_ball(d, rng, a);
      detail::uniform_in_ball(d, rng, b);
      w0 = rescale_point(std::span<const double>(a, d), lam);
      w1 = rescale_point(std::span<const double>(b, d), lam);
    }
    const Paraboloid up0{std::vector<double>(w0.begin(), w0.end() - 1), w0.back(), ParaboloidDirection::Up, lam};
    const Paraboloid down1{std::vector<double>(w1.begin(), w1.end() - 1), w1.back(), ParaboloidDirection::Down, lam};
    if (in_paraboloid(w1, up0) != in_paraboloid(w0, down1)) ++dual_bad;
  }
  o.require(dual_bad == 0, "duality pairs " + std::to_string(10000 - dual_bad) + "/10000");

  // Round trips.
  double worst = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const int d = 2 + t % 2;
    const double lam = lambdas[t % 3];
    double x[3];
    detail::uniform_in_ball(d, rng, x);
    const auto back = unrescale_point(rescale_point(std::span<const double>(x, d), lam), lam);
    for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(back[j] - x[j]));
  }
  o.require(worst <= 1e-10, "round trip max error " + std::to_string(worst));
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9);
  for (int d : {2, 3}) {
    int ok_ball = 0, ok_par = 0, ok_crit = 0;
    for (int t = 0; t < 500; ++t) {
      const int n = 1 + static_cast<int>(rng() % 15);
      const auto pts = random_ball(d, n, rng);
      ok_ball += peel(make_cloud(d, pts)).labels == oracle::peel(pts);
      const auto hp = random_halfspace(d, n, 4, 6, rng);
      ok_par += parabolic_peel(make_cloud(d, hp), kWide).labels == oracle::parabolic_peel(hp);
      const auto cloud = make_cloud(d, random_halfspace(d, 1 + static_cast<int>(rng() % 14), 4, 6, rng));
      const auto w = random_halfspace(d, 1, 2, 3, rng)[0];
      const int l = parabolic_layer_index(w, cloud, kWide);
      ok_crit += criterion_check(w, cloud, l) && (l == 1 || !criterion_check(w, cloud, l - 1));
    }
    o.require(ok_ball == 500, "d=" + std::to_string(d) + " peel " + std::to_string(ok_ball) + "/500");
    o.require(ok_par == 500, "parabolic " + std::to_string(ok_par) + "/500");
    o.require(ok_crit == 500, "criterion " + std::to_string(ok_crit) + "/500");
  }
  return o;
}

Outcome criterion10() {
  Outcome o;
  int fixtures = 0, fixtures_ok = 0;
  for (int d : {2, 3}) {
    for (int n = 1; n <= 4; ++n) {
      for (double h0 : {1.0, 8.0}) {
        const PointCloud t = tree_fixture(n, h0, d);
        const auto depth = tree_fixture_depths(n, d);
        const auto dg = parabolic_peel(t, kWide);
        bool ok = true;
        for (std::size_t i = 0; i < t.size(); ++i) ok = ok && dg.labels[i] == n - depth[i];
        ++fixtures;
        fixtures_ok += ok;
      }
    }
  }
  o.require(fixtures_ok == fixtures, "fixtures " + std::to_string(fixtures_ok) + "/" + std::to_string(fixtures));

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int ok = 0;
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + t % 2;
    std::vector<double> w1(d), w0(d);
    double dist2 = 0.0;
    for (int j = 0; j + 1 < d; ++j) {
      w1[j] = u(rng);
      w0[j] = u(rng);
      dist2 += (w0[j] - w1[j]) * (w0[j] - w1[j]);
    }
    w1[d - 1] = dist2 / 2.0 + 0.5 + std::abs(u(rng));
    w0[d - 1] = w1[d - 1] - dist2 / 2.0;
    ok += half_paraboloid_check(w0, w1, 500, static_cast<std::uint64_t>(t));
  }
  o.require(ok == 1000, "half-paraboloid pairs " + std::to_string(ok) + "/1000");
  return o;
}

Outcome criterion11() {
  Outcome o;
  std::vector<BoxCount> boxes;
  auto box = [&](double v0, double v1, double h0, double h1) {
    BoxCount b;
    b.v_lo = {v0};
    b.v_hi = {v1};
    b.h_lo = h0;
    b.h_hi = h1;
    boxes.push_back(b);
  };
  box(-1, 1, 0, 2);
  box(-1, 1, 2, 4);
  box(-1, 1, 10, 12);
  box(-1, 1, 50, 52);
  box(-1, 1, 100, 102);
  box(-1, 1, 200, 202);
  box(10, 12, 0, 2);
  box(-20, -18, 0, 2);
  const auto out = rescaled_intensity_check(2, 4000.0, boxes, 100, 20240611);
  double worst = 0.0;
  for (const auto& b : out) worst = std::max(worst, std::abs(b.mean - b.expected) / b.se);
  o.require(worst <= 3.0, std::to_string(out.size()) + " boxes, worst deviation " + f3(worst) + " se");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"face-count mean exponent, d=2", criterion1},
      {"face-count mean exponent, d=3", criterion2},
      {"face-count variance exponent, d=2", criterion3},
      {"defect area exponent, d=2", criterion4},
      {"limit constant, ball vs parabolic", criterion5},
      {"normal approximation, KS distance", criterion6},
      {"total layer count exponent", criterion7},
      {"exact identities", criterion8},
      {"brute-force oracle agreement", criterion9},
      {"deterministic fixtures", criterion10},
      {"rescaled intensity", criterion11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu %s: %s (%s) [%.0fs]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
