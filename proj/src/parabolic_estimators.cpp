#include "onionlab/parabolic_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "onionlab/error.hpp"
#include "onionlab/parallel.hpp"
#include "onionlab/sampler.hpp"
#include "onionlab/stats.hpp"

namespace onionlab {

namespace {

constexpr std::uint64_t kDoublingStream = 0x646f75626c65ULL;

double as_double(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

// Trapezoid weights, so integrals become dot products with per-node values.
std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    w[i - 1] += 0.5 * (x[i] - x[i - 1]);
    w[i] += 0.5 * (x[i] - x[i - 1]);
  }
  return w;
}

ConstantEstimate from_summary(const Summary& s, double scale) {
  ConstantEstimate c;
  c.value = s.mean * scale;
  c.se = s.se_mean * std::abs(scale);
  c.ci_low = c.value - 1.96 * c.se;
  c.ci_high = c.value + 1.96 * c.se;
  c.reps = s.count;
  return c;
}

PointCloud limit_cloud(const ParabolicPlan& plan, std::size_t rep) {
  return sample_halfspace_poisson(plan.d - 1, plan.window.r, plan.window.H, 1.0, {plan.seed, rep});
}

// Base cloud plus independent points of the doubled window lying outside the base window.
PointCloud doubled_cloud(const ParabolicPlan& plan, const PointCloud& base, std::size_t rep) {
  const Window& w = plan.window;
  const double r2 = 2.0 * w.r;
  const double H2 = std::max(w.H, r2 * r2 / 8.0);
  const PointCloud extra = sample_halfspace_poisson(plan.d - 1, r2, H2, 1.0, {stream_key({plan.seed, kDoublingStream}), rep});
  std::vector<PointId> ids = base.ids();
  std::vector<double> coords = base.coords();
  PointId next = base.empty() ? 0 : base.max_id() + 1;
  const int m = plan.d - 1;
  for (std::size_t i = 0; i < extra.size(); ++i) {
    double v2 = 0.0;
    for (int j = 0; j < m; ++j) v2 += extra.coord(i, j) * extra.coord(i, j);
    if (v2 <= w.r * w.r && extra.coord(i, m) <= w.H) continue;
    ids.push_back(next++);
    const auto p = extra.point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointCloud(plan.d, std::move(ids), std::move(coords));
}

std::vector<double> node_scores(const ParabolicPlan& plan, const PointCloud& cloud) {
  std::vector<std::vector<double>> pts;
  for (double h : plan.h_grid) {
    std::vector<double> w(plan.d, 0.0);
    w.back() = h;
    pts.push_back(std::move(w));
  }
  const auto sc = limit_scores(pts, cloud, plan.n, plan.k);
  std::vector<double> out(sc.size());
  for (std::size_t i = 0; i < sc.size(); ++i) out[i] = as_double(sc[i]);
  return out;
}

}  // namespace

double sphere_surface(int d) {
  if (d < 1) throw InvalidInput("sphere_surface: d must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

void ParabolicPlan::validate() const {
  if (d < 2) throw InvalidInput("parabolic plan: d must be >= 2");
  if (n < 1 || k < 0 || k > d) throw InvalidInput("parabolic plan: need n >= 1 and 0 <= k <= d");
  if (h_grid.size() < 2) throw InvalidInput("parabolic plan: h_grid needs >= 2 nodes");
  if (h_grid.front() < 0.0) throw InvalidInput("parabolic plan: h_grid must start at h >= 0");
  for (std::size_t i = 1; i < h_grid.size(); ++i) {
    if (!(h_grid[i] > h_grid[i - 1])) throw InvalidInput("parabolic plan: h_grid must be strictly increasing");
  }
  if (h_grid.back() > window.H) throw InvalidInput("parabolic plan: h_grid exceeds the window height");
  if (!(window.r > 0.0) || !(window.H > 0.0)) throw InvalidInput("parabolic plan: window must be non-empty");
  if (replications < 2) throw InvalidInput("parabolic plan: replications must be >= 2");
}

ParabolicConstant estimate_constant_parabolic(const ParabolicPlan& plan) {
  plan.validate();
  const std::size_t R = static_cast<std::size_t>(plan.replications);
  const std::size_t J = plan.h_grid.size();
  std::vector<std::vector<double>> xi(R), shift(R);
  parallel_for(R, resolve_threads(plan.threads), [&](std::size_t i) {
    const PointCloud cloud = limit_cloud(plan, i);
    xi[i] = node_scores(plan, cloud);
    if (plan.window_check) {
      const auto big = node_scores(plan, doubled_cloud(plan, cloud, i));
      shift[i].resize(J);
      for (std::size_t j = 0; j < J; ++j) shift[i][j] = big[j] - xi[i][j];
    }
  });

  ParabolicConstant out;
  std::vector<double> integral(R), integral_sq(R);
  for (std::size_t i = 0; i < R; ++i) {
    std::vector<double> sq(J);
    for (std::size_t j = 0; j < J; ++j) sq[j] = xi[i][j] * xi[i][j];
    integral[i] = trapezoid(plan.h_grid, xi[i]);
    integral_sq[i] = trapezoid(plan.h_grid, sq);
  }
  out.constant = from_summary(summarize(integral), sphere_surface(plan.d));
  out.i1 = from_summary(summarize(integral_sq), 1.0);

  double peak = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> col(R), col_sq(R);
    for (std::size_t i = 0; i < R; ++i) {
      col[i] = xi[i][j];
      col_sq[i] = xi[i][j] * xi[i][j];
    }
    const Summary s = summarize(col), s2 = summarize(col_sq);
    NodeEstimate e;
    e.h = plan.h_grid[j];
    e.mean = s.mean;
    e.se = s.se_mean;
    e.mean_sq = s2.mean;
    e.se_sq = s2.se_mean;
    if (plan.window_check) {
      for (std::size_t i = 0; i < R; ++i) col[i] = shift[i][j];
      const Summary sh = summarize(col);
      e.window_shift = sh.mean;
      e.window_shift_se = sh.se_mean;
      if (e.window_shift != 0.0) {
        const double ratio = e.se > 0.0 ? std::abs(e.window_shift) / e.se : std::numeric_limits<double>::infinity();
        out.worst_window_shift = std::max(out.worst_window_shift, ratio);
      }
    }
    peak = std::max(peak, e.mean);
    out.nodes.push_back(e);
  }
  out.tail_ratio = peak > 0.0 ? out.nodes.back().mean / peak : 0.0;
  out.window_ok = out.worst_window_shift <= 2.0;
  if (!out.window_ok && plan.throw_on_window) {
    throw WindowTooSmall("estimate_constant_parabolic: doubling the window moves a node estimate by " +
                         std::to_string(out.worst_window_shift) + " standard errors");
  }
  return out;
}

namespace {

struct TwoPointSamples {
  // Per replication and query: xi0 alone, xi1 alone, and the joint product.
  std::vector<std::vector<double>> x0, x1, xy;
};

TwoPointSamples sample_two_point(const ParabolicPlan& plan, const std::vector<TwoPointQuery>& queries) {
  const std::size_t R = static_cast<std::size_t>(plan.replications);
  TwoPointSamples s;
  s.x0.assign(R, std::vector<double>(queries.size()));
  s.x1 = s.x0;
  s.xy = s.x0;
  parallel_for(R, resolve_threads(plan.threads), [&](std::size_t i) {
    const PointCloud cloud = limit_cloud(plan, i);
    std::map<std::vector<double>, double> single;
    auto alone = [&](const std::vector<double>& w) {
      auto it = single.find(w);
      if (it != single.end()) return it->second;
      const double v = as_double(limit_scores(std::span(&w, 1), cloud, plan.n, plan.k)[0]);
      single.emplace(w, v);
      return v;
    };
    for (std::size_t q = 0; q < queries.size(); ++q) {
      std::vector<std::vector<double>> pts(2, std::vector<double>(plan.d, 0.0));
      pts[0].back() = queries[q].h0;
      std::copy(queries[q].v1.begin(), queries[q].v1.end(), pts[1].begin());
      pts[1].back() = queries[q].h1;
      s.x0[i][q] = alone(pts[0]);
      s.x1[i][q] = alone(pts[1]);
      const auto joint = joint_limit_scores(pts, cloud, plan.n, plan.k);
      s.xy[i][q] = as_double(joint[0]) * as_double(joint[1]);
    }
  });
  return s;
}

}  // namespace

std::vector<TwoPointNode> estimate_two_point(const ParabolicPlan& plan, const std::vector<TwoPointQuery>& queries) {
  plan.validate();
  for (const auto& q : queries) {
    if (static_cast<int>(q.v1.size()) != plan.d - 1) throw InvalidInput("estimate_two_point: v1 must have d-1 entries");
    if (q.h0 < 0.0 || q.h1 < 0.0) throw InvalidInput("estimate_two_point: heights must be >= 0");
  }
  const TwoPointSamples s = sample_two_point(plan, queries);
  const std::size_t R = s.x0.size();
  std::vector<TwoPointNode> out;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    std::vector<double> a(R), b(R), ab(R);
    for (std::size_t i = 0; i < R; ++i) {
      a[i] = s.x0[i][q];
      b[i] = s.x1[i][q];
      ab[i] = s.xy[i][q];
    }
    const double ma = summarize(a).mean, mb = summarize(b).mean, mab = summarize(ab).mean;
    std::vector<double> psi(R);
    for (std::size_t i = 0; i < R; ++i) psi[i] = ab[i] - mb * a[i] - ma * b[i];
    TwoPointNode node;
    node.query = queries[q];
    node.joint = mab;
    node.single0 = ma;
    node.single1 = mb;
    node.c = mab - ma * mb;
    node.se = summarize(psi).se_mean;
    out.push_back(std::move(node));
  }
  return out;
}

VarianceConstant estimate_variance_constant(const ParabolicPlan& plan, double v_max, int v_cells,
                                            const ExperimentResult* ball_sweep) {
  plan.validate();
  if (plan.d > 3) throw InvalidInput("estimate_variance_constant: I2 is only available for d <= 3");
  if (!(v_max > 0.0) || v_max > plan.window.r) throw InvalidInput("estimate_variance_constant: need 0 < v_max <= r");
  if (v_cells < 1) throw InvalidInput("estimate_variance_constant: v_cells must be >= 1");

  // I1 from squared node scores.
  ParabolicPlan single = plan;
  single.window_check = false;
  const ParabolicConstant pc = estimate_constant_parabolic(single);

  // I2: radial reduction of the v1 integral, |v1| = rho at cell midpoints.
  const double drho = v_max / v_cells;
  std::vector<TwoPointQuery> queries;
  std::vector<double> weights;
  const auto wh = trapezoid_weights(plan.h_grid);
  for (std::size_t a = 0; a < plan.h_grid.size(); ++a) {
    for (std::size_t b = 0; b < plan.h_grid.size(); ++b) {
      for (int c = 0; c < v_cells; ++c) {
        const double rho = (c + 0.5) * drho;
        TwoPointQuery q;
        q.h0 = plan.h_grid[a];
        q.h1 = plan.h_grid[b];
        q.v1.assign(plan.d - 1, 0.0);
        q.v1[0] = rho;
        const double shell = plan.d == 2 ? 2.0 : 2.0 * std::numbers::pi * rho;
        queries.push_back(std::move(q));
        weights.push_back(wh[a] * wh[b] * shell * drho);
      }
    }
  }
  const TwoPointSamples s = sample_two_point(plan, queries);
  const std::size_t R = s.x0.size();
  std::vector<double> m0(queries.size(), 0.0), m1(queries.size(), 0.0), m01(queries.size(), 0.0);
  for (std::size_t i = 0; i < R; ++i) {
    for (std::size_t q = 0; q < queries.size(); ++q) {
      m0[q] += s.x0[i][q] / R;
      m1[q] += s.x1[i][q] / R;
      m01[q] += s.xy[i][q] / R;
    }
  }
  double i2 = 0.0;
  for (std::size_t q = 0; q < queries.size(); ++q) i2 += weights[q] * (m01[q] - m0[q] * m1[q]);
  std::vector<double> psi(R, 0.0);
  for (std::size_t i = 0; i < R; ++i) {
    for (std::size_t q = 0; q < queries.size(); ++q) {
      psi[i] += weights[q] * (s.xy[i][q] - m1[q] * s.x0[i][q] - m0[q] * s.x1[i][q]);
    }
  }
  VarianceConstant out;
  out.i1 = pc.i1;
  out.i2.value = i2;
  out.i2.se = summarize(psi).se_mean;
  out.i2.ci_low = i2 - 1.96 * out.i2.se;
  out.i2.ci_high = i2 + 1.96 * out.i2.se;
  out.i2.reps = static_cast<int>(R);

  // Both parts share clouds; adding the SEs bounds the SE of the sum.
  const double S = sphere_surface(plan.d);
  out.total.value = S * (out.i1.value + out.i2.value);
  out.total.se = S * (out.i1.se + out.i2.se);
  out.total.ci_low = out.total.value - 1.96 * out.total.se;
  out.total.ci_high = out.total.value + 1.96 * out.total.se;
  out.total.reps = static_cast<int>(R);
  if (ball_sweep) out.ball = estimate_variance_ball(*ball_sweep, plan.n, plan.k);
  return out;
}

}  // namespace onionlab
