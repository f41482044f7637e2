#include "onionlab/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "lattice_build.hpp"
#include "onionlab/error.hpp"
#include "onionlab/rescale.hpp"
#include "onionlab/sampler.hpp"
#include "peel_engine.hpp"

namespace onionlab {

namespace {

void check_halfspace(const PointCloud& cloud) {
  if (cloud.dim() < 2) throw InvalidInput("parabolic: points need dimension >= 2");
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.coord(i, cloud.dim() - 1) < 0.0) {
      throw InvalidInput("parabolic: negative height at id " + std::to_string(cloud.id(i)));
    }
  }
}

void check_window(const PointCloud& cloud, const Window& window) {
  const int m = cloud.dim() - 1;
  const double r2 = window.r * window.r * (1.0 + 1e-12);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double v2 = 0.0;
    for (int j = 0; j < m; ++j) v2 += cloud.coord(i, j) * cloud.coord(i, j);
    if (v2 > r2 || cloud.coord(i, m) > window.H) {
      throw InvalidInput("parabolic_peel: point " + std::to_string(cloud.id(i)) + " lies outside the window");
    }
  }
}

// Peel of cloud + {w}; returns the run and the row of w.
detail::PeelRun peel_with(std::span<const double> w, const PointCloud& cloud, int max_layers, detail::Row& row,
                          PointCloud& joint, std::unique_ptr<detail::ExactSource>& src) {
  if (static_cast<int>(w.size()) != cloud.dim()) throw InvalidInput("parabolic: dimension mismatch");
  joint = cloud.with_point(cloud.empty() ? 0 : cloud.max_id() + 1, w);
  check_halfspace(joint);
  src = std::make_unique<detail::ExactSource>(detail::ExactSource::lifted(joint.dim(), joint.coords()));
  const detail::PointView view(*src);
  row = static_cast<detail::Row>(joint.size() - 1);
  return detail::peel_rows(view, detail::HullMode::Lower, max_layers, row);
}

}  // namespace

Window Window::with_defaults(double r, int n) {
  Window w;
  w.r = r;
  w.H = std::max(20.0, r * r / 8.0);
  w.r_inner = r / std::pow(2.0, n + 1);
  return w;
}

LiftedCloud lift(const PointCloud& cloud) {
  check_halfspace(cloud);
  LiftedCloud lc;
  lc.base = cloud;
  const int m = cloud.dim() - 1;
  lc.z.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double v2 = 0.0;
    for (int j = 0; j < m; ++j) v2 += cloud.coord(i, j) * cloud.coord(i, j);
    lc.z[i] = cloud.coord(i, m) + v2 / 2.0;
  }
  return lc;
}

int ParabolicDiagram::layer_of(PointId id) const { return labels[cloud.index_or_throw(id)]; }

bool ParabolicDiagram::in_inner_window(std::size_t index) const {
  double v2 = 0.0;
  for (int j = 0; j + 1 < cloud.dim(); ++j) v2 += cloud.coord(index, j) * cloud.coord(index, j);
  return v2 <= window.r_inner * window.r_inner;
}

ParabolicDiagram parabolic_peel(const PointCloud& cloud, const Window& window, int max_layers) {
  check_halfspace(cloud);
  check_window(cloud, window);
  ParabolicDiagram dg;
  dg.cloud = cloud;
  dg.window = window;
  if (cloud.empty()) return dg;
  const auto src = detail::ExactSource::lifted(cloud.dim(), cloud.coords());
  const detail::PointView view(src);
  auto run = detail::peel_rows(view, detail::HullMode::Lower, max_layers);
  dg.labels = std::move(run.labels);
  dg.complete = run.complete;
  dg.n_layers = static_cast<int>(run.layers.size());
  for (const auto& hc : run.layers) dg.layers.push_back(detail::to_face_lattice(hc, view, cloud));
  return dg;
}

int parabolic_layer_index(std::span<const double> w, const PointCloud& cloud, const Window& window) {
  check_window(cloud, window);
  detail::Row row = 0;
  PointCloud joint;
  std::unique_ptr<detail::ExactSource> src;
  const auto run = peel_with(w, cloud, 0, row, joint, src);
  return run.labels[row];
}

bool criterion_check(std::span<const double> w, const PointCloud& cloud, int n) {
  if (n < 1) throw InvalidInput("criterion_check: n must be >= 1");
  if (static_cast<int>(w.size()) != cloud.dim()) throw InvalidInput("criterion_check: dimension mismatch");
  check_halfspace(cloud);
  const int d = cloud.dim();

  // Points outside the first n-1 layers of the cloud may not enter the paraboloid.
  std::vector<double> coords;
  if (!cloud.empty()) {
    std::vector<int> labels(cloud.size(), 0);
    if (n > 1) {
      const auto src = detail::ExactSource::lifted(d, cloud.coords());
      const detail::PointView view(src);
      labels = detail::peel_rows(view, detail::HullMode::Lower, n - 1).labels;
    }
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (labels[i] == 0) coords.insert(coords.end(), cloud.point(i).begin(), cloud.point(i).end());
    }
  }
  const std::size_t f = coords.size() / d;
  if (f + 1 <= static_cast<std::size_t>(d)) return true;

  // Rows: forbidden points, then w, then w raised by one unit.
  coords.insert(coords.end(), w.begin(), w.end());
  coords.insert(coords.end(), w.begin(), w.end());
  coords.back() += 1.0;
  const auto src = detail::ExactSource::lifted(d, coords);
  const detail::PointView view(src);
  detail::Orientation orient(view);
  const auto rw = static_cast<detail::Row>(f);
  const auto rup = static_cast<detail::Row>(f + 1);

  std::vector<detail::Row> rows(d + 1);
  std::vector<int> subset;
  bool found = false;
  std::function<void(std::size_t)> search = [&](std::size_t start) {
    if (found) return;
    if (static_cast<int>(subset.size()) == d - 1) {
      rows[0] = rw;
      for (int i = 0; i < d - 1; ++i) rows[i + 1] = static_cast<detail::Row>(subset[i]);
      rows[d] = rup;
      const int up = orient.exact_sign(rows);
      if (up == 0) throw GeneralPositionViolated("criterion_check: vertical or degenerate support plane");
      for (std::size_t x = 0; x < f; ++x) {
        if (std::find(subset.begin(), subset.end(), static_cast<int>(x)) != subset.end()) continue;
        rows[d] = static_cast<detail::Row>(x);
        const int s = orient.exact_sign(rows);
        if (s == 0) throw GeneralPositionViolated("criterion_check: point on a candidate paraboloid");
        if (s != up) return;
      }
      found = true;
      return;
    }
    for (std::size_t i = start; i < f && !found; ++i) {
      subset.push_back(static_cast<int>(i));
      search(i + 1);
      subset.pop_back();
    }
  };
  search(0);
  return found;
}

std::vector<Rational> limit_scores(std::span<const std::vector<double>> points, const PointCloud& cloud, int n, int k) {
  if (n < 1 || k < 0) throw InvalidInput("limit_score: need n >= 1 and k >= 0");
  std::vector<Rational> out;
  out.reserve(points.size());
  for (const auto& w : points) {
    detail::Row row = 0;
    PointCloud joint;
    std::unique_ptr<detail::ExactSource> src;
    const auto run = peel_with(w, cloud, n, row, joint, src);
    if (run.labels[row] != n) {
      out.emplace_back(0);
      continue;
    }
    const auto& faces = run.layers[n - 1].lattice.faces;
    long long count = 0;
    if (k < static_cast<int>(faces.size())) {
      for (const auto& face : faces[k]) {
        if (std::binary_search(face.begin(), face.end(), row)) ++count;
      }
    }
    out.emplace_back(count, k + 1);
  }
  return out;
}

std::vector<Rational> joint_limit_scores(std::span<const std::vector<double>> points, const PointCloud& cloud, int n,
                                        int k) {
  if (n < 1 || k < 0) throw InvalidInput("limit_score: need n >= 1 and k >= 0");
  PointCloud joint = cloud;
  PointId next = cloud.empty() ? 0 : cloud.max_id() + 1;
  for (const auto& w : points) {
    if (static_cast<int>(w.size()) != cloud.dim()) throw InvalidInput("parabolic: dimension mismatch");
    joint = joint.with_point(next++, w);
  }
  check_halfspace(joint);
  const auto src = detail::ExactSource::lifted(joint.dim(), joint.coords());
  const detail::PointView view(src);
  const auto run = detail::peel_rows(view, detail::HullMode::Lower, n);
  std::vector<Rational> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto row = static_cast<detail::Row>(cloud.size() + i);
    if (run.labels[row] != n) {
      out.emplace_back(0);
      continue;
    }
    const auto& faces = run.layers[n - 1].lattice.faces;
    long long count = 0;
    if (k < static_cast<int>(faces.size())) {
      for (const auto& face : faces[k]) {
        if (std::binary_search(face.begin(), face.end(), row)) ++count;
      }
    }
    out.emplace_back(count, k + 1);
  }
  return out;
}

Rational limit_score(double h0, const PointCloud& cloud, const Window& window, int n, int k) {
  check_window(cloud, window);
  std::vector<std::vector<double>> w(1, std::vector<double>(cloud.dim(), 0.0));
  w[0].back() = h0;
  return limit_scores(w, cloud, n, k)[0];
}

std::vector<int> tree_fixture_depths(int n, int d) {
  if (n < 1 || d < 2) throw InvalidInput("tree_fixture: need n >= 1 and d >= 2");
  std::vector<int> depths{0};
  std::size_t level_begin = 0;
  for (int depth = 1; depth < n; ++depth) {
    const std::size_t level_end = depths.size();
    for (std::size_t p = level_begin; p < level_end; ++p) {
      for (int c = 0; c < 2 * (d - 1); ++c) depths.push_back(depth);
    }
    level_begin = level_end;
  }
  return depths;
}

PointCloud tree_fixture(int n, double h0, int d) {
  if (n < 1 || d < 2) throw InvalidInput("tree_fixture: need n >= 1 and d >= 2");
  if (!(h0 > 0.0)) throw InvalidInput("tree_fixture: h0 must be positive");
  std::vector<std::vector<double>> nodes{std::vector<double>(d, 0.0)};
  nodes[0][d - 1] = h0;
  std::size_t level_begin = 0;
  for (int depth = 1; depth < n; ++depth) {
    const std::size_t level_end = nodes.size();
    const double offset = 0.5 * std::sqrt(2.0 * h0 / std::pow(8.0, depth - 1));
    for (std::size_t p = level_begin; p < level_end; ++p) {
      for (int i = 0; i < d - 1; ++i) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> child = nodes[p];
          child[i] += sign * offset;
          child[d - 1] = nodes[p][d - 1] / 8.0;
          nodes.push_back(std::move(child));
        }
      }
    }
    level_begin = level_end;
  }
  std::vector<PointId> ids;
  std::vector<double> coords;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    ids.push_back(static_cast<PointId>(i));
    coords.insert(coords.end(), nodes[i].begin(), nodes[i].end());
  }
  return PointCloud(d, std::move(ids), std::move(coords));
}

bool half_paraboloid_check(std::span<const double> w0, std::span<const double> w1, int samples, std::uint64_t seed) {
  if (w0.size() != w1.size() || w0.size() < 2) throw InvalidInput("half_paraboloid_check: dimension mismatch");
  const int m = static_cast<int>(w0.size()) - 1;
  double dist2 = 0.0, axis2 = 0.0;
  std::vector<double> axis(m);
  for (int j = 0; j < m; ++j) {
    axis[j] = w1[j] - w0[j];
    axis2 += axis[j] * axis[j];
  }
  dist2 = axis2;
  const double residual = w0[m] - (w1[m] - dist2 / 2.0);
  if (std::abs(residual) > 1e-9 * (1.0 + std::abs(w1[m]) + dist2)) {
    throw InvalidInput("half_paraboloid_check: w0 is not on the boundary of Pi_down(w1)");
  }
  Paraboloid target;
  target.v0.assign(w1.begin(), w1.end() - 1);
  target.h0 = w1[m];
  target.direction = ParaboloidDirection::Down;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif;
  const double depth = 1.0 + std::abs(w0[m]);
  const double reach = std::sqrt(2.0 * depth);
  std::vector<double> u(m + 1), pt(m + 1);
  for (int s = 0; s < samples; ++s) {
    // v around v0 in the ball of radius `reach`, h below the paraboloid top.
    if (m == 1) {
      u[0] = 2.0 * unif(rng) - 1.0;
    } else {
      detail::uniform_in_ball(m, rng, u.data());
    }
    double off2 = 0.0, along = 0.0;
    for (int j = 0; j < m; ++j) {
      pt[j] = w0[j] + reach * u[j];
      off2 += (pt[j] - w0[j]) * (pt[j] - w0[j]);
      along += (pt[j] - w0[j]) * axis[j];
    }
    if (axis2 > 0.0 && along <= 0.0) {
      // reflect through v0 onto the half-space side
      for (int j = 0; j < m; ++j) pt[j] = 2.0 * w0[j] - pt[j];
      along = -along;
      if (along == 0.0) continue;
    }
    const double top = w0[m] - off2 / 2.0;
    pt[m] = top - depth * unif(rng);
    if (!(pt[m] < top)) continue;
    if (!in_paraboloid(pt, target)) return false;
  }
  return true;
}

std::vector<double> layer_height_profile(const ParabolicDiagram& diagram, int n) {
  std::vector<double> heights;
  const int m = diagram.cloud.dim() - 1;
  for (std::size_t i = 0; i < diagram.cloud.size(); ++i) {
    if (diagram.labels[i] == n && diagram.in_inner_window(i)) heights.push_back(diagram.cloud.coord(i, m));
  }
  std::sort(heights.begin(), heights.end());
  return heights;
}

}  // namespace onionlab
