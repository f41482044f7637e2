#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "onionlab/error.hpp"
#include "onionlab/hull.hpp"
#include "onionlab/volumes.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace onionlab;

namespace {

using testutil::make_cloud;
using testutil::random_ball;

long euler_sum(const FaceLattice& lat) {
  long s = 0;
  for (std::size_t k = 0; k < lat.faces.size(); ++k) s += (k % 2 ? -1 : 1) * static_cast<long>(lat.faces[k].size());
  return s;
}

std::vector<std::vector<double>> cube() {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  return pts;
}

}  // namespace

TEST_CASE("triangle and tetrahedron face counts") {
  auto tri = convex_hull(make_cloud(2, {{0, 0}, {1, 0}, {0, 1}}));
  CHECK(tri.dim_hull == 2);
  CHECK(k_face_counts(tri) == std::map<int, std::size_t>{{0, 3}, {1, 3}});
  auto tet = convex_hull(make_cloud(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  CHECK(k_face_counts(tet) == std::map<int, std::size_t>{{0, 4}, {1, 6}, {2, 4}});
  CHECK(tet.facet_normals.size() == 4);
}

TEST_CASE("square with center: center is not a vertex") {
  auto cloud = make_cloud(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
  auto lat = convex_hull(cloud);
  CHECK(lat.vertices() == std::vector<PointId>{0, 1, 2, 3});
  const auto ext = oracle::extreme_points(oracle::to_rational({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}}));
  CHECK(ext == std::vector<bool>{true, true, true, true, false});
}

TEST_CASE("points on a circle are all vertices") {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({std::cos(2 * std::numbers::pi * i / 5), std::sin(2 * std::numbers::pi * i / 5)});
  CHECK(k_face_counts(convex_hull(make_cloud(2, pts))) == std::map<int, std::size_t>{{0, 5}, {1, 5}});
}

TEST_CASE("cube: coplanar simplices merge into square facets") {
  auto pts = cube();
  pts.push_back({0.5, 0.5, 0.5});
  pts.push_back({0.5, 0.5, 0.0});  // on a facet, not a vertex
  pts.push_back({0.5, 0.0, 0.0});  // on an edge
  auto lat = convex_hull(make_cloud(3, pts));
  CHECK(lat.degenerate);
  CHECK(k_face_counts(lat) == std::map<int, std::size_t>{{0, 8}, {1, 12}, {2, 6}});
  CHECK(lat.boundary_points == std::vector<PointId>{9, 10});
  for (const auto& f : lat.faces[2]) CHECK(f.size() == 4);
  auto iv = intrinsic_volumes(lat, 2000);
  CHECK(iv.values[3] == doctest::Approx(1.0));
  CHECK(iv.values[2] == doctest::Approx(3.0));
  CHECK(iv.values[1] == doctest::Approx(3.0).epsilon(0.05));  // V_1(cube) = 3 (mean width 3/2)
  CHECK(iv.method_tags[1] == VolumeMethod::ProjectionMC);
}

TEST_CASE("square collinear points and lower-dimensional hulls") {
  auto sq = convex_hull(make_cloud(2, {{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}}));
  CHECK(k_face_counts(sq) == std::map<int, std::size_t>{{0, 4}, {1, 4}});
  CHECK(sq.boundary_points == std::vector<PointId>{1});

  auto seg = convex_hull(make_cloud(3, {{0, 0, 0}, {1, 1, 1}, {0.5, 0.5, 0.5}, {2, 2, 2}}));
  CHECK(seg.dim_hull == 1);
  CHECK(seg.vertices() == std::vector<PointId>{0, 3});
  CHECK(seg.faces[1] == std::vector<std::vector<PointId>>{{0, 3}});

  auto planar = convex_hull(make_cloud(3, {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}, {0.5, 0.5, 1}}));
  CHECK(planar.dim_hull == 2);
  CHECK(planar.faces[0].size() == 4);
  CHECK(planar.faces[1].size() == 4);
  CHECK(planar.faces[2].size() == 1);
  CHECK_THROWS_AS(intrinsic_volumes(planar, 10), DegenerateHull);

  auto single = convex_hull(make_cloud(2, {{0.3, 0.2}}));
  CHECK(single.dim_hull == 0);
  CHECK(single.vertices() == std::vector<PointId>{0});
}

TEST_CASE("unit square and cube intrinsic volumes") {
  auto sq = convex_hull(make_cloud(2, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  auto iv = intrinsic_volumes(sq);
  CHECK(iv.values[0] == 1.0);
  CHECK(iv.values[1] == doctest::Approx(2.0));
  CHECK(iv.values[2] == doctest::Approx(1.0));
}

TEST_CASE("ball intrinsic volumes") {
  CHECK(ball_intrinsic_volume(2, 2) == doctest::Approx(std::numbers::pi));
  CHECK(ball_intrinsic_volume(2, 1) == doctest::Approx(std::numbers::pi));  // half the perimeter 2*pi
  CHECK(ball_intrinsic_volume(3, 1) == doctest::Approx(4.0));
  CHECK(ball_intrinsic_volume(3, 2) == doctest::Approx(2 * std::numbers::pi));
  CHECK_THROWS_AS(ball_intrinsic_volume(2, 3), InvalidInput);
}

TEST_CASE("V_1 of a fine polytope approximating the unit 3-ball is close to 4") {
  std::vector<std::vector<double>> pts;
  const int n = 40;
  for (int i = 0; i < n; ++i) {
    const double th = std::numbers::pi * (i + 0.5) / n;
    for (int j = 0; j < 2 * n; ++j) {
      const double ph = std::numbers::pi * j / n;
      pts.push_back({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
    }
  }
  auto iv = intrinsic_volumes(convex_hull(make_cloud(3, pts)), 4096);
  CHECK(std::abs(iv.values[1] - 4.0) < 0.02 + 3 * iv.stderrs[1]);
  CHECK(iv.values[3] < 4 * std::numbers::pi / 3);
  CHECK(iv.values[2] < 2 * std::numbers::pi);
}

TEST_CASE("random ball clouds: Euler relation and extreme points match the oracle") {
  std::mt19937_64 rng(11);
  for (int d : {2, 3, 4}) {
    for (int rep = 0; rep < 30; ++rep) {
      const int n = 5 + static_cast<int>(rng() % 11);
      auto pts = random_ball(d, n, rng);
      auto lat = convex_hull(make_cloud(d, pts));
      CHECK(lat.dim_hull == d);
      CHECK(euler_sum(lat) == 1 - (d % 2 ? -1 : 1));
      const auto ext = oracle::extreme_points(oracle::to_rational(pts));
      std::vector<PointId> expect;
      for (int i = 0; i < n; ++i) {
        if (ext[i]) expect.push_back(i);
      }
      CHECK(lat.vertices() == expect);
      // every ridge lies in exactly two facets
      if (d >= 3) {
        std::map<std::vector<PointId>, int> ridge_count;
        for (const auto& f : lat.faces[d - 1]) {
          for (const auto& r : lat.faces[d - 2]) {
            if (std::includes(f.begin(), f.end(), r.begin(), r.end())) ++ridge_count[r];
          }
        }
        for (const auto& [r, c] : ridge_count) CHECK(c == 2);
      }
    }
  }
}

TEST_CASE("rotation invariance of face counts and determinism") {
  std::mt19937_64 rng(5);
  auto pts = random_ball(3, 200, rng);
  auto lat = convex_hull(make_cloud(3, pts));
  const double a = 0.7;
  std::vector<std::vector<double>> rot;
  for (auto& p : pts) rot.push_back({std::cos(a) * p[0] - std::sin(a) * p[1], std::sin(a) * p[0] + std::cos(a) * p[1], p[2]});
  auto lat2 = convex_hull(make_cloud(3, rot));
  CHECK(k_face_counts(lat) == k_face_counts(lat2));
  CHECK(lat.faces == convex_hull(make_cloud(3, pts)).faces);
}

TEST_CASE("exact predicates on a grid with many coplanar points") {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) pts.push_back({i / 3.0, j / 3.0, k / 3.0});
  auto lat = convex_hull(make_cloud(3, pts));
  CHECK(k_face_counts(lat) == std::map<int, std::size_t>{{0, 8}, {1, 12}, {2, 6}});
  CHECK(lat.boundary_points.size() == 64 - 8 - 8);
}
