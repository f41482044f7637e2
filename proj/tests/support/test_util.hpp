#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "onionlab/point_cloud.hpp"

namespace testutil {

inline onionlab::PointCloud make_cloud(int d, const std::vector<std::vector<double>>& pts) {
  std::vector<onionlab::PointId> ids;
  std::vector<double> coords;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ids.push_back(static_cast<onionlab::PointId>(i));
    coords.insert(coords.end(), pts[i].begin(), pts[i].end());
  }
  return onionlab::PointCloud(d, ids, coords);
}

inline std::vector<std::vector<double>> random_ball(int d, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < n; ++i) {
    std::vector<double> p(d);
    double norm = 0;
    for (double& x : p) {
      x = g(rng);
      norm += x * x;
    }
    const double r = std::pow(u(rng), 1.0 / d) / std::sqrt(norm);
    for (double& x : p) x *= r;
    pts.push_back(p);
  }
  return pts;
}

}  // namespace testutil
