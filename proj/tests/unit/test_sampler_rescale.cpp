#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "onionlab/error.hpp"
#include "onionlab/rescale.hpp"
#include "onionlab/sampler.hpp"
#include "onionlab/volumes.hpp"

using namespace onionlab;

TEST_CASE("ball Poisson sampler: determinism, support and mean count") {
  const auto a = sample_ball_poisson(2, 100, {7, 3});
  const auto b = sample_ball_poisson(2, 100, {7, 3});
  CHECK(a.coords() == b.coords());
  CHECK(sample_ball_poisson(2, 100, {7, 4}).coords() != a.coords());
  double total = 0, total2 = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto c = sample_ball_poisson(2, 100, {1, static_cast<std::uint64_t>(r)});
    total += c.size();
    total2 += double(c.size()) * c.size();
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::hypot(c.coord(i, 0), c.coord(i, 1)) < 1.0);
  }
  const double mean = total / reps;
  const double expected = 100 * std::numbers::pi;
  CHECK(std::abs(mean - expected) < 3 * std::sqrt(expected / reps));
}

TEST_CASE("binomial sampler radial law") {
  CHECK(sample_ball_binomial(3, 1, {0, 0}).size() == 1);
  const auto c = sample_ball_binomial(3, 10000, {2, 0});
  std::vector<double> rd;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double r = std::sqrt(c.coord(i, 0) * c.coord(i, 0) + c.coord(i, 1) * c.coord(i, 1) + c.coord(i, 2) * c.coord(i, 2));
    CHECK(r < 1.0);
    rd.push_back(r * r * r);
  }
  std::sort(rd.begin(), rd.end());
  double ks = 0;
  for (std::size_t i = 0; i < rd.size(); ++i) {
    ks = std::max({ks, std::abs(rd[i] - double(i) / rd.size()), std::abs(rd[i] - double(i + 1) / rd.size())});
  }
  CHECK(ks < 1.36 / std::sqrt(double(rd.size())));
}

TEST_CASE("half-space sampler: mean count, empty box probability, independence") {
  double total = 0;
  int empty_box = 0;
  const int reps = 400;
  // counts in two disjoint halves, for a 2x2 contingency independence check
  int table[2][2] = {{0, 0}, {0, 0}};
  for (int r = 0; r < reps; ++r) {
    const auto c = sample_halfspace_poisson(1, 10, 5, 1.0, {3, static_cast<std::uint64_t>(r)});
    total += c.size();
    int in_unit = 0, left = 0, right = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(std::abs(c.coord(i, 0)) <= 10);
      CHECK(c.coord(i, 1) >= 0);
      CHECK(c.coord(i, 1) < 5);
      if (c.coord(i, 0) >= 0 && c.coord(i, 0) < 1 && c.coord(i, 1) < 1) ++in_unit;
      (c.coord(i, 0) < 0 ? left : right)++;
    }
    if (in_unit == 0) ++empty_box;
    table[left > 50][right > 50]++;
  }
  CHECK(std::abs(total / reps - 100) < 3 * std::sqrt(100.0 / reps));
  const double p = double(empty_box) / reps;
  CHECK(std::abs(p - std::exp(-1.0)) < 3 * std::sqrt(std::exp(-1.0) * (1 - std::exp(-1.0)) / reps));
  double chi2 = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double row = table[i][0] + table[i][1], col = table[0][j] + table[1][j];
      const double e = row * col / reps;
      if (e > 0) chi2 += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  CHECK(chi2 < 10.83);  // 1 dof, 0.1% level
}

TEST_CASE("rescaling map examples") {
  const double lam = 1000;
  auto w = rescale_point(std::vector<double>{0, 0.6}, lam);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == doctest::Approx(std::pow(lam, 2.0 / 3) * 0.4));
  const double th = 0.01;
  auto w2 = rescale_point(std::vector<double>{0.9 * std::sin(th), 0.9 * std::cos(th)}, lam);
  CHECK(w2[0] == doctest::Approx(std::cbrt(lam) * 0.01).epsilon(1e-12));
  CHECK(w2[1] == doctest::Approx(std::pow(lam, 2.0 / 3) * 0.1).epsilon(1e-12));
  auto pole = unrescale_point(std::vector<double>{0, 0, 0}, 100);
  CHECK(pole == std::vector<double>{0, 0, 1});
  CHECK_THROWS_AS(rescale_point(std::vector<double>{0, -0.5}, lam), PolePoint);
  CHECK_THROWS_AS(rescale_point(std::vector<double>{0, 0}, lam), PolePoint);
}

TEST_CASE("round trips") {
  for (double lam : {1e2, 1e3, 1e4}) {
    const auto c = sample_ball_poisson(3, lam / 10, {5, 0});
    const auto back = from_rescaled(to_rescaled(c, lam));
    for (std::size_t i = 0; i < c.coords().size(); ++i) CHECK(std::abs(back.coords()[i] - c.coords()[i]) < 1e-10);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u;
    for (int i = 0; i < 100; ++i) {
      const double s = std::pow(lam, 0.25);
      std::vector<double> wpt{s * (u(rng) - 0.5), s * (u(rng) - 0.5), s * s * u(rng) * 0.99};
      auto again = rescale_point(unrescale_point(wpt, lam), lam);
      for (int j = 0; j < 3; ++j) CHECK(again[j] == doctest::Approx(wpt[j]).epsilon(1e-10).scale(1));
    }
  }
}

TEST_CASE("caps and paraboloids") {
  CHECK(in_cap(std::vector<double>{0, 0.9}, std::vector<double>{0, 0.5}));
  CHECK_FALSE(in_cap(std::vector<double>{0, 0.4}, std::vector<double>{0, 0.5}));
  CHECK_THROWS_AS(in_cap(std::vector<double>{0, 0.4}, std::vector<double>{0, 0}), InvalidInput);
  Paraboloid p{{0.0}, 2.0, ParaboloidDirection::Down};
  CHECK(in_paraboloid(std::vector<double>{1, 1}, p));
  CHECK_FALSE(in_paraboloid(std::vector<double>{2, 0.1}, p));

  std::mt19937_64 rng(4);
  int agree = 0, total = 0;
  for (int i = 0; i < 2000; ++i) {
    double x[2], x0[2];
    detail::uniform_in_ball(2, rng, x);
    detail::uniform_in_ball(2, rng, x0);
    const double lam = 500;
    auto w = rescale_point(x, lam);
    auto w0 = rescale_point(x0, lam);
    Paraboloid down{{w0[0]}, w0[1], ParaboloidDirection::Down, lam};
    agree += in_cap(x, x0) == in_paraboloid(w, down);
    ++total;
  }
  CHECK(agree == total);
}

TEST_CASE("quasi-paraboloid converges to the paraboloid") {
  // d = 2: the deviation is -5|dv|^4/(24 L) + h0 |dv|^2/(2 L) + O(L^-2), L = lambda^(2/3)
  const std::vector<double> v0{0.3};
  const double h0 = 1.5;
  auto worst = [&](double lam) {
    double w = 0;
    for (double v = -4.7; v <= 5.3; v += 0.05) {
      const std::vector<double> vv{v};
      w = std::max(w, std::abs(quasi_paraboloid_height(vv, v0, h0, lam) -
                               quasi_paraboloid_height(vv, v0, h0, std::numeric_limits<double>::infinity())));
    }
    return w;
  };
  const double L6 = std::pow(1e6, 2.0 / 3);
  CHECK(worst(1e6) == doctest::Approx(5 * 625 / (24 * L6) - h0 * 25 / (2 * L6)).epsilon(0.02));
  CHECK(worst(1e7) < 1e-2);
  CHECK(worst(1e8) < worst(1e7) / 4);
}

TEST_CASE("intensity density") {
  CHECK(intensity_density(std::vector<double>{0, 0}, 0, 1000, 3) == 1.0);
  CHECK(intensity_density(std::vector<double>{0.5}, std::pow(1000.0, 2.0 / 3), 1000, 2) == doctest::Approx(0.0));
  CHECK(intensity_density(std::vector<double>{3.0}, 2.0, 1000, 2) == doctest::Approx(1 - 2.0 * std::pow(1000.0, -2.0 / 3)));
  const double t = 2.0 / std::pow(1000.0, 0.25);
  CHECK(intensity_density(std::vector<double>{2.0, 0.0}, 0, 1000, 3) == doctest::Approx(std::sin(t) / t));
}
