#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bnsf/gas_model.hpp"

using namespace bnsf;

namespace {

// Hugoniot temperature by bisection on cv (th - th-) + (p + p-)(v+ - v-)/2 = 0.
double hugoniot_theta_bisect(const State& a, double vp, const GasParams& g) {
  const double pa = pressure(a, g);
  auto f = [&](double th) { return g.cv() * (th - a.theta) + 0.5 * (g.R * th / vp + pa) * (vp - a.v); };
  double lo = 1e-12, hi = 100.0 * a.theta;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(lo) < 0) == (f(mid) < 0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(GasModel, PhiBasics) {
  EXPECT_EQ(phi(1.0), 0.0);
  for (double z : {0.1, 0.5, 0.9, 1.1, 2.0, 10.0}) EXPECT_GT(phi(z), 0.0);
  // convex: second difference positive
  for (double z : {0.2, 0.7, 1.0, 3.0}) EXPECT_GT(phi(z + 1e-3) - 2 * phi(z) + phi(z - 1e-3), 0.0);
}

TEST(GasModel, RelativeEntropyFrozen) {
  const GasParams g;
  const double e = relative_entropy({1.1, 0.2, 0.12}, {1.0, 0.0, 0.1}, g);
  EXPECT_NEAR(e, 0.24888592821078857443, 1e-15);
  EXPECT_EQ(relative_entropy({1.0, 0.3, 0.2}, {1.0, 0.3, 0.2}, g), 0.0);
}

TEST(GasModel, DefaultShockFrozen) {
  const GasParams g;
  const auto s = solve_end_state({1.0, 0.0, 0.1}, 0.05, Family::Three, g);
  EXPECT_NEAR(s.sigma, 0.36342189215581552187, 1e-15);
  EXPECT_NEAR(s.right.u, -0.018171094607790776094, 1e-16);
  EXPECT_NEAR(s.right.theta, 0.098066037735849056604, 1e-16);
  EXPECT_DOUBLE_EQ(s.right.v, 1.05);
}

TEST(GasModel, RandomShocksMatchBisectionOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    GasParams g;
    g.R = 0.5 + U(rng);
    g.gamma = 1.1 + 0.6 * U(rng);
    const State a{0.5 + U(rng), -1.0 + 2.0 * U(rng), 0.05 + U(rng)};
    const Family f = k % 2 ? Family::One : Family::Three;
    const double eps = a.v * (0.01 + 0.2 * U(rng));
    const auto s = solve_end_state(a, eps, f, g);
    EXPECT_NEAR(s.right.theta, hugoniot_theta_bisect(a, s.right.v, g), 1e-12 * s.right.theta);
    const auto r = rh_residual(s, g);
    EXPECT_LT(std::max({r.mass, r.momentum, r.energy}), 1e-14);
    EXPECT_EQ(s.sigma > 0, f == Family::Three);
  }
}

TEST(GasModel, SpeedApproachesSoundSpeedLinearly) {
  const GasParams g;
  const State a{1.0, 0.0, 0.1};
  double prev = 0.0;
  for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
    const double d = std::abs(solve_end_state(a, eps, Family::Three, g).sigma - sigma_star(a, g)) / eps;
    if (prev > 0.0) EXPECT_NEAR(d / prev, 1.0, 0.1);
    prev = d;
  }
}

TEST(GasModel, LaxOrderingAndMirror) {
  const GasParams g;
  const State a{1.0, 0.2, 0.3};
  const auto s3 = solve_end_state(a, 0.1, Family::Three, g);
  EXPECT_LT(s3.left.v, s3.right.v);
  EXPECT_GT(s3.left.u, s3.right.u);
  EXPECT_GT(s3.left.theta, s3.right.theta);
  const auto s1 = solve_end_state(a, 0.1, Family::One, g);
  EXPECT_GT(s1.left.v, s1.right.v);
  EXPECT_LT(s1.left.theta, s1.right.theta);
  EXPECT_EQ(mirror(mirror(a)).u, a.u);
}

TEST(GasModel, ZeroAmplitudeIsTrivial) {
  const GasParams g;
  const auto s = solve_end_state({1.0, 0.0, 0.1}, 0.0, Family::Three, g);
  EXPECT_EQ(s.right.v, s.left.v);
  EXPECT_EQ(s.sigma, sigma_star(s.left, g));
}

TEST(GasModel, RejectsInvalidInput) {
  GasParams g;
  EXPECT_THROW(solve_end_state({1.0, 0.0, 0.1}, -0.1, Family::Three, g), std::invalid_argument);
  EXPECT_THROW(solve_end_state({1.0, 0.0, 0.1}, 0.9, Family::One, g), std::invalid_argument);
  EXPECT_THROW(solve_end_state({-1.0, 0.0, 0.1}, 0.1, Family::Three, g), std::invalid_argument);
  g.gamma = 0.5;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(GasModel, ColdConditionThreshold) {
  const GasParams g;
  const auto c = check_cold_condition(0.1, g);
  EXPECT_NEAR(c.threshold, 5.0 / 24.0, 1e-16);
  EXPECT_TRUE(c.ok);
  EXPECT_FALSE(check_cold_condition(0.3, g).ok);
}

TEST(GasModel, MassVelocityRecovery) {
  const GasParams g;
  const int n = 101;
  const double dx = 0.1;
  std::vector<double> v(n), uv(n), th(n, 0.2);
  for (int i = 0; i < n; ++i) {
    v[i] = 1.0 + 0.1 * std::sin(0.05 * i);
    uv[i] = 0.3;
  }
  const auto u = recover_mass_velocity(v, uv, th, dx, g);
  for (int i = 1; i + 1 < n; ++i) {
    const double vx = (v[i + 1] - v[i - 1]) / (2 * dx);
    EXPECT_NEAR(u[i], 0.3 + g.tau(0.2) * vx / v[i], 1e-14);
  }
}
