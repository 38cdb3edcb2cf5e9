#include <cmath>

#include <gtest/gtest.h>

#include "bnsf/shock_profile.hpp"

using namespace bnsf;

namespace {

const GasParams kGas;

const ShockProfile& default_profile() {
  static const ShockProfile p =
      compute_profile(solve_end_state({1.0, 0.0, 0.1}, 0.05, Family::Three, kGas), kGas);
  return p;
}

}  // namespace

// Reference values from an independent DOP853 integration (rtol 1e-13) of the
// same traveling-wave system, phase fixed by v(0) = (v- + v+)/2.
TEST(ShockProfile, MatchesIndependentIntegration) {
  const auto& p = default_profile();
  struct Ref {
    double xi, v, u, th;
  };
  const Ref refs[] = {{-40.0, 1.011589408180221e+00, -4.479588190413148e-03, 9.951108641600168e-02},
                      {0.0, 1.025000000000000e+00, -9.452194155011770e-03, 9.897766478698158e-02},
                      {40.0, 1.038282951162703e+00, -1.416975877840028e-02, 9.848066172073380e-02}};
  for (const auto& r : refs) {
    const auto s = p.at(r.xi);
    EXPECT_NEAR(s.val.v, r.v, 1e-9) << r.xi;
    EXPECT_NEAR(s.val.u, r.u, 1e-9) << r.xi;
    EXPECT_NEAR(s.val.theta, r.th, 1e-9) << r.xi;
  }
  EXPECT_NEAR(p.unstable_rate, 0.03044270670302396, 1e-9);
}

TEST(ShockProfile, FarFieldReachesEndStates) {
  const auto& p = default_profile();
  const double span = 20.0 / (0.05 * sigma_star(p.shock.left, kGas) / kGas.tau0);
  const auto a = p.at(-10 * span), b = p.at(10 * span);
  EXPECT_NEAR(a.val.v, p.shock.left.v, 1e-10);
  EXPECT_NEAR(a.val.theta, p.shock.left.theta, 1e-10);
  EXPECT_NEAR(b.val.v, p.shock.right.v, 1e-10);
  EXPECT_NEAR(b.val.u, p.shock.right.u, 1e-10);
}

TEST(ShockProfile, TailReport) {
  const auto& p = default_profile();
  const auto t = verify_tails(p);
  EXPECT_TRUE(t.v_increasing && t.u_decreasing && t.theta_decreasing);
  EXPECT_LE(t.ode_residual, 1e-9);
  EXPECT_GT(t.tail_min, 0.0);
  EXPECT_LT(t.tail_max, 2.0 * t.tail_min);
  // rates are Theta(eps)
  EXPECT_GT(t.rate_left, 0.1 * 0.05);
  EXPECT_LT(t.rate_left, 10 * 0.05);
  EXPECT_GT(t.rate_right, 0.1 * 0.05);
  EXPECT_LT(t.ratio_u, 0.05);
  EXPECT_GT(t.inf_vprime, 0.0);
}

TEST(ShockProfile, SharpRateFrozen) {
  const auto& p = default_profile();
  EXPECT_NEAR(sharp_rate(p.base, kGas), 0.030645399813671126793, 1e-16);
}

TEST(ShockProfile, ConstantsStableUnderEpsHalving) {
  double prev_u = 0.0, prev_d2 = 0.0;
  for (double eps : {0.05, 0.025}) {
    const auto p = compute_profile(solve_end_state({1.0, 0.0, 0.1}, eps, Family::Three, kGas), kGas);
    const auto t = verify_tails(p);
    const double cu = t.ratio_u / eps, cd = t.second_deriv_const;
    if (prev_u > 0.0) {
      EXPECT_NEAR(cu / prev_u, 1.0, 0.5);
      EXPECT_NEAR(cd / prev_d2, 1.0, 0.5);
    }
    prev_u = cu;
    prev_d2 = cd;
  }
}

TEST(ShockProfile, InterpolantContinuousAcrossTailSeam) {
  const auto& p = default_profile();
  for (double edge : {p.xi_min(), p.xi_max()}) {
    const auto a = p.at(edge - 1e-9), b = p.at(edge + 1e-9);
    EXPECT_NEAR(a.val.v, b.val.v, 1e-12);
    EXPECT_NEAR(a.val.theta, b.val.theta, 1e-12);
  }
}

TEST(ShockProfile, DerivativesMatchField) {
  const auto& p = default_profile();
  for (double xi : {-100.0, -3.0, 0.0, 17.5, 150.0}) {
    const auto s = p.at(xi);
    const auto f = detail::field(p.base, kGas, {s.val.v, s.val.u, s.val.theta});
    EXPECT_NEAR(s.d1.v, f[0], 1e-12);
    EXPECT_NEAR(s.d1.u, f[1], 1e-12);
    EXPECT_NEAR(s.d1.theta, f[2], 1e-12);
    // finite difference of the interpolant
    const double h = 1e-3;
    EXPECT_NEAR((p.at(xi + h).val.v - p.at(xi - h).val.v) / (2 * h), s.d1.v, 1e-9);
  }
}

TEST(ShockProfile, OneShockByMirror) {
  const State right{1.05, 0.0, 0.1};
  const auto s1 = solve_end_state(right, 0.05, Family::One, kGas);
  const auto p = compute_profile(s1, kGas);
  EXPECT_NEAR(p.at(-1e4).val.v, s1.left.v, 1e-10);
  EXPECT_NEAR(p.at(1e4).val.v, s1.right.v, 1e-10);
  // 1-shock: v decreases, u decreases, theta increases
  for (double xi : {-50.0, 0.0, 50.0}) {
    const auto s = p.at(xi);
    EXPECT_LT(s.d1.v, 0.0);
    EXPECT_LT(s.d1.u, 0.0);
    EXPECT_GT(s.d1.theta, 0.0);
  }
}

TEST(ShockProfile, ZeroAmplitudeIsConstant) {
  const auto p = compute_profile(solve_end_state({1.0, 0.0, 0.1}, 0.0, Family::Three, kGas), kGas);
  EXPECT_EQ(p.at(3.0).val.v, 1.0);
  EXPECT_EQ(p.at(-3.0).d1.v, 0.0);
}

TEST(ShockProfile, NoConnectionWithinShortSpan) {
  ProfileOptions o;
  o.span = 1.0;
  EXPECT_THROW(compute_profile(solve_end_state({1.0, 0.0, 0.1}, 0.05, Family::Three, kGas), kGas, o),
               std::runtime_error);
}
