#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "bnsf/contraction.hpp"
#include "bnsf/experiments.hpp"

using namespace bnsf;

namespace {

const GasParams kGas;
const State kLeft{1.0, 0.0, 0.1};

struct ShockCase {
  ShockProfile profile;
  Weight w;
  SolverConfig cfg;

  explicit ShockCase(int N, double eps = 0.05) : profile(compute_profile(solve_end_state(kLeft, eps, Family::Three, kGas), kGas)) {
    w = Weight{0.5, &profile};
    cfg.L = 720.0;
    cfg.N = N;
    cfg.sigma = profile.shock.sigma;
    cfg.left = profile.shock.left;
    cfg.right = profile.shock.right;
  }
  ShockCase(const ShockCase&) = delete;

  GridState profile_state() const {
    const auto r = sample_reference(w, cfg, 0.0);
    GridState s = GridState::make(cfg);
    s.v = r.v;
    s.u = r.u;
    s.theta = r.th;
    return s;
  }
};

}  // namespace

TEST(Contraction, PhiEpsSaturatesContinuously) {
  const double e = 0.1, cap = 1.0 / (e * e);
  EXPECT_EQ(phi_eps(0.0, e), 0.0);
  EXPECT_DOUBLE_EQ(phi_eps(-e * e, e), cap);
  EXPECT_DOUBLE_EQ(phi_eps(e * e, e), -cap);
  EXPECT_DOUBLE_EQ(phi_eps(-1.0, e), cap);
  EXPECT_DOUBLE_EQ(phi_eps(0.5 * e * e, e), -0.5 * cap);
  for (double y = -0.02; y < 0.02; y += 1e-4) EXPECT_NEAR(phi_eps(y + 1e-9, e), phi_eps(y, e), 1e-4);
}

TEST(Contraction, WeightIsAffineInProfileVolume) {
  ShockCase s(64);
  const auto far_left = weight_at(s.w, -700.0), far_right = weight_at(s.w, 700.0);
  EXPECT_NEAR(far_left.first, 1.0, 1e-9);
  EXPECT_NEAR(far_right.first, 1.5, 1e-9);
  EXPECT_GT(weight_at(s.w, 0.0).second, 0.0);
}

TEST(Contraction, ProfileDataHasZeroEntropy) {
  ShockCase s(512);
  const auto f = eval_functionals(s.profile_state(), 0.0, s.w, kGas);
  EXPECT_EQ(f.entropy, 0.0);
  EXPECT_EQ(f.Y, 0.0);
  EXPECT_LT(f.D, 1e-10);  // discrete gradients against exact profile derivatives
  EXPECT_EQ(f.J_bad, 0.0);
}

TEST(Contraction, GaussianVelocityEntropyClosedForm) {
  // zero amplitude: a = 1 and theta~ eta reduces to (u - u~)^2 / 2
  ShockCase s(4001, 0.0);
  s.cfg.L = 40.0;
  GridState st = GridState::make(s.cfg);
  const double A = 0.03;
  for (int i = 0; i < s.cfg.N; ++i) {
    st.v[i] = kLeft.v;
    st.theta[i] = kLeft.theta;
    st.u[i] = A * std::exp(-s.cfg.x(i) * s.cfg.x(i));
  }
  EXPECT_NEAR(weighted_relative_entropy(st, 0.0, s.w, kGas), 0.5 * A * A * std::sqrt(std::numbers::pi / 2.0), 1e-15);
}

TEST(Contraction, DecompositionsHoldOnRandomStates) {
  ShockCase s(1024);
  const auto r = sample_reference(s.w, s.cfg, 0.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    PerturbationSpec ps;
    ps.center = 80.0 * U(rng);
    ps.width = 20.0 + 10.0 * U(rng);
    ps.c_u = U(rng);
    ps.c_v = 0.5 * U(rng);
    ps.c_th = U(rng);
    const auto st = detail::perturbed(s.cfg, r, ps, 0.2);
    for (double d3 : {1e-3, 0.1}) {
      const auto f = eval_functionals(st, r, s.w, kGas, d3);
      const double scale = std::abs(f.J_bad) + std::abs(f.J_good) + std::abs(f.B_delta) + std::abs(f.G_delta);
      EXPECT_NEAR(f.Y, f.Y_g + f.Y_b + f.Y_l + f.Y_s, 1e-13 * (std::abs(f.Y_g) + std::abs(f.Y_s) + 1e-3));
      EXPECT_NEAR(f.J_bad - f.J_good, f.B_delta - f.G_delta, 1e-13 * scale);
      EXPECT_GE(f.D, 0.0);
      EXPECT_GE(f.J_good, 0.0);
      EXPECT_GT(f.entropy, 0.0);
    }
  }
}

TEST(Contraction, ProfileRunKeepsShiftAtRest) {
  ShockCase s(256);
  MonitorOptions o;
  o.T = 2.0;
  o.sample_every = 0.5;
  const auto tr = run_monitored(s.profile_state(), s.w, kGas, o);
  ASSERT_EQ(tr.samples.size(), 5u);
  for (const auto& smp : tr.samples) {
    EXPECT_LT(std::abs(smp.X), 1e-6);
    EXPECT_LT(smp.f.entropy, 1e-12);
  }
}

TEST(Contraction, StrictAndAdaptiveSubstepsAgree) {
  ShockCase s(256);
  PerturbationSpec ps;
  ps.width = 30.0;
  const auto st = detail::perturbed(s.cfg, sample_reference(s.w, s.cfg, 0.0), ps, 0.05);
  MonitorOptions o;
  o.T = 1.0;
  o.sample_every = 0.5;
  o.eps_shift = 0.3;
  const auto a = run_monitored(st, s.w, kGas, o);
  o.strict_substeps = true;
  const auto b = run_monitored(st, s.w, kGas, o);
  EXPECT_GT(b.shift_substeps, a.shift_substeps);
  EXPECT_NEAR(a.samples.back().X, b.samples.back().X, 1e-2 * std::max(1.0, std::abs(b.samples.back().X)));
  EXPECT_NE(b.samples.back().X, 0.0);
}

TEST(Contraction, IdentityResidualShrinksWithSampleSpacing) {
  ShockCase s(1024);
  PerturbationSpec ps;
  ps.center = 10.0;
  ps.width = 30.0;
  const auto st = detail::perturbed(s.cfg, sample_reference(s.w, s.cfg, 0.0), ps, 0.05);
  std::vector<double> res;
  for (double h : {0.4, 0.2, 0.1}) {
    MonitorOptions o;
    o.T = 1.0 + h;
    o.sample_every = h;
    o.X_of_t = [](double t) { return 5.0 * std::sin(t); };
    o.Xdot_of_t = [](double t) { return 5.0 * std::cos(t); };
    const auto tr = run_monitored(st, s.w, kGas, o);
    const auto n = tr.samples.size();
    res.push_back(entropy_identity_residual(tr.samples[n - 3], tr.samples[n - 2], tr.samples[n - 1]).residual);
  }
  EXPECT_GT(std::abs(res[0] - res[1]) / std::abs(res[1] - res[2]), 3.5);
}

TEST(Contraction, TruncationLimits) {
  ShockCase s(128);
  PerturbationSpec ps;
  ps.width = 100.0;
  const auto r = sample_reference(s.w, s.cfg, 0.0);
  const auto st = detail::perturbed(s.cfg, r, ps, 0.1);
  const auto zero = truncate_fields(st, r, 0.0);
  const auto big = truncate_fields(st, r, 1e6);
  for (int i = 0; i < s.cfg.N; ++i) {
    EXPECT_DOUBLE_EQ(zero.v_k[i], r.v[i]);
    EXPECT_DOUBLE_EQ(zero.th_k[i], r.th[i]);
    EXPECT_NEAR(big.v_k[i], st.v[i], 1e-14);
    EXPECT_DOUBLE_EQ(big.th_k[i], st.theta[i]);
  }
  EXPECT_THROW(truncate_fields(st, r, -1.0), std::invalid_argument);
}

TEST(Contraction, RejectsFixedFrame) {
  ShockCase s(64);
  auto st = s.profile_state();
  st.cfg.frame = Frame::Fixed;
  EXPECT_THROW(run_monitored(st, s.w, kGas, MonitorOptions{}), std::invalid_argument);
}
