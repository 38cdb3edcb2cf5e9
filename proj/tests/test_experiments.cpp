#include <cmath>

#include <gtest/gtest.h>

#include "bnsf/experiments.hpp"

using namespace bnsf;

namespace {

const GasParams kGas;

struct ShockCase {
  ShockProfile profile = compute_profile(solve_end_state({1.0, 0.0, 0.1}, 0.05, Family::Three, kGas), kGas);
  Weight w{0.5, &profile};

  SolverConfig grid(int N, double L = 150.0, double nu = 1.0) const {
    SolverConfig c;
    c.L = L;
    c.N = N;
    c.nu = nu;
    c.sigma = profile.shock.sigma;
    c.left = profile.shock.left;
    c.right = profile.shock.right;
    return c;
  }
  SweepConfig sweep(double E0) const {
    SweepConfig s;
    s.nu_list = {0.2, 0.1};
    s.N0 = 256;
    s.T = 0.2;
    s.sample_every = 0.1;
    s.perturbation.E0 = E0;
    return s;
  }
};

}  // namespace

TEST(Cutoff, PlateauSupportAndSlope) {
  const Cutoff psi{3.0};
  EXPECT_EQ(psi(0.0), 1.0);
  EXPECT_EQ(psi(-3.0), 1.0);
  EXPECT_EQ(psi(6.0), 0.0);
  EXPECT_EQ(psi(-7.0), 0.0);
  EXPECT_DOUBLE_EQ(psi(4.5), 0.5);
  double max_slope = 0.0;
  for (double x = 3.0; x < 6.0; x += 1e-3) {
    EXPECT_LE(psi(x + 1e-3), psi(x));
    max_slope = std::max(max_slope, std::abs(psi.deriv(x)));
    EXPECT_NEAR(psi.deriv(x), (psi(x + 1e-6) - psi(x - 1e-6)) / 2e-6, 1e-6);
  }
  EXPECT_DOUBLE_EQ(psi.deriv(-4.5), -psi.deriv(4.5));
  EXPECT_NEAR(max_slope, 2.0 / 3.0, 1e-5);
}

TEST(WellPrepared, HitsRequestedEntropy) {
  ShockCase s;
  const auto c = s.grid(512, 720.0);
  for (bool tw : {false, true}) {
    PerturbationSpec p;
    p.E0 = 1e-3;
    p.theta_weighted = tw;
    const auto d = well_prepared_data(s.w, c, p, kGas);
    EXPECT_NEAR(d.achieved_E0, 1e-3, 1e-12);
    EXPECT_GT(d.amplitude, 0.0);
  }
  PerturbationSpec zero;
  zero.E0 = 0.0;
  EXPECT_LT(well_prepared_data(s.w, c, zero, kGas).achieved_E0, 1e-20);
}

TEST(WellPrepared, UnreachableEntropyThrows) {
  ShockCase s;
  PerturbationSpec p;
  p.E0 = 1e6;
  p.c_v = -1.0;
  EXPECT_THROW(well_prepared_data(s.w, s.grid(256), p, kGas), std::invalid_argument);
}

TEST(Sweep, ZeroEnergyKeepsShiftNearZero) {
  ShockCase s;
  const auto rep = run_sweep(s.sweep(0.0), s.w, kGas);
  ASSERT_EQ(rep.runs.size(), 2u);
  for (const auto& r : rep.runs) {
    ASSERT_TRUE(r.ok()) << r.error;
    EXPECT_LT(r.max_abs_shift, 1e-6);
    EXPECT_LT(r.entropy_max, 1e-10);
  }
  EXPECT_LT(rep.l1_distances[0], 1e-6);
}

TEST(Sweep, UnitViscosityMatchesPlainRun) {
  ShockCase s;
  auto cfg = s.sweep(1e-3);
  cfg.nu_list = {1.0};
  cfg.nu0 = 1.0;
  const auto run = run_one_nu(1.0, cfg, s.w, kGas);
  ASSERT_TRUE(run.ok()) << run.error;
  const auto c = s.grid(256);
  const auto prep = well_prepared_data(s.w, c, cfg.perturbation, kGas);
  MonitorOptions o;
  o.T = cfg.T;
  o.sample_every = cfg.sample_every;
  const auto plain = run_monitored(prep.state, s.w, kGas, o);
  ASSERT_EQ(plain.samples.size(), run.trajectory.samples.size());
  for (std::size_t k = 0; k < plain.samples.size(); ++k) {
    EXPECT_EQ(plain.samples[k].X, run.trajectory.samples[k].X);
    EXPECT_EQ(plain.samples[k].f.entropy, run.trajectory.samples[k].f.entropy);
  }
  EXPECT_EQ(l1_distance(run.trajectory, run.trajectory), 0.0);
  EXPECT_LT(run.max_closure_ratio, 1.0);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  ShockCase s;
  auto cfg = s.sweep(1e-3);
  const auto a = run_sweep(cfg, s.w, kGas);
  cfg.threads = 2;
  const auto b = run_sweep(cfg, s.w, kGas);
  for (std::size_t k = 0; k < a.runs.size(); ++k)
    EXPECT_EQ(a.runs[k].trajectory.samples.back().X, b.runs[k].trajectory.samples.back().X);
}

TEST(Sweep, SmallCutoffReportsRequiredRadius) {
  ShockCase s;
  auto cfg = s.sweep(0.0);
  cfg.r_support = 0.01;
  cfg.nu_list = {0.2};
  const auto rep = run_sweep(cfg, s.w, kGas);
  ASSERT_FALSE(rep.runs[0].ok());
  EXPECT_NE(rep.runs[0].error.find("need r >= "), std::string::npos);
}

TEST(Sweep, RejectsBadLists) {
  SweepConfig cfg;
  cfg.nu_list = {0.1, 0.2};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.nu_list = {};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.nu_list = {0.1};
  cfg.T = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ThetaBound, HoldsAndIsMonotoneInExtraDissipation) {
  ShockCase s;
  const auto c = s.grid(1024, 720.0);
  const auto r = sample_reference(s.w, c, 0.0);
  PerturbationSpec p;
  p.c_th = 3.0;
  p.width = 5.0;
  for (double A : {0.0, 0.2}) {
    const auto st = detail::perturbed(c, r, p, A);
    const auto b0 = pointwise_theta_bound(st, s.w, 0.0, 100.0);
    const auto b1 = pointwise_theta_bound(st, s.w, 0.0, 100.0, 1.0);
    EXPECT_TRUE(b0.holds);
    EXPECT_GT(b1.bound, b0.bound);
    EXPECT_LE(b0.mean_theta, b0.sup_theta);
  }
  EXPECT_THROW(pointwise_theta_bound(detail::perturbed(c, r, p, 0.0), s.w, 0.0, 0.5), std::invalid_argument);
}
