#include <cmath>

#include <gtest/gtest.h>

#include "bnsf/contraction.hpp"
#include "bnsf/solver.hpp"

using namespace bnsf;

namespace {

const GasParams kGas;

SolverConfig uniform_config(int N, Form form) {
  SolverConfig c;
  c.L = 20.0;
  c.N = N;
  c.sigma = 0.3;
  c.form = form;
  c.left = c.right = {1.0, 0.0, 0.2};
  return c;
}

GridState bump(const SolverConfig& c, double amp) {
  GridState s = GridState::make(c);
  for (int i = 0; i < c.N; ++i) {
    const double b = amp * std::exp(-c.x(i) * c.x(i));
    s.v[i] = 1.0 + 0.5 * b;
    s.u[i] = b;
    s.theta[i] = 0.2 * (1.0 + b);
  }
  clamp_ends(s);
  return s;
}

}  // namespace

TEST(Solver, UniformStateHasZeroRates) {
  for (Form f : {Form::NonDivergence, Form::Divergence}) {
    const auto s = bump(uniform_config(64, f), 0.0);
    const auto r = semi_discrete_rhs(s, kGas);
    for (int i = 0; i < s.size(); ++i) {
      EXPECT_EQ(r.a[i], 0.0);
      EXPECT_EQ(r.b[i], 0.0);
      EXPECT_EQ(r.c[i], 0.0);
    }
  }
}

TEST(Solver, DivergenceFormConservesTotals) {
  const auto c = uniform_config(400, Form::Divergence);
  const auto s0 = bump(c, 0.1);
  const std::vector<State> ref(c.N, c.left);
  const auto t0 = conserved_totals(s0, kGas, ref);
  const auto s1 = advance(s0, kGas, 2.0);
  const auto t1 = conserved_totals(s1, kGas, ref);
  EXPECT_NEAR(t1.V, t0.V, 1e-11);
  EXPECT_NEAR(t1.U, t0.U, 1e-11);
  EXPECT_NEAR(t1.E, t0.E, 1e-11);
}

TEST(Solver, FormsAgreeUnderRefinement) {
  double prev = 0.0;
  for (int N : {201, 401}) {
    const auto a = advance(bump(uniform_config(N, Form::NonDivergence), 0.1), kGas, 1.0);
    const auto b = advance(bump(uniform_config(N, Form::Divergence), 0.1), kGas, 1.0);
    double d = 0.0;
    for (int i = 0; i < N; ++i) d = std::max(d, std::abs(a.theta[i] - b.theta[i]));
    if (prev > 0.0) EXPECT_GT(prev / d, 3.0);
    prev = d;
  }
}

TEST(Solver, Rk4IsFourthOrderInTime) {
  auto c = uniform_config(81, Form::NonDivergence);
  const auto s0 = bump(c, 0.1);
  auto run = [&](int steps) {
    GridState s = s0;
    for (int k = 0; k < steps; ++k) rk4_step(s, kGas, 0.2 / steps);
    return s;
  };
  const auto ref = run(256);
  double e[2];
  for (int j = 0; j < 2; ++j) {
    const auto s = run(8 << j);
    e[j] = 0.0;
    for (int i = 0; i < c.N; ++i) e[j] = std::max(e[j], std::abs(s.v[i] - ref.v[i]));
  }
  EXPECT_GT(e[0] / e[1], 12.0);
}

TEST(Solver, StableDtRespectsDiffusionLimit) {
  const auto c = uniform_config(101, Form::NonDivergence);
  const auto s = bump(c, 0.0);
  const double h = c.dx();
  const double diff = std::max({kGas.tau(0.2), kGas.mu(0.2), (kGas.gamma - 1.0) * kGas.kappa(0.2) / kGas.R});
  const double wave = c.sigma + std::sqrt(kGas.gamma * 0.2);
  EXPECT_DOUBLE_EQ(stable_dt(s, kGas), c.cfl * std::min(h / wave, h * h / (2.0 * diff)));
}

TEST(Solver, ObserverCadence) {
  const auto c = uniform_config(64, Form::NonDivergence);
  std::vector<double> times;
  advance(bump(c, 0.05), kGas, 1.0, [&](const GridState& s) { times.push_back(s.t); }, 0.25);
  ASSERT_EQ(times.size(), 5u);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(times[k], 0.25 * k, 1e-14);
}

TEST(Solver, NonPositiveStateThrows) {
  auto s = bump(uniform_config(32, Form::NonDivergence), 0.0);
  s.v[10] = -1.0;
  EXPECT_THROW(semi_discrete_rhs(s, kGas), std::runtime_error);
  SolverConfig bad = uniform_config(32, Form::NonDivergence);
  bad.cfl = 2.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Solver, SteadyProfileSecondOrder) {
  const auto sh = solve_end_state({1.0, 0.0, 0.1}, 0.05, Family::Three, kGas);
  const auto p = compute_profile(sh, kGas);
  const Weight w{0.5, &p};
  double prev = 0.0;
  for (int N : {512, 1024}) {
    SolverConfig c;
    c.L = 720.0;
    c.N = N;
    c.sigma = sh.sigma;
    c.left = sh.left;
    c.right = sh.right;
    const auto r = sample_reference(w, c, 0.0);
    GridState s = GridState::make(c);
    s.v = r.v;
    s.u = r.u;
    s.theta = r.th;
    const auto e = advance(s, kGas, 1.0);
    double d = 0.0;
    for (int i = 0; i < N; ++i) d = std::max(d, std::abs(e.v[i] - r.v[i]));
    EXPECT_LT(d, 1e-7);
    if (prev > 0.0) EXPECT_GT(prev / d, 3.5);
    prev = d;
  }
}
