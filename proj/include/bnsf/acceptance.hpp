#ifndef BNSF_ACCEPTANCE_HPP
#define BNSF_ACCEPTANCE_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "contraction.hpp"
#include "experiments.hpp"
#include "gas_model.hpp"
#include "shock_profile.hpp"
#include "solver.hpp"
#include "verifiers.hpp"

namespace bnsf {

/// Outcome of one acceptance criterion.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int threads = 1;
};

namespace detail {

inline std::string printf_string(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

/// Default cold setup: R=1, gamma=1.4, tau0=1, left (1, 0, 0.1).
inline GasParams cold_gas() { return {}; }
inline State cold_left() { return {1.0, 0.0, 0.1}; }

inline SolverConfig profile_grid(const ShockData& sh, int N, double L = 720.0) {
  SolverConfig c;
  c.L = L;
  c.N = N;
  c.sigma = sh.sigma;
  c.left = sh.left;
  c.right = sh.right;
  return c;
}

inline GridState profile_state(const Weight& w, const SolverConfig& c) {
  const auto r = sample_reference(w, c, 0.0);
  GridState s = GridState::make(c);
  s.v = r.v;
  s.u = r.u;
  s.theta = r.th;
  clamp_ends(s);
  return s;
}

/// Full jump relations in (sigma, u+, theta+) for a given v+, solved by damped
/// Newton with a central-difference Jacobian.
inline std::array<double, 3> rh_newton_oracle(const State& a, double vp, double sigma0, const GasParams& g) {
  const double cv = g.cv();
  auto F = [&](const std::array<double, 3>& z) {
    const double s = z[0], u = z[1], th = z[2];
    const double pa = g.R * a.theta / a.v, pb = g.R * th / vp;
    const double Ea = cv * a.theta + 0.5 * a.u * a.u, Eb = cv * th + 0.5 * u * u;
    return std::array<double, 3>{-s * (vp - a.v) - (u - a.u), -s * (u - a.u) + (pb - pa),
                                 -s * (Eb - Ea) + (pb * u - pa * a.u)};
  };
  std::array<double, 3> z{sigma0, a.u, a.theta};
  auto norm = [](const std::array<double, 3>& r) { return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])}); };
  for (int it = 0; it < 200; ++it) {
    const auto r = F(z);
    if (norm(r) < 1e-15) break;
    Eigen::Matrix3d J;
    for (int j = 0; j < 3; ++j) {
      const double hj = 1e-7 * std::max(1.0, std::abs(z[j]));
      auto zp = z, zm = z;
      zp[j] += hj;
      zm[j] -= hj;
      const auto fp = F(zp), fm = F(zm);
      for (int i = 0; i < 3; ++i) J(i, j) = (fp[i] - fm[i]) / (2 * hj);
    }
    const Eigen::Vector3d d = J.fullPivLu().solve(Eigen::Vector3d(-r[0], -r[1], -r[2]));
    double step = 1.0;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      std::array<double, 3> zn{z[0] + step * d(0), z[1] + step * d(1), z[2] + step * d(2)};
      if (zn[2] > 0.0 && norm(F(zn)) < norm(r)) {
        z = zn;
        break;
      }
    }
  }
  return z;
}

inline double rel_err(double x, double ref, double scale) {
  return std::abs(x - ref) / std::max({std::abs(ref), scale, 1e-300});
}

inline double spread(const std::vector<double>& x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi / *lo;
}

}  // namespace detail

/// Closed-form jump relations against a Newton oracle; O(eps) speed defect.
inline CriterionResult criterion_rh(const AcceptanceOptions& o) {
  CriterionResult c{1, "rankine-hugoniot end states and speed defect", false, {}, 0.0};
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  int lax_fail = 0, drawn = 0;
  for (int k = 0; k < 20; ++k) {
    GasParams g;
    g.R = 0.5 + 1.5 * U(rng);
    g.gamma = 1.1 + 0.57 * U(rng);
    const State a{0.5 + 1.5 * U(rng), -1.0 + 2.0 * U(rng), 0.05 + 1.95 * U(rng)};
    const Family f = U(rng) < 0.5 ? Family::Three : Family::One;
    const double eps = a.v * (0.01 + 0.29 * U(rng));
    ++drawn;
    ShockData sh;
    try {
      sh = solve_end_state(a, eps, f, g);
    } catch (const std::exception&) {
      ++lax_fail;
      continue;
    }
    const double s0 = (f == Family::Three ? 1.0 : -1.0) * sigma_star(a, g);
    const auto z = detail::rh_newton_oracle(a, sh.right.v, s0, g);
    const double du = std::abs(sh.right.u - a.u);
    worst = std::max({worst, detail::rel_err(sh.sigma, z[0], 0.0), detail::rel_err(sh.right.u, z[1], du),
                      detail::rel_err(sh.right.theta, z[2], 0.0)});
  }
  std::vector<double> defect;
  const auto g = detail::cold_gas();
  for (double eps : {0.1, 0.05, 0.025}) {
    const auto sh = solve_end_state(detail::cold_left(), eps, Family::Three, g);
    defect.push_back(std::abs(sh.sigma - sigma_star(sh.left, g)) / eps);
  }
  const bool bounded = detail::spread(defect) <= 2.0;
  c.passed = worst <= 1e-10 && lax_fail == 0 && bounded;
  c.detail = detail::printf_string(
      "max rel err vs oracle %.3e (tol 1e-10) over %d pairs, %d inadmissible; |sigma-sigma*|/eps = %.4f %.4f %.4f",
      worst, drawn, lax_fail, defect[0], defect[1], defect[2]);
  return c;
}

/// ODE residual, monotonicity, ratio and Jacobian constants across eps halving.
inline CriterionResult criterion_profile(const AcceptanceOptions&) {
  CriterionResult c{2, "shock profile fidelity", false, {}, 0.0};
  const auto g = detail::cold_gas();
  double ode = 0.0;
  bool mono = true, tails = true;
  std::vector<double> cu, cj;
  for (double eps : {0.1, 0.05, 0.025}) {
    const auto sh = solve_end_state(detail::cold_left(), eps, Family::Three, g);
    const auto p = compute_profile(sh, g);
    const auto t = verify_tails(p);
    ode = std::max(ode, t.ode_residual);
    mono = mono && t.v_increasing && t.u_decreasing && t.theta_decreasing;
    tails = tails && t.tail_min > 0.0 && std::isfinite(t.tail_max);
    cu.push_back(t.ratio_u / eps);
    cj.push_back(t.jacobian_defect / (eps * eps));
  }
  const double su = std::max(detail::spread({cu[0], cu[1]}), detail::spread({cu[1], cu[2]}));
  const double sj = std::max(detail::spread({cj[0], cj[1]}), detail::spread({cj[1], cj[2]}));
  c.passed = ode <= 1e-9 && mono && tails && su <= 2.0 && sj <= 2.0;
  c.detail = detail::printf_string(
      "ode residual %.3e (tol 1e-9); monotone %s; ratio_u/eps %.4f %.4f %.4f; jacobian defect/eps^2 %.4f %.4f %.4f "
      "(eps 0.1 0.05 0.025)",
      ode, mono ? "yes" : "no", cu[0], cu[1], cu[2], cj[0], cj[1], cj[2]);
  return c;
}

/// Profile initial data in the moving frame with nu = 1 over T = 1.
inline CriterionResult criterion_steady(const AcceptanceOptions&) {
  CriterionResult c{3, "steady shock preservation", false, {}, 0.0};
  const auto g = detail::cold_gas();
  const auto sh = solve_end_state(detail::cold_left(), 0.05, Family::Three, g);
  const auto p = compute_profile(sh, g);
  const Weight w{0.5, &p};
  std::vector<double> dev;
  for (int N : {1024, 2048}) {
    const auto cfg = detail::profile_grid(sh, N);
    const auto s0 = detail::profile_state(w, cfg);
    const auto s1 = advance(s0, g, 1.0);
    std::array<double, 3> num{}, den{};
    for (int i = 0; i < N; ++i) {
      num[0] = std::max(num[0], std::abs(s1.v[i] - s0.v[i]));
      num[1] = std::max(num[1], std::abs(s1.u[i] - s0.u[i]));
      num[2] = std::max(num[2], std::abs(s1.theta[i] - s0.theta[i]));
      den[0] = std::max(den[0], std::abs(s0.v[i]));
      den[1] = std::max(den[1], std::abs(s0.u[i]));
      den[2] = std::max(den[2], std::abs(s0.theta[i]));
    }
    dev.push_back(std::max({num[0] / den[0], num[1] / den[1], num[2] / den[2]}));
  }
  const double gain = dev[0] / dev[1];
  c.passed = dev[0] <= 1e-4 && dev[1] <= 1e-4 && gain >= 3.5;
  c.detail = detail::printf_string("max relative deviation %.3e (N=1024), %.3e (N=2048), ratio %.2f (need >=3.5)",
                                   dev[0], dev[1], gain);
  return c;
}

/// Central-difference entropy identity on a perturbed run with a prescribed shift.
inline CriterionResult criterion_identity(const AcceptanceOptions&) {
  CriterionResult c{4, "entropy production identity", false, {}, 0.0};
  const auto g = detail::cold_gas();
  const auto sh = solve_end_state(detail::cold_left(), 0.05, Family::Three, g);
  const auto p = compute_profile(sh, g);
  const Weight w{0.5, &p};
  PerturbationSpec ps;
  ps.center = 10.0;
  ps.width = 30.0;
  const double tc = 1.6;
  const std::vector<double> hs{0.8, 0.4, 0.2, 0.1, 0.05};
  std::vector<double> floors;
  double worst_ratio = std::numeric_limits<double>::infinity();
  std::string rows;
  for (int N : {1024, 2048, 4096}) {
    const auto cfg = detail::profile_grid(sh, N);
    const auto s0 = detail::perturbed(cfg, sample_reference(w, cfg, 0.0), ps, 0.05);
    std::vector<double> res;
    for (double h : hs) {
      MonitorOptions mo;
      mo.T = tc + h;
      mo.sample_every = h;
      mo.X_of_t = [](double t) { return 5.0 * std::sin(t); };
      mo.Xdot_of_t = [](double t) { return 5.0 * std::cos(t); };
      const auto tr = run_monitored(s0, w, g, mo);
      const auto n = tr.samples.size();
      res.push_back(entropy_identity_residual(tr.samples[n - 3], tr.samples[n - 2], tr.samples[n - 1]).residual);
    }
    // successive differences remove the spatial floor
    for (std::size_t k = 0; k + 2 < res.size(); ++k)
      worst_ratio = std::min(worst_ratio, std::abs(res[k] - res[k + 1]) / std::abs(res[k + 1] - res[k + 2]));
    const std::size_t m = res.size();
    floors.push_back(std::abs((4.0 * res[m - 1] - res[m - 2]) / 3.0));
    rows += detail::printf_string(" N=%d residual(h=0.05)=%.3e floor=%.3e;", N, res[m - 1], floors.back());
  }
  const double f1 = floors[0] / floors[1], f2 = floors[1] / floors[2];
  c.passed = worst_ratio >= 3.5 && f1 >= 3.5 && f2 >= 3.5;
  c.detail = detail::printf_string("min time-halving ratio %.3f; floor ratios %.3f %.3f (need >=3.5);", worst_ratio,
                                   f1, f2) +
             rows;
  return c;
}

/// Decomposition identities of the functionals on random perturbed states.
inline CriterionResult criterion_algebraic(const AcceptanceOptions& o) {
  CriterionResult c{5, "algebraic functional identities", false, {}, 0.0};
  const auto g = detail::cold_gas();
  const auto sh = solve_end_state(detail::cold_left(), 0.05, Family::Three, g);
  const auto p = compute_profile(sh, g);
  const Weight w{0.5, &p};
  std::mt19937_64 rng(o.seed + 5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto cfg = detail::profile_grid(sh, 1024);
  std::array<double, 4> worst{};
  int both_branches = 0;
  for (int k = 0; k < 50; ++k) {
    PerturbationSpec ps;
    ps.center = -100.0 + 200.0 * U(rng);
    ps.width = 5.0 + 60.0 * U(rng);
    ps.c_v = -0.5 + U(rng);
    ps.c_u = -1.0 + 2.0 * U(rng);
    ps.c_th = -1.0 + 2.0 * U(rng);
    const double X = -20.0 + 40.0 * U(rng);
    const double delta3 = 0.005 + 0.1 * U(rng);
    const auto r = sample_reference(w, cfg, X);
    auto s = detail::perturbed(cfg, r, ps, 0.02 + 0.2 * U(rng));
    if (!detail::positive(s)) {
      --k;
      continue;
    }
    const auto f = eval_functionals(s, r, w, g, delta3);
    if (f.B1_plus != 0.0 && f.B1_minus != 0.0) ++both_branches;
    auto rel = [](double lhs, double rhs, std::initializer_list<double> terms) {
      double sc = 0.0;
      for (double t : terms) sc = std::max(sc, std::abs(t));
      return sc > 0.0 ? std::abs(lhs - rhs) / sc : std::abs(lhs - rhs);
    };
    const double e1 = rel(f.J_bad - f.J_good, f.B_delta - f.G_delta, {f.J_bad, f.J_good, f.B_delta, f.G_delta});
    const double e2 = rel(f.B_delta, f.B1_plus + f.B1_minus + f.B2 + f.B3 + f.B4,
                          {f.B_delta, f.B1_plus, f.B1_minus, f.B2, f.B3, f.B4});
    const double e3 = rel(f.Y, f.Y_g + f.Y_b + f.Y_l + f.Y_s, {f.Y, f.Y_g, f.Y_b, f.Y_l, f.Y_s});
    const double e4 = rel(f.D, f.D_v1 + f.D_v2 + f.D_u + f.D_th, {f.D, f.D_v1, f.D_v2, f.D_u, f.D_th});
    worst = {std::max(worst[0], e1), std::max(worst[1], e2), std::max(worst[2], e3), std::max(worst[3], e4)};
  }
  c.passed = *std::max_element(worst.begin(), worst.end()) <= 1e-12;
  c.detail = detail::printf_string(
      "max rel defect J: %.2e, B: %.2e, Y: %.2e, D: %.2e (tol 1e-12); %d/50 states split across both branches",
      worst[0], worst[1], worst[2], worst[3], both_branches);
  return c;
}

/// Contraction runs shared by the contraction and shift-bound criteria.
struct ContractionStudy {
  struct Run {
    double E0 = 0.0;
    int N = 0;
    double initial = 0.0;
    double allowance = 0.0;  // max over s <= t of E(t) - E(s)
    long bound_violations = 0;
    long samples = 0;
    double max_shift_speed = 0.0;
  };
  std::vector<Run> runs;  // E0-major, then N
  std::string error;
};

inline ContractionStudy run_contraction_study(const std::vector<double>& E0s = {1e-3, 1e-2, 1e-1},
                                              const std::vector<int>& Ns = {1024, 2048}, double T = 5.0) {
  ContractionStudy st;
  const auto g = detail::cold_gas();
  const double eps = 0.05;
  const auto sh = solve_end_state(detail::cold_left(), eps, Family::Three, g);
  const auto p = compute_profile(sh, g);
  const Weight w{10.0 * eps, &p};
  try {
    for (double E0 : E0s) {
      for (int N : Ns) {
        const auto cfg = detail::profile_grid(sh, N);
        PerturbationSpec ps;
        ps.E0 = E0;
        ps.center = 10.0;
        ps.width = 30.0;
        ps.theta_weighted = true;
        const auto prep = well_prepared_data(w, cfg, ps, g);
        MonitorOptions mo;
        mo.T = T;
        mo.sample_every = 0.05;
        const auto tr = run_monitored(prep.state, w, g, mo);
        ContractionStudy::Run r;
        r.E0 = E0;
        r.N = N;
        r.initial = tr.samples.front().f.entropy;
        double lowest = r.initial;
        for (const auto& s : tr.samples) {
          lowest = std::min(lowest, s.f.entropy);
          r.allowance = std::max(r.allowance, s.f.entropy - lowest);
          ++r.samples;
          if (std::abs(s.Xdot) > shift_gain(s.f) / (eps * eps)) ++r.bound_violations;
          r.max_shift_speed = std::max(r.max_shift_speed, std::abs(s.Xdot));
        }
        st.runs.push_back(r);
      }
    }
  } catch (const std::exception& e) {
    st.error = e.what();
  }
  return st;
}

inline CriterionResult criterion_contraction(const ContractionStudy& st) {
  CriterionResult c{6, "weighted relative entropy contraction", false, {}, 0.0};
  if (!st.error.empty()) {
    c.detail = "run failed: " + st.error;
    return c;
  }
  c.passed = !st.runs.empty();
  for (std::size_t k = 0; k + 1 < st.runs.size(); k += 2) {
    const auto& a = st.runs[k];
    const auto& b = st.runs[k + 1];
    const bool small = a.allowance <= 1e-3 * a.initial && b.allowance <= 1e-3 * b.initial;
    const bool shrinks = b.allowance <= a.allowance / 3.0 || b.allowance <= 1e-12 * b.initial;
    c.passed = c.passed && small && shrinks;
    c.detail += detail::printf_string("E0=%.0e: allowance/E0 %.2e (N=%d) %.2e (N=%d); ", a.E0,
                                      a.allowance / a.initial, a.N, b.allowance / b.initial, b.N);
  }
  return c;
}

inline CriterionResult criterion_shift_bound(const ContractionStudy& st) {
  CriterionResult c{7, "shift speed bound", false, {}, 0.0};
  if (!st.error.empty()) {
    c.detail = "run failed: " + st.error;
    return c;
  }
  long n = 0, bad = 0;
  double fastest = 0.0;
  for (const auto& r : st.runs) {
    n += r.samples;
    bad += r.bound_violations;
    fastest = std::max(fastest, r.max_shift_speed);
  }
  c.passed = n > 0 && bad == 0;
  c.detail = detail::printf_string("%ld of %ld samples exceed (2|J_bad|+2|J_para|+1)/eps^2; max |X'| %.3e", bad, n,
                                   fastest);
  return c;
}

/// Random plus ascent search for positive R_delta; gradient check.
inline CriterionResult criterion_poincare(const AcceptanceOptions& o) {
  CriterionResult c{8, "poincare-type inequality search", false, {}, 0.0};
  std::vector<double> worst;
  for (int N : {256, 512, 1024}) {
    PoincareSearchOptions po;
    po.N = N;
    po.seed = o.seed;
    worst.push_back(search_poincare_violations(po).worst);
  }
  bool decreasing = true;
  for (std::size_t k = 0; k + 1 < worst.size(); ++k)
    decreasing = decreasing && std::max(worst[k + 1], 0.0) <= std::max(worst[k], 0.0);

  std::mt19937_64 rng(o.seed + 8);
  std::normal_distribution<double> nd;
  TestFunctionW f;
  f.w.resize(512);
  for (auto& x : f.w) x = 0.3 * nd(rng);
  const auto grad = r_delta_gradient(f, 0.01);
  double gerr = 0.0;
  for (int i = 0; i < f.size(); i += 17) {
    auto a = f, b = f;
    const double e = 1e-4;
    a.w[i] += e;
    b.w[i] -= e;
    const double fd = (r_delta(a, 0.01) - r_delta(b, 0.01)) / (2 * e);
    gerr = std::max(gerr, std::abs(fd - grad[i]) / std::max(std::abs(grad[i]), 1e-300));
  }
  c.passed = worst[1] <= 1e-6 && decreasing && gerr <= 1e-6;
  c.detail = detail::printf_string(
      "max R found %.3e (N=512, tol 1e-6); N=256 %.3e, N=1024 %.3e; gradient rel err %.2e (tol 1e-6)", worst[1],
      worst[0], worst[2], gerr);
  return c;
}

/// Quartic lemma scan and polynomial region scan.
inline CriterionResult criterion_poly(const AcceptanceOptions& o) {
  CriterionResult c{9, "quartic and polynomial region scans", false, {}, 0.0};
  const auto q = quartic_scan(2000000, -1e-6, o.threads);
  const bool quartic_ok = q.max_h < 0.0 && q.h_at_minus2 == -4.0 / 3.0 && q.h_at_0 == 0.0;
  const double delta = 0.01, tol = 1e-9;
  const double d1 = bisect_delta1(delta, 2000, tol, 0.5, 20, o.threads);
  const auto s = scan_poly_region(delta, d1, 2000, o.threads);
  const bool poly_ok = s.max_gap <= tol;
  c.passed = quartic_ok && poly_ok;
  c.detail = detail::printf_string(
      "quartic max %.3e on [-2,-1e-6], h(-2)=%.17g, h(0)=%g; poly max gap %.3e at delta=0.01 delta1=%.3g "
      "(tol 1e-9, attained at (%.4f, %.4f))",
      q.max_h, q.h_at_minus2, q.h_at_0, s.max_gap, d1, s.arg_z1, s.arg_z2);
  if (!poly_ok) {
    const double ds = bisect_delta_star(0.0, 1000, tol, 1e-5, 0.05, 30, o.threads);
    c.detail += detail::printf_string(
        "; gap is positive on the circle itself, so no delta1 region exists at delta=0.01; largest passing delta "
        "with delta1=0 is %.3e",
        ds);
  }
  return c;
}

/// Inviscid-limit sweep with and without a perturbation.
inline CriterionResult criterion_sweep(const AcceptanceOptions& o) {
  CriterionResult c{10, "inviscid-limit sweep", false, {}, 0.0};
  const auto g = detail::cold_gas();
  const auto sh = solve_end_state(detail::cold_left(), 0.05, Family::Three, g);
  const auto p = compute_profile(sh, g);
  const Weight w{0.5, &p};
  SweepConfig cfg;
  cfg.nu_list = {0.2, 0.1, 0.05};
  cfg.threads = o.threads;
  cfg.perturbation.E0 = 1e-3;
  const auto rep = run_sweep(cfg, w, g);
  cfg.perturbation.E0 = 0.0;
  const auto rest = run_sweep(cfg, w, g);

  for (const auto* r : {&rep, &rest})
    for (const auto& run : r->runs)
      if (!run.ok()) {
        c.detail = detail::printf_string("nu=%g failed: %s", run.nu, run.error.c_str());
        return c;
      }
  bool entropy_ok = true, closure_ok = true, stable = true, l1_ok = true;
  double worst_closure = 0.0, worst_entropy = 0.0;
  for (const auto& run : rep.runs) {
    worst_entropy = std::max(worst_entropy, run.entropy_max / run.entropy_initial - 1.0);
    entropy_ok = entropy_ok && run.entropy_max <= run.entropy_initial * (1.0 + 1e-3);
    worst_closure = std::max(worst_closure, run.max_closure_ratio);
    closure_ok = closure_ok && run.max_closure_ratio <= 1.0;
  }
  for (std::size_t k = 0; k + 1 < rep.runs.size(); ++k)
    stable = stable && rep.runs[k + 1].lemma_constant <= 2.0 * rep.runs[k].lemma_constant + 1e-8;
  for (std::size_t k = 0; k + 1 < rep.l1_distances.size(); ++k)
    l1_ok = l1_ok && rep.l1_distances[k + 1] < rep.l1_distances[k];
  double rest_shift = 0.0;
  for (const auto& run : rest.runs) rest_shift = std::max(rest_shift, run.max_abs_shift);
  const double jump = std::abs(sh.right.v - sh.left.v);
  const bool rest_ok = rest_shift * jump <= 1e-6;
  c.passed = entropy_ok && closure_ok && stable && l1_ok && rest_ok && rep.l1_distances.size() >= 2;
  c.detail = detail::printf_string(
      "entropy excess %.2e (tol 1e-3); L1 shift distances %.4e %.4e; closure/tol max %.3f; lemma constants %.2e "
      "%.2e %.2e; E0=0 max|X|*|[v]| %.2e (tol 1e-6)",
      worst_entropy, rep.l1_distances[0], rep.l1_distances[1], worst_closure, rep.runs[0].lemma_constant,
      rep.runs[1].lemma_constant, rep.runs[2].lemma_constant, rest_shift * jump);
  return c;
}

/// Divergence-form totals of a compact perturbation relative to the unperturbed run.
inline CriterionResult criterion_conservation(const AcceptanceOptions&) {
  CriterionResult c{11, "divergence-form conservation", false, {}, 0.0};
  const auto g = detail::cold_gas();
  const auto sh = solve_end_state(detail::cold_left(), 0.05, Family::Three, g);
  const auto p = compute_profile(sh, g);
  const Weight w{0.5, &p};
  auto cfg = detail::profile_grid(sh, 2048);
  cfg.form = Form::Divergence;
  const auto r = sample_reference(w, cfg, 0.0);
  std::vector<State> ref(cfg.N);
  for (int i = 0; i < cfg.N; ++i) ref[i] = {r.v[i], r.u[i], r.th[i]};
  PerturbationSpec ps;
  ps.center = 0.0;
  ps.width = 5.0;
  const auto base0 = detail::profile_state(w, cfg);
  const auto pert0 = detail::perturbed(cfg, r, ps, 0.05);
  const auto base1 = advance(base0, g, 1.0);
  const auto pert1 = advance(pert0, g, 1.0);
  auto excess = [&](const GridState& a, const GridState& b) {
    const auto ta = conserved_totals(a, g, ref), tb = conserved_totals(b, g, ref);
    return std::array<double, 3>{ta.V - tb.V, ta.U - tb.U, ta.E - tb.E};
  };
  const auto e0 = excess(pert0, base0), e1 = excess(pert1, base1);
  std::array<double, 3> l1{};
  const double h = cfg.dx();
  for (int i = 0; i < cfg.N; ++i) {
    l1[0] += h * std::abs(pert0.v[i] - base0.v[i]);
    l1[1] += h * std::abs(pert0.u[i] - base0.u[i]);
    l1[2] += h * std::abs(total_energy(g, pert0.u[i], pert0.theta[i]) - total_energy(g, base0.u[i], base0.theta[i]));
  }
  std::array<double, 3> drift{};
  for (int k = 0; k < 3; ++k) drift[k] = std::abs(e1[k] - e0[k]) / l1[k];
  c.passed = *std::max_element(drift.begin(), drift.end()) <= 1e-8;
  c.detail = detail::printf_string("relative drift of (v, u, E) totals over T=1: %.2e %.2e %.2e (tol 1e-8)", drift[0],
                                   drift[1], drift[2]);
  return c;
}

inline constexpr int kCriteria = 11;

/// Runs the selected criteria (1..11) in order; criteria 6 and 7 share their runs.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o, std::vector<int> ids = {},
                                                   const std::function<void(const CriterionResult&)>& report = {}) {
  if (ids.empty())
    for (int i = 1; i <= kCriteria; ++i) ids.push_back(i);
  std::vector<CriterionResult> out;
  ContractionStudy study;
  bool have_study = false;
  for (int id : ids) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      switch (id) {
        case 1: r = criterion_rh(o); break;
        case 2: r = criterion_profile(o); break;
        case 3: r = criterion_steady(o); break;
        case 4: r = criterion_identity(o); break;
        case 5: r = criterion_algebraic(o); break;
        case 6:
        case 7:
          if (!have_study) {
            study = run_contraction_study();
            have_study = true;
          }
          r = id == 6 ? criterion_contraction(study) : criterion_shift_bound(study);
          break;
        case 8: r = criterion_poincare(o); break;
        case 9: r = criterion_poly(o); break;
        case 10: r = criterion_sweep(o); break;
        case 11: r = criterion_conservation(o); break;
        default: throw std::invalid_argument("acceptance: unknown criterion " + std::to_string(id));
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) report(r);
    out.push_back(r);
  }
  return out;
}

/// "PASS [ 3] name (1.2 s): detail"
inline std::string format_result(const CriterionResult& r) {
  return detail::printf_string("%s [%2d] %s (%.1f s): ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                               r.seconds) +
         r.detail;
}

}  // namespace bnsf

#endif
