#ifndef BNSF_EXPERIMENTS_HPP
#define BNSF_EXPERIMENTS_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "contraction.hpp"
#include "gas_model.hpp"
#include "shock_profile.hpp"
#include "solver.hpp"

namespace bnsf {

/// Gaussian bumps (c_v, c_u, c_th) * A * exp(-((x - center)/width)^2) added to
/// (v, u, theta / theta~), with A chosen so the a-weighted relative entropy equals E0.
struct PerturbationSpec {
  double E0 = 0.0;
  double center = 0.5;
  double width = 2.0;
  double c_v = 0.5;
  double c_u = 1.0;
  double c_th = 1.0;
  /// Measure E0 with the weight a th~ of the monitored entropy instead of a.
  bool theta_weighted = false;
};

struct PreparedData {
  GridState state;
  double amplitude = 0.0;
  double achieved_E0 = 0.0;  // int a eta(U0 | U~) dx
};

namespace detail {

inline double a_weighted_entropy(const GridState& s, const ReferenceSamples& r, const GasParams& g,
                                 bool theta_weighted = false) {
  const auto q = trapezoid_weights(s.size(), s.cfg.dx());
  double e = 0.0;
  for (int i = 0; i < s.size(); ++i)
    e += q[i] * r.a[i] * (theta_weighted ? r.th[i] : 1.0) *
         relative_entropy({s.v[i], s.u[i], s.theta[i]}, {r.v[i], r.u[i], r.th[i]}, g);
  return e;
}

inline GridState perturbed(const SolverConfig& c, const ReferenceSamples& r, const PerturbationSpec& p, double A) {
  GridState s = GridState::make(c);
  for (int i = 0; i < c.N; ++i) {
    const double z = (c.x(i) - p.center) / p.width;
    const double b = A * std::exp(-z * z);
    s.v[i] = r.v[i] + p.c_v * b;
    s.u[i] = r.u[i] + p.c_u * b;
    s.theta[i] = r.th[i] * (1.0 + p.c_th * b);
  }
  clamp_ends(s);
  return s;
}

inline bool positive(const GridState& s) {
  for (int i = 0; i < s.size(); ++i)
    if (!(s.v[i] > 0.0) || !(s.theta[i] > 0.0)) return false;
  return true;
}

}  // namespace detail

/// nu-scaled profile U~(x/nu) plus a nu-independent smooth perturbation of prescribed entropy.
inline PreparedData well_prepared_data(const Weight& w, const SolverConfig& c, const PerturbationSpec& p,
                                       const GasParams& g) {
  const auto r = sample_reference(w, c, 0.0);
  PreparedData out;
  if (p.E0 <= 0.0) {
    out.state = detail::perturbed(c, r, p, 0.0);
    out.achieved_E0 = detail::a_weighted_entropy(out.state, r, g, p.theta_weighted);
    return out;
  }
  auto entropy_at = [&](double A, bool& ok) {
    GridState s = detail::perturbed(c, r, p, A);
    ok = detail::positive(s);
    return ok ? detail::a_weighted_entropy(s, r, g, p.theta_weighted) : 0.0;
  };
  double lo = 0.0, hi = 1e-3;
  bool ok = true;
  while (entropy_at(hi, ok) < p.E0) {
    if (!ok) throw std::invalid_argument("well_prepared_data: E0 unreachable with positive fields");
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw std::invalid_argument("well_prepared_data: E0 unreachable");
  }
  if (!ok) {
    // shrink back into the positive range before bisecting
    while (!ok && hi - lo > 1e-15) {
      hi = 0.5 * (lo + hi);
      entropy_at(hi, ok);
    }
    if (entropy_at(hi, ok) < p.E0) throw std::invalid_argument("well_prepared_data: E0 unreachable with positive fields");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (entropy_at(mid, ok) < p.E0 && ok) lo = mid;
    else hi = mid;
  }
  out.amplitude = 0.5 * (lo + hi);
  out.state = detail::perturbed(c, r, p, out.amplitude);
  out.achieved_E0 = detail::a_weighted_entropy(out.state, r, g, p.theta_weighted);
  return out;
}

/// Fixed-frame cutoff: 1 on |x| <= r, 0 on |x| >= 2r. The ramp is the C-infinity
/// step e(s) / (e(s) + e(1-s)), e(s) = exp(-1/s), whose slope peaks at 2/r.
struct Cutoff {
  double r = 1.0;

  double operator()(double x) const {
    const double z = std::abs(x);
    if (z <= r) return 1.0;
    if (z >= 2 * r) return 0.0;
    return step((2 * r - z) / r);
  }
  double deriv(double x) const {
    const double z = std::abs(x);
    if (z <= r || z >= 2 * r) return 0.0;
    return (x > 0 ? -1.0 : 1.0) * step_deriv((2 * r - z) / r) / r;
  }

  static double step(double s) {
    const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
  }
  static double step_deriv(double s) {
    const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    const double da = a / (s * s), db = -b / ((1.0 - s) * (1.0 - s));
    return (da * b - a * db) / ((a + b) * (a + b));
  }
};

/// Pieces of the weak-form decomposition 0 = J1 + J2 + J3 + J4 + J5 at one time.
struct ShiftErrorPieces {
  double t = 0.0;
  double J1 = 0.0, J2 = 0.0, J3 = 0.0, J4 = 0.0, J5 = 0.0;
  double remainder = 0.0;      // O(dx^2) transport remainder of the centered scheme
  double closure = 0.0;        // J1 + ... + J5 + remainder
  double closure_scale = 0.0;  // magnitude of the summed terms, sets the roundoff level
  double quadrature_tol = 0.0;  // time-quadrature error estimate plus roundoff
  double measured = 0.0;      // X_nu(t) - sigma t
  double implied = 0.0;       // J5 / (v- - v+)
  double lemma_defect = 0.0;  // |J5 - measured (v- - v+)|
};

/// Time integrals of the J1, J4 and J5 integrands plus the transport remainder,
/// trapezoid rule over the solver steps.
class WeakFormAccumulator {
 public:
  using Rates = std::array<double, 4>;

  WeakFormAccumulator(const Weight& w, const GasParams& g, double r, double sigma)
      : w_(w), g_(g), psi_{r}, sigma_(sigma) {}

  void step(const GridState& a, const GridState& b, double Xa, double Xb) {
    if (times_.empty()) {
      times_.push_back(a.t);
      rates_.push_back(rates(a, Xa));
      hist_.push_back({0.0, 0.0, 0.0, 0.0});
    }
    const Rates ib = rates(b, Xb);
    const double dt = b.t - a.t;
    Rates c = hist_.back();
    for (int k = 0; k < 4; ++k) c[k] += 0.5 * dt * (rates_.back()[k] + ib[k]);
    times_.push_back(b.t);
    rates_.push_back(ib);
    hist_.push_back(c);
  }

  /// Cumulative integrals at a recorded step end t, with the per-step trapezoid
  /// error -dt^3 f''/12 subtracted (f'' by divided differences of the step rates).
  Rates at(double t) const {
    const std::size_t m = index(t);
    Rates c = hist_.empty() ? Rates{0.0, 0.0, 0.0, 0.0} : hist_[m];
    for (std::size_t k = 1; k <= m && times_.size() >= 3; ++k) {
      const auto f2 = second_derivative(k);
      const double dt = times_[k] - times_[k - 1];
      for (int j = 0; j < 4; ++j) c[j] -= dt * dt * dt / 12.0 * f2[j];
    }
    return c;
  }

  /// Sum over steps of dt^3/12 |f''|: the size of the correction applied in at().
  double quadrature_error(double t) const {
    const std::size_t m = index(t);
    double e = 0.0;
    for (std::size_t k = 1; k <= m && times_.size() >= 3; ++k) {
      const auto f2 = second_derivative(k);
      const double dt = times_[k] - times_[k - 1];
      for (int j = 0; j < 4; ++j) e += dt * dt * dt / 12.0 * std::abs(f2[j]);
    }
    return e;
  }

  const Cutoff& cutoff() const { return psi_; }

 private:
  Rates second_derivative(std::size_t k) const {
    const std::size_t c = std::clamp<std::size_t>(k, 1, times_.size() - 2);
    const double h0 = times_[c] - times_[c - 1], h1 = times_[c + 1] - times_[c];
    Rates f2;
    for (int j = 0; j < 4; ++j)
      f2[j] = 2.0 * ((rates_[c + 1][j] - rates_[c][j]) / h1 - (rates_[c][j] - rates_[c - 1][j]) / h0) / (h0 + h1);
    return f2;
  }

  std::size_t index(double t) const {
    if (times_.empty()) {
      if (t == 0.0) return 0;
      throw std::invalid_argument("WeakFormAccumulator: time not recorded");
    }
    auto it = std::lower_bound(times_.begin(), times_.end(), t - 1e-12);
    if (it == times_.end() || std::abs(*it - t) > 1e-9)
      throw std::invalid_argument("WeakFormAccumulator: time not recorded");
    return static_cast<std::size_t>(it - times_.begin());
  }

  // Summation-by-parts forms matching the discrete fluxes of the scheme: face
  // differences of psi for the diffusive flux, centered differences for u.
  Rates rates(const GridState& s, double X) const {
    const int n = s.size();
    const double h = s.cfg.dx(), nu = s.cfg.nu;
    std::vector<double> psi(n), dpsi(n);
    for (int i = 0; i < n; ++i) {
      const double x = s.cfg.x(i) + sigma_ * s.t;
      psi[i] = psi_(x);
      dpsi[i] = psi_.deriv(x);
    }
    Rates r{0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i + 1 < n; ++i) {
      const double dp = psi[i + 1] - psi[i];
      if (dp == 0.0) continue;
      const double ft = 0.5 * (g_.tau(s.theta[i]) / s.v[i] + g_.tau(s.theta[i + 1]) / s.v[i + 1]);
      r[0] += nu * dp * ft * (s.v[i + 1] - s.v[i]) / h;
    }
    for (int i = 1; i + 1 < n; ++i) {
      const double cp = 0.5 * (psi[i + 1] - psi[i - 1]);
      if (cp == 0.0 && dpsi[i] == 0.0) continue;
      const double ut = w_.profile->at((s.cfg.x(i) - X) / nu).val.u;
      r[1] += cp * (s.u[i] - ut);
      r[2] += cp * ut;
      r[3] += sigma_ * (h * dpsi[i] - cp) * s.v[i];
    }
    return r;
  }

  const Weight& w_;
  const GasParams& g_;
  Cutoff psi_;
  double sigma_;
  std::vector<double> times_;
  std::vector<Rates> rates_, hist_;
};

/// Spatial pieces at a stored snapshot plus the accumulated time integrals.
inline ShiftErrorPieces shift_error_estimate(const GridState& s, double X, const GridState& initial,
                                             const WeakFormAccumulator& acc, const Weight& w) {
  const auto& psi = acc.cutoff();
  const double sigma = w.profile->shock.sigma;
  const double nu = s.cfg.nu;
  const int n = s.size();
  const double h = s.cfg.dx();
  const auto q = detail::trapezoid_weights(n, h);
  // support condition |X_nu| <= r/3 on the fixed-frame shift
  const double Xfix = sigma * s.t + X;
  if (std::abs(Xfix) > psi.r / 3.0)
    throw std::invalid_argument("shift_error_estimate: cutoff radius too small, need r >= " +
                                std::to_string(3.0 * std::abs(Xfix)));
  if (2.0 * psi.r + std::abs(sigma) * s.t > s.cfg.L)
    throw std::invalid_argument("shift_error_estimate: cutoff support leaves the domain");
  ShiftErrorPieces p;
  p.t = s.t;
  double mag = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = s.cfg.x(i);
    const double x = xi + sigma * s.t;
    const double ps = psi(x);
    if (ps != 0.0) {
      const double vs = w.profile->at((xi - X) / nu).val.v;
      p.J2 += q[i] * ps * (s.v[i] - vs);
      mag += q[i] * ps * (std::abs(s.v[i]) + std::abs(vs));
    }
    // fixed-frame integrals over x, sampled on the same grid spacing
    const double ps0 = psi(xi);
    if (ps0 != 0.0) {
      const double v_x = w.profile->at(xi / nu).val.v;
      const double v_s = w.profile->at((xi - Xfix) / nu).val.v;
      p.J3 += q[i] * ps0 * (v_x - initial.v[i]);
      p.J5 += q[i] * ps0 * (v_s - v_x);
      mag += q[i] * ps0 * (2.0 * std::abs(v_x) + std::abs(initial.v[i]) + std::abs(v_s));
    }
  }
  const auto cum = acc.at(s.t);
  p.J1 = cum[0];
  p.J4 = cum[1];
  p.J5 += cum[2];
  p.remainder = -cum[3];
  p.closure = p.J1 + p.J2 + p.J3 + p.J4 + p.J5 + p.remainder;
  p.closure_scale = mag + std::abs(p.J1) + std::abs(p.J4) + std::abs(cum[2]) + std::abs(p.remainder);
  p.quadrature_tol = acc.quadrature_error(s.t) + 64.0 * std::numeric_limits<double>::epsilon() * p.closure_scale;
  const double jump = w.profile->shock.left.v - w.profile->shock.right.v;
  p.measured = X;
  p.implied = jump != 0.0 ? p.J5 / jump : 0.0;
  p.lemma_defect = std::abs(p.J5 - X * jump);
  return p;
}

/// Right side of the pointwise temperature bound on [-M, M]:
/// mean of theta + sqrt(int v) sqrt(int |(theta - theta~)_x|^2 / v) + TV of theta~.
struct ThetaBound {
  double sup_theta = 0.0;
  double mean_theta = 0.0;
  double gradient_term = 0.0;
  double profile_variation = 0.0;
  double bound = 0.0;
  bool holds = false;
};

inline ThetaBound pointwise_theta_bound(const GridState& s, const Weight& w, double X, double M,
                                        double extra_dissipation = 0.0) {
  if (!(M >= 1.0)) throw std::invalid_argument("pointwise_theta_bound: M must be at least 1");
  if (M > s.cfg.L) throw std::invalid_argument("pointwise_theta_bound: M exceeds the domain");
  const auto r = sample_reference(w, s.cfg, X);
  const double h = s.cfg.dx();
  const auto thx = detail::diff(s.theta, h);
  ThetaBound b;
  double int_th = 0.0, int_v = 0.0, diss = 0.0, len = 0.0;
  int prev = -1;
  for (int i = 0; i < s.size(); ++i) {
    const double x = s.cfg.x(i);
    if (x < -M || x > M) continue;
    b.sup_theta = std::max(b.sup_theta, s.theta[i]);
    if (prev >= 0) {
      const int j = prev;
      int_th += 0.5 * h * (s.theta[i] + s.theta[j]);
      int_v += 0.5 * h * (s.v[i] + s.v[j]);
      const double gi = thx[i] - r.th1[i], gj = thx[j] - r.th1[j];
      diss += 0.5 * h * (gi * gi / s.v[i] + gj * gj / s.v[j]);
      b.profile_variation += std::abs(r.th[i] - r.th[j]);
      len += h;
    }
    prev = i;
  }
  b.mean_theta = int_th / len;
  b.gradient_term = std::sqrt(int_v) * std::sqrt(diss + extra_dissipation);
  b.bound = b.mean_theta + b.gradient_term + b.profile_variation;
  b.holds = b.sup_theta <= b.bound;
  return b;
}

struct SweepConfig {
  std::vector<double> nu_list{0.2, 0.1, 0.05};
  double nu0 = 0.2;
  int N0 = 1024;
  int N_cap = 16384;
  double L = 150.0;
  double cfl = 0.5;
  double T = 1.0;
  double sample_every = 0.05;
  double r_support = 40.0;
  double delta3 = 0.1;
  double eps_shift = 0.0;
  PerturbationSpec perturbation;
  int threads = 1;

  void validate() const {
    if (nu_list.empty()) throw std::invalid_argument("sweep: nu_list must be nonempty");
    for (std::size_t i = 0; i < nu_list.size(); ++i) {
      if (!(nu_list[i] > 0.0)) throw std::invalid_argument("sweep: nu_list entries must be positive");
      if (i > 0 && !(nu_list[i] < nu_list[i - 1]))
        throw std::invalid_argument("sweep: nu_list must be strictly decreasing");
    }
    if (!(T > 0.0)) throw std::invalid_argument("sweep: T>0 violated");
    if (!(sample_every > 0.0)) throw std::invalid_argument("sweep: sample_every>0 violated");
    if (!(r_support > 0.0)) throw std::invalid_argument("sweep: r_support>0 violated");
    if (!(perturbation.E0 >= 0.0)) throw std::invalid_argument("sweep: E0>=0 violated");
  }
  int grid_for(double nu) const {
    const double n = std::round(N0 * nu0 / nu);
    return static_cast<int>(std::min<double>(n, N_cap));
  }
};

struct SweepRun {
  double nu = 0.0;
  int N = 0;
  std::string error;  // empty on success
  double achieved_E0 = 0.0;
  Trajectory trajectory;
  std::vector<ShiftErrorPieces> pieces;
  double entropy_initial = 0.0;
  double entropy_max = 0.0;
  double max_abs_shift = 0.0;        // max |X_nu(t) - sigma t|
  double lemma_constant = 0.0;       // max lemma_defect / (nu (t+1))
  double max_closure = 0.0;          // max |closure|
  double max_closure_ratio = 0.0;    // max |closure| / quadrature_tol
  bool ok() const { return error.empty(); }
};

struct SweepReport {
  std::vector<SweepRun> runs;       // ordered as nu_list
  std::vector<double> l1_distances;  // ||X_nu_k - X_nu_{k+1}||_{L1(0,T)}
};

inline SweepRun run_one_nu(double nu, const SweepConfig& cfg, const Weight& w, const GasParams& g) {
  SweepRun run;
  run.nu = nu;
  run.N = cfg.grid_for(nu);
  const ShockData& sh = w.profile->shock;
  SolverConfig c;
  c.L = cfg.L;
  c.N = run.N;
  c.cfl = cfg.cfl;
  c.nu = nu;
  c.frame = Frame::Moving;
  c.sigma = sh.sigma;
  c.left = sh.left;
  c.right = sh.right;
  c.validate();
  auto prep = well_prepared_data(w, c, cfg.perturbation, g);
  run.achieved_E0 = prep.achieved_E0;
  const GridState initial = prep.state;

  WeakFormAccumulator acc(w, g, cfg.r_support, sh.sigma);
  MonitorOptions o;
  o.T = cfg.T;
  o.sample_every = cfg.sample_every;
  o.eps_shift = cfg.eps_shift;
  o.delta3 = cfg.delta3;
  o.keep_states = true;
  o.on_step = [&](const GridState& a, const GridState& b, double Xa, double Xb) { acc.step(a, b, Xa, Xb); };
  run.trajectory = run_monitored(initial, w, g, o);

  const auto& smp = run.trajectory.samples;
  run.entropy_initial = smp.front().f.entropy;
  for (std::size_t k = 0; k < smp.size(); ++k) {
    run.entropy_max = std::max(run.entropy_max, smp[k].f.entropy);
    run.max_abs_shift = std::max(run.max_abs_shift, std::abs(smp[k].X));
    auto p = shift_error_estimate(run.trajectory.states[k], smp[k].X, initial, acc, w);
    run.lemma_constant = std::max(run.lemma_constant, p.lemma_defect / (nu * (p.t + 1.0)));
    run.max_closure = std::max(run.max_closure, std::abs(p.closure));
    if (p.quadrature_tol > 0.0)
      run.max_closure_ratio = std::max(run.max_closure_ratio, std::abs(p.closure) / p.quadrature_tol);
    else if (p.closure != 0.0)
      run.max_closure_ratio = std::numeric_limits<double>::infinity();
    run.pieces.push_back(p);
  }
  run.trajectory.states.clear();
  run.trajectory.states.shrink_to_fit();
  return run;
}

/// L1(0,T) distance of two shift histories sampled at the same times (trapezoid).
inline double l1_distance(const Trajectory& a, const Trajectory& b) {
  const auto& x = a.samples;
  const auto& y = b.samples;
  if (x.size() != y.size()) throw std::invalid_argument("l1_distance: sample grids differ");
  double d = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) {
    const double dt = x[k].t - x[k - 1].t;
    d += 0.5 * dt * (std::abs(x[k].X - y[k].X) + std::abs(x[k - 1].X - y[k - 1].X));
  }
  return d;
}

/// One monitored run per viscosity, in parallel; the report is ordered by nu_list.
inline SweepReport run_sweep(const SweepConfig& cfg, const Weight& w, const GasParams& g) {
  cfg.validate();
  const std::size_t m = cfg.nu_list.size();
  SweepReport rep;
  rep.runs.resize(m);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < m; k = next++) {
      try {
        rep.runs[k] = run_one_nu(cfg.nu_list[k], cfg, w, g);
      } catch (const std::exception& e) {
        rep.runs[k].nu = cfg.nu_list[k];
        rep.runs[k].N = cfg.grid_for(cfg.nu_list[k]);
        rep.runs[k].error = e.what();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(cfg.threads, static_cast<int>(m)));
  std::vector<std::thread> pool;
  for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (rep.runs[k].ok() && rep.runs[k + 1].ok())
      rep.l1_distances.push_back(l1_distance(rep.runs[k].trajectory, rep.runs[k + 1].trajectory));
    else
      rep.l1_distances.push_back(std::nan(""));
  }
  return rep;
}

}  // namespace bnsf

#endif
