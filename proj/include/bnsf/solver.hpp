#ifndef BNSF_SOLVER_HPP
#define BNSF_SOLVER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gas_model.hpp"

namespace bnsf {

enum class Frame { Fixed, Moving };

/// Non-divergence evolves (v, u, theta); divergence evolves (v, u, E) in flux form.
enum class Form { NonDivergence, Divergence };

struct SolverConfig {
  double L = 100.0;  // half-length, nodes span [-L, L]
  int N = 1024;      // node count including the two clamped end nodes
  double cfl = 0.5;
  double nu = 1.0;
  Frame frame = Frame::Moving;
  double sigma = 0.0;  // frame speed, used only when frame == Moving
  Form form = Form::NonDivergence;
  State left;   // far-field clamp values
  State right;

  void validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("grid: L>0 violated");
    if (N < 16) throw std::invalid_argument("grid: N>=16 violated");
    if (!(cfl > 0.0 && cfl <= 0.9)) throw std::invalid_argument("grid: 0<cfl<=0.9 violated");
    if (!(nu > 0.0)) throw std::invalid_argument("grid: nu>0 violated");
    if (!left.valid() || !right.valid()) throw std::invalid_argument("grid: clamp states invalid");
  }
  double dx() const { return 2.0 * L / (N - 1); }
  double x(int i) const { return -L + i * dx(); }
  double frame_speed() const { return frame == Frame::Moving ? sigma : 0.0; }
};

struct GridState {
  double t = 0.0;
  std::vector<double> v, u, theta;
  SolverConfig cfg;

  static GridState make(const SolverConfig& c) {
    GridState s;
    s.cfg = c;
    s.v.assign(c.N, 1.0);
    s.u.assign(c.N, 0.0);
    s.theta.assign(c.N, 1.0);
    return s;
  }
  int size() const { return static_cast<int>(v.size()); }
};

/// Time derivatives of the three evolved fields.
struct FieldRates {
  std::vector<double> a, b, c;
};

namespace detail {

inline void check_state(const std::vector<double>& v, const std::vector<double>& th, double t) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !(th[i] > 0.0) || !std::isfinite(v[i]) || !std::isfinite(th[i]))
      throw std::runtime_error("solver: invalid state (v or theta nonpositive or non-finite) at t=" +
                               std::to_string(t) + " cell " + std::to_string(i));
  }
}

}  // namespace detail

/// Method-of-lines right-hand side. For the non-divergence form the rates are
/// (v_t, u_t, theta_t); for the divergence form they are (v_t, u_t, E_t).
/// End nodes are clamped, their rates are zero.
inline FieldRates semi_discrete_rhs(const GridState& s, const GasParams& g) {
  const auto& c = s.cfg;
  const int n = s.size();
  const double h = c.dx(), nu = c.nu, sig = c.frame_speed();
  const double cv = g.cv();
  const auto& v = s.v;
  const auto& u = s.u;
  const auto& th = s.theta;
  detail::check_state(v, th, s.t);
  FieldRates r;
  r.a.assign(n, 0.0);
  r.b.assign(n, 0.0);
  r.c.assign(n, 0.0);

  // face coefficients tau/v, mu/v, kappa/v by arithmetic mean of node values
  std::vector<double> ftau(n - 1), fmu(n - 1), fkap(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    ftau[i] = 0.5 * (g.tau(th[i]) / v[i] + g.tau(th[i + 1]) / v[i + 1]);
    fmu[i] = 0.5 * (g.mu(th[i]) / v[i] + g.mu(th[i + 1]) / v[i + 1]);
    fkap[i] = 0.5 * (g.kappa(th[i]) / v[i] + g.kappa(th[i + 1]) / v[i + 1]);
  }

  if (c.form == Form::NonDivergence) {
    for (int i = 1; i + 1 < n; ++i) {
      const double vx = (v[i + 1] - v[i - 1]) / (2 * h);
      const double ux = (u[i + 1] - u[i - 1]) / (2 * h);
      const double tx = (th[i + 1] - th[i - 1]) / (2 * h);
      const double px = (pressure(g, v[i + 1], th[i + 1]) - pressure(g, v[i - 1], th[i - 1])) / (2 * h);
      const double dv = (ftau[i] * (v[i + 1] - v[i]) - ftau[i - 1] * (v[i] - v[i - 1])) / (h * h);
      const double du = (fmu[i] * (u[i + 1] - u[i]) - fmu[i - 1] * (u[i] - u[i - 1])) / (h * h);
      const double dt = (fkap[i] * (th[i + 1] - th[i]) - fkap[i - 1] * (th[i] - th[i - 1])) / (h * h);
      const double p = pressure(g, v[i], th[i]);
      r.a[i] = sig * vx + ux + nu * dv;
      r.b[i] = sig * ux - px + nu * du;
      r.c[i] = sig * tx + (-p * ux + nu * dt + nu * g.mu(th[i]) * ux * ux / v[i]) / cv;
    }
    return r;
  }

  // flux form: q_t = (F)_x with face fluxes
  std::vector<double> Fv(n - 1), Fu(n - 1), FE(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    const double p0 = pressure(g, v[i], th[i]), p1 = pressure(g, v[i + 1], th[i + 1]);
    const double E0 = total_energy(g, u[i], th[i]), E1 = total_energy(g, u[i + 1], th[i + 1]);
    const double um = 0.5 * (u[i] + u[i + 1]);
    const double ux = (u[i + 1] - u[i]) / h;
    Fv[i] = sig * 0.5 * (v[i] + v[i + 1]) + um + nu * ftau[i] * (v[i + 1] - v[i]) / h;
    Fu[i] = sig * um - 0.5 * (p0 + p1) + nu * fmu[i] * ux;
    FE[i] = sig * 0.5 * (E0 + E1) - 0.5 * (p0 * u[i] + p1 * u[i + 1]) + nu * fkap[i] * (th[i + 1] - th[i]) / h +
            nu * fmu[i] * um * ux;
  }
  for (int i = 1; i + 1 < n; ++i) {
    r.a[i] = (Fv[i] - Fv[i - 1]) / h;
    r.b[i] = (Fu[i] - Fu[i - 1]) / h;
    r.c[i] = (FE[i] - FE[i - 1]) / h;
  }
  return r;
}

/// cfl * min(dx / max wave speed, dx^2 / (2 nu max diffusion coefficient)).
inline double stable_dt(const GridState& s, const GasParams& g) {
  const auto& c = s.cfg;
  const int n = s.size();
  const double h = c.dx();
  double wave = 0.0, diff = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cs = std::sqrt(g.gamma * pressure(g, s.v[i], s.theta[i]) / s.v[i]);
    wave = std::max(wave, std::abs(c.frame_speed()) + cs);
  }
  for (int i = 0; i + 1 < n; ++i) {
    auto coef = [&](int k) {
      const double vk = s.v[k], tk = s.theta[k];
      return std::array<double, 3>{g.tau(tk) / vk, g.mu(tk) / vk, (g.gamma - 1.0) * g.kappa(tk) / (g.R * vk)};
    };
    const auto a = coef(i), b = coef(i + 1);
    for (int k = 0; k < 3; ++k) diff = std::max(diff, 0.5 * (a[k] + b[k]));
  }
  double dt = std::numeric_limits<double>::infinity();
  if (wave > 0.0) dt = std::min(dt, h / wave);
  if (diff > 0.0) dt = std::min(dt, h * h / (2.0 * c.nu * diff));
  return c.cfl * dt;
}

inline void clamp_ends(GridState& s) {
  const int n = s.size();
  s.v[0] = s.cfg.left.v;
  s.u[0] = s.cfg.left.u;
  s.theta[0] = s.cfg.left.theta;
  s.v[n - 1] = s.cfg.right.v;
  s.u[n - 1] = s.cfg.right.u;
  s.theta[n - 1] = s.cfg.right.theta;
}

/// One classical RK4 step of size dt.
inline void rk4_step(GridState& s, const GasParams& g, double dt) {
  const int n = s.size();
  const bool div = s.cfg.form == Form::Divergence;
  auto third = [&](const GridState& st, int i) {
    return div ? total_energy(g, st.u[i], st.theta[i]) : st.theta[i];
  };
  auto set_third = [&](GridState& st, int i, double q) {
    st.theta[i] = div ? (q - 0.5 * st.u[i] * st.u[i]) / g.cv() : q;
  };
  std::vector<double> q0(n);
  for (int i = 0; i < n; ++i) q0[i] = third(s, i);

  GridState st = s;
  FieldRates k[4];
  const double cstage[4] = {0.0, 0.5, 0.5, 1.0};
  for (int j = 0; j < 4; ++j) {
    if (j > 0) {
      const double c = cstage[j] * dt;
      for (int i = 0; i < n; ++i) {
        st.v[i] = s.v[i] + c * k[j - 1].a[i];
        st.u[i] = s.u[i] + c * k[j - 1].b[i];
        set_third(st, i, q0[i] + c * k[j - 1].c[i]);
      }
      st.t = s.t + c;
      clamp_ends(st);
    }
    k[j] = semi_discrete_rhs(st, g);
  }
  for (int i = 0; i < n; ++i) {
    s.v[i] += dt / 6.0 * (k[0].a[i] + 2 * k[1].a[i] + 2 * k[2].a[i] + k[3].a[i]);
    s.u[i] += dt / 6.0 * (k[0].b[i] + 2 * k[1].b[i] + 2 * k[2].b[i] + k[3].b[i]);
    set_third(s, i, q0[i] + dt / 6.0 * (k[0].c[i] + 2 * k[1].c[i] + 2 * k[2].c[i] + k[3].c[i]));
  }
  s.t += dt;
  clamp_ends(s);
  detail::check_state(s.v, s.theta, s.t);
}

using Observer = std::function<void(const GridState&)>;

/// Advance to t_end with RK4 steps of size stable_dt. When obs_every > 0 the
/// steps are clipped so the observer sees the state at every multiple of obs_every
/// (and at the start and end).
inline GridState advance(GridState s, const GasParams& g, double t_end, const Observer& observer = {},
                         double obs_every = 0.0) {
  if (t_end < s.t) throw std::invalid_argument("advance: t_end before current time");
  const double t0 = s.t;
  long next_obs = 1;
  if (observer) observer(s);
  while (s.t < t_end) {
    double target = t_end;
    if (obs_every > 0.0) target = std::min(target, t0 + next_obs * obs_every);
    double dt = stable_dt(s, g);
    const bool land = s.t + dt * (1.0 + 1e-9) >= target;
    if (land) dt = target - s.t;
    if (dt > 0.0) rk4_step(s, g, dt);
    if (!land) continue;
    s.t = target;
    if (obs_every > 0.0 && target < t_end) {
      ++next_obs;
      if (observer) observer(s);
    }
  }
  if (observer && t_end > t0) observer(s);
  return s;
}

/// Excess totals of (v, u, E) over a reference, trapezoid rule.
struct Totals {
  double V = 0.0, U = 0.0, E = 0.0;
};

inline Totals conserved_totals(const GridState& s, const GasParams& g, const std::vector<State>& ref) {
  const int n = s.size();
  if (static_cast<int>(ref.size()) != n) throw std::invalid_argument("conserved_totals: reference size mismatch");
  const double h = s.cfg.dx();
  Totals t;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    t.V += w * (s.v[i] - ref[i].v);
    t.U += w * (s.u[i] - ref[i].u);
    t.E += w * (total_energy(g, s.u[i], s.theta[i]) - total_energy(ref[i], g));
  }
  return t;
}

}  // namespace bnsf

#endif
