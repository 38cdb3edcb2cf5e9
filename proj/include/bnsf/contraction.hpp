#ifndef BNSF_CONTRACTION_HPP
#define BNSF_CONTRACTION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gas_model.hpp"
#include "shock_profile.hpp"
#include "solver.hpp"

namespace bnsf {

/// a = 1 + lambda (v~ - v-)/(v+ - v-), affine in the profile volume.
struct Weight {
  double lambda = 0.5;
  const ShockProfile* profile = nullptr;

  double jump() const { return profile->shock.right.v - profile->shock.left.v; }
};

inline std::pair<double, double> weight_at(const Weight& w, double xi) {
  const auto s = w.profile->at(xi);
  const double jv = w.jump();
  if (jv == 0.0) return {1.0, 0.0};
  return {1.0 + w.lambda * (s.val.v - w.profile->shock.left.v) / jv, w.lambda / jv * s.d1.v};
}

/// Profile, its derivatives and the weight at every node x_i, evaluated at
/// (x_i - X)/nu. Derivatives are with respect to x.
struct ReferenceSamples {
  std::vector<double> v, u, th, v1, u1, th1, v2, u2, th2, a, a1;
};

inline ReferenceSamples sample_reference(const Weight& w, const SolverConfig& c, double X) {
  const int n = c.N;
  ReferenceSamples r;
  for (auto* f : {&r.v, &r.u, &r.th, &r.v1, &r.u1, &r.th1, &r.v2, &r.u2, &r.th2, &r.a, &r.a1}) f->resize(n);
  const double nu = c.nu, jv = w.jump(), vm = w.profile->shock.left.v;
  for (int i = 0; i < n; ++i) {
    const auto s = w.profile->at((c.x(i) - X) / nu);
    r.v[i] = s.val.v;
    r.u[i] = s.val.u;
    r.th[i] = s.val.theta;
    r.v1[i] = s.d1.v / nu;
    r.u1[i] = s.d1.u / nu;
    r.th1[i] = s.d1.theta / nu;
    r.v2[i] = s.d2.v / (nu * nu);
    r.u2[i] = s.d2.u / (nu * nu);
    r.th2[i] = s.d2.theta / (nu * nu);
    r.a[i] = jv == 0.0 ? 1.0 : 1.0 + w.lambda * (s.val.v - vm) / jv;
    r.a1[i] = jv == 0.0 ? 0.0 : w.lambda / jv * r.v1[i];
  }
  return r;
}

/// Every scalar functional of one time slice. D and J_para include the factor nu.
struct FunctionalReport {
  double entropy = 0.0;
  double Y = 0.0, Y_g = 0.0, Y_b = 0.0, Y_l = 0.0, Y_s = 0.0;
  double J_bad = 0.0, J_good = 0.0;
  double J_para = 0.0, B_v = 0.0, B_u = 0.0, B_th = 0.0;
  double D = 0.0, D_v1 = 0.0, D_v2 = 0.0, D_u = 0.0, D_th = 0.0;
  double B_delta = 0.0, B1_plus = 0.0, B1_minus = 0.0, B2 = 0.0, B3 = 0.0, B4 = 0.0;
  double G_delta = 0.0, G_u_minus = 0.0, G_u_plus = 0.0, G_v = 0.0, G_th = 0.0;
  double delta3 = 0.1;

  /// Right side of the entropy production identity for a given shift velocity.
  double production(double Xdot) const { return Xdot * Y + J_bad + J_para - J_good - D; }
};

namespace detail {

inline std::vector<double> trapezoid_weights(int n, double h) {
  std::vector<double> w(n, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

/// Centered first difference, second-order one-sided at the ends.
inline std::vector<double> diff(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
  d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
  d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
  return d;
}

}  // namespace detail

/// Weighted relative entropy  sum_i w_i (a th~)(x_i - X) eta(U_i | U~(x_i - X)).
inline double weighted_relative_entropy(const GridState& s, double X, const Weight& w, const GasParams& g) {
  const auto r = sample_reference(w, s.cfg, X);
  const auto q = detail::trapezoid_weights(s.size(), s.cfg.dx());
  double e = 0.0;
  for (int i = 0; i < s.size(); ++i)
    e += q[i] * r.a[i] * r.th[i] * relative_entropy({s.v[i], s.u[i], s.theta[i]}, {r.v[i], r.u[i], r.th[i]}, g);
  return e;
}

inline FunctionalReport eval_functionals(const GridState& s, const ReferenceSamples& r, const Weight& w,
                                         const GasParams& g, double delta3) {
  if (!(delta3 > 0.0)) throw std::invalid_argument("eval_functionals: delta3 must be positive");
  const int n = s.size();
  const double h = s.cfg.dx(), nu = s.cfg.nu;
  const double R = g.R, cv = g.cv(), t0 = g.tau0;
  const double sig = w.profile->shock.sigma;
  const auto q = detail::trapezoid_weights(n, h);

  std::vector<double> inv(n);
  for (int i = 0; i < n; ++i) inv[i] = 1.0 / s.v[i];
  const auto inv_x = detail::diff(inv, h);
  const auto u_x = detail::diff(s.u, h);
  const auto th_x = detail::diff(s.theta, h);

  FunctionalReport f;
  f.delta3 = delta3;
  for (int i = 0; i < n; ++i) {
    const double v = s.v[i], u = s.u[i], th = s.theta[i];
    const double vt = r.v[i], ut = r.u[i], tt = r.th[i];
    const double vt1 = r.v1[i], ut1 = r.u1[i], tt1 = r.th1[i];
    const double vt2 = r.v2[i], ut2 = r.u2[i], tt2 = r.th2[i];
    const double a = r.a[i], a1 = r.a1[i], wq = q[i];

    const double W = 1.0 / v - 1.0 / vt;
    const double ivt1 = -vt1 / (vt * vt);  // (1/v~)'
    const double Wx = inv_x[i] - ivt1;
    const double du = u - ut, dux = u_x[i] - ut1;
    const double dth = th - tt, dthx = th_x[i] - tt1;
    const double p = R * th / v, pt = R * tt / vt, dp = p - pt;
    const double Pv = phi(v / vt), Pt = phi(th / tt);
    const double eta = R * Pv + cv * Pt + du * du / (2 * tt);
    const double at = a * tt, at1 = a1 * tt + a * tt1;
    const double Q = 2 * tt * tt1 * vt1 / vt + (t0 + tt * tt) * (vt2 / vt - vt1 * vt1 / (vt * vt));
    const double tv = v * (t0 + th * th), tvt = vt * (t0 + tt * tt);
    const bool in_omega = W <= delta3;
    const double lin = a * (R * tt * (v - vt) * vt1 / (vt * vt) + cv * dth * tt1 / tt);
    const double phis = a * (R * Pv + cv * Pt) * tt1;

    f.entropy += wq * at * eta;
    f.Y += wq * (-a1 * tt * eta - phis + lin + a * du * ut1);
    f.J_bad += wq * (a1 * dp * du - sig * phis + a * dp * (v - vt) * ut1 / vt);
    f.J_good += wq * (R * sig * a1 * tt * Pv + cv * sig * a1 * tt * Pt + 0.5 * sig * a1 * du * du);

    f.D_v1 += wq * nu * R * t0 * at * v * Wx * Wx;
    f.D_v2 += wq * nu * R * at * v * th * th * Wx * Wx;
    f.D_u += wq * nu * at * th / v * dux * dux;
    f.D_th += wq * nu * a * tt / v * dthx * dthx;

    f.B_v += wq * nu * R *
             (-at1 * tv * W * Wx - at * (tv - tvt) * Wx * ivt1 - at1 * (tv - tvt) * W * ivt1 - at * v * W * W * Q);
    f.B_u += wq * nu *
             (-a1 * th * th / v * du * dux + 2 * a * th / v * dth * dux * ut1 + 2 * a * du * th / v * dthx * ut1 +
              a * du * th * th * Wx * ut1 + a * du * (th * th / v - tt * tt / vt) * ut2 +
              2 * a * du * (th / v - tt / vt) * tt1 * ut1 + a * dth * (th / v - tt / vt) * ut1 * ut1 +
              a * du * (th * th - tt * tt) * ivt1 * ut1);
    f.B_th += wq * nu *
              (-a1 * th * dth / v * dthx + 3 * a * dth / v * dthx * tt1 + a * dth * th * Wx * tt1 +
               a * dth * dth / v * tt2 + a * tt * dth * W * tt2 + 2 * a * dth * W * tt1 * tt1 +
               a * dth * dth * ivt1 * tt1);

    const double wmq = du - dp / sig;
    if (in_omega) {
      f.B1_plus += wq * a1 * dp * dp / (2 * sig);
      f.G_u_plus += wq * 0.5 * sig * a1 * wmq * wmq;
      f.Y_g += wq * (-a1 * (R * tt * Pv + cv * tt * Pt + dp * dp / (2 * sig * sig)) - phis + lin +
                     a * dp / sig * ut1);
      f.Y_b += wq * (-0.5 * a1 * wmq * wmq - a1 * dp * wmq / sig);
      f.Y_l += wq * a * wmq * ut1;
    } else {
      f.B1_minus += wq * a1 * dp * du;
      f.G_u_minus += wq * 0.5 * sig * a1 * du * du;
      f.Y_s += wq * (-a1 * (R * tt * Pv + cv * tt * Pt + 0.5 * du * du) - phis + lin + a * du * ut1);
    }
    f.B2 += wq * (-a * v * dp * W * ut1);
    f.B3 += wq * (-R * sig * a * Pv * tt1);
    f.B4 += wq * (-cv * sig * a * Pt * tt1);
    f.G_v += wq * R * sig * a1 * tt * Pv;
    f.G_th += wq * cv * sig * a1 * tt * Pt;
  }
  f.J_para = f.B_v + f.B_u + f.B_th;
  f.D = f.D_v1 + f.D_v2 + f.D_u + f.D_th;
  f.B_delta = f.B1_plus + f.B1_minus + f.B2 + f.B3 + f.B4;
  f.G_delta = f.G_u_minus + f.G_u_plus + f.G_v + f.G_th;
  return f;
}

inline FunctionalReport eval_functionals(const GridState& s, double X, const Weight& w, const GasParams& g,
                                         double delta3 = 0.1) {
  return eval_functionals(s, sample_reference(w, s.cfg, X), w, g, delta3);
}

/// Continuous saturation of -y/eps^4 at +-1/eps^2.
inline double phi_eps(double y, double eps) {
  const double cap = 1.0 / (eps * eps);
  if (y <= -eps * eps) return cap;
  if (y >= eps * eps) return -cap;
  return std::clamp(-y / (eps * eps * eps * eps), -cap, cap);
}

inline double shift_gain(const FunctionalReport& f) { return 2.0 * std::abs(f.J_bad) + 2.0 * std::abs(f.J_para) + 1.0; }

inline double shift_rhs(const FunctionalReport& f, double eps) { return phi_eps(f.Y, eps) * shift_gain(f); }

inline double shift_rhs(const GridState& s, double X, const Weight& w, const GasParams& g, double eps,
                        double delta3 = 0.1) {
  return shift_rhs(eval_functionals(s, X, w, g, delta3), eps);
}

struct MonitorOptions {
  double T = 1.0;
  double sample_every = 0.1;
  double eps_shift = 0.0;  // 0 selects the shock amplitude
  double delta3 = 0.1;
  /// Cap sub-steps at min(dt, eps^4 / gain) instead of the stiffness-based rule.
  bool strict_substeps = false;
  /// Prescribed shift; when set the shift ODE is not integrated.
  std::function<double(double)> X_of_t;
  std::function<double(double)> Xdot_of_t;
  bool keep_states = false;
  /// Called after every solver step with the states and shifts at both ends.
  std::function<void(const GridState&, const GridState&, double, double)> on_step;
};

struct TrajectorySample {
  double t = 0.0;
  double X = 0.0;
  double Xdot = 0.0;
  FunctionalReport f;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<GridState> states;  // filled when keep_states
  GridState final_state;
  long solver_steps = 0;
  long shift_substeps = 0;
};

namespace detail {

inline GridState lerp_state(const GridState& a, const GridState& b, double s) {
  GridState r = a;
  for (int i = 0; i < a.size(); ++i) {
    r.v[i] = a.v[i] + s * (b.v[i] - a.v[i]);
    r.u[i] = a.u[i] + s * (b.u[i] - a.u[i]);
    r.theta[i] = a.theta[i] + s * (b.theta[i] - a.theta[i]);
  }
  r.t = a.t + s * (b.t - a.t);
  return r;
}

}  // namespace detail

/// Solver run with the shift integrated alongside. Within each solver step the
/// shift takes forward Euler sub-steps against the state interpolated linearly in
/// time. Functionals are recorded every sample_every.
inline Trajectory run_monitored(GridState s, const Weight& w, const GasParams& g, const MonitorOptions& opt) {
  s.cfg.validate();
  if (s.cfg.frame != Frame::Moving) throw std::invalid_argument("run_monitored: requires the moving frame");
  const double eps = opt.eps_shift > 0.0 ? opt.eps_shift : w.profile->shock.eps;
  if (!(eps > 0.0)) throw std::invalid_argument("run_monitored: eps_shift must be positive");
  const bool prescribed = static_cast<bool>(opt.X_of_t);
  Trajectory tr;
  double X = prescribed ? opt.X_of_t(s.t) : 0.0;
  const double t0 = s.t;
  long next = 1;

  auto record = [&](const GridState& st) {
    TrajectorySample smp;
    smp.t = st.t;
    smp.X = X;
    smp.f = eval_functionals(st, X, w, g, opt.delta3);
    smp.Xdot = prescribed ? opt.Xdot_of_t(st.t) : shift_rhs(smp.f, eps);
    tr.samples.push_back(smp);
    if (opt.keep_states) tr.states.push_back(st);
  };
  record(s);

  const double e2 = eps * eps, e4 = e2 * e2;
  while (s.t < opt.T) {
    double target = std::min(opt.T, t0 + next * opt.sample_every);
    double dt = stable_dt(s, g);
    const bool land = s.t + dt * (1.0 + 1e-9) >= target;
    if (land) dt = target - s.t;
    GridState s1 = s;
    if (dt > 0.0) rk4_step(s1, g, dt);
    const double X_prev = X;
    ++tr.solver_steps;

    if (prescribed) {
      X = opt.X_of_t(s1.t);
    } else {
      double tau = 0.0;
      while (tau < dt) {
        const GridState mid = detail::lerp_state(s, s1, tau / dt);
        const auto r = sample_reference(w, mid.cfg, X);
        const auto f = eval_functionals(mid, r, w, g, opt.delta3);
        const double G = shift_gain(f);
        const double Xd = phi_eps(f.Y, eps) * G;
        double hs = dt - tau;
        if (opt.strict_substeps) {
          hs = std::min(hs, e4 / G);
        } else {
          // travel at most eps^2 per sub-step and stay inside the Euler monotone range
          if (Xd != 0.0) hs = std::min(hs, e2 / std::abs(Xd));
          if (std::abs(f.Y) < e2) {
            const double dX = 1e-3 * e2;
            const auto fp = eval_functionals(mid, sample_reference(w, mid.cfg, X + dX), w, g, opt.delta3);
            const double slope = std::abs(G / e4 * (fp.Y - f.Y) / dX);
            if (slope > 0.0) hs = std::min(hs, 0.5 / slope);
          }
        }
        X += hs * Xd;
        tau += hs;
        ++tr.shift_substeps;
        if (dt - tau <= 1e-14 * dt) break;
      }
    }
    if (opt.on_step) opt.on_step(s, s1, X_prev, X);
    s = std::move(s1);
    if (!land) continue;
    s.t = target;
    ++next;
    record(s);
  }
  tr.final_state = s;
  return tr;
}

/// Central-difference check of the entropy production identity at the middle of
/// three consecutive samples.
struct IdentityResidual {
  double residual = 0.0;
  double derivative = 0.0;  // (E(t+h) - E(t-h)) / 2h
  double production = 0.0;  // right side at the middle sample
  double h = 0.0;
};

inline IdentityResidual entropy_identity_residual(const TrajectorySample& a, const TrajectorySample& b,
                                                  const TrajectorySample& c) {
  IdentityResidual r;
  r.h = 0.5 * (c.t - a.t);
  if (!(r.h > 0.0)) throw std::invalid_argument("entropy_identity_residual: samples must be increasing in time");
  r.derivative = (c.f.entropy - a.f.entropy) / (c.t - a.t);
  r.production = b.f.production(b.Xdot);
  r.residual = r.derivative - r.production;
  return r;
}

/// Clamped states: 1/v_k - 1/v~ = psi_k(1/v - 1/v~), th_k - th~ = psi_k(th - th~),
/// plus the one-sided variants.
struct TruncatedFields {
  std::vector<double> v_k, th_k, v_s, v_b, th_s, th_b;
};

inline TruncatedFields truncate_fields(const GridState& s, const ReferenceSamples& r, double k) {
  if (!(k >= 0.0)) throw std::invalid_argument("truncate_fields: k must be nonnegative");
  const int n = s.size();
  TruncatedFields t;
  for (auto* f : {&t.v_k, &t.th_k, &t.v_s, &t.v_b, &t.th_s, &t.th_b}) f->resize(n);
  for (int i = 0; i < n; ++i) {
    const double W = 1.0 / s.v[i] - 1.0 / r.v[i];
    const double T = s.theta[i] - r.th[i];
    t.v_k[i] = 1.0 / (1.0 / r.v[i] + std::clamp(W, -k, k));
    t.v_s[i] = 1.0 / (1.0 / r.v[i] + std::max(-k, W));
    t.v_b[i] = 1.0 / (1.0 / r.v[i] + std::min(k, W));
    t.th_k[i] = r.th[i] + std::clamp(T, -k, k);
    t.th_s[i] = r.th[i] + std::min(k, T);
    t.th_b[i] = r.th[i] + std::max(-k, T);
  }
  return t;
}

inline TruncatedFields truncate_fields(const GridState& s, const Weight& w, double X, double k) {
  return truncate_fields(s, sample_reference(w, s.cfg, X), k);
}

}  // namespace bnsf

#endif
