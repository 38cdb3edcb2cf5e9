#ifndef BNSF_SHOCK_PROFILE_HPP
#define BNSF_SHOCK_PROFILE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gas_model.hpp"

namespace bnsf {

namespace detail {

/// Forward-mode dual number, enough arithmetic for the profile vector field.
struct Dual {
  double a = 0.0;
  double b = 0.0;
};
inline Dual operator+(Dual x, Dual y) { return {x.a + y.a, x.b + y.b}; }
inline Dual operator-(Dual x, Dual y) { return {x.a - y.a, x.b - y.b}; }
inline Dual operator*(Dual x, Dual y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }
inline Dual operator/(Dual x, Dual y) { return {x.a / y.a, (x.b * y.a - x.a * y.b) / (y.a * y.a)}; }
inline Dual operator*(double c, Dual x) { return {c * x.a, c * x.b}; }
inline Dual operator+(Dual x, double c) { return {x.a + c, x.b}; }
inline Dual operator-(Dual x, double c) { return {x.a - c, x.b}; }


/// Once-integrated traveling-wave field of a 3-shock, solved for the derivatives.
template <class T>
std::array<T, 3> profile_field(const ShockData& s, const GasParams& g, const T& v, const T& u, const T& th) {
  const State& m = s.left;
  const double pm = pressure(m, g);
  const double sig = s.sigma;
  const T p = g.R * th / v;
  const T F1 = (-sig) * (v - m.v) - (u - m.u);
  const T F2 = (-sig) * (u - m.u) + (p - pm);
  const T F3 = (-sig) * (g.cv() * (th - m.theta) + 0.5 * (u * u - m.u * m.u)) + (p * u - pm * m.u) - u * F2;
  const T th2 = th * th;
  return {v * F1 / (th2 + g.tau0), v * F2 / th2, v * F3 / th2};
}

inline std::array<double, 3> field(const ShockData& s, const GasParams& g, const std::array<double, 3>& U) {
  return profile_field<double>(s, g, U[0], U[1], U[2]);
}

/// Directional derivative of the field at U along dir.
inline std::array<double, 3> field_jvp(const ShockData& s, const GasParams& g, const std::array<double, 3>& U,
                                       const std::array<double, 3>& dir) {
  auto r = profile_field<Dual>(s, g, Dual{U[0], dir[0]}, Dual{U[1], dir[1]}, Dual{U[2], dir[2]});
  return {r[0].b, r[1].b, r[2].b};
}

inline double hermite(double h, double t, double y0, double y1, double d0, double d1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}
inline double hermite_deriv(double h, double t, double y0, double y1, double d0, double d1) {
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (-6 * t2 + 6 * t) * y1) / h + (3 * t2 - 4 * t + 1) * d0 + (3 * t2 - 2 * t) * d1;
}

}  // namespace detail

struct ProfileOptions {
  double tol = 1e-10;     // right-state ball radius
  double span = 0.0;      // per-side length about the midpoint; 0 selects 20/(eps sigma*/tau0)
  double launch = 1e-8;   // offset along the unstable eigenvector
  double rtol = 1e-14;
  double atol = 1e-16;
  double max_step = 0.5;
};

/// Value, first and second derivative of the profile at one point.
struct ProfileSample {
  State val;
  State d1;
  State d2;
};

/// Exponential tail dev(xi) = dev(edge) exp(-rate |xi - edge|) beyond the stored span.
struct TailModel {
  double rate = 0.0;
  double amplitude = 0.0;  // A of the least-squares fit |v - v_end| ~ A exp(-rate |xi|)
  double edge = 0.0;
  std::array<double, 3> edge_dev{0.0, 0.0, 0.0};
};

/// Sampled viscous shock profile with ODE-exact derivatives.
class ShockProfile {
 public:
  ShockData shock;
  GasParams gas;
  std::vector<double> xi;
  std::vector<std::array<double, 3>> val;
  std::vector<std::array<double, 3>> der;
  TailModel left_tail;
  TailModel right_tail;
  double unstable_rate = 0.0;

  /// Stored data are of a 3-shock; a 1-shock is served through x -> -x, u -> -u.
  bool mirrored() const { return shock.family == Family::One; }

  ProfileSample at(double x) const {
    if (!mirrored()) return at3(x);
    ProfileSample s = at3(-x);
    ProfileSample r;
    r.val = {s.val.v, -s.val.u, s.val.theta};
    r.d1 = {-s.d1.v, s.d1.u, -s.d1.theta};
    r.d2 = {s.d2.v, -s.d2.u, s.d2.theta};
    return r;
  }

  double xi_min() const { return mirrored() ? -xi.back() : xi.front(); }
  double xi_max() const { return mirrored() ? -xi.front() : xi.back(); }

  /// The 3-shock whose profile is stored (the shock itself unless mirrored).
  ShockData base;

 private:
  ProfileSample make(const std::array<double, 3>& U) const {
    ProfileSample s;
    auto d = detail::field(base, gas, U);
    auto d2 = detail::field_jvp(base, gas, U, d);
    s.val = {U[0], U[1], U[2]};
    s.d1 = {d[0], d[1], d[2]};
    s.d2 = {d2[0], d2[1], d2[2]};
    return s;
  }

  ProfileSample tail(const TailModel& tm, const State& end, double x, double sign) const {
    const double dist = std::abs(x - tm.edge);
    const double f = std::exp(-tm.rate * dist);
    ProfileSample s;
    s.val = {end.v + tm.edge_dev[0] * f, end.u + tm.edge_dev[1] * f, end.theta + tm.edge_dev[2] * f};
    // d/dx of f is sign*rate*f with sign=+1 on the left side and -1 on the right
    const double r1 = sign * tm.rate, r2 = tm.rate * tm.rate;
    s.d1 = {r1 * tm.edge_dev[0] * f, r1 * tm.edge_dev[1] * f, r1 * tm.edge_dev[2] * f};
    s.d2 = {r2 * tm.edge_dev[0] * f, r2 * tm.edge_dev[1] * f, r2 * tm.edge_dev[2] * f};
    return s;
  }

  ProfileSample at3(double x) const {
    if (x <= xi.front()) {
      if (x == xi.front()) return make(val.front());
      return tail(left_tail, base.left, x, 1.0);
    }
    if (x >= xi.back()) {
      if (x == xi.back()) return make(val.back());
      return tail(right_tail, base.right, x, -1.0);
    }
    const auto it = std::upper_bound(xi.begin(), xi.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xi.begin()) - 1;
    if (x == xi[j]) return make(val[j]);
    const double h = xi[j + 1] - xi[j];
    const double t = (x - xi[j]) / h;
    std::array<double, 3> U;
    for (int c = 0; c < 3; ++c) U[c] = detail::hermite(h, t, val[j][c], val[j + 1][c], der[j][c], der[j + 1][c]);
    return make(U);
  }
};

inline ProfileSample profile_at(const ShockProfile& p, double xi) { return p.at(xi); }

namespace detail {

struct Dp45 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

inline TailModel fit_tail(const std::vector<double>& xs, const std::vector<std::array<double, 3>>& vals,
                          const State& end, bool left_side) {
  TailModel tm;
  const std::size_t n = xs.size();
  const double length = xs.back() - xs.front();
  const double cut = left_side ? xs.front() + 0.2 * length : xs.back() - 0.2 * length;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in = left_side ? xs[i] <= cut : xs[i] >= cut;
    const double dev = std::abs(vals[i][0] - end.v);
    if (!in || !(dev > 0.0)) continue;
    const double y = std::log(dev);
    sx += xs[i];
    sy += y;
    sxx += xs[i] * xs[i];
    sxy += xs[i] * y;
    ++m;
  }
  if (m >= 2) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / m;
    tm.rate = std::abs(slope);
    tm.amplitude = std::exp(icpt);
  }
  const std::size_t k = left_side ? 0 : n - 1;
  tm.edge = xs[k];
  tm.edge_dev = {vals[k][0] - end.v, vals[k][1] - end.u, vals[k][2] - end.theta};
  return tm;
}

}  // namespace detail

inline double default_span(const ShockData& s, const GasParams& g) {
  const double rate = s.eps * sigma_star(s.left, g) / g.tau0;
  return 20.0 / rate;
}

/// Viscous profile of an admissible shock by shooting from the left state along
/// its one-dimensional unstable manifold, phase fixed by v(0) = (v- + v+)/2.
inline ShockProfile compute_profile(const ShockData& shock, const GasParams& g, ProfileOptions opt = {}) {
  g.validate();
  ShockProfile p;
  p.shock = shock;
  p.gas = g;
  ShockData s = shock;
  if (shock.family == Family::One) {
    s.left = mirror(shock.right);
    s.right = mirror(shock.left);
    s.sigma = -shock.sigma;
    s.family = Family::Three;
  }
  p.base = s;

  if (shock.eps == 0.0) {
    p.xi = {-1.0, 0.0, 1.0};
    const std::array<double, 3> U{s.left.v, s.left.u, s.left.theta};
    p.val.assign(3, U);
    p.der.assign(3, {0.0, 0.0, 0.0});
    p.left_tail.edge = -1.0;
    p.right_tail.edge = 1.0;
    return p;
  }
  if (!(s.sigma > 0.0)) throw std::invalid_argument("compute_profile: shock speed must be positive for a 3-shock");

  const std::array<double, 3> Um{s.left.v, s.left.u, s.left.theta};
  const std::array<double, 3> Up{s.right.v, s.right.u, s.right.theta};
  const double span = opt.span > 0.0 ? opt.span : default_span(s, g);

  Eigen::Matrix3d J;
  for (int j = 0; j < 3; ++j) {
    std::array<double, 3> e{0.0, 0.0, 0.0};
    e[j] = 1.0;
    auto col = detail::field_jvp(s, g, Um, e);
    for (int i = 0; i < 3; ++i) J(i, j) = col[i];
  }
  Eigen::EigenSolver<Eigen::Matrix3d> es(J);
  const auto lam = es.eigenvalues();
  int n_unstable = 0, k_unstable = -1;
  const double scale = J.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i) {
    if (lam[i].real() > 1e-13 * scale) {
      ++n_unstable;
      k_unstable = i;
    }
  }
  if (n_unstable != 1)
    throw std::runtime_error("compute_profile: unstable manifold at the left state has dimension " +
                             std::to_string(n_unstable) + ", expected 1");
  if (std::abs(lam[k_unstable].imag()) > 1e-13 * scale)
    throw std::runtime_error("compute_profile: unstable eigenvalue is not real");
  p.unstable_rate = lam[k_unstable].real();
  Eigen::Vector3d r = es.eigenvectors().col(k_unstable).real();
  if (r(0) < 0.0) r = -r;
  r /= r.cwiseAbs().maxCoeff();

  std::array<double, 3> U{Um[0] + opt.launch * r(0), Um[1] + opt.launch * r(1), Um[2] + opt.launch * r(2)};
  double x = 0.0;
  const double vmid = 0.5 * (s.left.v + s.right.v);
  std::vector<double> xs{x};
  std::vector<std::array<double, 3>> vals{U};
  std::vector<std::array<double, 3>> ders{detail::field(s, g, U)};
  double x_mid = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 3> U_mid{};
  double closest = std::numeric_limits<double>::infinity();

  auto dist_right = [&](const std::array<double, 3>& W) {
    return std::max({std::abs(W[0] - Up[0]), std::abs(W[1] - Up[1]), std::abs(W[2] - Up[2])});
  };
  auto check_monotone = [&](const std::array<double, 3>& d, double at) {
    if (!(d[0] > 0.0 && d[1] < 0.0 && d[2] < 0.0))
      throw std::runtime_error("compute_profile: monotonicity lost at xi=" + std::to_string(at));
  };
  check_monotone(ders.back(), x);

  using C = detail::Dp45;
  double h = std::min(opt.max_step, 0.1 / p.unstable_rate);
  std::array<double, 3> k1 = ders.back(), k2, k3, k4, k5, k6, k7, Y, Unew;
  auto f = [&](const std::array<double, 3>& W) { return detail::field(s, g, W); };
  while (true) {
    if (dist_right(U) <= opt.tol) break;
    const double limit = std::isnan(x_mid) ? span : x_mid + span;
    if (x > limit) {
      throw std::runtime_error("compute_profile: no connection within span " + std::to_string(span) +
                               "; closest approach to the right state " + std::to_string(closest));
    }
    h = std::min(h, opt.max_step);
    for (int c = 0; c < 3; ++c) Y[c] = U[c] + h * C::a21 * k1[c];
    k2 = f(Y);
    for (int c = 0; c < 3; ++c) Y[c] = U[c] + h * (C::a31 * k1[c] + C::a32 * k2[c]);
    k3 = f(Y);
    for (int c = 0; c < 3; ++c) Y[c] = U[c] + h * (C::a41 * k1[c] + C::a42 * k2[c] + C::a43 * k3[c]);
    k4 = f(Y);
    for (int c = 0; c < 3; ++c)
      Y[c] = U[c] + h * (C::a51 * k1[c] + C::a52 * k2[c] + C::a53 * k3[c] + C::a54 * k4[c]);
    k5 = f(Y);
    for (int c = 0; c < 3; ++c)
      Y[c] = U[c] + h * (C::a61 * k1[c] + C::a62 * k2[c] + C::a63 * k3[c] + C::a64 * k4[c] + C::a65 * k5[c]);
    k6 = f(Y);
    for (int c = 0; c < 3; ++c)
      Unew[c] = U[c] + h * (C::b1 * k1[c] + C::b3 * k3[c] + C::b4 * k4[c] + C::b5 * k5[c] + C::b6 * k6[c]);
    k7 = f(Unew);
    double err = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double e = h * (C::e1 * k1[c] + C::e3 * k3[c] + C::e4 * k4[c] + C::e5 * k5[c] + C::e6 * k6[c] +
                            C::e7 * k7[c]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(U[c]), std::abs(Unew[c]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) {
      h *= 0.25;
      if (h < 1e-12) throw std::runtime_error("compute_profile: step size underflow");
      continue;
    }
    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }
    const double x_new = x + h;
    if (std::isnan(x_mid) && U[0] < vmid && Unew[0] >= vmid) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double t = 0.5 * (lo + hi);
        if (detail::hermite(h, t, U[0], Unew[0], k1[0], k7[0]) < vmid) lo = t;
        else hi = t;
      }
      const double t = 0.5 * (lo + hi);
      x_mid = x + t * h;
      for (int c = 0; c < 3; ++c) U_mid[c] = detail::hermite(h, t, U[c], Unew[c], k1[c], k7[c]);
      U_mid[0] = vmid;
    }
    x = x_new;
    U = Unew;
    k1 = k7;
    check_monotone(k1, x);
    xs.push_back(x);
    vals.push_back(U);
    ders.push_back(k1);
    closest = std::min(closest, dist_right(U));
    h *= std::min(4.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
  }
  if (std::isnan(x_mid)) throw std::runtime_error("compute_profile: midpoint never crossed");

  // translate so the midpoint sits exactly at a node at xi = 0
  for (auto& xv : xs) xv -= x_mid;
  const auto pos = std::upper_bound(xs.begin(), xs.end(), 0.0);
  const std::size_t at = static_cast<std::size_t>(pos - xs.begin());
  const double tiny = 1e-9;
  std::size_t erase_lo = at, erase_hi = at;
  if (at > 0 && xs[at - 1] > -tiny) erase_lo = at - 1;
  if (at < xs.size() && xs[at] < tiny) erase_hi = at + 1;
  xs.erase(xs.begin() + erase_lo, xs.begin() + erase_hi);
  vals.erase(vals.begin() + erase_lo, vals.begin() + erase_hi);
  ders.erase(ders.begin() + erase_lo, ders.begin() + erase_hi);
  xs.insert(xs.begin() + erase_lo, 0.0);
  vals.insert(vals.begin() + erase_lo, U_mid);
  ders.insert(ders.begin() + erase_lo, detail::field(s, g, U_mid));

  p.xi = std::move(xs);
  p.val = std::move(vals);
  p.der = std::move(ders);
  p.left_tail = detail::fit_tail(p.xi, p.val, s.left, true);
  p.right_tail = detail::fit_tail(p.xi, p.val, s.right, false);
  return p;
}

/// Lemma-style diagnostics of a computed profile.
struct TailReport {
  double rate_left = 0.0;
  double rate_right = 0.0;
  bool v_increasing = false;
  bool u_decreasing = false;
  bool theta_decreasing = false;
  double ratio_u = 0.0;      // sup |u' + sigma* v'| / |v'|
  double ratio_theta = 0.0;  // sup |theta' + ((gamma-1) p-/R) v'| / |v'|
  double tail_min = 0.0;     // min of v' / ((v+ - v)(v - v-))
  double tail_max = 0.0;
  double inf_vprime = 0.0;   // inf of v' on [-1/eps, 1/eps]
  double jacobian_defect = 0.0;
  double second_deriv_const = 0.0;  // sup |v''| / (eps |v'|)
  double ode_residual = 0.0;        // interpolant derivative vs field, relative to max |U'|
};

/// Logistic rate predicted for y = (v - v-)/eps.
inline double sharp_rate(const ShockData& s, const GasParams& g) {
  const double th = s.left.theta, gm = g.gamma - 1.0;
  const double den = g.R * (g.tau0 + (g.gamma + 1.0) * th * th) + gm * gm * th * th;
  return 0.5 * s.eps * sigma_star(s.left, g) * g.gamma * (g.gamma + 1.0) * g.R / den;
}

/// Max over stored intervals of |d/dxi (Hermite interpolant) - field(interpolant)| at midpoints,
/// divided by max |U'| over the nodes.
inline double ode_residual(const ShockProfile& p) {
  const ShockData& s = p.base;
  double dmax = 0.0;
  for (const auto& d : p.der) dmax = std::max({dmax, std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
  if (dmax == 0.0) return 0.0;
  double res = 0.0;
  for (std::size_t j = 0; j + 1 < p.xi.size(); ++j) {
    const double h = p.xi[j + 1] - p.xi[j];
    std::array<double, 3> U, dU;
    for (int c = 0; c < 3; ++c) {
      U[c] = detail::hermite(h, 0.5, p.val[j][c], p.val[j + 1][c], p.der[j][c], p.der[j + 1][c]);
      dU[c] = detail::hermite_deriv(h, 0.5, p.val[j][c], p.val[j + 1][c], p.der[j][c], p.der[j + 1][c]);
    }
    const auto F = detail::field(s, p.gas, U);
    for (int c = 0; c < 3; ++c) res = std::max(res, std::abs(dU[c] - F[c]));
  }
  return res / dmax;
}

inline TailReport verify_tails(const ShockProfile& p) {
  TailReport r;
  const ShockData& s = p.base;
  const GasParams& g = p.gas;
  r.rate_left = p.left_tail.rate;
  r.rate_right = p.right_tail.rate;
  r.v_increasing = r.u_decreasing = r.theta_decreasing = true;
  for (const auto& d : p.der) {
    r.v_increasing = r.v_increasing && d[0] > 0.0;
    r.u_decreasing = r.u_decreasing && d[1] < 0.0;
    r.theta_decreasing = r.theta_decreasing && d[2] < 0.0;
  }
  if (s.eps == 0.0) return r;
  const double ss = sigma_star(s.left, g);
  const double ct = (g.gamma - 1.0) * pressure(s.left, g) / g.R;
  const double vm = s.left.v, vp = s.right.v, eps = s.eps;
  const double k = sharp_rate(s, g);
  r.tail_min = std::numeric_limits<double>::infinity();
  r.tail_max = 0.0;
  for (std::size_t i = 0; i < p.xi.size(); ++i) {
    const auto& U = p.val[i];
    const auto& d = p.der[i];
    const double dv = std::abs(d[0]);
    const double y = (U[0] - vm) / eps;
    // within 1e-6 of either end state the shooting error dominates v'
    if (y > 1e-6 && y < 1.0 - 1e-6) {
      r.ratio_u = std::max(r.ratio_u, std::abs(d[1] + ss * d[0]) / dv);
      r.ratio_theta = std::max(r.ratio_theta, std::abs(d[2] + ct * d[0]) / dv);
      const auto d2 = detail::field_jvp(s, g, U, d);
      r.second_deriv_const = std::max(r.second_deriv_const, std::abs(d2[0]) / (eps * dv));
      const double q = d[0] / ((vp - U[0]) * (U[0] - vm));
      r.tail_min = std::min(r.tail_min, q);
      r.tail_max = std::max(r.tail_max, q);
      r.jacobian_defect = std::max(r.jacobian_defect, std::abs(d[0] / eps / (y * (1.0 - y)) - k));
    }
  }
  r.inf_vprime = std::numeric_limits<double>::infinity();
  const int m = 2001;
  for (int i = 0; i < m; ++i) {
    const double x = -1.0 / eps + 2.0 / eps * i / (m - 1);
    r.inf_vprime = std::min(r.inf_vprime, std::abs(p.at(x).d1.v));
  }
  r.ode_residual = ode_residual(p);
  return r;
}

}  // namespace bnsf

#endif
