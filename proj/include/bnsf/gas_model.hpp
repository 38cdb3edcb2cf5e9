#ifndef BNSF_GAS_MODEL_HPP
#define BNSF_GAS_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bnsf {

/// Ideal polytropic gas with the Brenner coefficient model
/// tau(theta) = tau0 + theta^2, mu(theta) = kappa(theta) = theta^2.
struct GasParams {
  double R = 1.0;
  double gamma = 1.4;
  double tau0 = 1.0;

  void validate() const {
    if (!(R > 0.0)) throw std::invalid_argument("gas: R>0 violated");
    if (!(gamma > 1.0)) throw std::invalid_argument("gas: gamma>1 violated");
    if (!(tau0 > 0.0)) throw std::invalid_argument("gas: tau0>0 violated");
  }
  double cv() const { return R / (gamma - 1.0); }
  double tau(double theta) const { return tau0 + theta * theta; }
  double mu(double theta) const { return theta * theta; }
  double kappa(double theta) const { return theta * theta; }
};

/// Lagrangian state: specific volume, velocity, temperature.
struct State {
  double v = 1.0;
  double u = 0.0;
  double theta = 1.0;

  bool valid() const { return v > 0.0 && theta > 0.0 && std::isfinite(u); }
  bool operator==(const State&) const = default;
};

enum class Family { One = 1, Three = 3 };

/// End states of an admissible shock together with its speed and amplitude.
struct ShockData {
  State left;
  State right;
  double sigma = 0.0;
  double eps = 0.0;
  Family family = Family::Three;
};

/// z - 1 - log z
inline double phi(double z) {
  if (!(z > 0.0)) throw std::domain_error("phi: argument must be positive");
  return z - 1.0 - std::log(z);
}

inline double pressure(const GasParams& g, double v, double theta) { return g.R * theta / v; }
inline double pressure(const State& s, const GasParams& g) { return pressure(g, s.v, s.theta); }

inline double internal_energy(const GasParams& g, double theta) { return g.cv() * theta; }
inline double total_energy(const GasParams& g, double u, double theta) {
  return g.cv() * theta + 0.5 * u * u;
}
inline double total_energy(const State& s, const GasParams& g) { return total_energy(g, s.u, s.theta); }

/// eta(a|b) = R Phi(v_a/v_b) + R/(gamma-1) Phi(theta_a/theta_b) + (u_a-u_b)^2/(2 theta_b)
inline double relative_entropy(const State& a, const State& b, const GasParams& g) {
  const double du = a.u - b.u;
  return g.R * phi(a.v / b.v) + g.cv() * phi(a.theta / b.theta) + du * du / (2.0 * b.theta);
}

/// Sound speed limit sqrt(gamma p / v) of the shock speed as the amplitude vanishes.
inline double sigma_star(const State& left, const GasParams& g) {
  return std::sqrt(g.gamma * pressure(left, g) / left.v);
}

inline State mirror(const State& s) { return {s.v, -s.u, s.theta}; }

/// Residuals of the three jump relations, each scaled by the size of its terms.
struct RhResidual {
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double max() const { return std::max({mass, momentum, energy}); }
};

inline RhResidual rh_residual(const ShockData& s, const GasParams& g) {
  const State& a = s.left;
  const State& b = s.right;
  const double pa = pressure(a, g), pb = pressure(b, g);
  const double Ea = total_energy(a, g), Eb = total_energy(b, g);
  auto rel = [](double r, double scale) { return std::abs(r) / std::max(scale, 1e-300); };
  RhResidual out;
  out.mass = rel(-s.sigma * (b.v - a.v) - (b.u - a.u),
                 std::abs(s.sigma) * (b.v + a.v) + std::abs(b.u) + std::abs(a.u));
  out.momentum = rel(-s.sigma * (b.u - a.u) + (pb - pa),
                     std::abs(s.sigma) * (std::abs(b.u) + std::abs(a.u)) + pb + pa);
  out.energy = rel(-s.sigma * (Eb - Ea) + (pb * b.u - pa * a.u),
                   std::abs(s.sigma) * (Eb + Ea) + std::abs(pb * b.u) + std::abs(pa * a.u));
  return out;
}

/// Right state, speed and family of the shock of amplitude eps leaving `left`.
/// The Hugoniot adiabat of the ideal gas is solved in closed form:
/// p+ = p- ((g+1)v- - (g-1)v+) / ((g+1)v+ - (g-1)v-).
inline ShockData solve_end_state(const State& left, double eps, Family family, const GasParams& g) {
  g.validate();
  if (!left.valid()) throw std::invalid_argument("solve_end_state: left state invalid");
  if (!(eps >= 0.0)) throw std::invalid_argument("solve_end_state: eps must be nonnegative");
  ShockData s;
  s.left = left;
  s.eps = eps;
  s.family = family;
  if (eps == 0.0) {
    s.right = left;
    s.sigma = (family == Family::Three ? 1.0 : -1.0) * sigma_star(left, g);
    return s;
  }
  const double gm = g.gamma - 1.0, gp = g.gamma + 1.0;
  const double vm = left.v;
  const double vp = family == Family::Three ? vm + eps : vm - eps;
  if (!(vp > 0.0)) throw std::invalid_argument("solve_end_state: infeasible amplitude, v+<=0");
  const double num = gp * vm - gm * vp;
  const double den = gp * vp - gm * vm;
  if (!(num > 0.0) || !(den > 0.0))
    throw std::invalid_argument("solve_end_state: infeasible amplitude, Hugoniot temperature <= 0");
  const double pm = pressure(left, g);
  const double pp = pm * num / den;
  const double thp = pp * vp / g.R;
  const double c = std::sqrt(-(pp - pm) / (vp - vm));
  s.sigma = family == Family::Three ? c : -c;
  s.right = {vp, left.u - s.sigma * (vp - vm), thp};

  const State& a = s.left;
  const State& b = s.right;
  const bool lax = family == Family::Three ? (a.v < b.v && a.u > b.u && a.theta > b.theta)
                                           : (a.v > b.v && a.u > b.u && a.theta < b.theta);
  if (!lax) throw std::runtime_error("solve_end_state: admissibility (Lax ordering) failed");
  return s;
}

/// Cold condition on the left temperature in both of its equivalent forms.
struct ColdCheck {
  bool ok = false;
  double threshold = 0.0;  // (1/3) sqrt(R tau0 / (R + R gamma + (gamma-1)^2))
  double ratio = 0.0;      // R tau0 / (R (tau0 + (gamma+1) th^2) + (gamma-1)^2 th^2)
  double margin = 0.0;     // threshold - theta_minus
  bool ratio_ok = false;
};

inline ColdCheck check_cold_condition(double theta_minus, const GasParams& g) {
  if (!(theta_minus > 0.0)) throw std::invalid_argument("cold condition: theta_minus must be positive");
  const double gm = g.gamma - 1.0;
  ColdCheck c;
  c.threshold = std::sqrt(g.R * g.tau0 / (g.R + g.R * g.gamma + gm * gm)) / 3.0;
  const double t2 = theta_minus * theta_minus;
  c.ratio = g.R * g.tau0 / (g.R * (g.tau0 + (g.gamma + 1.0) * t2) + gm * gm * t2);
  c.margin = c.threshold - theta_minus;
  c.ok = theta_minus <= c.threshold * (1.0 + 1e-14);
  c.ratio_ok = c.ratio >= 0.9 * (1.0 - 1e-14);
  return c;
}

/// Mass velocity from the volume velocity: u_m = u_v + tau(theta) v_x / v,
/// with v_x by centered differences (one-sided at the ends).
template <class Vec>
Vec recover_mass_velocity(const Vec& v, const Vec& u_v, const Vec& theta, double dx, const GasParams& g) {
  const std::size_t n = v.size();
  if (u_v.size() != n || theta.size() != n || n < 3)
    throw std::invalid_argument("recover_mass_velocity: fields must share a grid of at least 3 nodes");
  Vec out(u_v);
  for (std::size_t i = 0; i < n; ++i) {
    double vx;
    if (i == 0) vx = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
    else if (i + 1 == n) vx = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dx);
    else vx = (v[i + 1] - v[i - 1]) / (2.0 * dx);
    out[i] = u_v[i] + g.tau(theta[i]) * vx / v[i];
  }
  return out;
}

inline std::string to_string(Family f) { return f == Family::Three ? "3" : "1"; }

}  // namespace bnsf

#endif
