#ifndef BNSF_VERIFIERS_HPP
#define BNSF_VERIFIERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gas_model.hpp"

namespace bnsf {

// ---------------------------------------------------------------------------
// Nonlinear Poincare functional on (0, 1)

/// Samples of W on the uniform grid y_i = i/(N-1), i = 0..N-1.
struct TestFunctionW {
  std::vector<double> w;

  int size() const { return static_cast<int>(w.size()); }
  double h() const { return 1.0 / (size() - 1); }
  double y(int i) const { return i * h(); }
};

/// Integrals entering R_delta. The weighted gradient term uses forward
/// differences at the cell faces y_{i+1/2} with weight y(1-y) at the face.
struct PoincareTerms {
  double mean = 0.0;   // int W
  double l2 = 0.0;     // int W^2
  double cube = 0.0;   // int W^3
  double abs3 = 0.0;   // int |W|^3
  double grad = 0.0;   // int y(1-y) |W_y|^2
};

inline PoincareTerms poincare_terms(const TestFunctionW& f) {
  const int n = f.size();
  if (n < 3) throw std::invalid_argument("poincare_terms: need at least 3 samples");
  const double h = f.h();
  PoincareTerms t;
  for (int i = 0; i < n; ++i) {
    const double q = (i == 0 || i == n - 1) ? 0.5 * h : h;
    const double w = f.w[i];
    t.mean += q * w;
    t.l2 += q * w * w;
    t.cube += q * w * w * w;
    t.abs3 += q * std::abs(w) * w * w;
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double yf = (i + 0.5) * h;
    const double d = (f.w[i + 1] - f.w[i]) / h;
    t.grad += h * yf * (1.0 - yf) * d * d;
  }
  return t;
}

inline double r_delta(const PoincareTerms& t, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("r_delta: delta must be positive");
  const double e = t.l2 + 2.0 * t.mean;
  return -e * e / delta + (1.0 + delta) * t.l2 + (2.0 / 3.0) * t.cube + delta * t.abs3 - (0.9 - delta) * t.grad;
}

/// -(1/d)(int W^2 + 2 int W)^2 + (1+d) int W^2 + (2/3) int W^3 + d int |W|^3 - (0.9-d) int y(1-y)|W_y|^2
inline double r_delta(const TestFunctionW& f, double delta) { return r_delta(poincare_terms(f), delta); }

/// Gradient of the discretized R_delta with respect to the samples W_i.
inline std::vector<double> r_delta_gradient(const TestFunctionW& f, double delta) {
  const int n = f.size();
  const double h = f.h();
  const auto t = poincare_terms(f);
  const double e = t.l2 + 2.0 * t.mean;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const double q = (i == 0 || i == n - 1) ? 0.5 * h : h;
    const double w = f.w[i];
    g[i] = -2.0 * e / delta * (2.0 * q * w + 2.0 * q) + (1.0 + delta) * 2.0 * q * w + 2.0 * q * w * w +
           3.0 * delta * q * std::abs(w) * w;
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double yf = (i + 0.5) * h;
    const double c = 2.0 * (0.9 - delta) * yf * (1.0 - yf) * (f.w[i + 1] - f.w[i]) / h;
    g[i] += c;
    g[i + 1] -= c;
  }
  return g;
}

struct PoincareSearchOptions {
  double delta = 0.01;
  double C1 = 1.0;
  int N = 512;
  long random_starts = 10000;
  int ascent_steps = 50;
  int ascent_starts = 8;  // best random starts refined by projected ascent
  int max_mode = 32;      // highest sine mode in the random ensembles
  std::uint64_t seed = 1;
};

struct PoincareSearchResult {
  double worst = -std::numeric_limits<double>::infinity();
  TestFunctionW witness;
  double witness_l2 = 0.0;
  double best_random = -std::numeric_limits<double>::infinity();
  long evaluations = 0;
};

namespace detail {

inline double l2_norm_sq(const std::vector<double>& w, double h) {
  double s = 0.0;
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) s += ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * h * w[i] * w[i];
  return s;
}

inline void project_ball(std::vector<double>& w, double h, double C1) {
  const double s = l2_norm_sq(w, h);
  if (s > C1) {
    const double k = std::sqrt(C1 / s);
    for (auto& x : w) x *= k;
  }
}

}  // namespace detail

/// Maximize R_delta over {int W^2 <= C1}: deterministic seeds, random
/// Fourier-sine ensembles, then projected gradient ascent from the best starts.
inline PoincareSearchResult search_poincare_violations(const PoincareSearchOptions& o) {
  if (!(o.delta > 0.0)) throw std::invalid_argument("search_poincare_violations: delta>0 violated");
  if (!(o.C1 > 0.0)) throw std::invalid_argument("search_poincare_violations: C1>0 violated");
  if (o.N < 8) throw std::invalid_argument("search_poincare_violations: N>=8 violated");
  const int n = o.N;
  const double h = 1.0 / (n - 1);
  PoincareSearchResult res;

  std::vector<std::pair<double, TestFunctionW>> pool;
  auto consider = [&](TestFunctionW f, bool random) {
    const double r = r_delta(f, o.delta);
    ++res.evaluations;
    if (random) res.best_random = std::max(res.best_random, r);
    if (r > res.worst) {
      res.worst = r;
      res.witness = f;
    }
    pool.emplace_back(r, std::move(f));
    if (static_cast<int>(pool.size()) > 4 * std::max(1, o.ascent_starts)) {
      std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      pool.resize(std::max(1, o.ascent_starts));
    }
  };

  for (double c : {0.0, 1e-3, -1e-3, 1e-2, -1e-2}) consider(TestFunctionW{std::vector<double>(n, c)}, false);

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> table(static_cast<std::size_t>(o.max_mode) * n);
  for (int k = 1; k <= o.max_mode; ++k)
    for (int i = 0; i < n; ++i) table[(k - 1) * n + i] = std::sin(std::numbers::pi * k * i * h);
  for (long s = 0; s < o.random_starts; ++s) {
    const int modes = 1 + static_cast<int>(unif(rng) * o.max_mode) % o.max_mode;
    const double decay = 2.0 * unif(rng);
    std::vector<double> w(n, 0.0);
    for (int k = 1; k <= modes; ++k) {
      const double c = normal(rng) / std::pow(k, decay);
      const double* row = &table[(k - 1) * n];
      for (int i = 0; i < n; ++i) w[i] += c * row[i];
    }
    const double norm = detail::l2_norm_sq(w, h);
    if (!(norm > 0.0)) continue;
    // scale log-uniformly inside the ball
    const double target = o.C1 * std::pow(10.0, -6.0 * unif(rng));
    const double k = std::sqrt(target / norm);
    for (auto& x : w) x *= k;
    consider(TestFunctionW{std::move(w)}, true);
  }

  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (static_cast<int>(pool.size()) > o.ascent_starts) pool.resize(std::max(0, o.ascent_starts));
  for (auto& [r0, f0] : pool) {
    TestFunctionW f = f0;
    double r = r0;
    double step = 1e-2;
    for (int it = 0; it < o.ascent_steps; ++it) {
      const auto g = r_delta_gradient(f, o.delta);
      bool moved = false;
      for (int tries = 0; tries < 40; ++tries) {
        TestFunctionW trial = f;
        for (int i = 0; i < n; ++i) {
          const double q = (i == 0 || i == n - 1) ? 0.5 * h : h;
          trial.w[i] += step * g[i] / q;  // L2 gradient
        }
        detail::project_ball(trial.w, h, o.C1);
        const double rt = r_delta(trial, o.delta);
        ++res.evaluations;
        if (rt > r) {
          f = std::move(trial);
          r = rt;
          step *= 2.0;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (r > res.worst) {
      res.worst = r;
      res.witness = f;
    }
  }
  res.witness_l2 = detail::l2_norm_sq(res.witness.w, h);
  return res;
}

/// Largest delta in [lo, hi] (by bisection) for which the search stays <= tol.
inline double estimate_delta2(PoincareSearchOptions o, double tol, double lo = 1e-3, double hi = 0.45,
                              int iterations = 12) {
  auto pass = [&](double d) {
    o.delta = d;
    return search_poincare_violations(o).worst <= tol;
  };
  if (!pass(lo)) return 0.0;
  if (pass(hi)) return hi;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pass(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Polynomial inequality on the plane

inline const double kTheta = std::sqrt(5.0 - std::numbers::pi * std::numbers::pi / 3.0);

struct PolyPoint {
  double Z1 = 0.0;
  double Z2 = 0.0;
  double delta = 0.01;
};

inline double poly_E(double z1, double z2) { return z1 * z1 + z2 * z2 + 2.0 * z1; }

inline double poly_P(double z1, double z2, double d) {
  const double r2 = z1 * z1 + z2 * z2;
  return (1.0 + d) * r2 + 2.0 * z1 * z2 * z2 + (2.0 / 3.0) * z1 * z1 * z1 + 6.0 * d * std::abs(z1) * r2 -
         2.0 * (0.9 - d - (2.0 / 3.0 + d) * kTheta * z2) * z2 * z2;
}

/// P_delta(Z1, Z2) - E(Z1, Z2)^2
inline double poly_gap(const PolyPoint& p) {
  const double e = poly_E(p.Z1, p.Z2);
  return poly_P(p.Z1, p.Z2, p.delta) - e * e;
}

struct PolyScanResult {
  double delta = 0.0, delta1 = 0.0;
  double max_gap = -std::numeric_limits<double>::infinity();
  double arg_z1 = 0.0, arg_z2 = 0.0;
  double mirror_gap = 0.0;  // gap at (arg_z1, -arg_z2)
  long evaluations = 0;
};

namespace detail {

/// Runs body(begin, end, slot) over `threads` disjoint index ranges.
template <class Body>
void parallel_ranges(long n, int threads, Body body) {
  const int t = static_cast<int>(std::max<long>(1, std::min<long>(threads, n)));
  std::vector<std::thread> pool;
  for (int k = 1; k < t; ++k) pool.emplace_back(body, n * k / t, n * (k + 1) / t, k);
  body(0L, n / t, 0);
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Max of the gap over {|E| <= delta1}, scanned on the polar grid
/// Z1 = -1 + rho cos phi, Z2 = rho sin phi, rho^2 = 1 + e, e in [-delta1, delta1],
/// followed by zoomed grids around the best points.
inline PolyScanResult scan_poly_region(double delta, double delta1, int resolution, int threads = 1) {
  if (resolution < 1000) throw std::invalid_argument("scan_poly_region: resolution>=1000 violated");
  if (!(delta > 0.0) || !(delta1 >= 0.0) || !(delta1 < 1.0))
    throw std::invalid_argument("scan_poly_region: need delta>0 and 0<=delta1<1");
  const int ne = (resolution % 2 == 1) ? resolution : resolution + 1;  // odd so e = 0 is a node
  const int np = resolution;
  struct Best {
    double g = -std::numeric_limits<double>::infinity();
    double e = 0.0, phi = 0.0;
  };
  auto eval = [&](double e, double phi) {
    const double rho = std::sqrt(1.0 + e);
    return poly_gap({-1.0 + rho * std::cos(phi), rho * std::sin(phi), delta});
  };
  const double de = ne > 1 ? 2.0 * delta1 / (ne - 1) : 0.0;
  const double dphi = 2.0 * std::numbers::pi / np;
  std::vector<Best> part(std::max(1, threads));
  detail::parallel_ranges(static_cast<long>(np), threads, [&](long b, long e_, int slot) {
    Best best;
    for (long j = b; j < e_; ++j) {
      const double phi = j * dphi;
      for (int i = 0; i < ne; ++i) {
        const double e = delta1 == 0.0 ? 0.0 : -delta1 + i * de;
        const double g = eval(e, phi);
        if (g > best.g) best = {g, e, phi};
      }
    }
    part[slot] = best;
  });
  Best best;
  for (const auto& p : part)
    if (p.g > best.g) best = p;
  PolyScanResult r;
  r.delta = delta;
  r.delta1 = delta1;
  r.evaluations = static_cast<long>(ne) * np;

  // zoom: 4 levels of 21x21 grids, each shrinking the box by 10
  double he = de, hp = dphi;
  for (int level = 0; level < 4; ++level) {
    const Best c = best;
    for (int a = -10; a <= 10; ++a)
      for (int b = -10; b <= 10; ++b) {
        const double e = std::clamp(c.e + a * he / 10.0, -delta1, delta1);
        const double phi = c.phi + b * hp / 10.0;
        const double g = eval(e, phi);
        ++r.evaluations;
        if (g > best.g) best = {g, e, phi};
      }
    he /= 10.0;
    hp /= 10.0;
  }
  const double rho = std::sqrt(1.0 + best.e);
  r.max_gap = best.g;
  r.arg_z1 = -1.0 + rho * std::cos(best.phi);
  r.arg_z2 = rho * std::sin(best.phi);
  r.mirror_gap = poly_gap({r.arg_z1, -r.arg_z2, delta});
  return r;
}

/// Largest delta in [lo, hi] (bisection) with scan_poly_region max gap <= tol at fixed delta1.
inline double bisect_delta_star(double delta1, int resolution, double tol, double lo = 1e-5, double hi = 0.05,
                                int iterations = 30, int threads = 1) {
  auto pass = [&](double d) { return scan_poly_region(d, delta1, resolution, threads).max_gap <= tol; };
  if (!pass(lo)) return 0.0;
  if (pass(hi)) return hi;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pass(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

/// Largest delta1 in [0, hi] (bisection) with scan_poly_region max gap <= tol.
inline double bisect_delta1(double delta, int resolution, double tol, double hi = 0.5, int iterations = 20,
                            int threads = 1) {
  double lo = 0.0;
  if (scan_poly_region(delta, hi, resolution, threads).max_gap <= tol) return hi;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (scan_poly_region(delta, mid, resolution, threads).max_gap <= tol) lo = mid;
    else hi = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Quartic lemma on [-2, 0)

/// 1.6x - 2.2x^2 - (4/3)x^3 + (4 theta/3) max(-x^2-2x, 0)^{3/2}, evaluated as
/// (24x - 33x^2 - 20x^3 + 20 theta s^{3/2}) / 15 so integer points are exact.
inline double quartic_h(double x) {
  const double s = std::max(-x * x - 2.0 * x, 0.0);
  return (24.0 * x - 33.0 * x * x - 20.0 * x * x * x + 20.0 * kTheta * s * std::sqrt(s)) / 15.0;
}

/// 1.6 - 4.4x - 4x^2 - 4 theta (x+1) sqrt(1-(x+1)^2)
inline double quartic_h_prime(double x) {
  const double s = std::max(1.0 - (x + 1.0) * (x + 1.0), 0.0);
  return 1.6 - 4.4 * x - 4.0 * x * x - 4.0 * kTheta * (x + 1.0) * std::sqrt(s);
}

/// (1.6 - 4.4x - 4x^2)^2 - 16 (theta (x+1))^2 (1 - (x+1)^2)
inline double quartic_p(double x) {
  const double a = (8.0 - 22.0 * x - 20.0 * x * x) / 5.0;
  const double b = kTheta * (x + 1.0);
  return a * a - 16.0 * b * b * (1.0 - (x + 1.0) * (x + 1.0));
}

struct QuarticScanResult {
  double max_h = -std::numeric_limits<double>::infinity();
  double argmax = 0.0;
  std::vector<double> critical_points;  // sign changes of h' located by bisection
  double h_at_minus2 = 0.0, h_at_0 = 0.0, p_at_minus1 = 0.0, h_prime_at_0 = 0.0;
  double slope_at_0 = 0.0;  // (h(0) - h(-1e-12)) / 1e-12
  double lo = -2.0, hi = -1e-6;
};

inline QuarticScanResult quartic_scan(long resolution, double hi = -1e-6, int threads = 1) {
  if (resolution < 1000000) throw std::invalid_argument("quartic_scan: resolution>=1e6 violated");
  if (!(hi < 0.0 && hi > -2.0)) throw std::invalid_argument("quartic_scan: need -2 < hi < 0");
  QuarticScanResult r;
  r.hi = hi;
  const double lo = -2.0;
  const double dx = (hi - lo) / (resolution - 1);
  struct Part {
    double m = -std::numeric_limits<double>::infinity();
    double x = 0.0;
    std::vector<std::pair<double, double>> brackets;
  };
  std::vector<Part> parts(std::max(1, threads));
  detail::parallel_ranges(resolution, threads, [&](long b, long e, int slot) {
    Part p;
    double prev_d = 0.0;
    for (long i = b; i < e; ++i) {
      const double x = i + 1 == resolution ? hi : lo + i * dx;
      const double h = quartic_h(x);
      if (h > p.m) {
        p.m = h;
        p.x = x;
      }
      const double d = quartic_h_prime(x);
      if (i > b && ((prev_d < 0.0) != (d < 0.0))) p.brackets.emplace_back(x - dx, x);
      prev_d = d;
    }
    // bracket across the range boundary
    if (e < resolution && e > b) {
      const double x = lo + e * dx;
      if ((prev_d < 0.0) != (quartic_h_prime(x) < 0.0)) p.brackets.emplace_back(x - dx, x);
    }
    parts[slot] = std::move(p);
  });
  for (auto& p : parts) {
    if (p.m > r.max_h) {
      r.max_h = p.m;
      r.argmax = p.x;
    }
    for (auto [a, b] : p.brackets) {
      double fa = quartic_h_prime(a);
      for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = quartic_h_prime(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double xc = 0.5 * (a + b);
      r.critical_points.push_back(xc);
      const double hc = quartic_h(xc);
      if (hc > r.max_h) {
        r.max_h = hc;
        r.argmax = xc;
      }
    }
  }
  std::sort(r.critical_points.begin(), r.critical_points.end());
  r.h_at_minus2 = quartic_h(-2.0);
  r.h_at_0 = quartic_h(0.0);
  r.p_at_minus1 = quartic_p(-1.0);
  r.h_prime_at_0 = quartic_h_prime(0.0);
  r.slope_at_0 = (quartic_h(0.0) - quartic_h(-1e-12)) / 1e-12;
  return r;
}

// ---------------------------------------------------------------------------
// Bounds on the relative function Phi

namespace detail {

/// z - 1 - log z without cancellation near z = 1.
inline double phi_accurate(double z) {
  const double x = z - 1.0;
  if (std::abs(x) < 1e-3) {
    // x^2/2 - x^3/3 + x^4/4 - ...
    double s = 0.0, p = x * x;
    for (int k = 2; k < 12; ++k) {
      s += ((k % 2 == 0) ? 1.0 : -1.0) * p / k;
      p *= x;
    }
    return s;
  }
  return x - std::log1p(x);
}

}  // namespace detail

/// One inequality of the suite: its constant from the grid pre-pass and the
/// worst normalized margin over the random samples (negative means violated).
struct BoundCheck {
  std::string name;
  double constant = 0.0;
  long samples = 0;
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double witness_v = 0.0, witness_w = 0.0, witness_u = 0.0;

  bool holds() const { return violations == 0; }
  void record(double margin, double v, double w, double u = 0.0) {
    ++samples;
    if (margin < 0.0) ++violations;
    if (margin < worst_margin) {
      worst_margin = margin;
      witness_v = v;
      witness_w = w;
      witness_u = u;
    }
  }
};

struct PhiBoundReport {
  double v_minus = 1.0, theta_minus = 0.1, delta = 0.01, delta_star = 0.0;
  std::vector<BoundCheck> checks;

  const BoundCheck& find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw std::invalid_argument("PhiBoundReport: no check named " + name);
  }
};

namespace detail {

inline std::vector<double> grid_with_ends(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  return g;
}

/// Quadratic / linear comparison of Phi(v/w) around a reference level m.
inline void phi_global_checks(PhiBoundReport& rep, const std::string& tag, double m, long samples,
                              std::mt19937_64& rng, int grid) {
  const double rel = 1e-12;
  // grid pre-pass over w in [m/2, 2m] and v on (m/3, 3m) or outside it
  double c_quad = std::numeric_limits<double>::infinity(), c_lin = std::numeric_limits<double>::infinity();
  const auto ws = grid_with_ends(0.5 * m, 2.0 * m, grid);
  const auto vin = grid_with_ends(m / 3.0, 3.0 * m, 4 * grid);
  for (double w : ws) {
    for (double v : vin) {
      if (v == w) continue;
      const double p = phi_accurate(v / w), d2 = (v - w) * (v - w);
      c_quad = std::min({c_quad, p / d2, d2 / p});
    }
    for (double v : {m / 3.0, 3.0 * m}) c_lin = std::min(c_lin, phi_accurate(v / w) / std::abs(v - w));
  }
  BoundCheck lo{tag + "_quadratic_lower"}, up{tag + "_quadratic_upper"}, lin{tag + "_linear_outside"};
  lo.constant = up.constant = c_quad;
  lin.constant = c_lin;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (long s = 0; s < samples; ++s) {
    const double w = 0.5 * m + 1.5 * m * U(rng);
    const double v = m / 3.0 + (3.0 * m - m / 3.0) * U(rng);
    const double p = phi_accurate(v / w), d2 = (v - w) * (v - w);
    lo.record((p - c_quad * d2) / (p + c_quad * d2 + 1e-300) + rel, v, w);
    up.record((d2 / c_quad - p) / (p + d2 / c_quad + 1e-300) + rel, v, w);
    // outside: log-uniform on (0, m/3] or [3m, 100m]
    const double vo = U(rng) < 0.5 ? (m / 3.0) * std::pow(1e-4, U(rng)) : 3.0 * m * std::pow(100.0 / 3.0, U(rng));
    const double po = phi_accurate(vo / w), d = std::abs(vo - w);
    lin.record((po - c_lin * d) / (po + c_lin * d) + rel, vo, w);
  }
  rep.checks.push_back(lo);
  rep.checks.push_back(up);
  rep.checks.push_back(lin);
}

}  // namespace detail

/// Randomized verification of the Phi bounds with constants from a grid pre-pass.
/// Checks: quadratic/linear bounds around v_- and theta_- (with c1..c4),
/// monotonicity in |v-w|, the separation bound with c5, the local cubic sandwich
/// (lower and upper side separately), and the quadratic control by Phi (constant C).
inline PhiBoundReport phi_bound_suite(const State& left, long samples, std::uint64_t seed, double delta = 0.01,
                                      int grid = 400) {
  if (samples < 10000) throw std::invalid_argument("phi_bound_suite: samples>=1e4 violated");
  if (!left.valid()) throw std::invalid_argument("phi_bound_suite: left state invalid");
  const double vm = left.v, tm = left.theta;
  if (!(delta > 0.0) || !(delta < 0.5 * std::min(tm, 1.0 / vm)))
    throw std::invalid_argument("phi_bound_suite: delta must be positive and below min(theta_-, 1/v_-)/2");
  PhiBoundReport rep;
  rep.v_minus = vm;
  rep.theta_minus = tm;
  rep.delta = delta;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double rel = 1e-12;

  detail::phi_global_checks(rep, "v", vm, samples, rng, grid);
  detail::phi_global_checks(rep, "theta", tm, samples, rng, grid);

  // monotonicity: w <= u <= v or v <= u <= w gives Phi(v/w) >= Phi(u/w)
  {
    BoundCheck mono{"monotone_in_distance"};
    for (long s = 0; s < samples; ++s) {
      const double w = std::exp(4.0 * (U(rng) - 0.5));
      double a = std::exp(4.0 * (U(rng) - 0.5)), b = std::exp(4.0 * (U(rng) - 0.5));
      double v, u;
      if (U(rng) < 0.5) {
        a = w + std::abs(a - w);
        b = w + std::abs(b - w);
        v = std::max(a, b);
        u = std::min(a, b);
      } else {
        a = w * std::min(a, b) / std::max(a, b);
        v = std::min(a, w);
        u = v + (w - v) * U(rng);
      }
      const double pv = detail::phi_accurate(v / w), pu = detail::phi_accurate(u / w);
      mono.record((pv - pu) / (pv + pu + 1e-300) + rel, v, w, u);
    }
    rep.checks.push_back(mono);
  }

  // separation: u between w and v, |w-u| <= d*, |w-v| > d*
  {
    const double lo = 0.5 * std::min(vm, tm), hi = 2.0 * std::max(vm, tm);
    const double ds = 0.25 * lo;  // below w/2 on the whole range
    rep.delta_star = ds;
    double c5 = std::numeric_limits<double>::infinity();
    for (double w : detail::grid_with_ends(lo, hi, 4 * grid))
      for (double side : {1.0, -1.0})
        for (double fu : detail::grid_with_ends(0.0, 1.0, 21))
          for (double fv : detail::grid_with_ends(0.0, 1.0, 21)) {
            const double u = w + side * fu * ds;
            const double v = w + side * ds * (1.0 + 4.0 * fv);
            if (v <= 0.0) continue;
            c5 = std::min(c5, (detail::phi_accurate(v / w) - detail::phi_accurate(u / w)) / std::abs(v - u));
          }
    BoundCheck sep{"separation_c5"};
    sep.constant = c5;
    for (long s = 0; s < samples; ++s) {
      const double w = lo + (hi - lo) * U(rng);
      const double side = U(rng) < 0.5 ? 1.0 : -1.0;
      const double u = w + side * ds * U(rng);
      double v = side > 0 ? w + ds * (1.0 + 20.0 * U(rng)) : w - ds - (w - ds) * U(rng);
      if (v <= 0.0 || std::abs(w - v) <= ds) continue;
      const double diff = detail::phi_accurate(v / w) - detail::phi_accurate(u / w);
      const double rhs = c5 * std::abs(v - u);
      sep.record((diff - rhs) / (std::abs(diff) + rhs) + rel, v, w, u);
    }
    rep.checks.push_back(sep);
  }

  // local cubic sandwich 1/2 x^2 - 1/3 x^3 <= Phi(1+x) <= 1/2 x^2, x = v/w - 1
  {
    // the upper side is tracked separately for v >= w and v < w
    BoundCheck lower{"sandwich_lower"}, upper{"sandwich_upper_v_ge_w"}, upper_below{"sandwich_upper_v_lt_w"};
    auto record = [&](double v, double w) {
      const double x = v / w - 1.0;
      const double p = detail::phi_accurate(v / w);
      const double a = 0.5 * x * x - x * x * x / 3.0, b = 0.5 * x * x;
      const double sc = b + 1e-300;
      lower.record((p - a) / sc + rel, v, w);
      (v >= w ? upper : upper_below).record((b - p) / sc + rel, v, w);
    };
    for (long s = 0; s < samples; ++s) {
      // volume form: |1/w - 1/v_-| <= delta, |1/v - 1/w| <= delta
      const double iw = 1.0 / vm + delta * (2.0 * U(rng) - 1.0);
      const double iv = iw + delta * (2.0 * U(rng) - 1.0);
      record(1.0 / iv, 1.0 / iw);
      // temperature form: |w - theta_-| <= delta, |v - w| <= delta
      const double w = tm + delta * (2.0 * U(rng) - 1.0);
      const double v = w + delta * (2.0 * U(rng) - 1.0);
      record(v, w);
    }
    rep.checks.push_back(lower);
    rep.checks.push_back(upper);
    rep.checks.push_back(upper_below);
  }

  // quadratic control |v-w|^2 <= C Phi(v/w) on the admissible sets
  {
    auto root_phi = [&](double w, double sgn) {
      // v with Phi(v/w) = delta on the side sgn of w
      double a = w, b = sgn > 0 ? 2.0 * w : 0.0;
      while (sgn > 0 && detail::phi_accurate(b / w) < delta) b *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (detail::phi_accurate(m / w) < delta) a = m;
        else b = m;
      }
      return a;
    };
    struct Set {
      std::string name;
      double wlo, whi;
      std::function<std::pair<double, double>(double)> vrange;
    };
    const double iwlo = 1.0 / vm - delta, iwhi = 1.0 / vm + delta;
    std::vector<Set> sets;
    sets.push_back({"quadratic_control_v", 1.0 / iwhi, 1.0 / iwlo, [&](double w) {
                      const double a = std::min(root_phi(w, -1.0), 1.0 / (1.0 / w + delta));
                      const double b = std::max(root_phi(w, 1.0), 1.0 / (1.0 / w - delta));
                      return std::make_pair(a, b);
                    }});
    sets.push_back({"quadratic_control_theta", tm - delta, tm + delta, [&](double w) {
                      const double a = std::min(root_phi(w, -1.0), w - delta);
                      const double b = std::max(root_phi(w, 1.0), w + delta);
                      return std::make_pair(std::max(a, 0.0), b);
                    }});
    for (const auto& st : sets) {
      auto member = [&](double v, double w) {
        if (st.name == "quadratic_control_v") return detail::phi_accurate(v / w) < delta || std::abs(1 / v - 1 / w) < delta;
        return detail::phi_accurate(v / w) < delta || std::abs(v - w) < delta;
      };
      double C = 0.0;
      for (double w : detail::grid_with_ends(st.wlo, st.whi, grid)) {
        const auto [a, b] = st.vrange(w);
        for (double v : detail::grid_with_ends(a, b, 4 * grid)) {
          if (v <= 0.0 || v == w) continue;
          const double p = detail::phi_accurate(v / w);
          if (p > 0.0) C = std::max(C, (v - w) * (v - w) / p);
        }
      }
      BoundCheck chk{st.name};
      chk.constant = C;
      for (long s = 0; s < samples; ++s) {
        const double w = st.wlo + (st.whi - st.wlo) * U(rng);
        const auto [a, b] = st.vrange(w);
        const double v = a + (b - a) * U(rng);
        if (v <= 0.0 || !member(v, w)) continue;
        const double p = detail::phi_accurate(v / w), d2 = (v - w) * (v - w);
        chk.record((C * p - d2) / (C * p + d2 + 1e-300) + rel, v, w);
      }
      rep.checks.push_back(chk);
    }
  }
  return rep;
}

}  // namespace bnsf

#endif
