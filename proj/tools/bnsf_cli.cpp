// Command-line driver: profile, simulate, contract, sweep, verify, all.
// Exit codes: 0 success, 1 failed check or runtime failure, 2 configuration error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bnsf/acceptance.hpp"
#include "bnsf/config.hpp"
#include "bnsf/contraction.hpp"
#include "bnsf/csv.hpp"
#include "bnsf/experiments.hpp"
#include "bnsf/shock_profile.hpp"
#include "bnsf/solver.hpp"
#include "bnsf/verifiers.hpp"

namespace fs = std::filesystem;
using namespace bnsf;

namespace {

struct Context {
  RunConfig cfg;
  int threads = 1;
  fs::path out;
  std::ostringstream summary;  // result lines, echoed config appended on write

  std::string path(const std::string& name) const { return (out / name).string(); }
};

struct Setup {
  ShockData shock;
  ShockProfile profile;
};

Setup make_setup(const RunConfig& c) {
  Setup s;
  try {
    s.shock = solve_end_state(c.left(), c.eps, c.shock_family(), c.gas);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  s.profile = compute_profile(s.shock, c.gas);
  return s;
}

SolverConfig grid_config(const RunConfig& c, const ShockData& sh) {
  SolverConfig g;
  g.L = c.L;
  g.N = c.N;
  g.cfl = c.cfl;
  g.sigma = sh.sigma;
  g.left = sh.left;
  g.right = sh.right;
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return g;
}

PerturbationSpec run_perturbation(const RunConfig& c) {
  PerturbationSpec p;
  p.E0 = c.E0;
  p.center = c.center;
  p.width = c.width;
  return p;
}

void line(Context& ctx, const std::string& s) {
  ctx.summary << s << '\n';
  std::cout << s << '\n';
}

std::string f17(double x) { return CsvWriter::format(x); }

/// Short form for file names.
std::string printf_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void write_trajectory(const std::string& path, const Trajectory& tr) {
  CsvWriter w(path, {"t", "X", "Xdot", "entropy", "Y", "Y_g", "Y_b", "Y_l", "Y_s", "J_bad", "J_good", "J_para", "D",
                     "D_v1", "D_v2", "D_u", "D_th", "B1_plus", "B1_minus", "B2", "B3", "B4", "G_u_minus", "G_u_plus",
                     "G_v", "G_th"});
  for (const auto& s : tr.samples) {
    const auto& f = s.f;
    w.row({s.t, s.X, s.Xdot, f.entropy, f.Y, f.Y_g, f.Y_b, f.Y_l, f.Y_s, f.J_bad, f.J_good, f.J_para, f.D, f.D_v1,
           f.D_v2, f.D_u, f.D_th, f.B1_plus, f.B1_minus, f.B2, f.B3, f.B4, f.G_u_minus, f.G_u_plus, f.G_v, f.G_th});
  }
}

int cmd_profile(Context& ctx) {
  const auto s = make_setup(ctx.cfg);
  const auto& p = s.profile;
  const bool three = s.shock.family == Family::Three;
  {
    CsvWriter w(ctx.path("profile.csv"), {"xi", "v", "u", "theta", "v_xi", "u_xi", "theta_xi"});
    const std::size_t n = p.xi.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = three ? p.xi[k] : -p.xi[n - 1 - k];
      const auto q = p.at(xi);
      w.row({xi, q.val.v, q.val.u, q.val.theta, q.d1.v, q.d1.u, q.d1.theta});
    }
  }
  const auto t = verify_tails(p);
  {
    CsvWriter w(ctx.path("tail_report.csv"), {"quantity", "value"});
    w.row({std::string("sigma"), s.shock.sigma});
    w.row({std::string("sigma_star"), sigma_star(s.shock.left, ctx.cfg.gas)});
    w.row({std::string("rate_left"), t.rate_left});
    w.row({std::string("rate_right"), t.rate_right});
    w.row({std::string("sharp_rate"), sharp_rate(p.base, ctx.cfg.gas)});
    w.row({std::string("v_increasing"), static_cast<long>(t.v_increasing)});
    w.row({std::string("u_decreasing"), static_cast<long>(t.u_decreasing)});
    w.row({std::string("theta_decreasing"), static_cast<long>(t.theta_decreasing)});
    w.row({std::string("ratio_u"), t.ratio_u});
    w.row({std::string("ratio_theta"), t.ratio_theta});
    w.row({std::string("tail_min"), t.tail_min});
    w.row({std::string("tail_max"), t.tail_max});
    w.row({std::string("inf_vprime"), t.inf_vprime});
    w.row({std::string("jacobian_defect"), t.jacobian_defect});
    w.row({std::string("second_deriv_const"), t.second_deriv_const});
    w.row({std::string("ode_residual"), t.ode_residual});
  }
  const bool mono = t.v_increasing && t.u_decreasing && t.theta_decreasing;
  const bool ok = mono && t.ode_residual <= 1e-9 && (ctx.cfg.eps == 0.0 || t.tail_min > 0.0);
  line(ctx, "profile: " + std::to_string(p.xi.size()) + " samples, sigma " + f17(s.shock.sigma));
  line(ctx, "profile: ode residual " + f17(t.ode_residual) + ", monotone " + (mono ? "yes" : "no"));
  line(ctx, std::string("verdict: ") + (ok ? "valid" : "invalid"));
  return ok ? 0 : 1;
}

int cmd_simulate(Context& ctx) {
  const auto s = make_setup(ctx.cfg);
  const Weight w{ctx.cfg.lambda, &s.profile};
  const auto gc = grid_config(ctx.cfg, s.shock);
  const auto prep = well_prepared_data(w, gc, run_perturbation(ctx.cfg), ctx.cfg.gas);
  const auto ref = sample_reference(w, gc, 0.0);
  std::vector<State> refs(gc.N);
  for (int i = 0; i < gc.N; ++i) refs[i] = {ref.v[i], ref.u[i], ref.th[i]};
  int k = 0;
  CsvWriter totals(ctx.path("totals.csv"), {"t", "V", "U", "E"});
  const auto obs = [&](const GridState& st) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%04d.csv", k++);
    CsvWriter w(ctx.path(name), {"t", "xi", "v", "u", "theta", "E"});
    for (int i = 0; i < st.size(); ++i)
      w.row({st.t, st.cfg.x(i), st.v[i], st.u[i], st.theta[i], total_energy(ctx.cfg.gas, st.u[i], st.theta[i])});
    const auto t = conserved_totals(st, ctx.cfg.gas, refs);
    totals.row({st.t, t.V, t.U, t.E});
  };
  advance(prep.state, ctx.cfg.gas, ctx.cfg.T, obs, ctx.cfg.sample_every);
  line(ctx, "simulate: " + std::to_string(k) + " snapshots, initial a-weighted entropy " + f17(prep.achieved_E0));
  return 0;
}

int cmd_contract(Context& ctx) {
  const auto s = make_setup(ctx.cfg);
  const Weight w{ctx.cfg.lambda, &s.profile};
  const auto gc = grid_config(ctx.cfg, s.shock);
  auto pert = run_perturbation(ctx.cfg);
  pert.theta_weighted = true;
  const auto prep = well_prepared_data(w, gc, pert, ctx.cfg.gas);
  MonitorOptions mo;
  mo.T = ctx.cfg.T;
  mo.sample_every = ctx.cfg.sample_every;
  mo.eps_shift = ctx.cfg.eps_shift;
  mo.delta3 = ctx.cfg.delta3;
  const auto tr = run_monitored(prep.state, w, ctx.cfg.gas, mo);
  write_trajectory(ctx.path("trajectory.csv"), tr);
  const double eps = ctx.cfg.eps_shift > 0.0 ? ctx.cfg.eps_shift : ctx.cfg.eps;
  const double initial = tr.samples.front().f.entropy;
  double lowest = initial, increase = 0.0;
  long bound_violations = 0;
  for (const auto& smp : tr.samples) {
    lowest = std::min(lowest, smp.f.entropy);
    increase = std::max(increase, smp.f.entropy - lowest);
    if (std::abs(smp.Xdot) > shift_gain(smp.f) / (eps * eps)) ++bound_violations;
  }
  // absolute floor for data at the profile, where the relative test is pure roundoff
  const bool ok = increase <= std::max(1e-3 * initial, 1e-12) && bound_violations == 0;
  line(ctx, "contract: initial entropy " + f17(initial) + ", final " + f17(tr.samples.back().f.entropy));
  line(ctx, "contract: max entropy increase " + f17(increase) + ", shift bound violations " +
                std::to_string(bound_violations));
  line(ctx, std::string("verdict: ") + (ok ? "contractive" : "not contractive"));
  return ok ? 0 : 1;
}

int cmd_sweep(Context& ctx) {
  const auto s = make_setup(ctx.cfg);
  const Weight w{ctx.cfg.lambda, &s.profile};
  SweepConfig sc;
  sc.nu_list = ctx.cfg.nu_list;
  sc.N0 = ctx.cfg.N0;
  sc.L = ctx.cfg.sweep_L;
  sc.cfl = ctx.cfg.cfl;
  sc.T = ctx.cfg.sweep_T;
  sc.r_support = ctx.cfg.r_support;
  sc.delta3 = ctx.cfg.delta3;
  sc.eps_shift = ctx.cfg.eps_shift;
  sc.perturbation.E0 = ctx.cfg.sweep_E0;
  sc.threads = ctx.threads;
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto rep = run_sweep(sc, w, ctx.cfg.gas);
  bool ok = true;
  CsvWriter sum(ctx.path("sweep_summary.csv"),
                {"nu", "N", "status", "achieved_E0", "entropy_initial", "entropy_max", "max_abs_shift",
                 "lemma_constant", "max_closure", "max_closure_ratio", "l1_to_next"});
  for (std::size_t k = 0; k < rep.runs.size(); ++k) {
    const auto& r = rep.runs[k];
    const double l1 = k < rep.l1_distances.size() ? rep.l1_distances[k] : std::nan("");
    sum.row({r.nu, static_cast<long>(r.N), r.ok() ? std::string("ok") : "error: " + r.error, r.achieved_E0,
             r.entropy_initial, r.entropy_max, r.max_abs_shift, r.lemma_constant, r.max_closure,
             r.max_closure_ratio, l1});
    if (!r.ok()) {
      ok = false;
      line(ctx, "sweep: nu=" + f17(r.nu) + " failed: " + r.error);
      continue;
    }
    const std::string tag = "nu_" + printf_g(r.nu);
    write_trajectory(ctx.path("trajectory_" + tag + ".csv"), r.trajectory);
    CsvWriter pw(ctx.path("shift_pieces_" + tag + ".csv"),
                 {"t", "J1", "J2", "J3", "J4", "J5", "remainder", "closure", "quadrature_tol", "measured", "implied",
                  "lemma_defect"});
    for (const auto& p : r.pieces)
      pw.row({p.t, p.J1, p.J2, p.J3, p.J4, p.J5, p.remainder, p.closure, p.quadrature_tol, p.measured, p.implied,
              p.lemma_defect});
    const bool bounded = r.entropy_max <= r.entropy_initial * (1.0 + 1e-3);
    const bool closed = r.max_closure_ratio <= 1.0;
    ok = ok && bounded && closed;
    line(ctx, "sweep: nu=" + f17(r.nu) + " N=" + std::to_string(r.N) + " entropy bound " +
                  (bounded ? "holds" : "violated") + ", closure/tol " + f17(r.max_closure_ratio) +
                  ", lemma constant " + f17(r.lemma_constant));
  }
  for (std::size_t k = 0; k < rep.l1_distances.size(); ++k)
    line(ctx, "sweep: L1 distance " + std::to_string(k) + " -> " + std::to_string(k + 1) + " = " +
                  f17(rep.l1_distances[k]));
  line(ctx, std::string("verdict: ") + (ok ? "pass" : "fail"));
  return ok ? 0 : 1;
}

int cmd_verify(Context& ctx) {
  const auto& c = ctx.cfg;
  bool ok = true;

  {
    CsvWriter w(ctx.path("poincare.csv"),
                {"N", "delta", "C1", "random_starts", "worst", "best_random", "witness_l2", "evaluations"});
    double coarse = 0.0;
    for (int N : {256, 512, 1024}) {
      PoincareSearchOptions po;
      po.N = N;
      po.delta = c.delta;
      po.C1 = c.C1;
      po.random_starts = c.budget;
      po.seed = c.seed;
      const auto r = search_poincare_violations(po);
      w.row({static_cast<long>(N), c.delta, c.C1, c.budget, r.worst, r.best_random, r.witness_l2, r.evaluations});
      const bool good = r.worst <= 1e-6 && (N == 256 || std::max(r.worst, 0.0) <= std::max(coarse, 0.0));
      coarse = r.worst;
      ok = ok && good;
      line(ctx, "verify: poincare N=" + std::to_string(N) + " worst " + f17(r.worst));
    }
  }
  {
    const auto s = scan_poly_region(c.delta, c.delta1, c.resolution, ctx.threads);
    CsvWriter w(ctx.path("poly_region.csv"),
                {"delta", "delta1", "resolution", "max_gap", "arg_z1", "arg_z2", "mirror_gap", "evaluations"});
    w.row({s.delta, s.delta1, static_cast<long>(c.resolution), s.max_gap, s.arg_z1, s.arg_z2, s.mirror_gap,
           s.evaluations});
    ok = ok && s.max_gap <= 1e-9;
    line(ctx, "verify: poly region max gap " + f17(s.max_gap) + " at (" + f17(s.arg_z1) + ", " + f17(s.arg_z2) + ")");
  }
  {
    CsvWriter w(ctx.path("poly_thresholds.csv"), {"quantity", "fixed", "value"});
    const double ds = bisect_delta_star(c.delta1, 1000, 1e-9, 1e-5, 0.05, 30, ctx.threads);
    const double d1 = bisect_delta1(c.delta, 1000, 1e-9, 0.5, 20, ctx.threads);
    w.row({std::string("delta_star_at_delta1"), c.delta1, ds});
    w.row({std::string("delta1_max_at_delta"), c.delta, d1});
    line(ctx, "verify: largest passing delta at delta1=" + f17(c.delta1) + " is " + f17(ds));
  }
  {
    const auto q = quartic_scan(2000000, -1e-6, ctx.threads);
    CsvWriter w(ctx.path("quartic.csv"), {"quantity", "value"});
    w.row({std::string("max_h"), q.max_h});
    w.row({std::string("argmax"), q.argmax});
    w.row({std::string("h_at_minus2"), q.h_at_minus2});
    w.row({std::string("h_at_0"), q.h_at_0});
    w.row({std::string("p_at_minus1"), q.p_at_minus1});
    w.row({std::string("h_prime_at_0"), q.h_prime_at_0});
    w.row({std::string("slope_at_0"), q.slope_at_0});
    for (double x : q.critical_points) w.row({std::string("critical_point"), x});
    ok = ok && q.max_h < 0.0;
    line(ctx, "verify: quartic max " + f17(q.max_h));
  }
  {
    const auto rep = phi_bound_suite(c.left(), 20000, c.seed);
    CsvWriter w(ctx.path("phi_bounds.csv"),
                {"check", "constant", "samples", "violations", "worst_margin", "witness_v", "witness_w", "witness_u"});
    for (const auto& b : rep.checks) {
      w.row({b.name, b.constant, b.samples, b.violations, b.worst_margin, b.witness_v, b.witness_w, b.witness_u});
      ok = ok && b.holds();
      if (!b.holds())
        line(ctx, "verify: bound " + b.name + " violated " + std::to_string(b.violations) + "/" +
                      std::to_string(b.samples));
    }
  }
  line(ctx, std::string("verdict: ") + (ok ? "pass" : "fail"));
  return ok ? 0 : 1;
}

int cmd_all(Context& ctx) {
  AcceptanceOptions o;
  o.seed = ctx.cfg.seed;
  o.threads = ctx.threads;
  const auto res = run_acceptance(o, {}, [&](const CriterionResult& r) { line(ctx, format_result(r)); });
  CsvWriter w(ctx.path("acceptance.csv"), {"criterion", "name", "passed", "seconds", "detail"});
  bool ok = true;
  for (const auto& r : res) {
    std::string d = r.detail;
    for (char& ch : d)
      if (ch == ',') ch = ';';
    w.row({static_cast<long>(r.id), r.name, static_cast<long>(r.passed), r.seconds, d});
    ok = ok && r.passed;
  }
  line(ctx, std::string("verdict: ") + (ok ? "pass" : "fail"));
  return ok ? 0 : 1;
}

void write_summary(const Context& ctx, const std::string& cmd, int code) {
  std::ofstream f(ctx.path("summary_" + cmd + ".txt"));
  f << "command: " << cmd << "\nexit: " << code << "\n\n" << ctx.summary.str() << "\n# config\n" << to_ini(ctx.cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous shock contraction toolkit"};
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "sectioned key=value config file");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides verify.seed)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> cmds{
      {"profile", "build and verify the shock profile"},
      {"simulate", "plain run with snapshots"},
      {"contract", "monitored run with the shift, contraction verdict"},
      {"sweep", "vanishing-viscosity sweep"},
      {"verify", "inequality verifiers"},
      {"all", "full acceptance suite"}};
  for (const auto& [name, help] : cmds) app.add_subcommand(name, help)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  Context ctx;
  ctx.threads = threads;
  try {
    ctx.cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
    apply_env_overrides(ctx.cfg);
    if (!out_dir.empty()) ctx.cfg.out_dir = out_dir;
    if (seed_opt->count() > 0) ctx.cfg.seed = seed;
    ctx.cfg.validate();
    ctx.out = ctx.cfg.out_dir;
    fs::create_directories(ctx.out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  int code = 1;
  try {
    if (cmd == "profile") code = cmd_profile(ctx);
    else if (cmd == "simulate") code = cmd_simulate(ctx);
    else if (cmd == "contract") code = cmd_contract(ctx);
    else if (cmd == "sweep") code = cmd_sweep(ctx);
    else if (cmd == "verify") code = cmd_verify(ctx);
    else code = cmd_all(ctx);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    code = 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    code = 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    ctx.summary << "error: " << e.what() << '\n';
    code = 1;
  }
  write_summary(ctx, cmd, code);
  return code;
}
