#pragma once

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lwsw/evolution.hpp"
#include "lwsw/io.hpp"
#include "lwsw/profiles.hpp"
#include "lwsw/variational.hpp"

namespace lwsw::cli {

// exit codes: 0 success, 2 configuration or domain error, 3 non-convergence,
// 4 numerical failure
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kNoConvergence = 3;
inline constexpr int kNumericalError = 4;

namespace detail {

struct ModelFlags {
  double a = 1.0;
  double gamma = 1.0;
  double w = 1.0;
  double p = 0.0;
};

inline void add_model_flags(CLI::App* cmd, ModelFlags& mf, bool require_p) {
  cmd->add_option("--a", mf.a, "short-wave self-interaction strength")->capture_default_str();
  cmd->add_option("--gamma", mf.gamma, "cubic flux coefficient")->capture_default_str();
  cmd->add_option("--w", mf.w, "temporal frequency of the wave ansatz")->capture_default_str();
  auto* p = cmd->add_option("--p", mf.p, "nonlinearity exponent, p > -1");
  if (require_p) p->required();
}

inline ModelParams to_params(const ModelFlags& mf) {
  ModelParams params;
  params.a = mf.a;
  params.gamma = mf.gamma;
  params.w = mf.w;
  params.p = mf.p;
  params.validate();
  return params;
}

inline std::string fmt(double v) { return format_double(v); }

}  // namespace detail

inline int cmd_standing(const detail::ModelFlags& mf, double grid_l, std::size_t grid_n,
                        const std::string& out) {
  StandingWaveSpec spec;
  spec.params = detail::to_params(mf);
  spec.grid = centered_grid(grid_l, grid_n);
  auto [profile, report] = standing_wave(spec);
  auto res = check_profile(profile);
  if (!out.empty()) {
    ProfileDocument doc;
    doc.profile = profile;
    doc.provenance = "standing";
    write_profile(doc, out);
  }
  std::string x0 = std::isfinite(report.x0) ? detail::fmt(report.x0) : "inf";
  std::cout << "phi0=" << detail::fmt(report.phi0) << " x0=" << x0
            << " first_integral_residual=" << detail::fmt(report.first_integral_residual)
            << " r1=" << detail::fmt(res[0]) << " r2=" << detail::fmt(res[1])
            << " r3=" << detail::fmt(res[2]) << "\n";
  return kOk;
}

inline int cmd_minimize(const detail::ModelFlags& mf, double mu, double alpha, double grid_l,
                        std::size_t grid_n, int max_iters, double tol, std::uint64_t seed,
                        const std::string& out) {
  ModelParams params = detail::to_params(mf);
  ConstraintSpec spec(mu, alpha);
  Grid grid = centered_grid(grid_l, grid_n);
  MinimizeConfig cfg;
  if (max_iters > 0) cfg.max_iters = max_iters;
  if (tol > 0.0) cfg.residual_tol = tol;
  cfg.seed = seed;
  MinimizeResult mr = minimize(params, spec, grid, cfg);
  auto [r1, r2] = el_residual(mr.pair, mr.lambda, params, spec);
  std::cout << "converged=" << (mr.converged ? "true" : "false")
            << " lambda=" << detail::fmt(mr.lambda) << " c=" << detail::fmt(-2.0 * mr.lambda * spec.d)
            << " tau=" << detail::fmt(mr.tau_value) << " iterations=" << mr.iterations
            << " el_residual_1=" << detail::fmt(r1) << " el_residual_2=" << detail::fmt(r2) << "\n";
  if (mr.lambda < 0.0 && !out.empty()) {
    WaveProfile wp = wave_from_minimizer(mr, params, spec);
    ProfileDocument doc;
    doc.profile = wp;
    doc.provenance = "minimize";
    write_profile(doc, out);
  }
  return mr.converged ? kOk : kNoConvergence;
}

inline int cmd_sweep(const detail::ModelFlags& mf, double mu_from, double mu_to, int mu_points,
                     double alpha, double grid_l, std::size_t grid_n, int max_iters,
                     std::uint64_t seed, const std::string& out) {
  ModelParams params = detail::to_params(mf);
  if (!(mu_from > 0.0) || !(mu_to > mu_from) || mu_points < 2)
    throw std::invalid_argument("sweep: need 0 < mu-from < mu-to and mu-points >= 2");
  std::vector<double> mus(mu_points);
  for (int i = 0; i < mu_points; ++i)
    mus[i] = mu_from * std::pow(mu_to / mu_from, static_cast<double>(i) / (mu_points - 1));
  Grid grid = centered_grid(grid_l, grid_n);
  MinimizeConfig cfg;
  if (max_iters > 0) cfg.max_iters = max_iters;
  cfg.seed = seed;
  SweepResult res = sweep(params, alpha, mus, grid, cfg);
  if (!res.warning.empty()) std::cerr << "warning: " << res.warning << "\n";
  if (!out.empty()) write_sweep_csv(res.records, out);
  std::cout << "slope_c_vs_mu=" << detail::fmt(res.slope_c_vs_mu.slope) << " +/- "
            << detail::fmt(res.slope_c_vs_mu.slope_halfwidth95) << "\n"
            << "slope_neglambda_vs_mud=" << detail::fmt(res.slope_neglambda_vs_mud.slope)
            << " +/- " << detail::fmt(res.slope_neglambda_vs_mud.slope_halfwidth95) << "\n";
  bool all_ok = true;
  for (const auto& r : res.records) all_ok = all_ok && r.converged;
  return all_ok ? kOk : kNoConvergence;
}

inline int cmd_simulate(const std::string& profile_path, double t_end, double dt, double cfl,
                        int order, int record_every, const std::string& out_trace,
                        const std::string& out_final) {
  ProfileDocument doc = read_profile(profile_path);
  const WaveProfile& profile = doc.profile;
  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.cfl = cfl;
  cfg.scheme_order = order;
  cfg.record_every = record_every;
  if (profile.params.p < 0.0) cfg.epsilon = 1e-6;
  // evolve on a grid of twice the profile extent (same spacing) so the
  // embedding margin requirement holds and traveling waves have room
  Grid sim_grid = centered_grid(2.0 * profile.grid.length(), 2 * profile.grid.n);
  FieldState s = embed(profile, sim_grid);
  RealField ref(sim_grid);
  for (std::size_t j = 0; j < sim_grid.n; ++j) ref[j] = std::abs(s.u[j]);

  std::vector<SimTraceRow> rows;
  auto record = [&]() {
    auto [lag, err] = shape_match(s.u, ref);
    rows.push_back({s.t, l2_norm_sq(s.u), integrate(s.v), err, lag});
  };
  record();
  long step = 0;
  while (s.t < cfg.t_end - 1e-12) {
    SimConfig local = cfg;
    local.dt = std::min(cfg.dt, cfg.t_end - s.t);
    s = step_full(std::move(s), profile.params, local);
    if (++step % std::max(1, cfg.record_every) == 0) record();
  }
  if (rows.empty() || rows.back().t != s.t) record();
  if (!out_trace.empty()) write_sim_trace_csv(rows, out_trace);
  if (!out_final.empty()) {
    ProfileDocument fin = doc;
    fin.profile.grid = sim_grid;
    fin.profile.phi = RealField(sim_grid);
    fin.profile.psi = RealField(sim_grid);
    for (std::size_t j = 0; j < sim_grid.n; ++j) {
      fin.profile.phi[j] = std::abs(s.u[j]);
      fin.profile.psi[j] = s.v[j];
    }
    write_profile(fin, out_final);
  }
  std::cout << "t_end=" << detail::fmt(s.t) << " shape_error=" << detail::fmt(rows.back().shape_error)
            << " lag_estimate=" << detail::fmt(rows.back().lag_estimate)
            << " mass_drift=" << detail::fmt(rows.back().mass - rows.front().mass) << "\n";
  return kOk;
}

inline int cmd_linstab(const std::string& profile_path, double t_end, double dt, double epsilon,
                       double delta, std::uint64_t seed, int record_every,
                       const std::string& out_trace) {
  ProfileDocument doc = read_profile(profile_path);
  const WaveProfile& profile = doc.profile;
  if (profile.params.p < 0.0 && profile.c != 0.0) {
    std::cerr << "linstab requires a standing profile when the exponent is negative "
                 "(c=0 if -2/3 < p < 0)\n";
    return kConfigError;
  }
  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.epsilon = epsilon;
  cfg.record_every = record_every;
  EnergyTrace trace = linstab_run(profile, profile.params, cfg, seed, delta);
  if (!out_trace.empty()) write_linstab_trace_csv(trace, out_trace);
  std::cout << "growth_factor=" << detail::fmt(growth_factor(trace))
            << " fitted_rate=" << detail::fmt(fitted_rate(trace)) << "\n";
  return kOk;
}

/// Argument parsing plus exception-to-exit-code mapping for the waves tool.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"Solitary and standing waves of a coupled short-wave/long-wave system"};
  app.require_subcommand(1);

  detail::ModelFlags standing_mf, minimize_mf, sweep_mf;
  double grid_l = 80.0;
  std::size_t grid_n = 4096;
  std::string out;

  auto* standing = app.add_subcommand("standing", "standing wave by quadrature of the first integral");
  detail::add_model_flags(standing, standing_mf, true);
  standing->add_option("--grid-l", grid_l, "domain length")->capture_default_str();
  standing->add_option("--grid-n", grid_n, "grid points (power of two)")->capture_default_str();
  standing->add_option("--out", out, "output profile file");

  double mu = 0.0, alpha = 0.0, tol = 0.0;
  int max_iters = 0;
  std::uint64_t seed = 0;
  double m_grid_l = 80.0;
  std::size_t m_grid_n = 1024;
  std::string m_out;
  auto* minimize_cmd = app.add_subcommand("minimize", "constrained minimization of tau on the constraint sphere");
  detail::add_model_flags(minimize_cmd, minimize_mf, true);
  minimize_cmd->add_option("--mu", mu, "constraint level")->required();
  minimize_cmd->add_option("--alpha", alpha, "weight exponent, d = mu^alpha")->required();
  minimize_cmd->add_option("--grid-l", m_grid_l, "domain length")->capture_default_str();
  minimize_cmd->add_option("--grid-n", m_grid_n, "grid points (power of two)")->capture_default_str();
  minimize_cmd->add_option("--max-iters", max_iters, "iteration cap");
  minimize_cmd->add_option("--tol", tol, "critical-point residual tolerance");
  minimize_cmd->add_option("--seed", seed, "initial-guess perturbation seed")->capture_default_str();
  minimize_cmd->add_option("--out", m_out, "output profile file");

  double mu_from = 0.0, mu_to = 0.0, s_alpha = 0.0;
  int mu_points = 0, s_max_iters = 0;
  std::uint64_t s_seed = 0;
  double s_grid_l = 80.0;
  std::size_t s_grid_n = 1024;
  std::string s_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "scaling-law sweep over log-spaced mu values");
  detail::add_model_flags(sweep_cmd, sweep_mf, true);
  sweep_cmd->add_option("--mu-from", mu_from, "first mu")->required();
  sweep_cmd->add_option("--mu-to", mu_to, "last mu")->required();
  sweep_cmd->add_option("--mu-points", mu_points, "number of log-spaced points")->required();
  sweep_cmd->add_option("--alpha", s_alpha, "weight exponent, d = mu^alpha")->required();
  sweep_cmd->add_option("--grid-l", s_grid_l, "domain length")->capture_default_str();
  sweep_cmd->add_option("--grid-n", s_grid_n, "grid points (power of two)")->capture_default_str();
  sweep_cmd->add_option("--max-iters", s_max_iters, "iteration cap");
  sweep_cmd->add_option("--seed", s_seed, "initial-guess perturbation seed")->capture_default_str();
  sweep_cmd->add_option("--out", s_out, "output CSV");

  std::string sim_profile, sim_trace, sim_final;
  double sim_t_end = 5.0, sim_dt = 1e-3, sim_cfl = 0.8;
  int sim_order = 2, sim_record = 10;
  auto* simulate_cmd = app.add_subcommand("simulate", "split-step evolution of an embedded profile");
  simulate_cmd->add_option("--profile", sim_profile, "input profile file")->required();
  simulate_cmd->add_option("--t-end", sim_t_end, "final time")->capture_default_str();
  simulate_cmd->add_option("--dt", sim_dt, "time step (CFL-clamped)")->capture_default_str();
  simulate_cmd->add_option("--cfl", sim_cfl, "CFL number")->capture_default_str();
  simulate_cmd->add_option("--order", sim_order, "splitting order: 1 (Lie) or 2 (Strang)")
      ->check(CLI::IsMember({1, 2}))->capture_default_str();
  simulate_cmd->add_option("--record-every", sim_record, "steps between trace rows")->capture_default_str();
  simulate_cmd->add_option("--out-trace", sim_trace, "trace CSV");
  simulate_cmd->add_option("--out-final", sim_final, "final-state profile file");

  std::string ls_profile, ls_trace;
  double ls_t_end = 5.0, ls_dt = 1e-3, ls_eps = 1e-6, ls_delta = 1e-2;
  std::uint64_t ls_seed = 0;
  int ls_record = 50;
  auto* linstab_cmd = app.add_subcommand("linstab", "linearized evolution around a profile");
  linstab_cmd->add_option("--profile", ls_profile, "input profile file")->required();
  linstab_cmd->add_option("--t-end", ls_t_end, "final time")->capture_default_str();
  linstab_cmd->add_option("--dt", ls_dt, "time step (stiffness-clamped)")->capture_default_str();
  linstab_cmd->add_option("--epsilon", ls_eps, "coefficient regularization for p < 0")->capture_default_str();
  linstab_cmd->add_option("--delta", ls_delta, "perturbation size in H1 x L2")->capture_default_str();
  linstab_cmd->add_option("--seed", ls_seed, "perturbation seed")->capture_default_str();
  linstab_cmd->add_option("--record-every", ls_record, "steps between trace rows")->capture_default_str();
  linstab_cmd->add_option("--out-trace", ls_trace, "trace CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (standing->parsed())
      return cmd_standing(standing_mf, grid_l, grid_n, out);
    if (minimize_cmd->parsed())
      return cmd_minimize(minimize_mf, mu, alpha, m_grid_l, m_grid_n, max_iters, tol, seed, m_out);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_mf, mu_from, mu_to, mu_points, s_alpha, s_grid_l, s_grid_n,
                       s_max_iters, s_seed, s_out);
    if (simulate_cmd->parsed())
      return cmd_simulate(sim_profile, sim_t_end, sim_dt, sim_cfl, sim_order, sim_record,
                          sim_trace, sim_final);
    if (linstab_cmd->parsed())
      return cmd_linstab(ls_profile, ls_t_end, ls_dt, ls_eps, ls_delta, ls_seed, ls_record, ls_trace);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kConfigError;
}

}  // namespace lwsw::cli
