#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "lwsw/functionals.hpp"
#include "lwsw/quadrature.hpp"

namespace lwsw {

struct MinimizeConfig {
  int max_iters = 300000;
  double step_size = 0.05;       // initial gradient step, adapted by line search
  int rearrange_every = 25;
  double grad_tol = 1e-9;        // relative: stop when ||g_t|| <= grad_tol * max(|tau|, mu)
  double stall_tol = 1e-13;      // relative tau decrease per 200 iterations
  std::uint64_t seed = 0;        // initial-guess randomization (0 = plain trial pair)
  double residual_tol = 8e-5;    // alternative stop: normalized critical-point residuals
};

struct MinimizeResult {
  TrialPair pair;
  double tau_value = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

/// A solitary-wave profile (phi, psi) with speed c and c* = w - c^2/4.
struct WaveProfile {
  Grid grid;
  RealField phi;
  RealField psi;
  double c = 0.0;
  double cstar = 1.0;
  double w = 1.0;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<double> d;
  ModelParams params;
};

namespace detail {

// Node visiting order for the symmetric-decreasing rearrangement: by
// distance from x = 0, alternating right/left (right first on ties).
inline const std::vector<std::size_t>& rearrange_order(const Grid& g) {
  thread_local Grid cached;
  thread_local std::vector<std::size_t> order;
  if (!(cached == g) || order.size() != g.n) {
    order.resize(g.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      double ai = std::abs(g.x(i)), aj = std::abs(g.x(j));
      if (ai != aj) return ai < aj;
      return g.x(i) > g.x(j);
    });
    cached = g;
  }
  return order;
}

}  // namespace detail

/// Discrete Schwarz symmetrization: the multiset of samples of |f| placed
/// even-decreasing about x = 0.
inline RealField schwarz_rearrange(const RealField& f) {
  std::vector<double> vals(f.samples.size());
  for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = std::abs(f[j]);
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  const auto& order = detail::rearrange_order(f.grid);
  RealField out(f.grid);
  for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = vals[r];
  return out;
}

namespace detail {

// Paper-form k-rescaling used to restore the constraint after rearrangement:
// u(x) -> k^{1/(4p)} u(x k^{(p+2)/(4p)}), v(x) -> k^{1/4} v(kx), k in (0,1].
inline TrialPair k_rescale(const TrialPair& pair, double k, double p) {
  const Grid& g = pair.u.grid;
  const double amp_u = std::pow(k, 1.0 / (4.0 * p));
  const double arg_u = std::pow(k, (p + 2.0) / (4.0 * p));
  const double amp_v = std::pow(k, 0.25);
  RealField u(g), v(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    double x = g.x(j);
    u[j] = amp_u * interp_linear(pair.u, arg_u * x);
    v[j] = amp_v * interp_linear(pair.v, k * x);
  }
  return TrialPair(std::move(u), std::move(v));
}

inline TrialPair scale_to_constraint(TrialPair pair, const ConstraintSpec& spec) {
  double n = constraint_norm(pair, spec);
  if (n <= 0.0) throw std::runtime_error("scale_to_constraint: trivial pair");
  double sigma = std::sqrt(spec.mu / n);
  for (auto& x : pair.u.samples) x *= sigma;
  for (auto& x : pair.v.samples) x *= sigma;
  return pair;
}

}  // namespace detail

/// Rearranges (u, v) into (u~ >= 0, v~ <= 0), both even and radially
/// decreasing, without increasing tau, and restores the constraint level. For
/// p < 0 or p > 2/3 the restoration uses the direction-preserving k-rescaling
/// (which keeps tau non-increasing); otherwise scalar renormalization.
inline TrialPair symmetrize(const TrialPair& pair, const ConstraintSpec& spec,
                            const ModelParams& params) {
  TrialPair sym(schwarz_rearrange(pair.u), schwarz_rearrange(pair.v));
  for (auto& x : sym.v.samples) x = -x;
  double n = constraint_norm(sym, spec);
  if (std::abs(n - spec.mu) <= 1e-10 * spec.mu) return sym;
  const double p = params.p;
  if (n < spec.mu && (p < 0.0 || p > 2.0 / 3.0)) {
    // N(k) grows without bound as k -> 0, so a bracket below 1 exists.
    double k_hi = 1.0, k_lo = 0.7;
    int guard = 0;
    while (constraint_norm(detail::k_rescale(sym, k_lo, p), spec) < spec.mu && guard++ < 200)
      k_lo *= 0.7;
    if (guard >= 200) return detail::scale_to_constraint(std::move(sym), spec);
    double k = find_root(
        [&](double kk) { return constraint_norm(detail::k_rescale(sym, kk, p), spec) - spec.mu; },
        k_lo, k_hi, 1e-13);
    TrialPair out = detail::k_rescale(sym, k, p);
    // exact scalar polish of interpolation residue
    return detail::scale_to_constraint(std::move(out), spec);
  }
  return detail::scale_to_constraint(std::move(sym), spec);
}

namespace detail {

// For p >= 0 the u slot may go signed during descent (tau only sees |u|;
// the terminal rearrangement restores the u >= 0 normal form). For p < 0
// the step projects onto u >= 0: |u|^p blows up at the zero set, and the
// minimizer is compactly supported there, so the projection is exact.
inline TrialPair axpy(const TrialPair& pair, double s, const TrialPair& dir, bool project_u) {
  const Grid& g = pair.u.grid;
  RealField u(g), v(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    u[j] = pair.u[j] - s * dir.u[j];
    if (project_u && u[j] < 0.0) u[j] = 0.0;
    v[j] = pair.v[j] - s * dir.v[j];
  }
  return TrialPair(std::move(u), std::move(v));
}

inline TrialPair initial_guess(const Grid& g, const ConstraintSpec& spec, std::uint64_t seed) {
  const double b = std::sqrt(spec.mu / std::numbers::pi);
  RealField u = sample_real(g, [&](double x) { return b / (1.0 + x * x); });
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    const double len = g.length();
    std::vector<double> ac(8), as(8);
    for (int m = 0; m < 8; ++m) {
      ac[m] = dist(rng);
      as[m] = dist(rng);
    }
    for (std::size_t j = 0; j < g.n; ++j) {
      double x = g.x(j);
      double bump = 0.0;
      for (int m = 1; m <= 8; ++m)
        bump += ac[m - 1] * std::cos(2.0 * std::numbers::pi * m * x / len) +
                as[m - 1] * std::sin(2.0 * std::numbers::pi * m * x / len);
      u[j] = std::max(0.0, u[j] * (1.0 + 0.05 * bump));
    }
  }
  RealField v(g);
  const double inv_sqrt_d = 1.0 / std::sqrt(spec.d);
  for (std::size_t j = 0; j < g.n; ++j) v[j] = -u[j] * inv_sqrt_d;
  return scale_to_constraint(TrialPair(std::move(u), std::move(v)), spec);
}

// Preconditioner for the descent direction: (1 - d_xx)^{-1} on the u slot
// (removes the k^2 stiffness of the constraint gradient) and 1/(2d) on the
// v slot. Symmetric positive definite, so descent is preserved.
inline TrialPair precondition(const TrialPair& g, const ConstraintSpec& spec) {
  const Grid& grid = g.u.grid;
  TrialPair out = g;
  auto hat = fft(to_complex(g.u.samples));
  auto k = wavenumbers(grid.n, grid.length());
  for (std::size_t j = 0; j < grid.n; ++j) hat[j] /= (1.0 + k[j] * k[j]);
  auto back = ifft(std::move(hat));
  for (std::size_t j = 0; j < grid.n; ++j) out.u[j] = back[j].real();
  const double inv2d = 1.0 / (2.0 * spec.d);
  for (auto& x : out.v.samples) x *= inv2d;
  return out;
}

}  // namespace detail

/// Projected gradient descent for the constrained minimization of tau over
/// the sphere N_d = mu, with a (1 - d_xx)^{-1} preconditioner, Armijo
/// backtracking, and periodic Schwarz rearrangement. Stops on either a small
/// tangential gradient or small critical-point residuals. Deterministic
/// given cfg.seed.
inline MinimizeResult minimize(const ModelParams& params, const ConstraintSpec& spec,
                               const Grid& grid, const MinimizeConfig& cfg) {
  params.validate();
  MinimizeResult res;
  TrialPair pair = detail::initial_guess(grid, spec, cfg.seed);
  double tau_val = tau(pair, params);
  double step = cfg.step_size;
  double tau_window = tau_val;
  int window_anchor = 0;
  double grad_norm = std::numeric_limits<double>::infinity();

  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    TrialPair gt = grad_tau(pair, params);
    TrialPair gn = grad_constraint(pair, spec);
    if (!all_finite(gt.u) || !all_finite(gt.v))
      throw std::runtime_error("minimize: NaN in gradient at iteration " + std::to_string(it));
    TrialPair pgt = detail::precondition(gt, spec);
    TrialPair pgn = detail::precondition(gn, spec);
    // lam makes the preconditioned direction tangent to the sphere to
    // first order: <gn, P(gt - lam gn)> = 0
    double lam = pair_inner(pgt, gn) / pair_inner(pgn, gn);
    TrialPair raw = gt;
    TrialPair dir = pgt;
    for (std::size_t j = 0; j < grid.n; ++j) {
      raw.u[j] -= lam * gn.u[j];
      raw.v[j] -= lam * gn.v[j];
      dir.u[j] -= lam * pgn.u[j];
      dir.v[j] -= lam * pgn.v[j];
    }
    grad_norm = std::sqrt(std::max(0.0, pair_inner(raw, dir)));
    if (grad_norm <= cfg.grad_tol * std::max(std::abs(tau_val), spec.mu)) {
      res.converged = true;
      break;
    }
    if ((it % 25) == 0) {
      double lam_rq = rayleigh_multiplier(pair, params, spec);
      auto [r1, r2] = el_residual(pair, lam_rq, params, spec);
      if (std::max(r1, r2) <= cfg.residual_tol) {
        res.converged = true;
        break;
      }
    }

    // Armijo backtracking on the constraint sphere
    bool accepted = false;
    double s = step;
    for (int bt = 0; bt < 50; ++bt) {
      TrialPair cand = detail::scale_to_constraint(detail::axpy(pair, s, dir, params.p < 0.0), spec);
      double tau_c = tau(cand, params);
      if (tau_c <= tau_val - 1e-4 * s * grad_norm * grad_norm) {
        pair = std::move(cand);
        tau_val = tau_c;
        step = std::min(s * 1.5, 1e3 * cfg.step_size);
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;  // step collapsed; treat as stall

    if (cfg.rearrange_every > 0 && (it + 1) % cfg.rearrange_every == 0) {
      TrialPair sym = symmetrize(pair, spec, params);
      double tau_s = tau(sym, params);
      if (tau_s <= tau_val + 1e-12) {
        pair = std::move(sym);
        tau_val = tau_s;
      }
    }

    if (it - window_anchor >= 200) {
      if (tau_window - tau_val <= cfg.stall_tol * std::max(1.0, std::abs(tau_val))) break;
      tau_window = tau_val;
      window_anchor = it;
    }
  }

  // terminal rearrangement keeps the advertised shape invariants
  {
    TrialPair sym = symmetrize(pair, spec, params);
    if (tau(sym, params) <= tau_val + 1e-10 * std::max(1.0, std::abs(tau_val))) {
      pair = std::move(sym);
      tau_val = tau(pair, params);
    }
  }

  res.pair = std::move(pair);
  res.tau_value = tau_val;
  res.lambda = lagrange_multiplier(res.pair, params, spec);
  res.iterations = it;
  res.grad_norm = grad_norm;
  if (!res.converged) {
    double lam_rq = rayleigh_multiplier(res.pair, params, spec);
    auto [r1, r2] = el_residual(res.pair, lam_rq, params, spec);
    res.converged = std::max(r1, r2) <= cfg.residual_tol ||
                    grad_norm <= cfg.grad_tol * std::max(std::abs(tau_val), spec.mu);
  }
  return res;
}

/// Rescales a minimizer to a traveling solitary wave:
/// (phi, psi)(x) = (u, v)(sqrt(-lambda) x), c* = -lambda, c = -2 lambda d.
inline WaveProfile wave_from_minimizer(const MinimizeResult& result, const ModelParams& params,
                                       const ConstraintSpec& spec) {
  if (!(result.lambda < 0.0))
    throw std::domain_error(
        "wave_from_minimizer: multiplier not negative; increase mu (p<0) or decrease mu (p>2/3)");
  const double factor = std::sqrt(-result.lambda);
  WaveProfile wp;
  wp.phi = resample(result.pair.u, factor);
  wp.psi = resample(result.pair.v, factor);
  wp.grid = wp.phi.grid;
  wp.c = -2.0 * result.lambda * spec.d;
  wp.cstar = -result.lambda;
  wp.w = wp.cstar + wp.c * wp.c / 4.0;
  wp.lambda = result.lambda;
  wp.mu = spec.mu;
  wp.d = spec.d;
  wp.params = params;
  return wp;
}

struct SweepRecord {
  double mu = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double lambda = 0.0;
  double c = 0.0;
  double cstar = 0.0;
  double tau = 0.0;
  double h1_u = 0.0;  // ||phi||_H1^2 of the rescaled wave
  double l2_v = 0.0;  // ||psi||_2^2 of the rescaled wave
  int iterations = 0;
  double el_residual_1 = 0.0;
  double el_residual_2 = 0.0;
  bool converged = false;
  std::string error;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_halfwidth95 = 0.0;  // 1.96 * standard error
  std::size_t points = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  if (x.size() > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - (f.intercept + f.slope * x[i]);
      ss += r * r;
    }
    double se = std::sqrt(ss / (n - 2.0) / (sxx - sx * sx / n));
    f.slope_halfwidth95 = 1.96 * se;
  }
  return f;
}

struct SweepResult {
  std::vector<SweepRecord> records;
  LineFit slope_c_vs_mu;            // log c vs log mu
  LineFit slope_neglambda_vs_mud;   // log(-lambda) vs log(mu/d)
  std::string warning;              // non-empty when alpha is outside the scaling window
};

/// Scaling-law windows: p < 0 needs alpha in (1/3, 1); p > 2/3 needs
/// alpha in (1 - p, 1/3). Outside these the sweep still runs but the fitted
/// slopes carry no asymptotic meaning.
inline std::string alpha_window_warning(double p, double alpha) {
  if (p < 0.0 && !(alpha > 1.0 / 3.0 && alpha < 1.0))
    return "alpha outside (1/3, 1); scaling-law slopes unreliable for p < 0";
  if (p > 2.0 / 3.0 && !(alpha > 1.0 - p && alpha < 1.0 / 3.0))
    return "alpha outside (1 - p, 1/3); scaling-law slopes unreliable for p > 2/3";
  if (p >= 0.0 && p <= 2.0 / 3.0)
    return "no scaling-law window covers p in [0, 2/3]; slopes are descriptive only";
  return "";
}

inline unsigned sweep_thread_cap() {
  if (const char* env = std::getenv("WAVES_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

/// Runs minimize over a list of mu values (entries may run concurrently;
/// records are returned in input order) and fits the scaling-law slopes.
inline SweepResult sweep(const ModelParams& params, double alpha,
                         const std::vector<double>& mu_values, const Grid& grid,
                         const MinimizeConfig& cfg, unsigned max_threads = 0) {
  SweepResult out;
  out.warning = alpha_window_warning(params.p, alpha);
  out.records.resize(mu_values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= mu_values.size()) return;
      SweepRecord rec;
      rec.mu = mu_values[i];
      rec.alpha = alpha;
      try {
        ConstraintSpec spec(mu_values[i], alpha);
        rec.d = spec.d;
        MinimizeResult mr = minimize(params, spec, grid, cfg);
        rec.lambda = mr.lambda;
        rec.tau = mr.tau_value;
        rec.iterations = mr.iterations;
        rec.converged = mr.converged && mr.lambda < 0.0;
        auto [r1, r2] = el_residual(mr.pair, mr.lambda, params, spec);
        rec.el_residual_1 = r1;
        rec.el_residual_2 = r2;
        if (mr.lambda < 0.0) {
          double s = std::sqrt(-mr.lambda);
          rec.c = -2.0 * mr.lambda * spec.d;
          rec.cstar = -mr.lambda;
          RealField du = derivative(mr.pair.u, grad_scheme(grid));
          rec.h1_u = l2_norm_sq(mr.pair.u) / s + s * l2_norm_sq(du);
          rec.l2_v = l2_norm_sq(mr.pair.v) / s;
        }
      } catch (const std::exception& e) {
        rec.converged = false;
        rec.error = e.what();
      }
      out.records[i] = std::move(rec);
    }
  };
  unsigned threads = max_threads == 0 ? sweep_thread_cap() : max_threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(mu_values.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<double> log_mu, log_c, log_mud, log_nl;
  for (const auto& r : out.records) {
    if (!r.converged || !(r.c > 0.0) || !(r.lambda < 0.0)) continue;
    log_mu.push_back(std::log(r.mu));
    log_c.push_back(std::log(r.c));
    log_mud.push_back(std::log(r.mu / r.d));
    log_nl.push_back(std::log(-r.lambda));
  }
  out.slope_c_vs_mu = fit_line(log_mu, log_c);
  out.slope_neglambda_vs_mud = fit_line(log_mud, log_nl);
  return out;
}

}  // namespace lwsw
