#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lwsw/calculus.hpp"
#include "lwsw/functionals.hpp"
#include "lwsw/variational.hpp"

namespace lwsw {

/// Time-dependent state of the full or linearized system on a periodic grid.
struct FieldState {
  Grid grid;
  ComplexField u;
  RealField v;
  double t = 0.0;

  FieldState() = default;
  FieldState(const Grid& g) : grid(g), u(g), v(g) {
    if (!g.periodic) throw std::invalid_argument("FieldState: periodic grid required");
  }
};

struct SimConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double cfl = 0.8;
  int scheme_order = 2;    // 1 = Lie, 2 = Strang
  double epsilon = 1e-6;   // |u| ~ 0 / phi^p regularization for p < 0
  int record_every = 10;
};

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> mass;        // int |u|^2
  std::vector<double> v_total;     // int v
  std::vector<double> lin_energy;  // ||u||_H1^2 + ||v||_2^2 (linearized runs)
};

namespace detail {

inline void check_finite(const FieldState& s, const char* substep) {
  if (!all_finite(s.u) || !all_finite(s.v))
    throw std::runtime_error(std::string("evolution: non-finite state after substep ") + substep);
}

// u <- exp(-i k^2 dt) u in Fourier space (exact dispersion substep)
inline void substep_dispersion(FieldState& s, double dt) {
  auto hat = fft(s.u.samples);
  auto k = wavenumbers(s.grid.n, s.grid.length());
  for (std::size_t j = 0; j < s.grid.n; ++j) {
    double ang = -k[j] * k[j] * dt;
    hat[j] *= complex{std::cos(ang), std::sin(ang)};
  }
  s.u.samples = ifft(std::move(hat));
}

// u <- u exp(-i (a (|u|^2 + eps^2)^{p/2} + v) dt); |u| invariant, so the
// substep is exact
inline void substep_phase(FieldState& s, const ModelParams& params, double eps, double dt) {
  for (std::size_t j = 0; j < s.grid.n; ++j) {
    double amp2 = std::norm(s.u[j]) + eps * eps;
    double pot = params.a * std::pow(amp2, params.p / 2.0) + s.v[j];
    double ang = -pot * dt;
    s.u[j] *= complex{std::cos(ang), std::sin(ang)};
  }
}

// conservative finite-volume step for v_t + d/dx(-gamma v^3 - |u|^2) = 0
// with |u|^2 frozen; local Lax-Friedrichs (Rusanov) flux, speed 3 gamma v^2
inline void substep_conservation(FieldState& s, const ModelParams& params, double dt) {
  const std::size_t n = s.grid.n;
  const double lam = dt / s.grid.dx;
  std::vector<double> cell_flux(n);
  for (std::size_t j = 0; j < n; ++j)
    cell_flux[j] = -params.gamma * s.v[j] * s.v[j] * s.v[j] - std::norm(s.u[j]);
  std::vector<double> iface(n);  // iface[j] = flux at j+1/2
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t jp = (j + 1) % n;
    double sj = 3.0 * params.gamma * s.v[j] * s.v[j];
    double sp = 3.0 * params.gamma * s.v[jp] * s.v[jp];
    double speed = std::max(sj, sp);
    iface[j] = 0.5 * (cell_flux[j] + cell_flux[jp]) - 0.5 * speed * (s.v[jp] - s.v[j]);
  }
  std::vector<double> vn(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t jm = (j + n - 1) % n;
    vn[j] = s.v[j] - lam * (iface[j] - iface[jm]);
  }
  s.v.samples = std::move(vn);
}

inline double max_wave_speed(const FieldState& s, const ModelParams& params) {
  double m = 0.0;
  for (double v : s.v.samples) m = std::max(m, 3.0 * params.gamma * v * v);
  return m;
}

}  // namespace detail

/// One split step of the full system (dt clamped to the hyperbolic CFL
/// bound). Returns the advanced state; inspect .t for the step actually taken.
inline FieldState step_full(FieldState state, const ModelParams& params, const SimConfig& cfg) {
  double dt = cfg.dt;
  double smax = detail::max_wave_speed(state, params);
  if (smax > 0.0) dt = std::min(dt, cfg.cfl * state.grid.dx / smax);
  if (!(dt > 1e-14)) throw std::runtime_error("step_full: step size underflow under CFL clamping");
  if (cfg.scheme_order == 2) {
    detail::substep_dispersion(state, 0.5 * dt);
    detail::check_finite(state, "dispersion");
    detail::substep_phase(state, params, cfg.epsilon, 0.5 * dt);
    detail::check_finite(state, "phase");
    detail::substep_conservation(state, params, dt);
    detail::check_finite(state, "conservation");
    detail::substep_phase(state, params, cfg.epsilon, 0.5 * dt);
    detail::substep_dispersion(state, 0.5 * dt);
    detail::check_finite(state, "dispersion");
  } else {
    detail::substep_dispersion(state, dt);
    detail::check_finite(state, "dispersion");
    detail::substep_phase(state, params, cfg.epsilon, dt);
    detail::check_finite(state, "phase");
    detail::substep_conservation(state, params, dt);
    detail::check_finite(state, "conservation");
  }
  state.t += dt;
  return state;
}

inline void record_full(EnergyTrace& trace, const FieldState& s) {
  trace.times.push_back(s.t);
  trace.mass.push_back(l2_norm_sq(s.u));
  trace.v_total.push_back(integrate(s.v));
}

/// Advances the full system to cfg.t_end, recording mass and total v.
inline std::pair<FieldState, EnergyTrace> simulate_full(FieldState state, const ModelParams& params,
                                                        SimConfig cfg) {
  EnergyTrace trace;
  record_full(trace, state);
  long step = 0;
  while (state.t < cfg.t_end - 1e-12) {
    SimConfig local = cfg;
    local.dt = std::min(cfg.dt, cfg.t_end - state.t);
    state = step_full(std::move(state), params, local);
    if (++step % std::max(1, cfg.record_every) == 0) record_full(trace, state);
  }
  if (trace.times.empty() || trace.times.back() != state.t) record_full(trace, state);
  return {std::move(state), std::move(trace)};
}

/// Initial data from a wave profile: u = e^{i(c/2)x} phi(x), v = psi(x).
inline FieldState embed(const WaveProfile& profile, const Grid& grid) {
  if (!grid.periodic) throw std::invalid_argument("embed: periodic grid required");
  // effective support must fit with a quarter-length margin
  double phimax = 0.0;
  for (double v : profile.phi.samples) phimax = std::max(phimax, std::abs(v));
  double support = 0.0;
  for (std::size_t j = 0; j < profile.grid.n; ++j)
    if (std::abs(profile.phi[j]) > 1e-12 * phimax)
      support = std::max(support, std::abs(profile.grid.x(j)));
  if (support > 0.25 * grid.length())
    throw std::invalid_argument("embed: profile support exceeds grid with L/4 margin");
  FieldState s(grid);
  RealField phi = regrid(profile.phi, grid);
  RealField psi = regrid(profile.psi, grid);
  for (std::size_t j = 0; j < grid.n; ++j) {
    double ang = 0.5 * profile.c * grid.x(j);
    s.u[j] = phi[j] * complex{std::cos(ang), std::sin(ang)};
    s.v[j] = psi[j];
  }
  s.t = 0.0;
  return s;
}

namespace detail {

// Frozen coefficients of the linearized system on the evolution grid,
// shifted to the traveling frame x - c t by exact Fourier translation.
struct LinCoeffs {
  RealField phi;
  RealField psi;
  RealField phi_eps_p;  // (phi + eps)^p
  const WaveProfile* profile = nullptr;
  double eps = 0.0;

  LinCoeffs(const WaveProfile& prof, const Grid& grid, double eps_)
      : phi(regrid(prof.phi, grid)), psi(regrid(prof.psi, grid)), phi_eps_p(grid),
        profile(&prof), eps(eps_) {
    rebuild();
  }

  void rebuild() {
    const double p = profile->params.p;
    for (std::size_t j = 0; j < phi.grid.n; ++j)
      phi_eps_p[j] = std::pow(std::max(phi[j], 0.0) + eps, p);
  }

  void shift_to(double displacement, const RealField& phi0, const RealField& psi0) {
    if (displacement == 0.0) return;
    auto shift = [&](const RealField& f) {
      std::vector<complex> c(f.samples.begin(), f.samples.end());
      auto hat = fft(std::move(c));
      auto k = wavenumbers(f.grid.n, f.grid.length());
      for (std::size_t j = 0; j < f.grid.n; ++j) {
        double ang = -k[j] * displacement;
        hat[j] *= complex{std::cos(ang), std::sin(ang)};
      }
      auto back = ifft(std::move(hat));
      RealField out(f.grid);
      for (std::size_t j = 0; j < f.grid.n; ++j) out[j] = back[j].real();
      return out;
    };
    phi = shift(phi0);
    psi = shift(psi0);
    rebuild();
  }
};

struct LinRhs {
  const WaveProfile& profile;
  const ModelParams& params;
  double eps;
  RealField phi0, psi0;  // frame-zero coefficients
  mutable LinCoeffs coeffs;

  LinRhs(const WaveProfile& prof, const ModelParams& par, const Grid& grid, double eps_)
      : profile(prof), params(par), eps(eps_),
        phi0(regrid(prof.phi, grid)), psi0(regrid(prof.psi, grid)),
        coeffs(prof, grid, eps_) {}

  void eval(const ComplexField& u, const RealField& v, double t, ComplexField& du,
            RealField& dv) const {
    const Grid& g = u.grid;
    if (profile.c != 0.0) coeffs.shift_to(profile.c * t, phi0, psi0);
    const double c = profile.c;
    const double w = profile.w;
    const double zcoef = w - 0.5 * c * c;
    // u_t = i u_xx - i [ zcoef u + (a/2)(phi+eps)^p ((p+2) u + p e^{icx} conj(u))
    //                    + e^{i(c/2)x} phi v + psi u ]
    auto uxx = spectral_diff(u.samples, g, 2);
    RealField re_term(g);  // Re(e^{-i(c/2)x} phi u), source of the v equation
    for (std::size_t j = 0; j < g.n; ++j) {
      double x = g.x(j);
      complex eicx{std::cos(c * x), std::sin(c * x)};
      complex eic2x{std::cos(0.5 * c * x), std::sin(0.5 * c * x)};
      complex nl = zcoef * u[j] +
                   0.5 * params.a * coeffs.phi_eps_p[j] *
                       ((params.p + 2.0) * u[j] + params.p * eicx * std::conj(u[j])) +
                   eic2x * coeffs.phi[j] * v[j] + coeffs.psi[j] * u[j];
      du[j] = complex{0.0, 1.0} * (uxx[j] - nl);
      re_term[j] = (std::conj(eic2x) * complex(coeffs.phi[j]) * u[j]).real();
    }
    // v_t = 3 gamma d/dx(psi^2 v) + 2 d/dx Re(e^{-i(c/2)x} phi u)
    RealField psi2v(g);
    for (std::size_t j = 0; j < g.n; ++j) psi2v[j] = coeffs.psi[j] * coeffs.psi[j] * v[j];
    RealField d1 = derivative(psi2v, Scheme::spectral);
    RealField d2 = derivative(re_term, Scheme::spectral);
    for (std::size_t j = 0; j < g.n; ++j)
      dv[j] = 3.0 * params.gamma * d1[j] + 2.0 * d2[j];
  }
};

}  // namespace detail

/// One classical RK4 step of the linearized system with spectral space
/// derivatives; dt is clamped to the dispersive stiffness bound cfl*dx^2/pi.
inline FieldState step_linearized(const FieldState& state, const WaveProfile& profile,
                                  const ModelParams& params, const SimConfig& cfg) {
  if (params.p < 0.0) {
    if (profile.c != 0.0)
      throw std::domain_error("step_linearized: p < 0 requires a standing profile (c = 0)");
    if (!(cfg.epsilon > 0.0))
      throw std::domain_error("step_linearized: p < 0 requires epsilon > 0");
  }
  const Grid& g = state.grid;
  double dt = std::min(cfg.dt, cfg.cfl * g.dx * g.dx / std::numbers::pi);
  detail::LinRhs rhs(profile, params, g, cfg.epsilon);

  auto stage = [&](const ComplexField& u, const RealField& v, double t, ComplexField& du,
                   RealField& dv) { rhs.eval(u, v, t, du, dv); };

  ComplexField k1u(g), k2u(g), k3u(g), k4u(g), tmpu(g);
  RealField k1v(g), k2v(g), k3v(g), k4v(g), tmpv(g);
  stage(state.u, state.v, state.t, k1u, k1v);
  for (std::size_t j = 0; j < g.n; ++j) {
    tmpu[j] = state.u[j] + 0.5 * dt * k1u[j];
    tmpv[j] = state.v[j] + 0.5 * dt * k1v[j];
  }
  stage(tmpu, tmpv, state.t + 0.5 * dt, k2u, k2v);
  for (std::size_t j = 0; j < g.n; ++j) {
    tmpu[j] = state.u[j] + 0.5 * dt * k2u[j];
    tmpv[j] = state.v[j] + 0.5 * dt * k2v[j];
  }
  stage(tmpu, tmpv, state.t + 0.5 * dt, k3u, k3v);
  for (std::size_t j = 0; j < g.n; ++j) {
    tmpu[j] = state.u[j] + dt * k3u[j];
    tmpv[j] = state.v[j] + dt * k3v[j];
  }
  stage(tmpu, tmpv, state.t + dt, k4u, k4v);

  FieldState out(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    out.u[j] = state.u[j] + dt / 6.0 * (k1u[j] + 2.0 * k2u[j] + 2.0 * k3u[j] + k4u[j]);
    out.v[j] = state.v[j] + dt / 6.0 * (k1v[j] + 2.0 * k2v[j] + 2.0 * k3v[j] + k4v[j]);
  }
  out.t = state.t + dt;
  detail::check_finite(out, "linearized RK4");
  return out;
}

/// Band-limited random perturbation (lowest 16 modes), normalized to
/// H1 x L2 size delta; deterministic per seed.
inline FieldState random_perturbation(const Grid& grid, std::uint64_t seed, double delta) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  FieldState s(grid);
  const double len = grid.length();
  const int modes = 16;
  std::vector<double> cu_re(modes), cu_im(modes), su_re(modes), su_im(modes), cv(modes), sv(modes);
  for (int m = 0; m < modes; ++m) {
    cu_re[m] = dist(rng);
    cu_im[m] = dist(rng);
    su_re[m] = dist(rng);
    su_im[m] = dist(rng);
    cv[m] = dist(rng);
    sv[m] = dist(rng);
  }
  for (std::size_t j = 0; j < grid.n; ++j) {
    double x = grid.x(j);
    complex us = 0.0;
    double vs = 0.0;
    for (int m = 1; m <= modes; ++m) {
      double k = 2.0 * std::numbers::pi * m / len;
      double ck = std::cos(k * x), sk = std::sin(k * x);
      us += complex{cu_re[m - 1], cu_im[m - 1]} * ck + complex{su_re[m - 1], su_im[m - 1]} * sk;
      vs += cv[m - 1] * ck + sv[m - 1] * sk;
    }
    s.u[j] = us;
    s.v[j] = vs;
  }
  double e0 = h1_norm_sq(s.u) + l2_norm_sq(s.v);
  double scale = delta / std::sqrt(e0);
  for (auto& z : s.u.samples) z *= scale;
  for (auto& z : s.v.samples) z *= scale;
  return s;
}

inline double lin_energy(const FieldState& s) { return h1_norm_sq(s.u) + l2_norm_sq(s.v); }

/// Integrates the linearized system around the given profile from a seeded
/// random perturbation of size delta, recording E(t) = ||u||_H1^2 + ||v||_2^2.
inline EnergyTrace linstab_run(const WaveProfile& profile, const ModelParams& params,
                               const SimConfig& cfg, std::uint64_t perturbation_seed, double delta) {
  if (!(params.p > -2.0 / 3.0))
    throw std::domain_error("linstab_run: linearized stability window requires p > -2/3");
  if (!(delta > 0.0)) throw std::invalid_argument("linstab_run: delta must be positive");
  FieldState s = random_perturbation(profile.grid, perturbation_seed, delta);
  EnergyTrace trace;
  auto record = [&]() {
    trace.times.push_back(s.t);
    trace.mass.push_back(l2_norm_sq(s.u));
    trace.v_total.push_back(integrate(s.v));
    trace.lin_energy.push_back(lin_energy(s));
  };
  record();
  long step = 0;
  while (s.t < cfg.t_end - 1e-12) {
    SimConfig local = cfg;
    local.dt = std::min(cfg.dt, cfg.t_end - s.t);
    s = step_linearized(s, profile, params, local);
    if (++step % std::max(1, cfg.record_every) == 0) record();
  }
  if (trace.times.empty() || trace.times.back() != s.t) record();
  return trace;
}

inline double growth_factor(const EnergyTrace& trace) {
  double e0 = trace.lin_energy.front();
  double m = 0.0;
  for (double e : trace.lin_energy) m = std::max(m, e);
  return m / e0;
}

/// Least-squares exponential rate of the recorded energy: slope of log E(t).
inline double fitted_rate(const EnergyTrace& trace) {
  std::vector<double> t, le;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    if (trace.lin_energy[i] > 0.0) {
      t.push_back(trace.times[i]);
      le.push_back(std::log(trace.lin_energy[i]));
    }
  }
  return fit_line(t, le).slope;
}

/// Circular cross-correlation lag (in x units) maximizing the overlap of
/// |u| with the reference profile, plus the L-infinity shape error at that lag.
inline std::pair<double, double> shape_match(const ComplexField& u, const RealField& reference) {
  const Grid& g = u.grid;
  std::vector<complex> a(g.n), b(g.n);
  for (std::size_t j = 0; j < g.n; ++j) {
    a[j] = std::abs(u[j]);
    b[j] = reference[j];
  }
  auto fa = fft(std::move(a));
  auto fb = fft(std::move(b));
  for (std::size_t j = 0; j < g.n; ++j) fa[j] *= std::conj(fb[j]);
  auto corr = ifft(std::move(fa));
  std::size_t best = 0;
  for (std::size_t j = 1; j < g.n; ++j)
    if (corr[j].real() > corr[best].real()) best = j;
  // lag in cells: best (shift of reference forward by best cells matches u)
  double err = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    std::size_t js = (j + best) % g.n;
    err = std::max(err, std::abs(std::abs(u[js]) - reference[j]));
  }
  double lag = static_cast<double>(best) * g.dx;
  if (lag > 0.5 * g.length()) lag -= g.length();
  return {lag, err};
}

}  // namespace lwsw
