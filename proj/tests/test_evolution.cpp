#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "lwsw/evolution.hpp"
#include "lwsw/profiles.hpp"

using namespace lwsw;
using std::numbers::pi;

TEST_CASE("FieldState requires a periodic grid", "[evolution]") {
  CHECK_THROWS_AS(FieldState(centered_grid(10.0, 64, false)), std::invalid_argument);
  CHECK_NOTHROW(FieldState(centered_grid(10.0, 64)));
}

TEST_CASE("step_full leaves the zero state at zero", "[evolution]") {
  Grid g = centered_grid(20.0, 128);
  FieldState s(g);
  ModelParams params;
  SimConfig cfg;
  FieldState out = step_full(s, params, cfg);
  CHECK(out.t == Catch::Approx(cfg.dt));
  for (std::size_t j = 0; j < g.n; ++j) {
    CHECK(std::abs(out.u[j]) == 0.0);
    CHECK(out.v[j] == 0.0);
  }
}

TEST_CASE("plane wave with flat potential is advanced exactly", "[evolution]") {
  // v = 0 and |u| constant: the phase substep multiplies by a known constant
  // and dispersion is diagonal, so u(t) = e^{i kappa x} e^{-i (kappa^2 + a) t}
  // (p = 2 makes the potential a |u|^2 = a).
  Grid g = centered_grid(2.0 * pi, 128);
  const double kappa = 5.0 * 2.0 * pi / g.length();
  ModelParams params;
  params.p = 2.0;
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.epsilon = 0.0;
  FieldState s(g);
  for (std::size_t j = 0; j < g.n; ++j)
    s.u[j] = complex{std::cos(kappa * g.x(j)), std::sin(kappa * g.x(j))};
  for (int it = 0; it < 100; ++it) s = step_full(std::move(s), params, cfg);
  double err = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    double phase = kappa * g.x(j) - (kappa * kappa + params.a) * s.t;
    complex exact{std::cos(phase), std::sin(phase)};
    err = std::max(err, std::abs(s.u[j] - exact));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("conservation substep conserves the v total", "[evolution]") {
  Grid g = centered_grid(20.0, 256);
  ModelParams params;
  SimConfig cfg;
  cfg.dt = 1e-3;
  FieldState s(g);
  for (std::size_t j = 0; j < g.n; ++j) s.v[j] = std::exp(-g.x(j) * g.x(j));
  double total0 = integrate(s.v);
  double mass0 = l2_norm_sq(s.u);
  for (int it = 0; it < 50; ++it) s = step_full(std::move(s), params, cfg);
  CHECK(integrate(s.v) == Catch::Approx(total0).margin(50.0 * 1e-12));
  CHECK(l2_norm_sq(s.u) == Catch::Approx(mass0).margin(1e-14));
}

TEST_CASE("cfl clamp shortens the step for fast waves", "[evolution]") {
  Grid g = centered_grid(20.0, 256);
  ModelParams params;
  SimConfig cfg;
  cfg.dt = 1.0;  // far above the hyperbolic limit
  FieldState s(g);
  for (std::size_t j = 0; j < g.n; ++j) s.v[j] = 2.0 * std::exp(-g.x(j) * g.x(j));
  FieldState out = step_full(s, params, cfg);
  double smax = 3.0 * params.gamma * 4.0;
  CHECK(out.t <= cfg.cfl * g.dx / smax * (1.0 + 1e-12));
}

TEST_CASE("simulate_full keeps zero data at zero and records a trace", "[evolution]") {
  Grid g = centered_grid(20.0, 128);
  ModelParams params;
  SimConfig cfg;
  cfg.t_end = 0.05;
  cfg.dt = 1e-3;
  auto [fin, trace] = simulate_full(FieldState(g), params, cfg);
  CHECK(fin.t == Catch::Approx(cfg.t_end));
  CHECK(trace.times.front() == 0.0);
  CHECK(trace.times.back() == Catch::Approx(cfg.t_end));
  for (double m : trace.mass) CHECK(m == 0.0);
  for (double v : trace.v_total) CHECK(v == 0.0);
  for (std::size_t i = 1; i < trace.times.size(); ++i) CHECK(trace.times[i] > trace.times[i - 1]);
}

TEST_CASE("embed modulates the profile onto the evolution grid", "[evolution]") {
  StandingWaveSpec spec;
  spec.params.p = 0.5;
  spec.grid = centered_grid(40.0, 1024);
  auto [wp, rep] = standing_wave(spec);
  Grid sim = centered_grid(160.0, 4096);
  FieldState s = embed(wp, sim);

  // c = 0: u is real and nonnegative
  for (std::size_t j = 0; j < sim.n; ++j) {
    CHECK(s.u[j].imag() == 0.0);
    CHECK(s.u[j].real() >= 0.0);
  }
  // unimodular modulation preserves mass
  CHECK(l2_norm_sq(s.u) == Catch::Approx(l2_norm_sq(wp.phi)).epsilon(1e-12));

  // re-embedding onto a refined grid moves mass only at interpolation level,
  // which shrinks at second order in the source spacing
  Grid fine = centered_grid(160.0, 8192);
  FieldState sf = embed(wp, fine);
  double mass_err = std::abs(l2_norm_sq(sf.u) - l2_norm_sq(s.u)) / l2_norm_sq(s.u);
  CHECK(mass_err < 1e-4);
  StandingWaveSpec spec2 = spec;
  spec2.grid = centered_grid(40.0, 2048);
  WaveProfile wp2 = standing_wave(spec2).first;
  double coarse_mass = l2_norm_sq(embed(wp2, sim).u);
  double fine_mass = l2_norm_sq(embed(wp2, fine).u);
  CHECK(std::abs(fine_mass - coarse_mass) / coarse_mass < 0.3 * mass_err);

  // a wave whose support fills the target grid is rejected
  CHECK_THROWS_AS(embed(wp, centered_grid(40.0, 1024)), std::invalid_argument);

  // traveling modulation carries the half-speed phase
  WaveProfile moving = wp;
  moving.c = 1.0;
  FieldState sm = embed(moving, sim);
  std::size_t jc = sim.n / 2 + 100;
  double ang = 0.5 * moving.c * sim.x(jc);
  CHECK(std::arg(sm.u[jc]) == Catch::Approx(std::remainder(ang, 2.0 * pi)).margin(1e-12));
}

namespace {

WaveProfile small_standing(double p, double gamma = 1.0) {
  StandingWaveSpec spec;
  spec.params.p = p;
  spec.params.gamma = gamma;
  spec.grid = centered_grid(40.0, 512);
  return standing_wave(spec).first;
}

}  // namespace

TEST_CASE("step_linearized is linear and preserves zero", "[evolution]") {
  WaveProfile wp = small_standing(0.5);
  ModelParams params = wp.params;
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.epsilon = 0.0;

  FieldState zero(wp.grid);
  FieldState z1 = step_linearized(zero, wp, params, cfg);
  for (std::size_t j = 0; j < wp.grid.n; ++j) {
    CHECK(std::abs(z1.u[j]) == 0.0);
    CHECK(z1.v[j] == 0.0);
  }

  FieldState s1 = random_perturbation(wp.grid, 11, 1e-2);
  FieldState s2 = random_perturbation(wp.grid, 12, 1e-2);
  FieldState sum(wp.grid);
  const double al = 2.0, be = -0.5;
  for (std::size_t j = 0; j < wp.grid.n; ++j) {
    sum.u[j] = al * s1.u[j] + be * s2.u[j];
    sum.v[j] = al * s1.v[j] + be * s2.v[j];
  }
  FieldState o1 = step_linearized(s1, wp, params, cfg);
  FieldState o2 = step_linearized(s2, wp, params, cfg);
  FieldState os = step_linearized(sum, wp, params, cfg);
  double err = 0.0;
  for (std::size_t j = 0; j < wp.grid.n; ++j) {
    err = std::max(err, std::abs(os.u[j] - (al * o1.u[j] + be * o2.u[j])));
    err = std::max(err, std::abs(os.v[j] - (al * o1.v[j] + be * o2.v[j])));
  }
  CHECK(err < 1e-13);
}

TEST_CASE("step_linearized validates the negative-exponent window", "[evolution]") {
  WaveProfile wp = small_standing(-0.5);
  ModelParams params = wp.params;
  SimConfig cfg;
  cfg.epsilon = 0.0;
  FieldState s = random_perturbation(wp.grid, 1, 1e-2);
  CHECK_THROWS_AS(step_linearized(s, wp, params, cfg), std::domain_error);
  cfg.epsilon = 1e-6;
  CHECK_NOTHROW(step_linearized(s, wp, params, cfg));
  WaveProfile moving = wp;
  moving.c = 0.5;
  CHECK_THROWS_AS(step_linearized(s, moving, params, cfg), std::domain_error);
}

TEST_CASE("linearized flow reduces to free dispersion for zero coefficients", "[evolution]") {
  Grid g = centered_grid(2.0 * pi, 128);
  WaveProfile empty;
  empty.grid = g;
  empty.phi = RealField(g);
  empty.psi = RealField(g);
  empty.c = 0.0;
  empty.w = 0.0;
  empty.params = ModelParams{};
  ModelParams params;
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.epsilon = 0.0;

  const double kappa = 3.0;
  FieldState s(g);
  for (std::size_t j = 0; j < g.n; ++j)
    s.u[j] = complex{std::cos(kappa * g.x(j)), std::sin(kappa * g.x(j))};
  for (int it = 0; it < 20; ++it) s = step_linearized(s, empty, params, cfg);
  double err = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    double phase = kappa * g.x(j) - kappa * kappa * s.t;
    err = std::max(err, std::abs(s.u[j] - complex{std::cos(phase), std::sin(phase)}));
    err = std::max(err, std::abs(s.v[j]));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("random_perturbation is deterministic and delta-normalized", "[evolution]") {
  Grid g = centered_grid(40.0, 512);
  FieldState a = random_perturbation(g, 7, 1e-2);
  FieldState b = random_perturbation(g, 7, 1e-2);
  for (std::size_t j = 0; j < g.n; ++j) {
    CHECK(a.u[j] == b.u[j]);
    CHECK(a.v[j] == b.v[j]);
  }
  CHECK(lin_energy(a) == Catch::Approx(1e-4).epsilon(1e-12));
  FieldState c = random_perturbation(g, 8, 1e-2);
  double diff = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) diff = std::max(diff, std::abs(a.u[j] - c.u[j]));
  CHECK(diff > 0.0);
}

TEST_CASE("linstab_run validation and short-run growth linearity", "[evolution]") {
  WaveProfile wp = small_standing(0.5);
  ModelParams params = wp.params;
  SimConfig cfg;
  cfg.t_end = 0.05;
  cfg.dt = 1e-3;
  cfg.epsilon = 0.0;
  cfg.record_every = 5;

  ModelParams bad = params;
  bad.p = -0.7;
  CHECK_THROWS_AS(linstab_run(wp, bad, cfg, 1, 1e-2), std::domain_error);
  CHECK_THROWS_AS(linstab_run(wp, params, cfg, 1, 0.0), std::invalid_argument);

  EnergyTrace t1 = linstab_run(wp, params, cfg, 3, 1e-1);
  EnergyTrace t2 = linstab_run(wp, params, cfg, 3, 1e-3);
  REQUIRE(t1.lin_energy.size() == t2.lin_energy.size());
  CHECK(growth_factor(t1) == Catch::Approx(growth_factor(t2)).epsilon(1e-10));
  CHECK(growth_factor(t1) >= 1.0);
}

TEST_CASE("growth_factor and fitted_rate on a synthetic trace", "[evolution]") {
  EnergyTrace trace;
  for (int i = 0; i <= 50; ++i) {
    double t = 0.02 * i;
    trace.times.push_back(t);
    trace.lin_energy.push_back(3.0 * std::exp(2.0 * t));
  }
  CHECK(growth_factor(trace) == Catch::Approx(std::exp(2.0)).epsilon(1e-12));
  CHECK(fitted_rate(trace) == Catch::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("shape_match finds a circular shift", "[evolution]") {
  Grid g = centered_grid(40.0, 512);
  RealField ref = sample_real(g, [](double x) { return std::exp(-x * x); });
  const long shift = 37;
  ComplexField u(g);
  for (std::size_t j = 0; j < g.n; ++j) u[(j + shift) % g.n] = ref[j];
  auto [lag, err] = shape_match(u, ref);
  CHECK(lag == Catch::Approx(shift * g.dx).margin(1e-12));
  CHECK(err < 1e-14);
}
