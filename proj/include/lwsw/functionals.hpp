#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "lwsw/calculus.hpp"
#include "lwsw/grid.hpp"

namespace lwsw {

/// Physical constants of the coupled system. The cubic flux f(v) = -gamma*v^3
/// is implied everywhere and not stored.
struct ModelParams {
  double a = 1.0;      // short-wave self-interaction strength
  double gamma = 1.0;  // cubic flux coefficient
  double p = 1.0;      // nonlinearity exponent, p > -1
  double w = 1.0;      // temporal frequency of the wave ansatz

  void validate() const {
    if (!(a > 0.0)) throw std::invalid_argument("ModelParams: a must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("ModelParams: gamma must be positive");
    if (!(p > -1.0)) throw std::invalid_argument("ModelParams: p must exceed -1");
    if (!(w > 0.0)) throw std::invalid_argument("ModelParams: w must be positive");
  }
};

/// Constraint sphere data: N_d(u,v) = ||u||_2^2 + ||u'||_2^2 + d ||v||_2^2 = mu.
struct ConstraintSpec {
  double mu = 1.0;
  double alpha = 0.0;
  double d = 1.0;

  ConstraintSpec() = default;
  ConstraintSpec(double mu_, double alpha_) : mu(mu_), alpha(alpha_), d(std::pow(mu_, alpha_)) {
    if (!(mu > 0.0)) throw std::invalid_argument("ConstraintSpec: mu must be positive");
    if (!(d > 0.0)) throw std::invalid_argument("ConstraintSpec: d must be positive");
  }
  static ConstraintSpec with_weight(double mu_, double d_) {
    ConstraintSpec s;
    s.mu = mu_;
    s.alpha = std::log(d_) / std::log(mu_);
    s.d = d_;
    if (!(s.mu > 0.0) || !(s.d > 0.0))
      throw std::invalid_argument("ConstraintSpec: mu and d must be positive");
    return s;
  }
};

/// Trial pair (u, v) on a common grid; minimizers keep u >= 0 and v <= 0.
struct TrialPair {
  RealField u;
  RealField v;

  TrialPair() = default;
  TrialPair(RealField u_, RealField v_) : u(std::move(u_)), v(std::move(v_)) {
    if (!(u.grid == v.grid)) throw std::invalid_argument("TrialPair: fields on different grids");
  }
};

/// x^e for x >= 0 with the limit value 0 at x = 0 (valid for e > 0, which is
/// all this artifact needs: exponents p+1 and p+2 with p > -1).
inline double guarded_pow(double x, double e) {
  if (x <= 0.0) return 0.0;
  return std::exp(e * std::log(x));
}

inline Scheme grad_scheme(const Grid& g) { return g.periodic ? Scheme::spectral : Scheme::centered2; }

/// tau(u,v) = (2a/(p+2)) int |u|^{p+2} + int v u^2 + (gamma/4) int v^4
inline double tau(const TrialPair& pair, const ModelParams& params) {
  const Grid& g = pair.u.grid;
  RealField integrand(g);
  const double c1 = 2.0 * params.a / (params.p + 2.0);
  for (std::size_t j = 0; j < g.n; ++j) {
    double u = pair.u[j], v = pair.v[j];
    integrand[j] = c1 * guarded_pow(std::abs(u), params.p + 2.0) + v * u * u +
                   0.25 * params.gamma * v * v * v * v;
  }
  return integrate(integrand);
}

/// N_d(u,v) = ||u||_2^2 + ||u'||_2^2 + d ||v||_2^2, derivative scheme matching
/// the minimizer's gradient so the discrete Euler-Lagrange system is consistent.
inline double constraint_norm(const TrialPair& pair, const ConstraintSpec& spec) {
  RealField du = derivative(pair.u, grad_scheme(pair.u.grid));
  return l2_norm_sq(pair.u) + l2_norm_sq(du) + spec.d * l2_norm_sq(pair.v);
}

/// Multiplier identity at critical points (EL equations times u and v,
/// integrated): 2*lambda*mu = 3 int u^2 v + 2a int u^{p+2} + gamma int v^4.
inline double lagrange_multiplier(const TrialPair& pair, const ModelParams& params,
                                  const ConstraintSpec& spec) {
  const Grid& g = pair.u.grid;
  RealField integrand(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    double u = pair.u[j], v = pair.v[j];
    integrand[j] = 3.0 * u * u * v + 2.0 * params.a * guarded_pow(std::abs(u), params.p + 2.0) +
                   params.gamma * v * v * v * v;
  }
  return integrate(integrand) / (2.0 * spec.mu);
}

/// L2 gradient of tau: (2a|u|^p u + 2uv, u^2 + gamma v^3).
inline TrialPair grad_tau(const TrialPair& pair, const ModelParams& params) {
  const Grid& g = pair.u.grid;
  RealField gu(g), gv(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    double u = pair.u[j], v = pair.v[j];
    double sgn = (u < 0.0) ? -1.0 : 1.0;
    gu[j] = 2.0 * params.a * sgn * guarded_pow(std::abs(u), params.p + 1.0) + 2.0 * u * v;
    gv[j] = u * u + params.gamma * v * v * v;
  }
  return TrialPair(std::move(gu), std::move(gv));
}

/// L2 gradient of N_d: (2u - 2u'', 2dv).
inline TrialPair grad_constraint(const TrialPair& pair, const ConstraintSpec& spec) {
  const Grid& g = pair.u.grid;
  RealField uxx = second_derivative(pair.u, grad_scheme(g));
  RealField gu(g), gv(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    gu[j] = 2.0 * (pair.u[j] - uxx[j]);
    gv[j] = 2.0 * spec.d * pair.v[j];
  }
  return TrialPair(std::move(gu), std::move(gv));
}

inline double pair_inner(const TrialPair& a, const TrialPair& b) {
  return inner(a.u, b.u) + inner(a.v, b.v);
}

/// Rayleigh-quotient multiplier estimate <grad tau, grad N> / <grad N, grad N>;
/// cross-check for lagrange_multiplier on converged minimizers.
inline double rayleigh_multiplier(const TrialPair& pair, const ModelParams& params,
                                  const ConstraintSpec& spec) {
  TrialPair gt = grad_tau(pair, params);
  TrialPair gn = grad_constraint(pair, spec);
  return pair_inner(gt, gn) / pair_inner(gn, gn);
}

/// Normalized L2 residuals of the Euler-Lagrange system
///   R1 = lambda u'' - lambda u + uv + a u^{p+1}
///   R2 = -2 d lambda v + u^2 + gamma v^3
/// each divided by the L2 norm of its left-hand side plus 1e-30.
inline std::pair<double, double> el_residual(const TrialPair& pair, double lambda,
                                             const ModelParams& params, const ConstraintSpec& spec) {
  const Grid& g = pair.u.grid;
  RealField uxx = second_derivative(pair.u, grad_scheme(g));
  RealField r1(g), lhs1(g), r2(g), lhs2(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    double u = pair.u[j], v = pair.v[j];
    double sgn = (u < 0.0) ? -1.0 : 1.0;
    lhs1[j] = lambda * uxx[j] - lambda * u;
    r1[j] = lhs1[j] + u * v + params.a * sgn * guarded_pow(std::abs(u), params.p + 1.0);
    lhs2[j] = -2.0 * spec.d * lambda * v;
    r2[j] = lhs2[j] + u * u + params.gamma * v * v * v;
  }
  double n1 = l2_norm(lhs1) + 1e-30;
  double n2 = l2_norm(lhs2) + 1e-30;
  return {l2_norm(r1) / n1, l2_norm(r2) / n2};
}

/// Gagliardo-Nirenberg quotient ||Q||_4^4 / (||Q'||_2 ||Q||_2^3) for the
/// ground state Q = sqrt(2) sech sampled on the given grid. The sharp
/// constant is 1/sqrt(3).
inline double gn_constant_check(const Grid& grid) {
  RealField q = sample_real(grid, [](double x) { return std::sqrt(2.0) / std::cosh(x); });
  RealField q4(grid);
  for (std::size_t j = 0; j < grid.n; ++j) q4[j] = q[j] * q[j] * q[j] * q[j];
  RealField dq = derivative(q, grad_scheme(grid));
  double l4_4 = integrate(q4);
  double l2 = l2_norm(q);
  double dl2 = l2_norm(dq);
  return l4_4 / (dl2 * l2 * l2 * l2);
}

inline double gn_constant_check() { return gn_constant_check(centered_grid(40.0, 4096)); }

}  // namespace lwsw
