#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lwsw/calculus.hpp"
#include "lwsw/functionals.hpp"
#include "lwsw/quadrature.hpp"
#include "lwsw/variational.hpp"

namespace lwsw {

/// Parameter window of the standing-wave construction: -1 < p <= 2/3, with
/// gamma^{-1/3} > a required at p = 2/3.
inline void validate_standing_window(const ModelParams& params) {
  params.validate();
  if (!(params.p <= 2.0 / 3.0))
    throw std::domain_error("standing waves require -1 < p <= 2/3");
  if (params.p == 2.0 / 3.0 && !(std::pow(params.gamma, -1.0 / 3.0) > params.a))
    throw std::domain_error("standing waves at p = 2/3 require gamma^{-1/3} > a");
}

struct StandingWaveSpec {
  ModelParams params;
  Grid grid = centered_grid(80.0, 4096);
  double tail_floor = 1e-10;  // relative to phi0; infinite-support tail cut

  void validate() const {
    validate_standing_window(params);
    if (!(tail_floor > 0.0)) throw std::invalid_argument("tail_floor must be positive");
  }
};

struct QuadratureReport {
  double phi0 = 0.0;
  double x0 = std::numeric_limits<double>::infinity();  // finite iff p < 0
  double first_integral_residual = 0.0;
  std::optional<double> decay_rate;
};

/// First integral of the standing-wave equation:
/// h(phi) = (2a/(p+2)) phi^{p+2} + w phi^2 - (3/4) gamma^{-1/3} phi^{8/3}.
inline double h_of_phi(double phi, const ModelParams& params) {
  if (phi < 0.0) throw std::invalid_argument("h_of_phi: phi must be non-negative");
  return (2.0 * params.a / (params.p + 2.0)) * guarded_pow(phi, params.p + 2.0) +
         params.w * phi * phi -
         0.75 * std::pow(params.gamma, -1.0 / 3.0) * guarded_pow(phi, 8.0 / 3.0);
}

/// g(phi) = -a phi^{p+1} - w phi + gamma^{-1/3} phi^{5/3}, with F' = g and h = -2F.
inline double g_of_phi(double phi, const ModelParams& params) {
  return -params.a * guarded_pow(phi, params.p + 1.0) - params.w * phi +
         std::pow(params.gamma, -1.0 / 3.0) * guarded_pow(phi, 5.0 / 3.0);
}

inline double big_f_of_phi(double phi, const ModelParams& params) {
  return -(params.a / (params.p + 2.0)) * guarded_pow(phi, params.p + 2.0) -
         0.5 * params.w * phi * phi +
         0.375 * std::pow(params.gamma, -1.0 / 3.0) * guarded_pow(phi, 8.0 / 3.0);
}

/// Smallest positive root of h with h > 0 on (0, phi0).
inline double find_phi0(const ModelParams& params, double upper_bracket = 1e12) {
  validate_standing_window(params);
  // h > 0 near 0 inside the parameter window; scan geometrically for the
  // first sign change.
  double lo = 1e-12;
  while (h_of_phi(lo, params) <= 0.0 && lo < 1.0) lo *= 4.0;
  double hi = lo;
  bool bracketed = false;
  while (hi < upper_bracket) {
    double next = hi * 1.25;
    if (h_of_phi(next, params) < 0.0) {
      lo = hi;
      hi = next;
      bracketed = true;
      break;
    }
    hi = next;
  }
  if (!bracketed) throw std::domain_error("find_phi0: no admissible phi0; check parameter window");
  double phi0 = find_root([&](double x) { return h_of_phi(x, params); }, lo, hi, 1e-13);
  // consistency with the F-root formulation for the smooth-window case
  if (params.p >= 0.0) {
    if (std::abs(big_f_of_phi(phi0, params)) > 1e-9 * std::max(1.0, params.w * phi0 * phi0))
      throw std::domain_error("find_phi0: F(phi0) inconsistent with h-root");
    if (!(g_of_phi(phi0, params) > 0.0))
      throw std::domain_error("find_phi0: g(phi0) not positive; phi0 is not a simple zero of F");
  }
  // minimality: h positive on the interior
  for (int i = 1; i < 512; ++i) {
    double phi = phi0 * static_cast<double>(i) / 512.0;
    if (h_of_phi(phi, params) <= 0.0)
      throw std::domain_error("find_phi0: h not positive below the located root");
  }
  return phi0;
}

namespace detail {

inline double sqrt_h_guarded(double phi, const ModelParams& params) {
  return std::sqrt(std::max(h_of_phi(phi, params), 1e-300));
}

inline double h_slope(double phi, const ModelParams& params) {
  return 2.0 * params.a * guarded_pow(phi, params.p + 1.0) + 2.0 * params.w * phi -
         2.0 * std::pow(params.gamma, -1.0 / 3.0) * guarded_pow(phi, 5.0 / 3.0);
}

// Upper-end piece of int_{phi_a}^{phi0} h^{-1/2} dphi via phi = phi0 - s^2
// (simple root at phi0 makes the transformed integrand bounded). Very close
// to the root the direct evaluation of h cancels catastrophically (terms are
// O(w phi0^2), the value is O(|h'| s^2)), so h is floored by a fraction of
// its linearized value there.
inline double quad_upper_piece(const ModelParams& params, double phi0, double phi_a) {
  double s_max = std::sqrt(phi0 - phi_a);
  const double hp = std::max(0.0, -h_slope(phi0, params));
  return integrate_adaptive(
      [&](double s) {
        double floor = 1e-2 * hp * s * s;
        double h = std::max(h_of_phi(phi0 - s * s, params), std::max(floor, 1e-300));
        return 2.0 * s / std::sqrt(h);
      },
      0.0, s_max, 1e-12);
}

// Lower-end piece of int_0^{phi_b} h^{-1/2} dphi for p < 0 via phi = s^m with
// m = -2/p, which makes the integrand bounded at 0.
inline double quad_lower_piece_compact(const ModelParams& params, double phi_b) {
  const double m = -2.0 / params.p;
  double s_max = std::pow(phi_b, 1.0 / m);
  return integrate_adaptive(
      [&](double s) {
        if (s <= 0.0) {
          // limit value: h ~ (2a/(p+2)) phi^{p+2}
          return m * std::sqrt((params.p + 2.0) / (2.0 * params.a));
        }
        double phi = std::pow(s, m);
        return m * std::pow(s, m - 1.0) / sqrt_h_guarded(phi, params);
      },
      0.0, s_max, 1e-12);
}

}  // namespace detail

/// Support radius x0 = int_0^{phi0} h(phi)^{-1/2} dphi; finite iff p < 0
/// within the admissible window (returns +infinity for 0 <= p <= 2/3).
inline double support_radius(const ModelParams& params) {
  validate_standing_window(params);
  if (params.p >= 0.0) return std::numeric_limits<double>::infinity();
  double phi0 = find_phi0(params);
  double mid = 0.5 * phi0;
  return detail::quad_lower_piece_compact(params, mid) + detail::quad_upper_piece(params, phi0, mid);
}

/// Unique real root of gamma psi^3 + c psi + phi^2 = 0 (strictly increasing
/// map, root <= 0). Safeguarded Newton.
inline double psi_from_phi(double phi, double c, double gamma) {
  if (phi < 0.0) throw std::invalid_argument("psi_from_phi: phi must be non-negative");
  const double phi2 = phi * phi;
  if (phi2 == 0.0) return 0.0;
  if (!(c > 0.0)) return -std::cbrt(phi2 / gamma);
  double lo = -std::cbrt(phi2 / gamma);  // q(lo) = c*lo <= 0
  double hi = 0.0;                       // q(0) = phi^2 >= 0
  double psi = 0.5 * (lo + hi);
  const double tol = 1e-13 * std::max(1.0, phi2);
  for (int it = 0; it < 200; ++it) {
    double q = gamma * psi * psi * psi + c * psi + phi2;
    if (std::abs(q) < tol) break;
    if (q > 0.0) hi = psi; else lo = psi;
    double dq = 3.0 * gamma * psi * psi + c;
    double next = psi - q / dq;
    psi = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  return psi;
}

namespace detail {

// Cumulative inversion of dx/dphi = -h^{-1/2} from phi0 at x = 0 downward,
// marching a regularizing parameter s and accumulating GK15 panels.
// Upper region: phi = phi0 - s^2; lower region: phi = s^m (m chosen so the
// integrand is bounded at both singular endpoints).
struct OrbitTable {
  std::vector<double> x;    // increasing
  std::vector<double> phi;  // decreasing, phi.front() = phi0
};

inline OrbitTable build_orbit_table(const ModelParams& params, double phi0, double phi_min) {
  OrbitTable tab;
  const double phi_mid = 0.5 * phi0;
  const double hp = std::max(0.0, -h_slope(phi0, params));
  auto f_upper = [&](double s) {
    // same cancellation floor as quad_upper_piece near the simple root
    double floor = 1e-2 * hp * s * s;
    double h = std::max(h_of_phi(phi0 - s * s, params), std::max(floor, 1e-300));
    return 2.0 * s / std::sqrt(h);
  };
  const int n_upper = 4000;
  double s_max = std::sqrt(phi0 - phi_mid);
  tab.x.push_back(0.0);
  tab.phi.push_back(phi0);
  double x = 0.0;
  for (int i = 1; i <= n_upper; ++i) {
    double s0 = s_max * static_cast<double>(i - 1) / n_upper;
    double s1 = s_max * static_cast<double>(i) / n_upper;
    double err;
    x += gk15_panel(f_upper, s0, s1, err);
    tab.x.push_back(x);
    tab.phi.push_back(phi0 - s1 * s1);
  }
  // lower region phi in (phi_min, phi_mid]
  const int n_lower = 8000;
  if (params.p < 0.0) {
    // phi = s^m renders the integrand bounded at the support edge
    const double m = std::max(2.0, -2.0 / params.p);
    auto f_lower = [&](double s) {
      double phi = std::pow(s, m);
      double jac = m * std::pow(s, m - 1.0);
      return jac / sqrt_h_guarded(phi, params);
    };
    double s_hi = std::pow(phi_mid, 1.0 / m);
    double s_lo = (phi_min <= 0.0) ? 0.0 : std::pow(phi_min, 1.0 / m);
    for (int i = 1; i <= n_lower; ++i) {
      double s1 = s_hi - (s_hi - s_lo) * static_cast<double>(i - 1) / n_lower;
      double s0 = s_hi - (s_hi - s_lo) * static_cast<double>(i) / n_lower;
      double err;
      x += gk15_panel(f_lower, s0, s1, err);
      tab.x.push_back(x);
      tab.phi.push_back(std::pow(s0, m));
    }
  } else {
    // phi = phi_mid e^{-s}: geometric spacing resolves the exponential tail
    auto f_lower = [&](double s) {
      double phi = phi_mid * std::exp(-s);
      return phi / sqrt_h_guarded(phi, params);
    };
    double s_end = std::log(phi_mid / phi_min);
    for (int i = 1; i <= n_lower; ++i) {
      double s0 = s_end * static_cast<double>(i - 1) / n_lower;
      double s1 = s_end * static_cast<double>(i) / n_lower;
      double err;
      x += gk15_panel(f_lower, s0, s1, err);
      tab.x.push_back(x);
      tab.phi.push_back(phi_mid * std::exp(-s1));
    }
  }
  return tab;
}

// phi at a given x > 0 from the table, by cubic Hermite interpolation with
// the exact orbit slope dphi/dx = -sqrt(h(phi)) at the table nodes.
inline double phi_at(const OrbitTable& tab, double x, const ModelParams& params) {
  if (x <= 0.0) return tab.phi.front();
  if (x >= tab.x.back()) return tab.phi.back();
  auto it = std::upper_bound(tab.x.begin(), tab.x.end(), x);
  std::size_t i = static_cast<std::size_t>(it - tab.x.begin());
  double x0 = tab.x[i - 1], x1 = tab.x[i];
  double p0 = tab.phi[i - 1], p1 = tab.phi[i];
  double hgap = x1 - x0;
  double m0 = -std::sqrt(std::max(h_of_phi(p0, params), 0.0));
  double m1 = -std::sqrt(std::max(h_of_phi(p1, params), 0.0));
  double t = (x - x0) / hgap;
  double t2 = t * t, t3 = t2 * t;
  double val = (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * hgap * m0 +
               (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * hgap * m1;
  return std::max(val, 0.0);
}

}  // namespace detail

/// Constructs the standing wave (c = 0) by quadrature of the first integral:
/// phi even with peak phi0 at x = 0, psi = -(phi^2/gamma)^{1/3}. For p < 0 the
/// profile vanishes beyond x0; for p >= 0 the tail below tail_floor * phi0 is
/// continued with the linearized decay exp(-sqrt(w)|x|).
inline std::pair<WaveProfile, QuadratureReport> standing_wave(const StandingWaveSpec& spec) {
  spec.validate();
  const ModelParams& params = spec.params;
  const Grid& grid = spec.grid;
  const double phi0 = find_phi0(params);
  const bool compact = params.p < 0.0;
  const double phi_floor = compact ? 0.0 : spec.tail_floor * phi0;

  detail::OrbitTable tab = detail::build_orbit_table(params, phi0, phi_floor);
  const double x_edge = tab.x.back();  // = x0 for compact support, graft point otherwise

  RealField phi(grid), psi(grid);
  double graft_rate = std::sqrt(params.w);
  for (std::size_t j = 0; j < grid.n; ++j) {
    double ax = std::abs(grid.x(j));
    double val;
    if (ax <= x_edge) {
      val = detail::phi_at(tab, ax, params);
    } else if (compact) {
      val = 0.0;
    } else {
      val = tab.phi.back() * std::exp(-graft_rate * (ax - x_edge));
    }
    phi[j] = val;
    psi[j] = -std::cbrt(val * val / params.gamma);
  }

  WaveProfile wp;
  wp.grid = grid;
  wp.phi = phi;
  wp.psi = psi;
  wp.c = 0.0;
  wp.cstar = params.w;
  wp.w = params.w;
  wp.params = params;

  QuadratureReport rep;
  rep.phi0 = phi0;
  rep.x0 = compact ? x_edge : std::numeric_limits<double>::infinity();

  // sampled first-integral residual max|phi'^2 - h(phi)| away from the
  // support-edge collar (the profile loses smoothness there for p < 0)
  RealField dphi = derivative(phi, grad_scheme(grid));
  double res = 0.0;
  for (std::size_t j = 0; j < grid.n; ++j) {
    double ax = std::abs(grid.x(j));
    if (compact && std::abs(ax - x_edge) <= 2.0 * grid.dx) continue;
    double r = std::abs(dphi[j] * dphi[j] - h_of_phi(phi[j], params));
    res = std::max(res, r);
  }
  rep.first_integral_residual = res;

  if (!compact) {
    // fitted decay rate over the grafted tail (positive side)
    std::vector<double> xs, ls;
    for (std::size_t j = 0; j < grid.n; ++j) {
      double x = grid.x(j);
      if (x > x_edge + 0.5 && x < grid.x_max() - 1.0 && phi[j] > 1e-280) {
        xs.push_back(x);
        ls.push_back(std::log(phi[j]));
      }
    }
    if (xs.size() >= 2) rep.decay_rate = -fit_line(xs, ls).slope;
  }
  return {wp, rep};
}

namespace detail {

struct ShootRhs {
  const ModelParams& params;
  double c;
  double cstar;
  double operator()(double phi, double /*dphi*/) const {
    double phi_pos = std::max(phi, 0.0);
    double psi = psi_from_phi(phi_pos, c, params.gamma);
    return cstar * phi + phi * psi + params.a * guarded_pow(phi_pos, params.p + 1.0);
  }
};

enum class ShotKind { undershoot, overshoot };

// Integrates from (A, 0) at x = 0; classifies the trajectory against the
// homoclinic separatrix.
inline ShotKind classify_shot(const ShootRhs& rhs, double amplitude, double x_max, double dx) {
  double phi = amplitude, dphi = 0.0;
  double x = 0.0;
  while (x < x_max) {
    double h = dx;
    auto acc = [&](double f, double df) { return rhs(f, df); };
    double k1f = dphi, k1g = acc(phi, dphi);
    double k2f = dphi + 0.5 * h * k1g, k2g = acc(phi + 0.5 * h * k1f, k2f);
    double k3f = dphi + 0.5 * h * k2g, k3g = acc(phi + 0.5 * h * k2f, k3f);
    double k4f = dphi + h * k3g, k4g = acc(phi + h * k3f, k4f);
    phi += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    dphi += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    x += h;
    if (phi <= 0.0) return ShotKind::overshoot;
    if (dphi > 1e-14 * amplitude && x > dx) return ShotKind::undershoot;
  }
  // no event: decide by position relative to the stable manifold
  return (dphi + std::sqrt(rhs.cstar) * phi > 0.0) ? ShotKind::undershoot : ShotKind::overshoot;
}

}  // namespace detail

/// Independent construction of traveling (or standing) profiles by shooting
/// on the peak amplitude of the reduced scalar equation
/// phi'' = c* phi + phi psi(phi) + a phi^{p+1}.
inline WaveProfile shoot_traveling(const ModelParams& params, double c, double cstar,
                                   const Grid& grid, double bracket_hi = 0.0) {
  params.validate();
  if (!(cstar > 0.0)) throw std::domain_error("shoot_traveling: cstar must be positive");
  if (c > 0.0 && params.p < 0.0)
    throw std::domain_error("shoot_traveling: c > 0 requires p >= 0");

  const double x_max = grid.x_max() - 2.0 * grid.dx;
  const int substeps = 8;
  const double dx_fine = grid.dx / substeps;
  detail::ShootRhs rhs{params, c, cstar};

  // bracket the homoclinic amplitude
  double lo = 1e-8;
  while (detail::classify_shot(rhs, lo, x_max, dx_fine) == detail::ShotKind::overshoot && lo > 1e-300)
    lo *= 0.25;
  double hi = (bracket_hi > 0.0) ? bracket_hi : 1.0;
  int guard = 0;
  while (detail::classify_shot(rhs, hi, x_max, dx_fine) == detail::ShotKind::undershoot) {
    hi *= 2.0;
    if (++guard > 60)
      throw std::domain_error("shoot_traveling: no homoclinic profile found for (c, c*) on bracket");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (detail::classify_shot(rhs, mid, x_max, dx_fine) == detail::ShotKind::undershoot)
      lo = mid;
    else
      hi = mid;
  }
  const double amp = 0.5 * (lo + hi);

  // final pass: record phi at grid nodes, graft an exponential tail once the
  // profile drops below the tracking floor (the separatrix cannot be tracked
  // to machine zero)
  const double floor = 1e-8 * amp;
  std::vector<double> half(grid.n / 2 + 1, 0.0);
  half[0] = amp;
  double phi = amp, dphi = 0.0;
  std::size_t node = 0;
  bool grafted = false;
  double graft_x = 0.0, graft_val = 0.0, graft_rate = std::sqrt(cstar);
  for (std::size_t jn = 1; jn < half.size() && !grafted; ++jn) {
    for (int s = 0; s < substeps; ++s) {
      double h = dx_fine;
      double k1f = dphi, k1g = rhs(phi, dphi);
      double k2f = dphi + 0.5 * h * k1g, k2g = rhs(phi + 0.5 * h * k1f, k2f);
      double k3f = dphi + 0.5 * h * k2g, k3g = rhs(phi + 0.5 * h * k2f, k3f);
      double k4f = dphi + h * k3g, k4g = rhs(phi + h * k3f, k4f);
      phi += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
      dphi += h / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
    }
    if (phi < floor || dphi > 0.0) {
      grafted = true;
      graft_x = static_cast<double>(jn) * grid.dx;
      graft_val = std::max(phi, 0.0);
      if (phi > 0.0 && dphi < 0.0) graft_rate = -dphi / phi;
      half[jn] = graft_val;
      node = jn;
      break;
    }
    half[jn] = phi;
    node = jn;
  }
  if (grafted) {
    for (std::size_t jn = node + 1; jn < half.size(); ++jn)
      half[jn] = graft_val * std::exp(-graft_rate * (static_cast<double>(jn) * grid.dx - graft_x));
  }

  RealField phif(grid), psif(grid);
  // grid is centered: node n/2 sits at x = 0
  const std::size_t jc = grid.n / 2;
  for (std::size_t j = 0; j < grid.n; ++j) {
    std::size_t dist = (j >= jc) ? j - jc : jc - j;
    double val = (dist < half.size()) ? half[dist] : 0.0;
    phif[j] = val;
    psif[j] = psi_from_phi(val, c, params.gamma);
  }

  WaveProfile wp;
  wp.grid = grid;
  wp.phi = std::move(phif);
  wp.psi = std::move(psif);
  wp.c = c;
  wp.cstar = cstar;
  wp.w = cstar + c * c / 4.0;
  wp.params = params;
  return wp;
}

/// Normalized L2 residuals of: the first stationary equation, the algebraic
/// second equation, and the differentiated identity psi'(c + 3 gamma psi^2)
/// + 2 phi phi'. For compactly supported profiles a 2-cell collar around the
/// support edge is excluded.
inline std::array<double, 3> check_profile(const WaveProfile& profile) {
  const Grid& g = profile.grid;
  const ModelParams& params = profile.params;
  Scheme sch = grad_scheme(g);
  RealField phixx = second_derivative(profile.phi, sch);
  RealField phix = derivative(profile.phi, sch);
  RealField psix = derivative(profile.psi, sch);

  // collar mask at support-edge transitions for compactly supported profiles
  std::vector<bool> keep(g.n, true);
  if (params.p < 0.0) {
    for (std::size_t j = 0; j + 1 < g.n; ++j) {
      bool z0 = profile.phi[j] == 0.0, z1 = profile.phi[j + 1] == 0.0;
      if (z0 != z1) {
        for (long k = static_cast<long>(j) - 2; k <= static_cast<long>(j) + 3; ++k)
          if (k >= 0 && k < static_cast<long>(g.n)) keep[static_cast<std::size_t>(k)] = false;
      }
    }
  }

  double r1 = 0.0, n1 = 0.0, r2 = 0.0, n2 = 0.0, r3 = 0.0, n3 = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    if (!keep[j]) continue;
    double phi = profile.phi[j], psi = profile.psi[j];
    double lhs1 = -phixx[j] + profile.cstar * phi;
    double res1 = lhs1 + phi * psi + params.a * guarded_pow(std::max(phi, 0.0), params.p + 1.0);
    r1 += res1 * res1;
    n1 += lhs1 * lhs1;
    double t_c = profile.c * psi, t_phi = phi * phi, t_psi = params.gamma * psi * psi * psi;
    double res2 = t_c + t_phi + t_psi;
    r2 += res2 * res2;
    n2 += std::max({t_c * t_c, t_phi * t_phi, t_psi * t_psi});
    double lhs3 = 2.0 * phi * phix[j];
    double res3 = psix[j] * (profile.c + 3.0 * params.gamma * psi * psi) + lhs3;
    r3 += res3 * res3;
    n3 += lhs3 * lhs3;
  }
  auto norm = [&](double r, double n) { return std::sqrt(r * g.dx) / (std::sqrt(n * g.dx) + 1e-30); };
  return {norm(r1, n1), norm(r2, n2), norm(r3, n3)};
}

}  // namespace lwsw
