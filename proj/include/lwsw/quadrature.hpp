#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace lwsw {

namespace detail {

// Gauss-Kronrod 7-15 node/weight table (abscissa, Gauss weight, Kronrod weight).
inline constexpr double gk15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

template <class F>
double gk15_panel(const F& f, double a, double b, double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double y0 = f(mid);
  double g7 = gk15[0][1] * y0;
  double k15 = gk15[0][2] * y0;
  for (int i = 1; i < 8; ++i) {
    double dx = half * gk15[i][0];
    double yi = f(mid + dx) + f(mid - dx);
    g7 += gk15[i][1] * yi;
    k15 += gk15[i][2] * yi;
  }
  g7 *= half;
  k15 *= half;
  err = std::abs(k15 - g7);
  return k15;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature on [a, b]. The integrand must be finite
/// on the closed interval; singular endpoints need a substitution first.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double rel_tol = 1e-12,
                          double abs_tol = 1e-300, int max_panels = 4000) {
  struct Panel {
    double a, b, value, err;
  };
  std::vector<Panel> panels;
  double err0;
  double v0 = detail::gk15_panel(f, a, b, err0);
  panels.push_back({a, b, v0, err0});
  double total = v0, total_err = err0;
  int splits = 0;
  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && splits < max_panels) {
    // split the worst panel
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].err > panels[worst].err) worst = i;
    Panel p = panels[worst];
    double m = 0.5 * (p.a + p.b);
    if (m == p.a || m == p.b) break;  // interval exhausted
    double e1, e2;
    double v1 = detail::gk15_panel(f, p.a, m, e1);
    double v2 = detail::gk15_panel(f, m, p.b, e2);
    panels[worst] = {p.a, m, v1, e1};
    panels.push_back({m, p.b, v2, e2});
    total = 0.0;
    total_err = 0.0;
    for (const auto& q : panels) {
      total += q.value;
      total_err += q.err;
    }
    ++splits;
  }
  return total;
}

/// Brent-style root bracketing refinement: f(lo) and f(hi) must have opposite
/// signs; returns the root to rel_tol relative accuracy.
template <class F>
double find_root(const F& f, double lo, double hi, double rel_tol = 1e-14, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::invalid_argument("find_root: endpoints do not bracket a root");
  double a = lo, b = hi, fa = flo, fb = fhi;
  double c = a, fc = fa;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol = rel_tol * std::max(1.0, std::abs(b));
    double mid = 0.5 * (c - b);
    if (std::abs(mid) <= tol || fb == 0.0) return b;
    // secant step, fall back to bisection when it leaves the bracket
    double s = b - fb * (b - a) / (fb - fa);
    if (!std::isfinite(s) || (s - b) * (s - c) >= 0.0) s = b + mid;
    a = b;
    fa = fb;
    b = s;
    fb = f(b);
  }
  return b;
}

}  // namespace lwsw
