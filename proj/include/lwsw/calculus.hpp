#pragma once

#include <cmath>
#include <stdexcept>

#include "lwsw/fft.hpp"
#include "lwsw/grid.hpp"

namespace lwsw {

enum class Scheme { spectral, centered2 };

namespace detail {

inline std::vector<complex> to_complex(const std::vector<double>& v) {
  std::vector<complex> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j];
  return out;
}

// Applies (ik)^order in Fourier space. For odd orders the Nyquist mode is
// zeroed (its derivative has no consistent sign).
inline std::vector<complex> spectral_diff(const std::vector<complex>& s, const Grid& g, int order) {
  auto hat = fft(s);
  auto k = wavenumbers(g.n, g.length());
  for (std::size_t j = 0; j < g.n; ++j) {
    complex ik{0.0, k[j]};
    complex factor = 1.0;
    for (int m = 0; m < order; ++m) factor *= ik;
    if (order % 2 == 1 && j == g.n / 2) factor = 0.0;
    hat[j] *= factor;
  }
  return ifft(std::move(hat));
}

}  // namespace detail

inline ComplexField derivative(const ComplexField& f, Scheme scheme = Scheme::spectral) {
  const Grid& g = f.grid;
  if (scheme == Scheme::spectral) {
    if (!g.periodic) throw std::invalid_argument("derivative: spectral scheme requires a periodic grid");
    return ComplexField(g, detail::spectral_diff(f.samples, g, 1));
  }
  ComplexField out(g);
  const double inv2dx = 1.0 / (2.0 * g.dx);
  for (std::size_t j = 0; j < g.n; ++j) {
    if (g.periodic) {
      std::size_t jp = (j + 1) % g.n, jm = (j + g.n - 1) % g.n;
      out[j] = (f[jp] - f[jm]) * inv2dx;
    } else if (j == 0) {
      out[j] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2dx;
    } else if (j == g.n - 1) {
      out[j] = (3.0 * f[j] - 4.0 * f[j - 1] + f[j - 2]) * inv2dx;
    } else {
      out[j] = (f[j + 1] - f[j - 1]) * inv2dx;
    }
  }
  return out;
}

inline RealField derivative(const RealField& f, Scheme scheme = Scheme::spectral) {
  ComplexField c(f.grid, detail::to_complex(f.samples));
  ComplexField d = derivative(c, scheme);
  RealField out(f.grid);
  for (std::size_t j = 0; j < f.grid.n; ++j) out[j] = d[j].real();
  return out;
}

inline RealField second_derivative(const RealField& f, Scheme scheme = Scheme::spectral) {
  const Grid& g = f.grid;
  if (scheme == Scheme::spectral) {
    if (!g.periodic) throw std::invalid_argument("second_derivative: spectral scheme requires a periodic grid");
    ComplexField c(g, detail::to_complex(f.samples));
    auto d = detail::spectral_diff(c.samples, g, 2);
    RealField out(g);
    for (std::size_t j = 0; j < g.n; ++j) out[j] = d[j].real();
    return out;
  }
  RealField out(g);
  const double invdx2 = 1.0 / (g.dx * g.dx);
  for (std::size_t j = 0; j < g.n; ++j) {
    std::size_t jp, jm;
    if (g.periodic) {
      jp = (j + 1) % g.n;
      jm = (j + g.n - 1) % g.n;
    } else {
      jp = (j == g.n - 1) ? j : j + 1;
      jm = (j == 0) ? j : j - 1;
    }
    out[j] = (f[jp] - 2.0 * f[j] + f[jm]) * invdx2;
  }
  return out;
}

/// Trapezoid rule; on periodic grids this is the rectangle rule (exact for
/// trigonometric polynomials below the Nyquist frequency).
inline double integrate(const RealField& f) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (double v : f.samples) s += v;
  if (!g.periodic) s -= 0.5 * (f[0] + f[g.n - 1]);
  return s * g.dx;
}

inline double inner(const RealField& a, const RealField& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("inner: mismatched grids");
  RealField prod(a.grid);
  for (std::size_t j = 0; j < a.grid.n; ++j) prod[j] = a[j] * b[j];
  return integrate(prod);
}

inline double l2_norm_sq(const RealField& f) { return inner(f, f); }
inline double l2_norm(const RealField& f) { return std::sqrt(l2_norm_sq(f)); }

inline double l2_norm_sq(const ComplexField& f) {
  RealField abs2(f.grid);
  for (std::size_t j = 0; j < f.grid.n; ++j) abs2[j] = std::norm(f[j]);
  return integrate(abs2);
}

/// Spectral H^1 squared norm: sum (1 + k^2) |u_hat|^2 (Parseval-normalized).
inline double h1_norm_sq(const ComplexField& f) {
  const Grid& g = f.grid;
  if (!g.periodic) throw std::invalid_argument("h1_norm_sq: periodic grid required");
  auto hat = fft(f.samples);
  auto k = wavenumbers(g.n, g.length());
  double s = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) s += (1.0 + k[j] * k[j]) * std::norm(hat[j]);
  return s * g.dx / static_cast<double>(g.n);
}

inline double h1_norm_sq(const RealField& f) {
  return h1_norm_sq(ComplexField(f.grid, detail::to_complex(f.samples)));
}

/// Argument dilation g(x) = f(factor*x). The result lives on the grid scaled
/// by 1/factor, which covers exactly the support of the dilated function;
/// values are linearly interpolated (node images land on nodes, so the map is
/// exact up to roundoff for this grid choice).
inline RealField resample(const RealField& f, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("resample: factor must be finite and positive");
  Grid g(f.grid.x_min / factor, f.grid.dx / factor, f.grid.n, f.grid.periodic);
  RealField out(g);
  for (std::size_t j = 0; j < g.n; ++j) out[j] = interp_linear(f, factor * g.x(j));
  return out;
}

/// Resamples f onto an arbitrary target grid by linear interpolation
/// (zero outside the source window).
inline RealField regrid(const RealField& f, const Grid& target) {
  RealField out(target);
  for (std::size_t j = 0; j < target.n; ++j) out[j] = interp_linear(f, target.x(j));
  return out;
}

}  // namespace lwsw
