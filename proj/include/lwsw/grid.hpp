#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lwsw {

using complex = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Uniform 1-D grid. Periodic grids have domain length L = n*dx and nodes
/// x_min + j*dx, j = 0..n-1 (the node at x_min + L is identified with x_min).
/// Non-periodic grids span [x_min, x_min + (n-1)*dx].
struct Grid {
  double x_min = 0.0;
  double dx = 1.0;
  std::size_t n = 8;
  bool periodic = true;

  Grid() = default;
  Grid(double x_min_, double dx_, std::size_t n_, bool periodic_)
      : x_min(x_min_), dx(dx_), n(n_), periodic(periodic_) {
    if (!(dx > 0.0)) throw std::invalid_argument("Grid: dx must be positive");
    if (n < 8) throw std::invalid_argument("Grid: n must be at least 8");
    if (periodic && !is_power_of_two(n))
      throw std::invalid_argument("Grid: periodic grid requires power-of-two n");
  }

  double x(std::size_t j) const { return x_min + static_cast<double>(j) * dx; }
  double length() const { return periodic ? dx * static_cast<double>(n) : dx * static_cast<double>(n - 1); }
  double x_max() const { return x_min + dx * static_cast<double>(n - 1); }

  bool operator==(const Grid& o) const {
    return x_min == o.x_min && dx == o.dx && n == o.n && periodic == o.periodic;
  }
};

/// Centered periodic grid on [-L/2, L/2) with n nodes.
inline Grid centered_grid(double length, std::size_t n, bool periodic = true) {
  return Grid(-length / 2.0, length / static_cast<double>(periodic ? n : n - 1), n, periodic);
}

template <typename T>
struct Field {
  Grid grid;
  std::vector<T> samples;

  Field() = default;
  explicit Field(const Grid& g, T fill = T{}) : grid(g), samples(g.n, fill) {}
  Field(const Grid& g, std::vector<T> s) : grid(g), samples(std::move(s)) {
    if (samples.size() != grid.n)
      throw std::invalid_argument("Field: sample count does not match grid");
  }

  std::size_t size() const { return samples.size(); }
  T& operator[](std::size_t j) { return samples[j]; }
  const T& operator[](std::size_t j) const { return samples[j]; }
};

using RealField = Field<double>;
using ComplexField = Field<complex>;

template <typename F>
RealField sample_real(const Grid& g, F&& f) {
  RealField out(g);
  for (std::size_t j = 0; j < g.n; ++j) out[j] = f(g.x(j));
  return out;
}

template <typename F>
ComplexField sample_complex(const Grid& g, F&& f) {
  ComplexField out(g);
  for (std::size_t j = 0; j < g.n; ++j) out[j] = f(g.x(j));
  return out;
}

inline bool all_finite(const RealField& f) {
  for (double v : f.samples)
    if (!std::isfinite(v)) return false;
  return true;
}

inline bool all_finite(const ComplexField& f) {
  for (const complex& v : f.samples)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

/// Linear interpolation of f at an arbitrary position. Outside the grid the
/// value is 0 (fields of interest vanish at infinity). Periodic grids do not
/// wrap here: resample/dilation semantics treat the stored window as the
/// support of the function.
inline double interp_linear(const RealField& f, double x) {
  const Grid& g = f.grid;
  double s = (x - g.x_min) / g.dx;
  if (s < 0.0 || s > static_cast<double>(g.n - 1)) return 0.0;
  std::size_t j = static_cast<std::size_t>(s);
  if (j >= g.n - 1) return f[g.n - 1];
  double w = s - static_cast<double>(j);
  return (1.0 - w) * f[j] + w * f[j + 1];
}

}  // namespace lwsw
