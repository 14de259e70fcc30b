#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lwsw {

namespace detail {

// Iterative radix-2 Cooley-Tukey. Grids enforce power-of-two n, so this is
// all we need; twiddles are cached per size.
inline const std::vector<std::complex<double>>& twiddles(std::size_t n, bool inverse) {
  thread_local std::size_t cached_n[2] = {0, 0};
  thread_local std::vector<std::complex<double>> cache[2];
  int slot = inverse ? 1 : 0;
  if (cached_n[slot] != n) {
    cache[slot].resize(n / 2);
    double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n / 2; ++k) {
      double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      cache[slot][k] = {std::cos(ang), std::sin(ang)};
    }
    cached_n[slot] = n;
  }
  return cache[slot];
}

inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& tw = twiddles(n, inverse);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> w = tw[k * step];
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

}  // namespace detail

inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> a) {
  detail::fft_inplace(a, false);
  return a;
}

inline std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> a) {
  detail::fft_inplace(a, true);
  return a;
}

/// Fourier wavenumbers for a periodic grid of n nodes and length L, in FFT
/// ordering: k_j = 2*pi*j/L for j < n/2, then negative frequencies.
inline std::vector<double> wavenumbers(std::size_t n, double length) {
  std::vector<double> k(n);
  double base = 2.0 * std::numbers::pi / length;
  for (std::size_t j = 0; j < n; ++j) {
    double m = (j <= n / 2) ? static_cast<double>(j)
                            : static_cast<double>(j) - static_cast<double>(n);
    k[j] = base * m;
  }
  return k;
}

}  // namespace lwsw
