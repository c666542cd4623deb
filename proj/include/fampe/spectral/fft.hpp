#pragma once

// 2-D discrete Fourier transform on real image channels.
//
// Convention: the forward transform is unnormalized,
//   F(u,v) = sum_{y,x} f(y,x) exp(-2 pi i (u y / H + v x / W)),
// and the inverse carries the full 1/(H*W) factor. Parseval therefore reads
//   sum |f|^2 = (1 / (H*W)) sum |F|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/tensor.hpp"

namespace fampe::spectral {

using Complex = std::complex<double>;

/// Complex frequency grid for a single channel. `shifted` marks the centered
/// layout where the zero-frequency bin sits at (rows/2, cols/2).
struct Spectrum {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> data;
  bool shifted = false;

  Complex& operator()(std::size_t r, std::size_t c) noexcept { return data[r * cols + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
  std::size_t size() const noexcept { return data.size(); }
};

/// Real part of an inverse transform plus the largest discarded imaginary
/// magnitude. The residual is ~1e-16 for Hermitian spectra and grows once the
/// spectrum has been multiplied by a non-symmetric field.
struct RealInverse {
  Grid values;
  double imaginary_residual = 0.0;
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

// Radix-2 twiddles for every stage of a length-n transform:
// table[half - 1 + k] = exp(sign * 2 pi i k / (2 half)) for half = 1, 2, 4, ...
inline std::vector<Complex> radix2_twiddles(std::size_t n, int sign) {
  std::vector<Complex> table(n > 1 ? n - 1 : 0);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
      table[half - 1 + k] = Complex(std::cos(angle), std::sin(angle));
    }
  }
  return table;
}

// Direct-sum twiddles: table[k] = exp(sign * 2 pi i k / n).
inline std::vector<Complex> direct_twiddles(std::size_t n, int sign) {
  std::vector<Complex> table(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    table[k] = Complex(std::cos(angle), std::sin(angle));
  }
  return table;
}

inline std::vector<Complex> twiddles(std::size_t n, int sign) {
  return is_power_of_two(n) ? radix2_twiddles(n, sign) : direct_twiddles(n, sign);
}

// In-place 1-D transform over `n` elements spaced `stride` apart, using a
// table from twiddles(n, sign). Unnormalized in both directions.
inline void transform_1d(Complex* base, std::size_t n, std::size_t stride, const std::vector<Complex>& table,
                         std::vector<Complex>& scratch) {
  if (n == 1) return;
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = base[i * stride];

  if (is_power_of_two(n)) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(scratch[i], scratch[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len / 2;
      for (std::size_t k = 0; k < half; ++k) {
        const Complex w = table[half - 1 + k];
        for (std::size_t start = 0; start < n; start += len) {
          const Complex a = scratch[start + k];
          const Complex b = scratch[start + k + half] * w;
          scratch[start + k] = a + b;
          scratch[start + k + half] = a - b;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) base[i * stride] = scratch[i];
    return;
  }

  // Direct O(n^2) sum for other lengths; the k*j product is reduced mod n so
  // every twiddle angle comes from a small integer.
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += scratch[j] * table[(k * j) % n];
    base[k * stride] = acc;
  }
}

inline void transform_2d(std::vector<Complex>& data, std::size_t rows, std::size_t cols, int sign) {
  std::vector<Complex> scratch;
  const auto row_table = twiddles(cols, sign);
  const auto col_table = rows == cols ? row_table : twiddles(rows, sign);
  for (std::size_t r = 0; r < rows; ++r) transform_1d(data.data() + r * cols, cols, 1, row_table, scratch);
  for (std::size_t c = 0; c < cols; ++c) transform_1d(data.data() + c, rows, cols, col_table, scratch);
}

inline void require_finite_grid(const std::vector<double>& data, std::size_t cols, const char* what) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw Error(errc::non_finite, std::string(what) + ": non-finite entry at (" + std::to_string(i / cols) + ", " +
                                        std::to_string(i % cols) + ")");
    }
  }
}

} // namespace detail

inline Spectrum fft2d(const Grid& channel) {
  if (channel.empty()) throw Error(errc::invalid_argument, "fft2d: empty grid");
  detail::require_finite_grid(channel.data, channel.cols, "fft2d");
  Spectrum out{channel.rows, channel.cols, std::vector<Complex>(channel.data.begin(), channel.data.end()), false};
  detail::transform_2d(out.data, out.rows, out.cols, -1);
  return out;
}

inline RealInverse ifft2d(const Spectrum& spec) {
  if (spec.shifted) throw Error(errc::bad_layout, "ifft2d: spectrum is in shifted layout; apply ifftshift first");
  if (spec.data.empty()) throw Error(errc::invalid_argument, "ifft2d: empty spectrum");
  for (std::size_t i = 0; i < spec.data.size(); ++i) {
    if (!std::isfinite(spec.data[i].real()) || !std::isfinite(spec.data[i].imag())) {
      throw Error(errc::non_finite, "ifft2d: non-finite bin at (" + std::to_string(i / spec.cols) + ", " +
                                        std::to_string(i % spec.cols) + ")");
    }
  }
  std::vector<Complex> work = spec.data;
  detail::transform_2d(work, spec.rows, spec.cols, +1);
  const double scale = 1.0 / static_cast<double>(spec.rows * spec.cols);
  RealInverse out{Grid(spec.rows, spec.cols), 0.0};
  for (std::size_t i = 0; i < work.size(); ++i) {
    out.values.data[i] = work[i].real() * scale;
    out.imaginary_residual = std::max(out.imaginary_residual, std::abs(work[i].imag() * scale));
  }
  return out;
}

namespace detail {

inline Spectrum roll(const Spectrum& in, std::size_t dr, std::size_t dc, bool shifted) {
  Spectrum out{in.rows, in.cols, std::vector<Complex>(in.data.size()), shifted};
  for (std::size_t r = 0; r < in.rows; ++r) {
    const std::size_t rr = (r + dr) % in.rows;
    for (std::size_t c = 0; c < in.cols; ++c) out(rr, (c + dc) % in.cols) = in(r, c);
  }
  return out;
}

} // namespace detail

/// Moves the zero-frequency bin from (0,0) to (rows/2, cols/2).
inline Spectrum fftshift(const Spectrum& spec) {
  if (spec.shifted) throw Error(errc::bad_layout, "fftshift: spectrum is already shifted");
  return detail::roll(spec, spec.rows / 2, spec.cols / 2, true);
}

/// Exact inverse of fftshift, including odd extents.
inline Spectrum ifftshift(const Spectrum& spec) {
  if (!spec.shifted) throw Error(errc::bad_layout, "ifftshift: spectrum is not shifted");
  return detail::roll(spec, spec.rows - spec.rows / 2, spec.cols - spec.cols / 2, false);
}

} // namespace fampe::spectral
