#pragma once

// Orthonormal type-II DCT (forward) and type-III DCT (inverse), applied
// separably along rows then columns. Direct O(N^2) per line.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "fampe/error.hpp"
#include "fampe/spectral/fft.hpp"
#include "fampe/tensor.hpp"

namespace fampe::spectral {

namespace detail {

// basis[k * n + j] = s_k cos(pi (2j + 1) k / (2n))
inline std::vector<double> dct_basis(std::size_t n) {
  std::vector<double> basis(n * n);
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double sk = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce the angle index mod 4n before scaling to keep cos() arguments small.
      const std::size_t idx = ((2 * j + 1) * k) % (4 * n);
      basis[k * n + j] = (k == 0 ? s0 : sk) * std::cos(std::numbers::pi * static_cast<double>(idx) / (2.0 * static_cast<double>(n)));
    }
  }
  return basis;
}

// Per-thread memo of the most recent basis sizes; values depend only on n.
inline const std::vector<double>& cached_dct_basis(std::size_t n) {
  thread_local std::vector<std::pair<std::size_t, std::vector<double>>> cache;
  for (const auto& [size, basis] : cache) {
    if (size == n) return basis;
  }
  if (cache.size() >= 4) cache.erase(cache.begin());
  cache.emplace_back(n, dct_basis(n));
  return cache.back().second;
}

inline Grid dct_separable(const Grid& in, bool inverse) {
  if (in.empty()) throw Error(errc::invalid_argument, "dct2d: empty grid");
  require_finite_grid(in.data, in.cols, inverse ? "idct2d" : "dct2d");
  const std::size_t rows = in.rows, cols = in.cols;
  const std::vector<double> row_basis = cached_dct_basis(cols);
  const std::vector<double>& col_basis = cached_dct_basis(rows);

  Grid tmp(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < cols; ++j) {
        acc += in(r, j) * (inverse ? row_basis[j * cols + k] : row_basis[k * cols + j]);
      }
      tmp(r, k) = acc;
    }
  }
  Grid out(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t k = 0; k < rows; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < rows; ++j) {
        acc += tmp(j, c) * (inverse ? col_basis[j * rows + k] : col_basis[k * rows + j]);
      }
      out(k, c) = acc;
    }
  }
  return out;
}

} // namespace detail

inline Grid dct2d(const Grid& channel) { return detail::dct_separable(channel, false); }
inline Grid idct2d(const Grid& coefficients) { return detail::dct_separable(coefficients, true); }

} // namespace fampe::spectral
