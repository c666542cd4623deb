#pragma once

#include <cmath>
#include <string>

#include "fampe/error.hpp"
#include "fampe/tensor.hpp"

namespace fampe::spectral {

/// Radial boundary between low and high frequencies, in frequency bins.
struct CutoffRadius {
  double value = 0.0;
  friend bool operator==(const CutoffRadius&, const CutoffRadius&) = default;
};

/// Largest distance from the centered DC bin, sqrt((H/2)^2 + (W/2)^2).
inline double max_radius(std::size_t rows, std::size_t cols) {
  const double h = static_cast<double>(rows) / 2.0, w = static_cast<double>(cols) / 2.0;
  return std::sqrt(h * h + w * w);
}

// Squared distance of bin (r, c) from the centered DC bin (rows/2, cols/2);
// integer arithmetic so ring membership tests are exact.
inline long long squared_center_distance(std::size_t rows, std::size_t cols, std::size_t r, std::size_t c) {
  const long long dr = static_cast<long long>(r) - static_cast<long long>(rows / 2);
  const long long dc = static_cast<long long>(c) - static_cast<long long>(cols / 2);
  return dr * dr + dc * dc;
}

enum class MaskKind { lowpass, highpass };

/// Real mask in [0,1] laid out for a shifted (centered) spectrum.
struct FrequencyMask {
  Grid values;
  MaskKind kind = MaskKind::lowpass;
  CutoffRadius cutoff;
};

inline void require_positive_cutoff(CutoffRadius cutoff, const char* what) {
  if (!(cutoff.value > 0.0) || !std::isfinite(cutoff.value)) {
    throw Error(errc::invalid_argument, std::string(what) + ": cutoff must be a finite value > 0, got " +
                                            std::to_string(cutoff.value));
  }
}

/// exp(-D^2 / (2 c^2)) with D measured from the centered DC bin.
inline FrequencyMask gaussian_lowpass_mask(std::size_t rows, std::size_t cols, CutoffRadius cutoff) {
  require_positive_cutoff(cutoff, "gaussian_lowpass_mask");
  if (rows == 0 || cols == 0) throw Error(errc::invalid_argument, "gaussian_lowpass_mask: empty grid");
  FrequencyMask mask{Grid(rows, cols), MaskKind::lowpass, cutoff};
  const double denom = 2.0 * cutoff.value * cutoff.value;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      mask.values(r, c) = std::exp(-static_cast<double>(squared_center_distance(rows, cols, r, c)) / denom);
    }
  }
  return mask;
}

/// Complement of the Gaussian low-pass at the same cutoff.
inline FrequencyMask highpass_mask(std::size_t rows, std::size_t cols, CutoffRadius cutoff) {
  FrequencyMask mask = gaussian_lowpass_mask(rows, cols, cutoff);
  for (double& v : mask.values.data) v = 1.0 - v;
  mask.kind = MaskKind::highpass;
  return mask;
}

} // namespace fampe::spectral
